#ifndef VPMM_MESH_HPP
#define VPMM_MESH_HPP

#include <string>
#include <vector>

#include "vpmm/tensor.hpp"

namespace vpmm {

enum class MeshMode { point, fem2d };

// One quadrature point with precomputed shape data in physical coordinates.
struct QuadPoint {
  double w = 0.0;
  Vec x;
  std::vector<int> nodes;     // supporting nodes
  std::vector<double> N;      // shape values
  std::vector<Vec> dN;        // physical shape gradients
};

// Spatial model. Point mode is the homogeneous specialization: a single
// quadrature point of weight |Omega|, no spatial gradients, deformation
// pinned to the affine Dirichlet data. fem2d is a structured n x n grid of
// bilinear quads on the unit square with 2x2 Gauss quadrature.
//
// Energy terms integrate over `qpts`; the dissipation and the duality
// pairing use the lumped nodal rule `lumped_mass` (same total weight), which
// keeps the discrete flow rule pointwise at nodes.
struct Mesh {
  MeshMode mode = MeshMode::point;
  int d = 2;
  int n = 0;  // grid resolution (fem2d)
  double volume = 1.0;

  std::vector<Vec> nodes;
  std::vector<std::array<int, 4>> elements;
  std::vector<QuadPoint> qpts;
  std::vector<double> lumped_mass;
  std::vector<int> dirichlet_nodes;
  std::vector<char> is_dirichlet;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_free_phi() const;

  static Mesh point(int d);
  static Mesh fem2d(int n);
};

using PlasticField = std::vector<Mat>;
using DeformationField = std::vector<Vec>;

// Time-dependent loading: l(t) = s(t) * f0 paired against phi through the
// energy quadrature. Both s and its exact derivative are evaluable.
struct LoadSpec {
  enum class Shape { constant, ramp, sine };
  Shape shape = Shape::constant;
  Vec f0;
  double omega = 1.0;

  double scale(double t) const;
  double scale_dot(double t) const;
  static Shape shape_from_string(const std::string& s);
  static std::string shape_to_string(Shape s);
};

// Mesh plus boundary data and loading: all geometry a run needs.
struct Scenario {
  Mesh mesh;
  Mat F0;  // affine Dirichlet gradient; phi_Dir(x) = F0 x
  LoadSpec load;
};

DeformationField affine_field(const Mesh& mesh, const Mat& F0);
PlasticField constant_plastic_field(const Mesh& mesh, const Mat& P);

// det(P) > 0 at every node and every quadrature point of the interpolant.
bool plastic_field_admissible(const Mesh& mesh, const PlasticField& P);
double min_det_plastic(const Mesh& mesh, const PlasticField& P);

Mat interpolate_mat(const QuadPoint& q, const PlasticField& P);
Vec interpolate_vec(const QuadPoint& q, const DeformationField& phi);
Mat gradient_vec(const QuadPoint& q, const DeformationField& phi);   // d phi / d x
Grad3 gradient_mat(const QuadPoint& q, const PlasticField& P);       // d P / d x_k slices

// Lumped-rule L^p norm of a nodal matrix field.
double lp_norm(const Mesh& mesh, const PlasticField& field, double p);
double lp_norm_diff(const Mesh& mesh, const PlasticField& a, const PlasticField& b, double p);

}  // namespace vpmm

#endif

#include "vpmm/mesh.hpp"

#include <cmath>

#include "vpmm/errors.hpp"

namespace vpmm {

int Mesh::n_free_phi() const {
  int c = 0;
  for (char b : is_dirichlet)
    if (!b) ++c;
  return c;
}

Mesh Mesh::point(int d) {
  Mesh m;
  m.mode = MeshMode::point;
  m.d = d;
  m.n = 0;
  m.volume = 1.0;
  Vec centroid(d);
  for (int i = 0; i < d; ++i) centroid[i] = 0.5;
  m.nodes = {centroid};
  QuadPoint q;
  q.w = m.volume;
  q.x = centroid;
  q.nodes = {0};
  q.N = {1.0};
  q.dN = {Vec(d)};  // no spatial variation
  m.qpts = {q};
  m.lumped_mass = {m.volume};
  m.dirichlet_nodes = {0};
  m.is_dirichlet = {1};
  return m;
}

Mesh Mesh::fem2d(int n) {
  if (n < 1) throw ConfigError("fem2d mesh: n must be >= 1");
  Mesh m;
  m.mode = MeshMode::fem2d;
  m.d = 2;
  m.n = n;
  m.volume = 1.0;
  const int nn = n + 1;
  const double h = 1.0 / n;

  m.nodes.reserve(static_cast<std::size_t>(nn) * nn);
  for (int j = 0; j < nn; ++j)
    for (int i = 0; i < nn; ++i) m.nodes.push_back(Vec::of(i * h, j * h));

  auto id = [nn](int i, int j) { return j * nn + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      m.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});

  // 2x2 Gauss on the reference square [-1,1]^2
  const double g = 1.0 / std::sqrt(3.0);
  const double gp[4][2] = {{-g, -g}, {g, -g}, {g, g}, {-g, g}};
  m.lumped_mass.assign(m.nodes.size(), 0.0);
  for (const auto& el : m.elements) {
    const Vec x0 = m.nodes[static_cast<std::size_t>(el[0])];
    for (const auto& p : gp) {
      const double xi = p[0], et = p[1];
      QuadPoint q;
      q.nodes.assign(el.begin(), el.end());
      q.N = {0.25 * (1 - xi) * (1 - et), 0.25 * (1 + xi) * (1 - et),
             0.25 * (1 + xi) * (1 + et), 0.25 * (1 - xi) * (1 + et)};
      // reference gradients scaled by the affine map jacobian 2/h
      const double s = 2.0 / h;
      q.dN = {Vec::of(-0.25 * (1 - et) * s, -0.25 * (1 - xi) * s),
              Vec::of(0.25 * (1 - et) * s, -0.25 * (1 + xi) * s),
              Vec::of(0.25 * (1 + et) * s, 0.25 * (1 + xi) * s),
              Vec::of(-0.25 * (1 + et) * s, 0.25 * (1 - xi) * s)};
      q.w = (h / 2.0) * (h / 2.0);  // gauss weight 1 each
      q.x = Vec::of(x0[0] + (xi + 1) * h / 2.0, x0[1] + (et + 1) * h / 2.0);
      m.qpts.push_back(q);
      for (int a = 0; a < 4; ++a)
        m.lumped_mass[static_cast<std::size_t>(q.nodes[a])] += q.w * q.N[static_cast<std::size_t>(a)];
    }
  }

  m.is_dirichlet.assign(m.nodes.size(), 0);
  for (int j = 0; j < nn; ++j)
    for (int i = 0; i < nn; ++i)
      if (i == 0 || j == 0 || i == n || j == n) {
        m.is_dirichlet[static_cast<std::size_t>(id(i, j))] = 1;
        m.dirichlet_nodes.push_back(id(i, j));
      }
  return m;
}

double LoadSpec::scale(double t) const {
  switch (shape) {
    case Shape::constant: return 1.0;
    case Shape::ramp: return t;
    case Shape::sine: return std::sin(omega * t);
  }
  return 1.0;
}

double LoadSpec::scale_dot(double t) const {
  switch (shape) {
    case Shape::constant: return 0.0;
    case Shape::ramp: return 1.0;
    case Shape::sine: return omega * std::cos(omega * t);
  }
  return 0.0;
}

LoadSpec::Shape LoadSpec::shape_from_string(const std::string& s) {
  if (s == "constant") return Shape::constant;
  if (s == "ramp") return Shape::ramp;
  if (s == "sine") return Shape::sine;
  throw ConfigError("unknown load shape '" + s + "' (expected constant|ramp|sine)");
}

std::string LoadSpec::shape_to_string(Shape s) {
  switch (s) {
    case Shape::constant: return "constant";
    case Shape::ramp: return "ramp";
    case Shape::sine: return "sine";
  }
  return "constant";
}

DeformationField affine_field(const Mesh& mesh, const Mat& F0) {
  DeformationField phi;
  phi.reserve(mesh.nodes.size());
  for (const Vec& x : mesh.nodes) phi.push_back(mat_vec(F0, x));
  return phi;
}

PlasticField constant_plastic_field(const Mesh& mesh, const Mat& P) {
  return PlasticField(mesh.nodes.size(), P);
}

Mat interpolate_mat(const QuadPoint& q, const PlasticField& P) {
  Mat r(P[static_cast<std::size_t>(q.nodes[0])].dim);
  for (std::size_t a = 0; a < q.nodes.size(); ++a)
    r += P[static_cast<std::size_t>(q.nodes[a])] * q.N[a];
  return r;
}

Vec interpolate_vec(const QuadPoint& q, const DeformationField& phi) {
  Vec r(phi[static_cast<std::size_t>(q.nodes[0])].dim);
  for (std::size_t a = 0; a < q.nodes.size(); ++a) {
    const Vec& p = phi[static_cast<std::size_t>(q.nodes[a])];
    for (int i = 0; i < r.dim; ++i) r[i] += p[i] * q.N[a];
  }
  return r;
}

Mat gradient_vec(const QuadPoint& q, const DeformationField& phi) {
  const int d = phi[static_cast<std::size_t>(q.nodes[0])].dim;
  Mat g(d);
  for (std::size_t a = 0; a < q.nodes.size(); ++a) {
    const Vec& p = phi[static_cast<std::size_t>(q.nodes[a])];
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) g(i, k) += p[i] * q.dN[a][k];
  }
  return g;
}

Grad3 gradient_mat(const QuadPoint& q, const PlasticField& P) {
  const int d = P[static_cast<std::size_t>(q.nodes[0])].dim;
  Grad3 g(static_cast<std::size_t>(d), Mat(d));
  for (std::size_t a = 0; a < q.nodes.size(); ++a) {
    const Mat& m = P[static_cast<std::size_t>(q.nodes[a])];
    for (int k = 0; k < d; ++k) g[static_cast<std::size_t>(k)] += m * q.dN[a][k];
  }
  return g;
}

bool plastic_field_admissible(const Mesh& mesh, const PlasticField& P) {
  return min_det_plastic(mesh, P) > 0.0;
}

double min_det_plastic(const Mesh& mesh, const PlasticField& P) {
  double mn = det(P[0]);
  for (const Mat& m : P) mn = std::min(mn, det(m));
  for (const QuadPoint& q : mesh.qpts) mn = std::min(mn, det(interpolate_mat(q, P)));
  return mn;
}

double lp_norm(const Mesh& mesh, const PlasticField& field, double p) {
  double s = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j)
    s += mesh.lumped_mass[j] * std::pow(frobenius_norm(field[j]), p);
  return std::pow(s, 1.0 / p);
}

double lp_norm_diff(const Mesh& mesh, const PlasticField& a, const PlasticField& b, double p) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    s += mesh.lumped_mass[j] * std::pow(frobenius_norm(a[j] - b[j]), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace vpmm

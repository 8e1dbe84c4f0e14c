#include "vpmm/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace vpmm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::istringstream is(v);
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': cannot parse number '" + tok + "'");
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Mat mat_from_numbers(const std::vector<double>& v, int d, const std::string& key) {
  if (static_cast<int>(v.size()) != d * d)
    throw ConfigError("key '" + key + "': expected " + std::to_string(d * d) +
                      " entries, got " + std::to_string(v.size()));
  Mat m(d);
  for (int k = 0; k < d * d; ++k) m.a[static_cast<std::size_t>(k)] = v[static_cast<std::size_t>(k)];
  if (!m.all_finite()) throw ConfigError("key '" + key + "': non-finite entry");
  return m;
}

class KeyMap {
 public:
  explicit KeyMap(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  const std::string& require(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required key '" + key + "'");
    used_.insert(key);
    return it->second;
  }
  std::string optional(const std::string& key, const std::string& def) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    used_.insert(key);
    return it->second;
  }
  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  void mark_used(const std::string& key) { used_.insert(key); }

  void fail_on_unknown() const {
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) throw ConfigError("unknown key '" + k + "'");
  }

 private:
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

double to_double(const std::string& v, const std::string& key) {
  const auto nums = parse_numbers(v, key);
  if (nums.size() != 1) throw ConfigError("key '" + key + "': expected one number");
  return nums[0];
}

int to_int(const std::string& v, const std::string& key) {
  const double x = to_double(v, key);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x) throw ConfigError("key '" + key + "': expected integer");
  return i;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
    kv[key] = val;
  }

  KeyMap m(std::move(kv));
  RunConfig c;
  c.name = name;

  const std::string schema = m.require("schema");
  if (schema != "vpmm-config-1")
    throw ConfigError("unsupported config schema '" + schema + "' (expected vpmm-config-1)");

  c.mode = m.require("mode");
  if (c.mode != "point" && c.mode != "fem2d")
    throw ConfigError("mode must be point or fem2d, got '" + c.mode + "'");
  c.d = to_int(m.require("d"), "d");
  if (c.mode == "fem2d") {
    if (c.d != 2) throw ConfigError("fem2d requires d = 2");
    c.mesh_n = to_int(m.require("mesh_n"), "mesh_n");
    if (c.mesh_n < 1) throw ConfigError("mesh_n must be >= 1");
  } else {
    m.mark_used("mesh_n");
  }

  c.ex.d = c.d;
  c.ex.q_phi = to_double(m.require("q_phi"), "q_phi");
  c.ex.q_F = to_double(m.require("q_F"), "q_F");
  c.ex.q_P = to_double(m.require("q_P"), "q_P");
  c.ex.q_G = to_double(m.require("q_G"), "q_G");
  c.ex.q_gamma = to_double(m.require("q_gamma"), "q_gamma");
  c.ex.p = to_double(m.require("p"), "p");
  c.ex.validate();
  c.dp.p = c.ex.p;

  c.hp.c1 = to_double(m.require("c1"), "c1");
  c.hp.c2 = to_double(m.require("c2"), "c2");
  c.ep.c3 = to_double(m.require("c3"), "c3");
  c.ep.c4 = to_double(m.require("c4"), "c4");
  c.ep.eta_W = to_double(m.require("eta_W"), "eta_W");
  if (c.hp.c1 <= 0 || c.hp.c2 <= 0 || c.ep.c3 <= 0 || c.ep.c4 <= 0 || c.ep.eta_W <= 0)
    throw ConfigError("c1, c2, c3, c4, eta_W must all be positive");

  c.dp.sigma_yield = to_double(m.require("sigma_yield"), "sigma_yield");
  c.dp.nu = to_double(m.require("nu"), "nu");
  if (c.dp.sigma_yield <= 0 || c.dp.nu <= 0)
    throw ConfigError("sigma_yield and nu must be positive");

  c.eta = to_double(m.require("eta"), "eta");
  if (c.eta < 0) throw ConfigError("eta must be >= 0");
  c.rp.C7 = to_double(m.optional("C7", "1"), "C7");
  c.rp.C8 = to_double(m.optional("C8", "0"), "C8");
  c.rp.q_W = to_double(m.optional("q_W", fmt(std::max(c.ex.q_F, c.d * c.ep.eta_W))), "q_W");
  if (c.rp.q_W < std::max(c.ex.q_F, c.d * c.ep.eta_W) - 1e-12)
    throw ConfigError("q_W must satisfy q_W >= max(q_F, d * eta_W)");

  c.F0 = mat_from_numbers(parse_numbers(m.require("F0"), "F0"), c.d, "F0");
  if (!(det(c.F0) > 0.0)) throw ConfigError("F0 must have positive determinant");

  const std::string p0 = m.require("P0");
  if (p0 == "identity")
    c.P0 = Mat::identity(c.d);
  else
    c.P0 = mat_from_numbers(parse_numbers(p0, "P0"), c.d, "P0");
  if (!(det(c.P0) > 0.0))
    throw ConfigError("initial state violates the admissibility requirement det(P0) > 0");

  const auto f0 = parse_numbers(m.require("load_f0"), "load_f0");
  if (static_cast<int>(f0.size()) != c.d)
    throw ConfigError("load_f0: expected " + std::to_string(c.d) + " components");
  c.load.f0 = Vec(c.d);
  for (int i = 0; i < c.d; ++i) c.load.f0[i] = f0[static_cast<std::size_t>(i)];
  c.load.shape = LoadSpec::shape_from_string(m.require("load_shape"));
  if (c.load.shape == LoadSpec::Shape::sine)
    c.load.omega = to_double(m.require("load_omega"), "load_omega");
  else
    m.mark_used("load_omega");

  c.T = to_double(m.require("T"), "T");
  c.steps = to_int(m.require("steps"), "steps");
  if (!(c.T > 0) || c.steps < 1) throw ConfigError("require T > 0 and steps >= 1");

  c.tol_inner_grad = to_double(m.require("tol_inner_grad"), "tol_inner_grad");
  c.tol_fenchel_gap = to_double(m.require("tol_fenchel_gap"), "tol_fenchel_gap");
  c.tol_residual_scale = to_double(m.require("tol_residual_scale"), "tol_residual_scale");
  c.seed = static_cast<unsigned>(to_int(m.require("seed"), "seed"));
  c.de_giorgi_samples = to_int(m.optional("de_giorgi_samples", "1"), "de_giorgi_samples");
  c.study_levels = to_int(m.optional("study_levels", "3"), "study_levels");
  c.out_csv = m.optional("out_csv", "");
  c.out_json = m.optional("out_json", "");

  m.fail_on_unknown();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string name = path;
  const auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  return parse_config_text(ss.str(), name);
}

std::string RunConfig::canonical_text() const {
  std::ostringstream o;
  o << "C7=" << fmt(rp.C7) << "\n";
  o << "C8=" << fmt(rp.C8) << "\n";
  o << "F0=";
  for (int k = 0; k < d * d; ++k) o << (k ? " " : "") << fmt(F0.a[static_cast<std::size_t>(k)]);
  o << "\n";
  o << "P0=";
  for (int k = 0; k < d * d; ++k) o << (k ? " " : "") << fmt(P0.a[static_cast<std::size_t>(k)]);
  o << "\n";
  o << "T=" << fmt(T) << "\n";
  o << "c1=" << fmt(hp.c1) << "\nc2=" << fmt(hp.c2) << "\nc3=" << fmt(ep.c3) << "\nc4="
    << fmt(ep.c4) << "\n";
  o << "d=" << d << "\n";
  o << "de_giorgi_samples=" << de_giorgi_samples << "\n";
  o << "eta=" << fmt(eta) << "\neta_W=" << fmt(ep.eta_W) << "\n";
  o << "load_f0=";
  for (int i = 0; i < d; ++i) o << (i ? " " : "") << fmt(load.f0[i]);
  o << "\n";
  o << "load_omega=" << fmt(load.omega) << "\n";
  o << "load_shape=" << LoadSpec::shape_to_string(load.shape) << "\n";
  o << "mesh_n=" << mesh_n << "\n";
  o << "mode=" << mode << "\n";
  o << "nu=" << fmt(dp.nu) << "\n";
  o << "p=" << fmt(ex.p) << "\n";
  o << "q_F=" << fmt(ex.q_F) << "\nq_G=" << fmt(ex.q_G) << "\nq_P=" << fmt(ex.q_P)
    << "\nq_W=" << fmt(rp.q_W) << "\nq_gamma=" << fmt(ex.q_gamma) << "\nq_phi=" << fmt(ex.q_phi)
    << "\n";
  o << "seed=" << seed << "\n";
  o << "sigma_yield=" << fmt(dp.sigma_yield) << "\n";
  o << "steps=" << steps << "\n";
  o << "study_levels=" << study_levels << "\n";
  o << "tol_fenchel_gap=" << fmt(tol_fenchel_gap) << "\n";
  o << "tol_inner_grad=" << fmt(tol_inner_grad) << "\n";
  o << "tol_residual_scale=" << fmt(tol_residual_scale) << "\n";
  return o.str();
}

std::string RunConfig::hash() const {
  // FNV-1a over the canonical text
  const std::string text = canonical_text();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario RunConfig::make_scenario() const {
  Scenario sc;
  sc.mesh = mode == "point" ? Mesh::point(d) : Mesh::fem2d(mesh_n);
  sc.F0 = F0;
  sc.load = load;
  return sc;
}

ModelParams RunConfig::make_params() const {
  ModelParams mp;
  mp.ex = ex;
  mp.hp = hp;
  mp.ep = ep;
  mp.dp = dp;
  mp.rp = rp;
  mp.eta = eta;
  return mp;
}

TimeGrid RunConfig::make_grid() const { return TimeGrid{T, steps}; }

PlasticField RunConfig::make_initial_state() const {
  const Mesh mesh = mode == "point" ? Mesh::point(d) : Mesh::fem2d(mesh_n);
  PlasticField P0_field = constant_plastic_field(mesh, P0);
  if (!plastic_field_admissible(mesh, P0_field))
    throw ConfigError("initial state violates the admissibility requirement det(P) > 0");
  return P0_field;
}

StepOptions RunConfig::make_step_options() const {
  StepOptions so;
  so.gap_tol_rel = tol_fenchel_gap;
  so.gap_target_rel = std::max(1e-12, tol_fenchel_gap * 1e-4);
  so.slack_tol_rel = 1e-10;
  so.pblock.grad_tol = 1e-9;
  so.pblock.max_iters = 250;
  return so;
}

std::unique_ptr<ViscoplasticSystem> RunConfig::make_system() const {
  LbfgsOptions inner;
  inner.grad_tol = tol_inner_grad;
  inner.max_iters = 500;
  return std::make_unique<ViscoplasticSystem>(make_scenario(), make_params(), inner);
}

}  // namespace vpmm

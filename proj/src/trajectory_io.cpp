#include "vpmm/trajectory_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vpmm {

namespace {

std::string hexf(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_field(const std::string& cell, int row, SchemaMismatch* /*tag*/ = nullptr) {
  const char* s = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw IoError("trajectory csv: bad numeric cell '" + cell + "' at row " +
                  std::to_string(row));
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void append_scalar_cols(std::ostringstream& o, const StepRecord& r, double prefix_residual) {
  o << ',' << hexf(r.energy) << ',' << hexf(r.psi_inc) << ',' << hexf(r.psi_star_inc) << ','
    << hexf(r.power_inc) << ',' << hexf(r.power_value) << ',' << hexf(r.fenchel_gap) << ','
    << hexf(r.comparison_slack) << ',' << hexf(prefix_residual) << ',' << hexf(r.min_det_P)
    << ',' << hexf(r.inner_grad_norm) << ',' << r.inner_iterations;
}

}  // namespace

std::string trajectory_csv_text(const Trajectory& traj, const std::string& mode) {
  const int nn = static_cast<int>(traj.P0.size());
  const int d = traj.P0[0].dim;
  std::ostringstream o;
  o << "vpmm-csv-1,hash=" << traj.config_hash << ",mode=" << mode << ",d=" << d
    << ",nodes=" << nn << ",N=" << traj.grid.N << ",T=" << hexf(traj.grid.T)
    << ",E0=" << hexf(traj.E0) << ",rejected=" << (traj.rejected ? 1 : 0)
    << ",rejected_at=" << traj.rejected_at << "\n";

  o << "step,t,E,psi_inc,psi_star_inc,power_inc,power_value,fenchel_gap,comparison_slack,"
       "edi_prefix_residual,min_det_P,inner_grad_norm,inner_iterations";
  for (int j = 0; j < nn; ++j)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) o << ",P_" << j << '_' << r << c;
  for (int j = 0; j < nn; ++j)
    for (int i = 0; i < d; ++i) o << ",phi_" << j << '_' << i;
  for (int j = 0; j < nn; ++j)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) o << ",Xi_" << j << '_' << r << c;
  o << "\n";

  auto write_state = [&](int step, double t, const PlasticField& P, const DeformationField* phi,
                         const std::vector<Mat>* xi, const StepRecord* rec,
                         double prefix_residual) {
    o << step << ',' << hexf(t);
    if (rec) {
      append_scalar_cols(o, *rec, prefix_residual);
    } else {
      o << ',' << hexf(traj.E0);
      for (int k = 0; k < 9; ++k) o << ',' << hexf(0.0);
      o << ",0";
    }
    for (int j = 0; j < nn; ++j)
      for (int k = 0; k < d * d; ++k)
        o << ',' << hexf(P[static_cast<std::size_t>(j)].a[static_cast<std::size_t>(k)]);
    for (int j = 0; j < nn; ++j)
      for (int i = 0; i < d; ++i)
        o << ',' << hexf(phi ? (*phi)[static_cast<std::size_t>(j)][i] : 0.0);
    for (int j = 0; j < nn; ++j)
      for (int k = 0; k < d * d; ++k)
        o << ','
          << hexf(xi ? (*xi)[static_cast<std::size_t>(j)].a[static_cast<std::size_t>(k)] : 0.0);
    o << "\n";
  };

  write_state(0, 0.0, traj.P0, nullptr, nullptr, nullptr, 0.0);
  for (int n = 1; n <= traj.n_steps(); ++n) {
    const StepRecord& r = traj.steps[static_cast<std::size_t>(n - 1)];
    write_state(n, r.t, r.P, &r.phi, &r.xi, &r, edi_residual(traj, 0, n));
  }
  return o.str();
}

void serialize_trajectory(const Trajectory& traj, const std::string& mode,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << trajectory_csv_text(traj, mode);
  if (!out) throw IoError("write failed for '" + path + "'");
}

LoadedTrajectory load_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trajectory file '" + path + "'");

  auto head = split_csv(line);
  if (head.empty() || head[0] != "vpmm-csv-1")
    throw SchemaMismatch("trajectory csv: expected version vpmm-csv-1, got '" +
                         (head.empty() ? std::string("?") : head[0]) + "'");
  LoadedTrajectory out;
  int nn = 0, d = 0, N = 0;
  for (std::size_t i = 1; i < head.size(); ++i) {
    const auto eq = head[i].find('=');
    if (eq == std::string::npos) throw SchemaMismatch("trajectory csv: bad header field");
    const std::string k = head[i].substr(0, eq), v = head[i].substr(eq + 1);
    if (k == "hash") out.traj.config_hash = v;
    else if (k == "mode") out.mode = v;
    else if (k == "d") d = std::atoi(v.c_str());
    else if (k == "nodes") nn = std::atoi(v.c_str());
    else if (k == "N") N = std::atoi(v.c_str());
    else if (k == "T") out.traj.grid.T = parse_field(v, 0);
    else if (k == "E0") out.traj.E0 = parse_field(v, 0);
    else if (k == "rejected") out.traj.rejected = v == "1";
    else if (k == "rejected_at") out.traj.rejected_at = std::atoi(v.c_str());
    else throw SchemaMismatch("trajectory csv: unknown header field '" + k + "'");
  }
  if (nn <= 0 || (d != 2 && d != 3) || N < 0) throw SchemaMismatch("trajectory csv: bad sizes");
  out.traj.grid.N = N;

  if (!std::getline(in, line)) throw IoError("trajectory csv truncated at row 1 (header)");
  const std::size_t expected_cols = 13 + static_cast<std::size_t>(nn) * (2u * d * d + d);

  const int rows_expected =
      out.traj.rejected ? out.traj.rejected_at - 1 : N;  // accepted steps on file
  int row = 0;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != expected_cols)
      throw IoError("trajectory csv: row " + std::to_string(row) + " has " +
                    std::to_string(cells.size()) + " cells, expected " +
                    std::to_string(expected_cols));
    std::size_t c = 0;
    const int step = std::atoi(cells[c++].c_str());
    if (step != row)
      throw IoError("trajectory csv: unexpected step index at row " + std::to_string(row));
    const double t = parse_field(cells[c++], row);
    StepRecord rec;
    rec.t = t;
    rec.energy = parse_field(cells[c++], row);
    rec.psi_inc = parse_field(cells[c++], row);
    rec.psi_star_inc = parse_field(cells[c++], row);
    rec.power_inc = parse_field(cells[c++], row);
    rec.power_value = parse_field(cells[c++], row);
    rec.fenchel_gap = parse_field(cells[c++], row);
    rec.comparison_slack = parse_field(cells[c++], row);
    parse_field(cells[c++], row);  // prefix residual column is derived
    rec.min_det_P = parse_field(cells[c++], row);
    rec.inner_grad_norm = parse_field(cells[c++], row);
    rec.inner_iterations = std::atoi(cells[c++].c_str());

    PlasticField P(static_cast<std::size_t>(nn), Mat(d));
    for (int j = 0; j < nn; ++j)
      for (int k = 0; k < d * d; ++k)
        P[static_cast<std::size_t>(j)].a[static_cast<std::size_t>(k)] =
            parse_field(cells[c++], row);
    DeformationField phi(static_cast<std::size_t>(nn), Vec(d));
    for (int j = 0; j < nn; ++j)
      for (int i = 0; i < d; ++i) phi[static_cast<std::size_t>(j)][i] = parse_field(cells[c++], row);
    std::vector<Mat> xi(static_cast<std::size_t>(nn), Mat(d));
    for (int j = 0; j < nn; ++j)
      for (int k = 0; k < d * d; ++k)
        xi[static_cast<std::size_t>(j)].a[static_cast<std::size_t>(k)] =
            parse_field(cells[c++], row);

    if (row == 0) {
      out.traj.P0 = P;
    } else {
      rec.P = std::move(P);
      rec.phi = std::move(phi);
      rec.xi = std::move(xi);
      out.traj.steps.push_back(std::move(rec));
    }
    ++row;
  }
  if (row != rows_expected + 1)
    throw IoError("trajectory csv truncated: found " + std::to_string(row) +
                  " state rows, expected " + std::to_string(rows_expected + 1) +
                  " (failure at row " + std::to_string(row) + ")");
  return out;
}

std::string summary_json_text(const Trajectory& traj, const std::string& mode) {
  nlohmann::json j;
  j["schema"] = "vpmm-json-1";
  j["config_hash"] = traj.config_hash;
  j["mode"] = mode;
  j["d"] = traj.P0[0].dim;
  j["N"] = traj.grid.N;
  j["T"] = traj.grid.T;
  j["E0"] = traj.E0;
  double psi = 0, psi_star = 0, power = 0, max_gap = 0, min_slack = 0, min_det = 1e300;
  for (const auto& r : traj.steps) {
    psi += r.psi_inc;
    psi_star += r.psi_star_inc;
    power += r.power_inc;
    max_gap = std::max(max_gap, r.fenchel_gap);
    min_slack = std::min(min_slack, r.comparison_slack);
    min_det = std::min(min_det, r.min_det_P);
  }
  j["steps_accepted"] = traj.n_steps();
  j["E_final"] = traj.steps.empty() ? traj.E0 : traj.steps.back().energy;
  j["total_psi"] = psi;
  j["total_psi_star"] = psi_star;
  j["total_power"] = power;
  j["max_fenchel_gap"] = max_gap;
  j["min_comparison_slack"] = min_slack;
  j["min_det_P"] = traj.steps.empty() ? 0.0 : min_det;
  j["max_edi_prefix_residual"] = traj.steps.empty() ? 0.0 : max_edi_prefix_residual(traj);
  j["rejected"] = traj.rejected;
  j["rejected_at"] = traj.rejected_at;
  j["reject_reason"] = traj.reject_reason;
  return j.dump(2) + "\n";
}

void write_summary_json(const Trajectory& traj, const std::string& mode,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << summary_json_text(traj, mode);
}

std::string diagnostics_json_text(const DiagnosticsReport& report) {
  nlohmann::json j;
  j["schema"] = "vpmm-json-1";
  j["all_pass"] = report.all_pass();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : report.entries) {
    nlohmann::json je;
    je["name"] = e.name;
    je["tag"] = e.tag;
    je["value"] = e.value;
    je["tolerance"] = e.tolerance;
    je["pass"] = e.pass;
    je["detail"] = e.detail;
    arr.push_back(je);
  }
  j["residuals"] = arr;
  return j.dump(2) + "\n";
}

void write_diagnostics_json(const DiagnosticsReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << diagnostics_json_text(report);
}

std::string diagnostics_table_text(const DiagnosticsReport& report) {
  std::ostringstream o;
  char buf[256];
  for (const auto& e : report.entries) {
    std::snprintf(buf, sizeof(buf), "%-6s %-34s %-26s %12.5g  (tol %10.3g)  %s\n",
                  e.pass ? "PASS" : "FAIL", e.name.c_str(), e.tag.c_str(), e.value,
                  e.tolerance, e.detail.c_str());
    o << buf;
  }
  o << (report.all_pass() ? "ALL PASS" : "FAILURES PRESENT") << "\n";
  return o.str();
}

}  // namespace vpmm

#include "blip/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace blip::io {

using nlohmann::json;

namespace {

json parse_line(const std::string& line, std::size_t lineno) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
  }
}

template <typename F>
void for_each_record(std::istream& is, F&& f) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = parse_line(line, lineno);
    if (!j.is_object()) throw ValidationError("line " + std::to_string(lineno) + ": expected an object");
    try {
      f(j);
    } catch (const json::exception& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

json region_to_json(const Region& r) {
  json j;
  if (const auto* s = std::get_if<IndexSet>(&r)) {
    j["kind"] = "index";
    j["indices"] = s->indices;
  } else if (const auto* sp = std::get_if<Sphere>(&r)) {
    j["kind"] = "sphere";
    j["center"] = sp->center;
    j["radius"] = sp->radius;
  } else {
    const auto& c = std::get<Cube>(r);
    j["kind"] = "cube";
    j["center"] = c.center;
    j["halfwidth"] = c.halfwidth;
  }
  return j;
}

Region region_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "index") return make_index_set(j.at("indices").get<std::vector<Index>>());
  if (kind == "sphere") return Sphere{j.at("center").get<std::vector<double>>(), j.at("radius").get<double>()};
  if (kind == "cube") return Cube{j.at("center").get<std::vector<double>>(), j.at("halfwidth").get<double>()};
  throw ValidationError("unknown region kind: " + kind);
}

json group_to_json(const CandidateGroup& g) {
  json j;
  j["id"] = g.id;
  j["region"] = region_to_json(g.region);
  if (g.count_interval) j["count_interval"] = {g.count_interval->lo, g.count_interval->hi};
  if (g.weight) j["weight"] = *g.weight;
  j["pip"] = g.pip;
  return j;
}

CandidateGroup group_from_json(const json& j) {
  CandidateGroup g;
  g.region = region_from_json(j.at("region"));
  if (j.contains("count_interval")) {
    const auto ci = j.at("count_interval").get<std::vector<int>>();
    if (ci.size() != 2) throw ValidationError("count_interval needs two entries");
    g.count_interval = CountInterval{ci[0], ci[1]};
  }
  g.id = j.contains("id") ? j.at("id").get<GroupId>() : canonical_id(g.region, g.count_interval);
  if (j.contains("weight")) g.weight = j.at("weight").get<double>();
  if (j.contains("pip")) g.pip = j.at("pip").get<double>();
  validate_group(g);
  return g;
}

json spec_to_json(const ErrorRateSpec& s) {
  return {{"kind", error_kind_name(s.kind)}, {"q", s.q}, {"v", s.v}, {"grid_tol", s.grid_tol}};
}

ErrorRateSpec spec_from_json(const json& j) {
  ErrorRateSpec s;
  s.kind = parse_error_kind(j.at("kind").get<std::string>());
  s.q = j.value("q", 0.0);
  s.v = j.value("v", 0.0);
  s.grid_tol = j.value("grid_tol", 1e-3);
  return s;
}

bool parse_number(const std::string& tok, double& out) {
  std::size_t b = tok.find_first_not_of(" \t\r\"");
  std::size_t e = tok.find_last_not_of(" \t\r\"");
  if (b == std::string::npos) return false;
  const std::string t = tok.substr(b, e - b + 1);
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_groups(std::ostream& os, const std::vector<CandidateGroup>& groups) {
  for (const auto& g : groups) os << group_to_json(g).dump() << '\n';
}

std::vector<CandidateGroup> read_groups(std::istream& is) {
  std::vector<CandidateGroup> out;
  for_each_record(is, [&](const json& j) { out.push_back(group_from_json(j)); });
  return out;
}

void write_samples(std::ostream& os, const SampleSet& samples) {
  if (!samples.is_discrete()) os << json{{"format", "samples"}, {"dim", samples.dim}}.dump() << '\n';
  for (std::size_t i = 0; i < samples.size(); ++i) {
    json j;
    j["chain"] = i < samples.chain.size() ? samples.chain[i] : 0;
    if (samples.is_discrete()) {
      j["signals"] = samples.signals[i];
    } else {
      json pts = json::array();
      for (std::size_t k = 0; k < samples.points_in_row(i); ++k) {
        auto p = samples.point(i, k);
        pts.push_back(std::vector<double>(p.begin(), p.end()));
      }
      j["points"] = std::move(pts);
    }
    os << j.dump() << '\n';
  }
}

SampleSet read_samples(std::istream& is) {
  SampleSet s;
  bool seen_row = false;
  bool continuous = false;
  for_each_record(is, [&](const json& j) {
    if (j.contains("format")) {
      if (seen_row) throw ValidationError("samples header must come first");
      s.dim = j.at("dim").get<std::size_t>();
      continuous = s.dim > 0;
      return;
    }
    const int chain = j.value("chain", 0);
    if (j.contains("signals")) {
      if (continuous) throw ValidationError("discrete row in a continuous samples file");
      s.add_discrete(j.at("signals").get<std::vector<Index>>(), chain);
    } else if (j.contains("points")) {
      std::vector<double> flat;
      for (const auto& pt : j.at("points")) {
        const auto v = pt.get<std::vector<double>>();
        if (!continuous) {
          if (seen_row && s.dim == 0) throw ValidationError("continuous row in a discrete samples file");
          s.dim = v.size();
          continuous = true;
        }
        if (v.size() != s.dim) throw ValidationError("sample point has the wrong dimension");
        flat.insert(flat.end(), v.begin(), v.end());
      }
      if (!continuous) throw ValidationError("continuous samples need a dimension header");
      s.add_continuous(std::move(flat), chain);
    } else {
      throw ValidationError("sample row needs signals or points");
    }
    seen_row = true;
  });
  s.validate();
  return s;
}

void write_pips(std::ostream& os, const PipTable& table) {
  std::vector<std::pair<GroupId, double>> rows(table.pips.begin(), table.pips.end());
  std::sort(rows.begin(), rows.end());
  for (const auto& [id, p] : rows) os << json{{"id", id}, {"pip", p}}.dump() << '\n';
  for (const auto& [l, m] : table.marginals) os << json{{"location", l}, {"marginal", m}}.dump() << '\n';
}

PipTable read_pips(std::istream& is) {
  PipTable t;
  for_each_record(is, [&](const json& j) {
    if (j.contains("id")) {
      const double p = j.at("pip").get<double>();
      if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("pip outside [0,1]");
      t.pips[j.at("id").get<GroupId>()] = p;
    } else if (j.contains("location")) {
      t.marginals[j.at("location").get<Index>()] = j.at("marginal").get<double>();
    } else {
      throw ValidationError("pip row needs id or location");
    }
  });
  return t;
}

Eigen::MatrixXd read_matrix_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto toks = split_csv(line);
    std::vector<double> row(toks.size());
    bool ok = true;
    for (std::size_t i = 0; i < toks.size() && ok; ++i) ok = parse_number(toks[i], row[i]);
    if (!ok) {
      if (rows.empty() && lineno == 1) continue;
      throw ValidationError("csv line " + std::to_string(lineno) + ": non-numeric entry");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ValidationError("csv line " + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return {};
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return M;
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& M, const std::vector<std::string>& header) {
  if (!header.empty()) {
    if (static_cast<Eigen::Index>(header.size()) != M.cols()) throw ValidationError("header width mismatch");
    for (std::size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
    os << '\n';
  }
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? "," : "") << format_double(M(i, j));
    os << '\n';
  }
}

SusieAlphas read_susie_csv(std::istream& is) {
  SusieAlphas a{read_matrix_csv(is)};
  if (a.alpha.size() == 0) throw ValidationError("empty SuSiE alpha matrix");
  a.validate();
  return a;
}

DataSet read_data_csv(std::istream& is) {
  const Eigen::MatrixXd M = read_matrix_csv(is);
  if (M.cols() < 2 || M.rows() < 1) throw ValidationError("data csv needs at least one feature and a response");
  return {M.leftCols(M.cols() - 1), M.col(M.cols() - 1)};
}

void write_data_csv(std::ostream& os, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (y.size() != X.rows()) throw ValidationError("response length mismatch");
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < X.cols(); ++j) header.push_back("x" + std::to_string(j));
  header.emplace_back("y");
  Eigen::MatrixXd M(X.rows(), X.cols() + 1);
  M << X, y;
  write_matrix_csv(os, M, header);
}

void write_detection(std::ostream& os, const DetectionSet& det, const std::optional<Certificate>& cert) {
  json j;
  j["error_spec"] = spec_to_json(det.error_spec);
  json disc = json::array();
  for (const auto& d : det.discoveries) {
    json g = group_to_json(d.group);
    g["selection_prob"] = d.selection_prob;
    disc.push_back(std::move(g));
  }
  j["discoveries"] = std::move(disc);
  j["objective"] = det.objective;
  j["upper_bound"] = det.upper_bound;
  j["budget_used"] = det.error_budget_used;
  const auto& r = det.report;
  j["flags"] = {{"n_candidates", r.n_candidates},
                {"n_noninteger", r.n_noninteger},
                {"backtrack_steps", r.backtrack_steps},
                {"used_randomized_rounding", r.used_randomized_rounding},
                {"used_exact_search", r.used_exact_search},
                {"residual_optimal", r.residual_optimal}};
  json relaxed = json::array();
  for (const auto& [id, x] : r.relaxed) relaxed.push_back({{"id", id}, {"x", x}});
  j["relaxed"] = std::move(relaxed);
  if (cert) {
    j["certificate"] = {{"passed", cert->passed()},      {"disjoint", cert->disjoint},
                        {"budget_ok", cert->budget_ok},  {"objective_ok", cert->objective_ok},
                        {"gap_ok", cert->gap_ok},        {"objective", cert->objective},
                        {"budget_used", cert->budget_used}, {"gap", cert->gap}};
  }
  os << j.dump(2) << '\n';
}

DetectionSet read_detection(std::istream& is) {
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("detection file: ") + e.what());
  }
  try {
    DetectionSet det;
    det.error_spec = spec_from_json(j.at("error_spec"));
    for (const auto& d : j.at("discoveries")) {
      Discovery disc;
      disc.group = group_from_json(d);
      disc.selection_prob = d.value("selection_prob", 1.0);
      det.discoveries.push_back(std::move(disc));
    }
    det.objective = j.value("objective", 0.0);
    det.upper_bound = j.value("upper_bound", 0.0);
    det.error_budget_used = j.value("budget_used", 0.0);
    if (j.contains("flags")) {
      const auto& f = j.at("flags");
      det.report.n_candidates = f.value("n_candidates", std::size_t{0});
      det.report.n_noninteger = f.value("n_noninteger", std::size_t{0});
      det.report.backtrack_steps = f.value("backtrack_steps", std::size_t{0});
      det.report.used_randomized_rounding = f.value("used_randomized_rounding", false);
      det.report.used_exact_search = f.value("used_exact_search", false);
      det.report.residual_optimal = f.value("residual_optimal", true);
    }
    if (j.contains("relaxed")) {
      for (const auto& r : j.at("relaxed")) det.report.relaxed.emplace_back(r.at("id").get<GroupId>(), r.at("x").get<double>());
    }
    return det;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("detection file: ") + e.what());
  }
}

void write_truth(std::ostream& os, const Truth& truth) {
  json j;
  if (truth.dim == 0) {
    j["signals"] = truth.signals;
  } else {
    j["dim"] = truth.dim;
    json pts = json::array();
    for (std::size_t i = 0; i < truth.size(); ++i)
      pts.push_back(std::vector<double>(truth.points.begin() + static_cast<std::ptrdiff_t>(i * truth.dim),
                                        truth.points.begin() + static_cast<std::ptrdiff_t>((i + 1) * truth.dim)));
    j["points"] = std::move(pts);
  }
  os << j.dump() << '\n';
}

Truth read_truth(std::istream& is) {
  try {
    const json j = json::parse(is);
    if (j.contains("signals")) return Truth::discrete(j.at("signals").get<std::vector<Index>>());
    const auto dim = j.at("dim").get<std::size_t>();
    if (dim == 0) throw ValidationError("truth dim must be positive");
    std::vector<double> flat;
    for (const auto& p : j.at("points")) {
      const auto v = p.get<std::vector<double>>();
      if (v.size() != dim) throw ValidationError("truth point has the wrong dimension");
      flat.insert(flat.end(), v.begin(), v.end());
    }
    return Truth::continuous(std::move(flat), dim);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("truth file: ") + e.what());
  }
}

SimConfig read_sim_config(std::istream& is) {
  try {
    const json j = json::parse(is);
    SimConfig cfg;
    cfg.seed = j.value("seed", std::uint64_t{0});
    for (const auto& s : j.at("scenarios")) {
      Scenario sc;
      sc.name = s.value("name", sc.name);
      sc.n = s.value("n", sc.n);
      sc.p = s.value("p", sc.p);
      sc.k = s.value("k", sc.k);
      sc.s = s.value("s", sc.s);
      sc.tau2 = s.value("tau2", sc.tau2);
      sc.sigma2 = s.value("sigma2", sc.sigma2);
      sc.link = parse_link(s.value("link", link_name(sc.link)));
      sc.error = s.value("error", sc.error);
      sc.q = s.value("q", sc.q);
      sc.methods = s.value("methods", sc.methods);
      sc.replicates = s.value("replicates", sc.replicates);
      sc.n_iter = s.value("n_iter", sc.n_iter);
      sc.burn_in = s.value("burn_in", sc.burn_in);
      sc.chains = s.value("chains", sc.chains);
      sc.block_size = s.value("block_size", sc.block_size);
      sc.max_group_size = s.value("max_group_size", sc.max_group_size);
      sc.validate();
      cfg.scenarios.push_back(std::move(sc));
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

void write_sim_rows(std::ostream& os, const std::vector<SimRow>& rows, bool timing) {
  os << "scenario,replicate,method,power,normalized_power,fdp,n_discoveries,runtime_ms\n";
  for (const auto& r : rows) {
    os << r.scenario << ',' << r.replicate << ',' << r.method << ',' << format_double(r.power) << ','
       << format_double(r.normalized_power) << ',' << format_double(r.fdp) << ',' << r.n_discoveries << ','
       << (timing ? format_double(r.runtime_ms) : std::string("NA")) << '\n';
  }
}

}  // namespace blip::io

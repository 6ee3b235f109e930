#include "blip/blip.hpp"

#include <algorithm>
#include <cmath>

#include "blip/ecc.hpp"

namespace blip {

std::vector<LpRow> disjointness_rows(const std::vector<CandidateGroup>& groups) {
  if (groups.empty()) return {};
  if (is_index_set(groups.front().region)) return location_constraints(groups);
  const auto graph = build_intersection_graph(groups);
  return clique_constraints(edge_clique_cover(graph));
}

AssembledProblem assemble_problem(const std::vector<CandidateGroup>& groups, const WeightFn& weight,
                                  const ErrorRateSpec& spec, std::optional<std::vector<LpRow>> rows) {
  spec.validate();
  AssembledProblem ap;
  ap.spec = spec;
  if (spec.kind == ErrorKind::LocalFDR) {
    if (rows) {
      for (const auto& g : groups) {
        if (g.pip < 1.0 - spec.q)
          throw ValidationError("local FDR rows given for groups below the 1 - q floor");
      }
    }
    for (const auto& g : groups) {
      if (g.pip >= 1.0 - spec.q) ap.groups.push_back(g);
    }
  } else {
    ap.groups = groups;
  }
  const std::size_t n = ap.groups.size();
  for (auto& g : ap.groups) {
    if (!(g.pip >= 0.0 && g.pip <= 1.0)) throw ValidationError("every group needs a pip in [0,1]");
    g.weight = weight(g);
    ap.lp.objective.push_back(g.pip * *g.weight);
    ap.lp.ids.push_back(g.id);
  }
  if (spec.kind != ErrorKind::LocalFDR) {
    LpRow budget;
    budget.kind = RowKind::Budget;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = ap.groups[j].pip;
      const double c = spec.kind == ErrorKind::FDR ? (1.0 - spec.q) - p : 1.0 - p;
      budget.coeffs.emplace_back(static_cast<int>(j), c);
    }
    if (spec.kind == ErrorKind::FDR) budget.rhs = 0.0;
    else if (spec.kind == ErrorKind::PFER) budget.rhs = spec.v;
    else budget.rhs = spec.v > 0.0 ? spec.v : spec.q;
    ap.lp.rows.push_back(std::move(budget));
  }
  auto packing = rows ? std::move(*rows) : disjointness_rows(ap.groups);
  for (auto& r : packing) {
    r.kind = RowKind::Packing;
    ap.lp.rows.push_back(std::move(r));
  }
  ap.lp.validate();
  return ap;
}

std::vector<CandidateGroup> attach_pips(std::vector<CandidateGroup> groups, const PipTable& table) {
  for (auto& g : groups) {
    auto it = table.pips.find(g.id);
    if (it == table.pips.end()) throw ValidationError("no pip for group " + std::to_string(g.id));
    g.pip = it->second;
  }
  return groups;
}

namespace {

DetectionSet solve_assembled(const AssembledProblem& ap, const BlipOptions& opts) {
  DetectionSet det;
  det.error_spec = ap.spec;
  const LpProblem& lp = ap.lp;
  const int n = lp.n_vars();
  det.report.n_candidates = static_cast<std::size_t>(n);
  if (n == 0) return det;

  const LpSolution rel = solve_relaxed(lp);
  if (rel.status != LpStatus::Optimal) throw InternalError("relaxed LP did not reach optimality");
  det.upper_bound = rel.objective;
  const double tol = opts.integrality_tol;
  std::vector<FixState> fixed(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double v = rel.x[static_cast<std::size_t>(j)];
    if (v > 0.0) det.report.relaxed.emplace_back(ap.groups[static_cast<std::size_t>(j)].id, v);
    fixed[static_cast<std::size_t>(j)] = v <= tol ? 0 : (v >= 1.0 - tol ? 1 : -1);
  }
  det.report.n_noninteger = static_cast<std::size_t>(std::count(fixed.begin(), fixed.end(), FixState{-1}));

  std::vector<double> pips(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) pips[static_cast<std::size_t>(j)] = ap.groups[static_cast<std::size_t>(j)].pip;

  IntegerOptions io = opts.integer;
  io.bnb_limit = std::max(io.bnb_limit, opts.rounding_threshold);
  std::vector<double> x;
  while (true) {
    const auto n_free = std::count(fixed.begin(), fixed.end(), FixState{-1});
    if (n_free > opts.rounding_threshold) {
      x = randomized_rounding(lp, rel.x, pips, opts.seed, opts.n_sample);
      det.report.used_randomized_rounding = true;
      break;
    }
    const IntegerResult res = solve_residual_integer(lp, fixed, io);
    if (!res.optimal) det.report.residual_optimal = false;
    if (res.feasible) {
      x = res.x;
      break;
    }
    int victim = -1;
    for (int j = 0; j < n; ++j) {
      if (fixed[static_cast<std::size_t>(j)] != 1) continue;
      if (victim < 0 || pips[static_cast<std::size_t>(j)] < pips[static_cast<std::size_t>(victim)]) victim = j;
    }
    if (victim < 0) throw InternalError("backtracking exhausted without a feasible point");
    fixed[static_cast<std::size_t>(victim)] = -1;
    ++det.report.backtrack_steps;
  }

  double obj = lp.value(x);
  if (det.upper_bound - obj > 1e-9 * std::max(1.0, std::abs(det.upper_bound)) && n <= opts.polish_limit) {
    std::vector<FixState> all_free(static_cast<std::size_t>(n), -1);
    IntegerOptions po = io;
    po.bnb_limit = std::max(po.bnb_limit, n);
    const bool exact = n <= opts.polish_exact_limit;
    if (!exact) po.node_cap = opts.polish_node_cap;
    const IntegerResult res = solve_residual_integer(lp, all_free, po);
    det.report.used_exact_search = true;
    if (exact && !res.optimal) det.report.residual_optimal = false;
    if (res.feasible && res.objective > obj + 1e-12) {
      x = res.x;
      obj = res.objective;
    }
  }
  if (!lp.feasible(x, 1e-8)) throw InternalError("selected groups violate the LP rows");

  for (int j = 0; j < n; ++j) {
    if (x[static_cast<std::size_t>(j)] < 0.5) continue;
    const auto& g = ap.groups[static_cast<std::size_t>(j)];
    det.discoveries.push_back({g, 1.0});
    det.objective += lp.objective[static_cast<std::size_t>(j)];
    det.error_budget_used += 1.0 - g.pip;
  }
  return det;
}

std::vector<CandidateGroup> preprocess(const std::vector<CandidateGroup>& groups, const WeightFn& weight,
                                       const ErrorRateSpec& spec, const BlipOptions& opts) {
  std::vector<CandidateGroup> work = groups;
  for (auto& g : work) {
    validate_group(g);
    if (opts.delta > 0.0) g.pip = std::max(0.0, g.pip - opts.delta);
  }
  const bool budget_rate = spec.kind == ErrorKind::PFER || spec.kind == ErrorKind::FWER;
  if (opts.prefilter && (!budget_rate || opts.prefilter_budget)) {
    work = prefilter_groups(work, spec, opts.kappa_group);
  }
  if (opts.prenarrow) work = prenarrow(work, spec, weight, opts.prenarrow_alpha);
  return work;
}

bool group_misses(const CandidateGroup& g, const SampleSet& samples, std::size_t i) {
  int count = 0;
  if (samples.is_discrete()) {
    for (Index j : samples.signals[i]) count += contains_index(g.region, j) ? 1 : 0;
  } else {
    for (std::size_t k = 0; k < samples.points_in_row(i); ++k)
      count += contains_point(g.region, samples.point(i, k)) ? 1 : 0;
  }
  if (g.count_interval) return !g.count_interval->contains(count);
  return count == 0;
}

}  // namespace

DetectionSet run_blip(const std::vector<CandidateGroup>& groups, const WeightFn& weight,
                      const ErrorRateSpec& spec, const BlipOptions& opts) {
  spec.validate();
  if (spec.kind == ErrorKind::FWER) return run_fwer(groups, weight, spec.q, nullptr, opts, spec.grid_tol);
  const auto work = preprocess(groups, weight, spec, opts);
  return solve_assembled(assemble_problem(work, weight, spec), opts);
}

double empirical_fwer(const DetectionSet& det, const SampleSet& samples) {
  if (samples.size() == 0) throw ValidationError("sample set is empty");
  std::size_t bad = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (const auto& d : det.discoveries) {
      if (group_misses(d.group, samples, i)) {
        ++bad;
        break;
      }
    }
  }
  return static_cast<double>(bad) / static_cast<double>(samples.size());
}

DetectionSet run_fwer(const std::vector<CandidateGroup>& groups, const WeightFn& weight, double q,
                      const SampleSet* samples, const BlipOptions& opts, double grid_tol,
                      FwerMode mode) {
  const ErrorRateSpec fwer = ErrorRateSpec::fwer(q, grid_tol);
  fwer.validate();
  if (mode == FwerMode::Auto) mode = samples ? FwerMode::Bisection : FwerMode::PferBound;
  if (mode == FwerMode::Bisection && !samples)
    throw ValidationError("FWER bisection needs posterior samples");

  auto probe = [&](double v) {
    const ErrorRateSpec pfer = ErrorRateSpec::pfer(v);
    auto det = solve_assembled(assemble_problem(preprocess(groups, weight, pfer, opts), weight, pfer), opts);
    det.error_spec = fwer;
    det.error_spec.v = v;
    return det;
  };
  if (mode == FwerMode::PferBound) return probe(q);

  std::optional<DetectionSet> best;
  DetectionSet first = probe(q);
  if (empirical_fwer(first, *samples) <= q) best = std::move(first);
  double lo = q, hi = 1.0;
  while (hi - lo > grid_tol) {
    const double mid = 0.5 * (lo + hi);
    DetectionSet det = probe(mid);
    if (empirical_fwer(det, *samples) <= q) {
      lo = mid;
      best = std::move(det);
    } else {
      hi = mid;
    }
  }
  if (best) return *best;
  DetectionSet empty;
  empty.error_spec = fwer;
  return empty;
}

double f1_score(const DetectionSet& det, double expected_signals) {
  if (!(expected_signals > 0.0)) return 0.0;
  const double r = static_cast<double>(det.discoveries.size());
  double false_mass = 0.0, power = 0.0;
  for (const auto& d : det.discoveries) {
    false_mass += 1.0 - d.group.pip;
    power += d.group.pip * d.group.weight.value_or(1.0);
  }
  const double precision = r > 0.0 ? 1.0 - false_mass / r : 1.0;
  const double recall = power / expected_signals;
  if (!(precision > 0.0) || !(recall > 0.0)) return 0.0;
  return 2.0 / (1.0 / precision + 1.0 / recall);
}

F1Result maximize_f1(const std::vector<CandidateGroup>& groups, const WeightFn& weight,
                     const std::vector<double>& q_grid, const std::map<Index, double>& marginals,
                     const BlipOptions& opts) {
  if (q_grid.empty()) throw ValidationError("q grid is empty");
  for (double q : q_grid) {
    if (!(q > 0.0 && q < 1.0)) throw ValidationError("q grid values must lie in (0,1)");
  }
  double expected = 0.0;
  for (const auto& [_, p] : marginals) expected += p;
  F1Result out;
  out.q_star = *std::min_element(q_grid.begin(), q_grid.end());
  out.detection.error_spec = ErrorRateSpec::fdr(out.q_star);
  if (!(expected > 0.0)) return out;
  bool have = false;
  for (double q : q_grid) {
    DetectionSet det = run_blip(groups, weight, ErrorRateSpec::fdr(q), opts);
    const double f1 = f1_score(det, expected);
    out.curve.emplace_back(q, f1);
    if (!have || f1 > out.f1 + 1e-12 || (std::abs(f1 - out.f1) <= 1e-12 && q < out.q_star)) {
      have = true;
      out.f1 = f1;
      out.q_star = q;
      out.detection = std::move(det);
    }
  }
  return out;
}

Certificate certify(const DetectionSet& det, const ErrorRateSpec& spec, const PipTable* pips,
                    double gap_threshold) {
  Certificate c;
  const auto& ds = det.discoveries;
  for (std::size_t i = 0; i < ds.size() && c.disjoint; ++i) {
    for (std::size_t j = i + 1; j < ds.size(); ++j) {
      bool overlap = true;
      try {
        overlap = intersects(ds[i].group.region, ds[j].group.region);
      } catch (const ValidationError&) {
        overlap = true;
      }
      if (overlap) {
        c.disjoint = false;
        break;
      }
    }
  }
  double min_pip = 1.0;
  for (const auto& d : ds) {
    const double p = pips ? pips->get(d.group.id) : d.group.pip;
    min_pip = std::min(min_pip, p);
    c.budget_used += 1.0 - p;
    c.objective += p * d.group.weight.value_or(1.0);
  }
  const double r = static_cast<double>(ds.size());
  switch (spec.kind) {
    case ErrorKind::FDR: c.budget_ok = c.budget_used <= spec.q * r + 1e-8; break;
    case ErrorKind::LocalFDR: c.budget_ok = ds.empty() || min_pip >= 1.0 - spec.q - 1e-12; break;
    case ErrorKind::PFER: c.budget_ok = c.budget_used <= spec.v + 1e-8; break;
    case ErrorKind::FWER: c.budget_ok = c.budget_used <= std::max(spec.q, spec.v) + 1e-8; break;
  }
  c.objective_ok = c.objective <= det.upper_bound + 1e-6 &&
                   (pips || std::abs(c.objective - det.objective) <= 1e-8 * std::max(1.0, c.objective));
  c.gap = det.upper_bound > 1e-12 ? (det.upper_bound - c.objective) / det.upper_bound : 0.0;
  c.gap_ok = c.gap <= gap_threshold;
  return c;
}

}  // namespace blip

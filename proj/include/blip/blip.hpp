// Detection pipeline: assemble the discovery LP from candidate groups, solve
// the relaxation, repair the fractional part, backtrack if the repair is
// infeasible, and certify the result. Also the FWER and F1 drivers.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "blip/core.hpp"
#include "blip/lpsolve.hpp"
#include "blip/pips.hpp"
#include "blip/preprocess.hpp"

namespace blip {

struct BlipOptions {
  bool prefilter = true;            // PIP threshold under FDR and local FDR
  bool prefilter_budget = false;    // also threshold under PFER and FWER
  double kappa_group = kDefaultKappaGroup;
  bool prenarrow = true;
  std::optional<double> prenarrow_alpha;
  double delta = 0.0;               // robust mode: p_G <- max(0, p_G - delta)
  double integrality_tol = 1e-6;
  int rounding_threshold = 200;     // larger residual problems use rounding
  int polish_limit = 20000;         // 0/1 search over all candidates when a gap remains
  int polish_exact_limit = 64;      // up to here the search runs to completion
  std::size_t polish_node_cap = 20000;
  int n_sample = 128;
  std::uint64_t seed = 0;
  IntegerOptions integer;
  double gap_flag = 0.01;
};

struct AssembledProblem {
  LpProblem lp;
  std::vector<CandidateGroup> groups;  // variable order; weight filled in
  ErrorRateSpec spec;
};

/// Packing rows: one per shared location for index sets, one per clique of
/// an edge clique cover for continuous regions.
std::vector<LpRow> disjointness_rows(const std::vector<CandidateGroup>& groups);

/// Builds objective p_G w(G) and the error row. Local FDR drops groups with
/// p_G < 1 - q and adds no error row. When `rows` is absent the
/// disjointness rows are derived from the regions.
AssembledProblem assemble_problem(const std::vector<CandidateGroup>& groups, const WeightFn& weight,
                                  const ErrorRateSpec& spec,
                                  std::optional<std::vector<LpRow>> rows = std::nullopt);

/// Copies `table` pips onto the groups; throws if any group is missing.
std::vector<CandidateGroup> attach_pips(std::vector<CandidateGroup> groups, const PipTable& table);

/// Full pipeline for FDR, local FDR and PFER. FWER is routed through
/// run_fwer without samples.
DetectionSet run_blip(const std::vector<CandidateGroup>& groups, const WeightFn& weight,
                      const ErrorRateSpec& spec, const BlipOptions& opts = {});

/// Empirical P(V > 0): fraction of samples in which some selected group
/// contains no signal.
double empirical_fwer(const DetectionSet& det, const SampleSet& samples);

enum class FwerMode { Auto, PferBound, Bisection };

/// PferBound: PFER at v = q. Bisection: search v in [q, 1] for the largest
/// PFER level whose selection keeps empirical P(V>0) <= q on `samples`;
/// the resulting level is stored in error_spec.v. Auto picks Bisection
/// exactly when samples are given.
DetectionSet run_fwer(const std::vector<CandidateGroup>& groups, const WeightFn& weight, double q,
                      const SampleSet* samples = nullptr, const BlipOptions& opts = {},
                      double grid_tol = 1e-3, FwerMode mode = FwerMode::Auto);

struct F1Result {
  double q_star = 0.0;
  double f1 = 0.0;
  DetectionSet detection;
  std::vector<std::pair<double, double>> curve;  // (q, F1)
};

/// F1 of a selection given the expected number of signals.
double f1_score(const DetectionSet& det, double expected_signals);

/// Runs FDR control over q_grid and keeps the F1 maximizer (ties to the
/// smallest q). `marginals` holds the per-location PIPs.
F1Result maximize_f1(const std::vector<CandidateGroup>& groups, const WeightFn& weight,
                     const std::vector<double>& q_grid, const std::map<Index, double>& marginals,
                     const BlipOptions& opts = {});

struct Certificate {
  bool disjoint = true;
  bool budget_ok = true;
  bool objective_ok = true;
  bool gap_ok = true;
  double objective = 0.0;
  double budget_used = 0.0;
  double gap = 0.0;
  [[nodiscard]] bool passed() const noexcept { return disjoint && budget_ok && objective_ok; }
};

/// Recomputes disjointness, budget use, objective and relative gap. When
/// `pips` is given it overrides the pips stored on the discoveries.
Certificate certify(const DetectionSet& det, const ErrorRateSpec& spec,
                    const PipTable* pips = nullptr, double gap_threshold = 0.01);

}  // namespace blip

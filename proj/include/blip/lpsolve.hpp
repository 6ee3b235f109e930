// Bounded-variable LP solver, small 0/1 repair search and randomized
// rounding. Problems are maximizations over x in [lo, hi] subject to sparse
// rows sum_j a_j x_j <= rhs.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "blip/core.hpp"

namespace blip {

/// Packing rows have unit coefficients and rhs 1 (disjointness); budget
/// rows carry the error-rate constraint.
enum class RowKind { Packing, Budget };

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
  double rhs = 0.0;
  RowKind kind = RowKind::Packing;
};

struct LpProblem {
  std::vector<double> objective;
  std::vector<LpRow> rows;
  std::vector<GroupId> ids;  // optional variable labels

  [[nodiscard]] int n_vars() const noexcept { return static_cast<int>(objective.size()); }
  [[nodiscard]] int n_rows() const noexcept { return static_cast<int>(rows.size()); }

  void validate() const;
  [[nodiscard]] double value(std::span<const double> x) const;
  /// Largest row violation max(0, a.x - rhs) over all rows.
  [[nodiscard]] double max_violation(std::span<const double> x) const;
  [[nodiscard]] bool feasible(std::span<const double> x, double tol = 1e-8) const {
    return max_violation(x) <= tol;
  }
};

enum class LpStatus { Optimal, Infeasible, IterationLimit };

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  LpStatus status = LpStatus::Optimal;
  std::size_t iterations = 0;
};

struct SimplexOptions {
  double tol = 1e-9;
  int refactor_every = 64;
  std::size_t max_iterations = 0;  // 0 picks 50 * (rows + cols) + 10000
};

/// Optimal basic solution of the relaxation. Optional per-variable bounds
/// default to [0, 1]; the all-lower-bound point need not be feasible.
LpSolution solve_relaxed(const LpProblem& problem, std::span<const double> lo = {},
                         std::span<const double> hi = {}, const SimplexOptions& opts = {});

/// Fixed marker: -1 free, 0 or 1 fixed.
using FixState = std::int8_t;

struct IntegerOptions {
  int exhaustive_limit = 20;
  int bnb_limit = 200;
  std::size_t node_cap = 200000;
};

struct IntegerResult {
  std::vector<double> x;
  double objective = 0.0;
  bool feasible = false;
  bool optimal = true;  // false if the node cap stopped the search
  std::size_t nodes = 0;
};

/// Best 0/1 assignment of the free variables given the fixed ones.
/// Throws UnsupportedError when more than bnb_limit variables are free.
IntegerResult solve_residual_integer(const LpProblem& problem, std::span<const FixState> fixed,
                                     const IntegerOptions& opts = {});

/// Rounds a relaxed solution by sampling through the packing rows in
/// decreasing target order, then drops the lowest-priority selections until
/// every budget row holds. Returns the best of n_sample draws by objective.
std::vector<double> randomized_rounding(const LpProblem& problem, std::span<const double> relaxed,
                                        std::span<const double> priority, std::uint64_t seed,
                                        int n_sample = 128);

/// CPLEX-style LP text for cross-checking with external solvers.
std::string to_lp_format(const LpProblem& problem);

}  // namespace blip

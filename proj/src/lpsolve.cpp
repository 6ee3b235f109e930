#include "blip/lpsolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "blip/rng.hpp"

namespace blip {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ----------------------------------------------------------------------------
// LpProblem
// ----------------------------------------------------------------------------
void LpProblem::validate() const {
  const int n = n_vars();
  for (double c : objective) {
    if (!std::isfinite(c)) throw ValidationError("objective coefficients must be finite");
  }
  if (!ids.empty() && static_cast<int>(ids.size()) != n)
    throw ValidationError("variable labels do not match the variable count");
  for (const auto& row : rows) {
    if (!std::isfinite(row.rhs)) throw ValidationError("row rhs must be finite");
    for (const auto& [j, a] : row.coeffs) {
      if (j < 0 || j >= n) throw ValidationError("row references an unknown variable");
      if (!std::isfinite(a)) throw ValidationError("row coefficients must be finite");
    }
  }
}

double LpProblem::value(std::span<const double> x) const {
  double s = 0.0;
  for (int j = 0; j < n_vars(); ++j) s += objective[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  return s;
}

double LpProblem::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (const auto& row : rows) {
    double lhs = 0.0;
    for (const auto& [j, a] : row.coeffs) lhs += a * x[static_cast<std::size_t>(j)];
    worst = std::max(worst, lhs - row.rhs);
  }
  return worst;
}

// ----------------------------------------------------------------------------
// Bounded primal simplex
// ----------------------------------------------------------------------------
namespace {

class Simplex {
 public:
  Simplex(const LpProblem& p, std::span<const double> lo, std::span<const double> hi,
          const SimplexOptions& opts)
      : opts_(opts), m_(p.n_rows()), n_(p.n_vars()) {
    cols_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < m_; ++i) {
      for (const auto& [j, a] : p.rows[static_cast<std::size_t>(i)].coeffs) {
        if (a != 0.0) cols_[static_cast<std::size_t>(j)].emplace_back(i, a);
      }
      b_.push_back(p.rows[static_cast<std::size_t>(i)].rhs);
    }
    // Merge duplicate entries of a variable within one row.
    for (auto& col : cols_) {
      std::stable_sort(col.begin(), col.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<std::pair<int, double>> merged;
      for (const auto& e : col) {
        if (!merged.empty() && merged.back().first == e.first) merged.back().second += e.second;
        else merged.push_back(e);
      }
      col = std::move(merged);
    }
    objective_ = p.objective;
    for (int j = 0; j < n_; ++j) {
      const double l = lo.empty() ? 0.0 : lo[static_cast<std::size_t>(j)];
      const double h = hi.empty() ? 1.0 : hi[static_cast<std::size_t>(j)];
      if (!(l <= h)) throw ValidationError("variable bounds need lo <= hi");
      lo_.push_back(l);
      hi_.push_back(h);
    }
    max_iter_ = opts.max_iterations ? opts.max_iterations
                                    : 50 * static_cast<std::size_t>(m_ + n_) + 10000;
  }

  LpSolution run() {
    LpSolution sol;
    setup();
    if (!art_rows_.empty()) {
      cost_.assign(static_cast<std::size_t>(total_), 0.0);
      for (int k = n_ + m_; k < total_; ++k) cost_[static_cast<std::size_t>(k)] = -1.0;
      if (!iterate()) {
        sol.status = LpStatus::IterationLimit;
        return finish(sol);
      }
      double infeas = 0.0;
      for (int k = n_ + m_; k < total_; ++k) infeas += x_[static_cast<std::size_t>(k)];
      if (infeas > 1e-7) {
        sol.status = LpStatus::Infeasible;
        return finish(sol);
      }
      for (int k = n_ + m_; k < total_; ++k) {
        hi_[static_cast<std::size_t>(k)] = 0.0;
        if (pos_[static_cast<std::size_t>(k)] < 0) x_[static_cast<std::size_t>(k)] = 0.0;
      }
    }
    cost_.assign(static_cast<std::size_t>(total_), 0.0);
    std::copy(objective_.begin(), objective_.end(), cost_.begin());
    if (!iterate()) sol.status = LpStatus::IterationLimit;
    return finish(sol);
  }

 private:
  template <class F>
  void for_col(int k, F&& f) const {
    if (k < n_) {
      for (const auto& [i, a] : cols_[static_cast<std::size_t>(k)]) f(i, a);
    } else if (k < n_ + m_) {
      f(k - n_, 1.0);
    } else {
      f(art_rows_[static_cast<std::size_t>(k - n_ - m_)], -1.0);
    }
  }

  void setup() {
    std::vector<double> r = b_;
    for (int j = 0; j < n_; ++j) {
      for (const auto& [i, a] : cols_[static_cast<std::size_t>(j)]) r[static_cast<std::size_t>(i)] -= a * lo_[static_cast<std::size_t>(j)];
    }
    for (int i = 0; i < m_; ++i) {
      if (r[static_cast<std::size_t>(i)] < -opts_.tol) art_rows_.push_back(i);
    }
    total_ = n_ + m_ + static_cast<int>(art_rows_.size());
    x_.assign(static_cast<std::size_t>(total_), 0.0);
    pos_.assign(static_cast<std::size_t>(total_), -1);
    at_upper_.assign(static_cast<std::size_t>(total_), 0);
    for (int j = 0; j < n_; ++j) x_[static_cast<std::size_t>(j)] = lo_[static_cast<std::size_t>(j)];
    for (int i = 0; i < m_; ++i) {
      lo_.push_back(0.0);
      hi_.push_back(kInf);
    }
    for (std::size_t a = 0; a < art_rows_.size(); ++a) {
      lo_.push_back(0.0);
      hi_.push_back(kInf);
    }
    basis_.assign(static_cast<std::size_t>(m_), -1);
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    for (int i = 0; i < m_; ++i) {
      basis_[static_cast<std::size_t>(i)] = n_ + i;
      x_[static_cast<std::size_t>(n_ + i)] = std::max(0.0, r[static_cast<std::size_t>(i)]);
    }
    for (std::size_t a = 0; a < art_rows_.size(); ++a) {
      const int i = art_rows_[a];
      const int k = n_ + m_ + static_cast<int>(a);
      x_[static_cast<std::size_t>(n_ + i)] = 0.0;
      basis_[static_cast<std::size_t>(i)] = k;
      x_[static_cast<std::size_t>(k)] = -r[static_cast<std::size_t>(i)];
      binv_(i, i) = -1.0;
    }
    for (int i = 0; i < m_; ++i) pos_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = i;
  }

  void refactor() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
      for_col(basis_[static_cast<std::size_t>(i)], [&](int r, double a) { B(r, i) = a; });
    }
    binv_ = B.partialPivLu().inverse();
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b_.data(), m_);
    for (int k = 0; k < total_; ++k) {
      if (pos_[static_cast<std::size_t>(k)] >= 0) continue;
      const double v = x_[static_cast<std::size_t>(k)];
      if (v != 0.0) for_col(k, [&](int r, double a) { rhs(r) -= a * v; });
    }
    const Eigen::VectorXd xb = binv_ * rhs;
    for (int i = 0; i < m_; ++i) x_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = xb(i);
    since_refactor_ = 0;
  }

  // Returns false on the iteration limit.
  bool iterate() {
    const double tol = opts_.tol;
    std::size_t degenerate = 0;
    bool bland = false;
    const std::size_t bland_after = 10 * static_cast<std::size_t>(m_ + total_);
    Eigen::VectorXd y(m_), alpha(m_), cb(m_);
    while (true) {
      if (iterations_ >= max_iter_) return false;
      if (since_refactor_ >= opts_.refactor_every) refactor();
      for (int i = 0; i < m_; ++i) cb(i) = cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
      y.noalias() = binv_.transpose() * cb;

      int q = -1;
      double best = 0.0;
      for (int k = 0; k < total_; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        if (pos_[ku] >= 0 || !(hi_[ku] > lo_[ku])) continue;
        double d = cost_[ku];
        for_col(k, [&](int r, double a) { d -= y(r) * a; });
        const bool eligible = at_upper_[ku] ? d < -tol : d > tol;
        if (!eligible) continue;
        if (bland) {
          q = k;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = k;
        }
      }
      if (q < 0) return true;

      const auto qu = static_cast<std::size_t>(q);
      const double dir = at_upper_[qu] ? -1.0 : 1.0;
      alpha.setZero();
      for_col(q, [&](int r, double a) { alpha += a * binv_.col(r); });

      double t = hi_[qu] - lo_[qu];
      int leave = -1;
      double leave_piv = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double delta = -dir * alpha(i);
        const auto k = static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)]);
        double lim;
        if (delta < -tol) {
          lim = (x_[k] - lo_[k]) / -delta;
        } else if (delta > tol && std::isfinite(hi_[k])) {
          lim = (hi_[k] - x_[k]) / delta;
        } else {
          continue;
        }
        lim = std::max(lim, 0.0);
        const double piv = std::abs(alpha(i));
        bool take = lim < t - 1e-12;
        if (!take && leave >= 0 && std::abs(lim - t) <= 1e-12) {
          take = bland ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]
                       : piv > leave_piv;
        }
        if (take) {
          t = lim;
          leave = i;
          leave_piv = piv;
        }
      }
      if (!std::isfinite(t)) throw InternalError("relaxed LP is unbounded");

      x_[qu] += dir * t;
      for (int i = 0; i < m_; ++i) {
        x_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] -= dir * alpha(i) * t;
      }
      if (leave < 0) {
        at_upper_[qu] = !at_upper_[qu];
        x_[qu] = at_upper_[qu] ? hi_[qu] : lo_[qu];
      } else {
        const auto lu = static_cast<std::size_t>(leave);
        const auto k = static_cast<std::size_t>(basis_[lu]);
        const bool to_upper = -dir * alpha(leave) > 0.0;
        x_[k] = to_upper ? hi_[k] : lo_[k];
        at_upper_[k] = to_upper ? 1 : 0;
        pos_[k] = -1;
        basis_[lu] = q;
        pos_[qu] = leave;
        at_upper_[qu] = 0;
        const double p = alpha(leave);
        binv_.row(leave) /= p;
        for (int i = 0; i < m_; ++i) {
          if (i != leave && alpha(i) != 0.0) binv_.row(i) -= alpha(i) * binv_.row(leave);
        }
        ++since_refactor_;
      }
      ++iterations_;
      if (t <= 1e-12) {
        if (++degenerate > bland_after) bland = true;
      } else {
        degenerate = 0;
      }
    }
  }

  LpSolution& finish(LpSolution& sol) {
    if (m_ > 0 && sol.status == LpStatus::Optimal) refactor();
    sol.x.assign(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      double v = std::clamp(x_[ju], lo_[ju], hi_[ju]);
      if (std::abs(v - std::round(v)) < 1e-11) v = std::round(v);
      sol.x[ju] = v;
    }
    sol.objective = 0.0;
    for (int j = 0; j < n_; ++j) sol.objective += objective_[static_cast<std::size_t>(j)] * sol.x[static_cast<std::size_t>(j)];
    sol.iterations = iterations_;
    return sol;
  }

  SimplexOptions opts_;
  int m_, n_, total_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> b_, objective_, cost_, lo_, hi_, x_;
  std::vector<int> art_rows_, basis_, pos_;
  std::vector<char> at_upper_;
  Eigen::MatrixXd binv_;
  std::size_t iterations_ = 0, max_iter_ = 0;
  int since_refactor_ = 0;
};

}  // namespace

LpSolution solve_relaxed(const LpProblem& problem, std::span<const double> lo,
                         std::span<const double> hi, const SimplexOptions& opts) {
  problem.validate();
  const auto n = static_cast<std::size_t>(problem.n_vars());
  if ((!lo.empty() && lo.size() != n) || (!hi.empty() && hi.size() != n))
    throw ValidationError("bound vectors must match the variable count");
  Simplex s(problem, lo, hi, opts);
  return s.run();
}

// ----------------------------------------------------------------------------
// Residual 0/1 search
// ----------------------------------------------------------------------------
namespace {

struct Residual {
  std::vector<int> free;            // free variables in search order
  std::vector<double> cap;          // rhs minus fixed contributions
  std::vector<std::vector<std::pair<int, double>>> col;  // per free position: (row, coeff)
  std::vector<std::vector<double>> min_rest;             // per row, suffix sums of negative coeffs
  std::vector<double> pos_rest;     // suffix sums of positive objective
  double base_obj = 0.0;
  bool fixed_infeasible = false;
};

Residual build_residual(const LpProblem& p, std::span<const FixState> fixed) {
  Residual r;
  const int n = p.n_vars();
  for (int j = 0; j < n; ++j) {
    if (fixed[static_cast<std::size_t>(j)] < 0) r.free.push_back(j);
    else if (fixed[static_cast<std::size_t>(j)] == 1) r.base_obj += p.objective[static_cast<std::size_t>(j)];
  }
  std::stable_sort(r.free.begin(), r.free.end(), [&](int a, int b) {
    return p.objective[static_cast<std::size_t>(a)] > p.objective[static_cast<std::size_t>(b)];
  });
  std::vector<int> slot(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < r.free.size(); ++k) slot[static_cast<std::size_t>(r.free[k])] = static_cast<int>(k);
  const std::size_t F = r.free.size();
  r.col.resize(F);
  r.cap.resize(p.rows.size());
  r.min_rest.assign(p.rows.size(), std::vector<double>(F + 1, 0.0));
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    double c = p.rows[i].rhs;
    for (const auto& [j, a] : p.rows[i].coeffs) {
      const int s = slot[static_cast<std::size_t>(j)];
      if (s >= 0) {
        r.col[static_cast<std::size_t>(s)].emplace_back(static_cast<int>(i), a);
        if (a < 0.0) r.min_rest[i][static_cast<std::size_t>(s)] += a;
      } else if (fixed[static_cast<std::size_t>(j)] == 1) {
        c -= a;
      }
    }
    for (std::size_t k = F; k-- > 0;) r.min_rest[i][k] += r.min_rest[i][k + 1];
    r.cap[i] = c;
    if (r.min_rest[i][0] > c + 1e-9) r.fixed_infeasible = true;
  }
  r.pos_rest.assign(F + 1, 0.0);
  for (std::size_t k = F; k-- > 0;) {
    r.pos_rest[k] = r.pos_rest[k + 1] + std::max(0.0, p.objective[static_cast<std::size_t>(r.free[k])]);
  }
  return r;
}

void enumerate(const LpProblem& p, std::span<const FixState> fixed, const IntegerOptions& opts,
               IntegerResult& res) {
  Residual r = build_residual(p, fixed);
  const std::size_t F = r.free.size();
  res.x.assign(static_cast<std::size_t>(p.n_vars()), 0.0);
  for (int j = 0; j < p.n_vars(); ++j) {
    if (fixed[static_cast<std::size_t>(j)] == 1) res.x[static_cast<std::size_t>(j)] = 1.0;
  }
  res.feasible = false;
  if (r.fixed_infeasible) return;
  std::vector<double> lhs(p.rows.size(), 0.0);
  std::vector<char> cur(F, 0), best(F, 0);
  double best_obj = -kInf;
  constexpr double tol = 1e-9;

  std::function<void(std::size_t, double)> dfs = [&](std::size_t k, double obj) {
    if (res.nodes >= opts.node_cap) {
      res.optimal = false;
      return;
    }
    ++res.nodes;
    if (res.feasible && obj + r.pos_rest[k] <= best_obj + 1e-12) return;
    if (k == F) {
      if (!res.feasible || obj > best_obj + 1e-12) {
        best_obj = obj;
        best = cur;
        res.feasible = true;
      }
      return;
    }
    const int j = r.free[k];
    auto ok = [&]() {
      for (const auto& [i, a] : r.col[k]) {
        const auto iu = static_cast<std::size_t>(i);
        if (lhs[iu] + r.min_rest[iu][k + 1] > r.cap[iu] + tol) return false;
      }
      return true;
    };
    for (const auto& [i, a] : r.col[k]) lhs[static_cast<std::size_t>(i)] += a;
    cur[k] = 1;
    if (ok()) dfs(k + 1, obj + p.objective[static_cast<std::size_t>(j)]);
    for (const auto& [i, a] : r.col[k]) lhs[static_cast<std::size_t>(i)] -= a;
    cur[k] = 0;
    if (ok()) dfs(k + 1, obj);
  };
  dfs(0, 0.0);
  if (!res.feasible) return;
  for (std::size_t k = 0; k < F; ++k) res.x[static_cast<std::size_t>(r.free[k])] = best[k];
}

void branch_and_bound(const LpProblem& p, std::span<const FixState> fixed, const IntegerOptions& opts,
                      IntegerResult& res) {
  const auto n = static_cast<std::size_t>(p.n_vars());
  std::vector<double> lo(n), hi(n);
  for (std::size_t j = 0; j < n; ++j) {
    lo[j] = fixed[j] == 1 ? 1.0 : 0.0;
    hi[j] = fixed[j] == 0 ? 0.0 : 1.0;
  }
  double best_obj = -kInf;
  res.feasible = false;
  std::function<void()> node = [&]() {
    if (res.nodes >= opts.node_cap) {
      res.optimal = false;
      return;
    }
    ++res.nodes;
    const LpSolution sol = solve_relaxed(p, lo, hi);
    if (sol.status == LpStatus::Infeasible) return;
    if (sol.status != LpStatus::Optimal) {
      res.optimal = false;
      return;
    }
    if (res.feasible && sol.objective <= best_obj + 1e-9) return;
    int branch = -1;
    double frac_best = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = sol.x[j];
      const double frac = std::abs(v - 0.5);
      if (std::min(v, 1.0 - v) > 1e-6 && frac < frac_best) {
        frac_best = frac;
        branch = static_cast<int>(j);
      }
    }
    if (branch < 0) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = std::round(sol.x[j]);
      if (!p.feasible(x, 1e-9)) return;
      const double obj = p.value(x);
      if (!res.feasible || obj > best_obj + 1e-12) {
        best_obj = obj;
        res.x = std::move(x);
        res.feasible = true;
      }
      return;
    }
    const auto b = static_cast<std::size_t>(branch);
    const double old_lo = lo[b], old_hi = hi[b];
    lo[b] = 1.0;
    node();
    lo[b] = old_lo;
    hi[b] = 0.0;
    node();
    hi[b] = old_hi;
  };
  node();
  if (!res.feasible) {
    res.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) res.x[j] = fixed[j] == 1 ? 1.0 : 0.0;
  }
}

}  // namespace

IntegerResult solve_residual_integer(const LpProblem& problem, std::span<const FixState> fixed,
                                     const IntegerOptions& opts) {
  problem.validate();
  if (fixed.size() != static_cast<std::size_t>(problem.n_vars()))
    throw ValidationError("fixed markers must match the variable count");
  const auto n_free = std::count(fixed.begin(), fixed.end(), FixState{-1});
  IntegerResult res;
  if (n_free > opts.bnb_limit) throw UnsupportedError("too many free variables for the residual search");
  if (n_free <= opts.exhaustive_limit) {
    enumerate(problem, fixed, opts, res);
  } else {
    branch_and_bound(problem, fixed, opts, res);
  }
  if (res.feasible && !problem.feasible(res.x, 1e-8)) throw InternalError("residual search returned an infeasible point");
  res.objective = res.feasible ? problem.value(res.x) : 0.0;
  return res;
}

// ----------------------------------------------------------------------------
// Randomized rounding
// ----------------------------------------------------------------------------
std::vector<double> randomized_rounding(const LpProblem& problem, std::span<const double> relaxed,
                                        std::span<const double> priority, std::uint64_t seed,
                                        int n_sample) {
  problem.validate();
  const auto n = static_cast<std::size_t>(problem.n_vars());
  if (relaxed.size() != n || priority.size() != n)
    throw ValidationError("relaxed values and priorities must match the variable count");
  if (n_sample < 1) throw ValidationError("n_sample must be at least 1");

  struct Target {
    std::vector<int> members;
    double s = 0.0;
  };
  std::vector<Target> targets;
  std::vector<std::vector<int>> rows_of(n);
  for (const auto& row : problem.rows) {
    if (row.kind != RowKind::Packing) continue;
    Target t;
    for (const auto& [j, a] : row.coeffs) {
      if (a == 0.0) continue;
      t.members.push_back(j);
      t.s += relaxed[static_cast<std::size_t>(j)];
    }
    if (t.members.empty()) continue;
    for (int j : t.members) rows_of[static_cast<std::size_t>(j)].push_back(static_cast<int>(targets.size()));
    targets.push_back(std::move(t));
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (rows_of[j].empty()) targets.push_back({{static_cast<int>(j)}, relaxed[j]});
  }
  std::vector<std::size_t> order(targets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return targets[a].s > targets[b].s; });

  std::vector<int> by_priority(n);
  std::iota(by_priority.begin(), by_priority.end(), 0);
  std::stable_sort(by_priority.begin(), by_priority.end(), [&](int a, int b) {
    return priority[static_cast<std::size_t>(a)] < priority[static_cast<std::size_t>(b)];
  });

  std::vector<double> best(n, 0.0);
  double best_obj = -kInf;
  std::vector<char> feasible(n);
  std::vector<double> z(n);
  std::vector<int> pool;
  for (int draw = 0; draw < n_sample; ++draw) {
    Rng rng(seed, static_cast<std::uint64_t>(draw));
    std::fill(feasible.begin(), feasible.end(), 1);
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t t : order) {
      pool.clear();
      double mass = 0.0;
      for (int j : targets[t].members) {
        if (feasible[static_cast<std::size_t>(j)]) {
          pool.push_back(j);
          mass += relaxed[static_cast<std::size_t>(j)];
        }
      }
      if (pool.empty()) continue;
      const double u = rng.uniform();
      if (u <= targets[t].s && mass > 0.0) {
        double pick = rng.uniform() * mass;
        int chosen = pool.back();
        for (int j : pool) {
          const double w = relaxed[static_cast<std::size_t>(j)];
          if (w <= 0.0) continue;
          chosen = j;
          if (pick < w) break;
          pick -= w;
        }
        z[static_cast<std::size_t>(chosen)] = 1.0;
        feasible[static_cast<std::size_t>(chosen)] = 0;
        for (int r : rows_of[static_cast<std::size_t>(chosen)]) {
          for (int j : targets[static_cast<std::size_t>(r)].members) feasible[static_cast<std::size_t>(j)] = 0;
        }
      } else {
        for (int j : pool) feasible[static_cast<std::size_t>(j)] = 0;
      }
    }
    for (int j : by_priority) {
      if (problem.feasible(z, 1e-9)) break;
      z[static_cast<std::size_t>(j)] = 0.0;
    }
    const double obj = problem.value(z);
    if (obj > best_obj + 1e-15) {
      best_obj = obj;
      best = z;
    }
  }
  return best;
}

std::string to_lp_format(const LpProblem& problem) {
  std::ostringstream os;
  os.precision(17);
  auto var = [](int j) { return "x" + std::to_string(j); };
  os << "Maximize\n obj:";
  for (int j = 0; j < problem.n_vars(); ++j) {
    const double c = problem.objective[static_cast<std::size_t>(j)];
    os << (c < 0 ? " - " : " + ") << std::abs(c) << ' ' << var(j);
  }
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    const auto& row = problem.rows[i];
    os << ' ' << (row.kind == RowKind::Packing ? "pack" : "budget") << i << ':';
    if (row.coeffs.empty()) os << " 0 " << var(0);
    for (const auto& [j, a] : row.coeffs) os << (a < 0 ? " - " : " + ") << std::abs(a) << ' ' << var(j);
    os << " <= " << row.rhs << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < problem.n_vars(); ++j) os << " 0 <= " << var(j) << " <= 1\n";
  os << "End\n";
  return os.str();
}

}  // namespace blip

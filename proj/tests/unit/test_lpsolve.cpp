#include <doctest.h>

#include <Eigen/Dense>

#include "blip/lpsolve.hpp"
#include "blip/rng.hpp"

using namespace blip;

namespace {

LpProblem toy() {
  LpProblem p;
  p.objective = {0.8, 0.45};
  p.rows.push_back({{{0, 0.2}, {1, 0.1}}, 0.15, RowKind::Budget});
  p.rows.push_back({{{0, 1.0}, {1, 1.0}}, 1.0, RowKind::Packing});
  return p;
}

/// BLiP-shaped: packing rows over random pairs/triples plus one budget row.
LpProblem random_problem(std::uint64_t seed, int n, int n_pack) {
  Rng rng(seed, 4);
  LpProblem p;
  for (int j = 0; j < n; ++j) p.objective.push_back(rng.uniform());
  for (int r = 0; r < n_pack; ++r) {
    LpRow row;
    const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    if (b == a) b = (a + 1) % n;
    row.coeffs = {{std::min(a, b), 1.0}, {std::max(a, b), 1.0}};
    row.rhs = 1.0;
    p.rows.push_back(row);
  }
  LpRow budget;
  budget.kind = RowKind::Budget;
  for (int j = 0; j < n; ++j) budget.coeffs.emplace_back(j, rng.uniform() - 0.3);
  budget.rhs = 0.0;
  p.rows.push_back(budget);
  return p;
}

/// Optimum by enumerating every vertex of {Ax <= b, 0 <= x <= 1}.
double vertex_oracle(const LpProblem& p) {
  const int n = p.n_vars();
  std::vector<Eigen::VectorXd> a;
  std::vector<double> b;
  for (const auto& r : p.rows) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (auto [j, c] : r.coeffs) v(j) += c;
    a.push_back(v);
    b.push_back(r.rhs);
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(j) = 1.0;
    a.push_back(e);
    b.push_back(1.0);
    a.push_back(-e);
    b.push_back(0.0);
  }
  const int m = static_cast<int>(a.size());
  double best = -1e300;
  std::vector<int> pick(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pick[static_cast<std::size_t>(i)] = i;
  while (true) {
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
      M.row(i) = a[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])].transpose();
      rhs(i) = b[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (lu.rank() == n) {
      const Eigen::VectorXd x = lu.solve(rhs);
      bool ok = true;
      for (int r = 0; r < m && ok; ++r) ok = a[static_cast<std::size_t>(r)].dot(x) <= b[static_cast<std::size_t>(r)] + 1e-9;
      if (ok) best = std::max(best, p.value(std::span<const double>(x.data(), static_cast<std::size_t>(n))));
    }
    int i = n - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - n + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) pick[static_cast<std::size_t>(k)] = pick[static_cast<std::size_t>(k - 1)] + 1;
  }
  return best;
}

double best_integer(const LpProblem& p, const std::vector<FixState>& fixed) {
  const int n = p.n_vars();
  double best = -1e300;
  for (std::uint32_t m = 0; m < (1U << n); ++m) {
    std::vector<double> x(static_cast<std::size_t>(n));
    bool ok = true;
    for (int j = 0; j < n; ++j) {
      x[static_cast<std::size_t>(j)] = (m >> j & 1U) ? 1.0 : 0.0;
      const auto f = fixed.empty() ? -1 : fixed[static_cast<std::size_t>(j)];
      if (f >= 0 && x[static_cast<std::size_t>(j)] != f) ok = false;
    }
    if (ok && p.feasible(x)) best = std::max(best, p.value(x));
  }
  return best;
}

}  // namespace

TEST_CASE("two group relaxation") {
  const auto sol = solve_relaxed(toy());
  CHECK(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(sol.x[1] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(sol.objective == doctest::Approx(0.625).epsilon(1e-12));
  const std::vector<FixState> free2{-1, -1};
  const auto rep = solve_residual_integer(toy(), free2);
  CHECK(rep.feasible);
  CHECK(rep.x == std::vector<double>{0.0, 1.0});
}

TEST_CASE("slack constraints give the all ones point") {
  LpProblem p;
  p.objective = {1.0, 2.0, 0.5};
  p.rows.push_back({{{0, 1.0}, {1, 1.0}, {2, 1.0}}, 100.0, RowKind::Budget});
  const auto sol = solve_relaxed(p);
  CHECK(sol.x == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(sol.objective == doctest::Approx(3.5));
}

TEST_CASE("relaxed optimum matches vertex enumeration") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto p = random_problem(seed, 6, 4);
    const auto sol = solve_relaxed(p);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(p.feasible(sol.x, 1e-9));
    for (double v : sol.x) CHECK((v >= -1e-12 && v <= 1 + 1e-12));
    const double ref = vertex_oracle(p);
    CHECK(sol.objective == doctest::Approx(ref).epsilon(1e-8));
    CHECK(sol.objective >= best_integer(p, {}) - 1e-10);
    CHECK(solve_relaxed(p).x == sol.x);
  }
}

TEST_CASE("larger sparse instances bound every integer point") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = random_problem(1000 + seed, 12, 14);
    const auto sol = solve_relaxed(p);
    CHECK(sol.objective >= best_integer(p, {}) - 1e-10);
    CHECK(p.feasible(sol.x, 1e-9));
  }
}

TEST_CASE("residual integer search") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = random_problem(50 + seed, 8, 6);
    const std::vector<FixState> none(8, -1);
    const auto r = solve_residual_integer(p, none);
    CHECK(r.feasible);
    CHECK(r.objective == doctest::Approx(best_integer(p, {})).epsilon(1e-12));
    CHECK(p.feasible(r.x, 1e-8));
    std::vector<FixState> part(8, -1);
    part[0] = 1;
    part[3] = 0;
    const auto rp = solve_residual_integer(p, part);
    const double ref = best_integer(p, part);
    CHECK(rp.feasible == (ref > -1e299));
    if (rp.feasible) CHECK(rp.objective == doctest::Approx(ref).epsilon(1e-12));
  }
  // Everything fixed.
  const std::vector<FixState> all{1, 1};
  CHECK_FALSE(solve_residual_integer(toy(), all).feasible);
  const std::vector<FixState> ok{0, 1};
  CHECK(solve_residual_integer(toy(), ok).feasible);
  // Branch and bound range.
  const auto big = random_problem(7, 30, 25);
  const std::vector<FixState> free30(30, -1);
  const auto rb = solve_residual_integer(big, free30);
  CHECK(rb.feasible);
  CHECK(big.feasible(rb.x, 1e-8));
  CHECK(rb.objective <= solve_relaxed(big).objective + 1e-9);
  IntegerOptions tight;
  tight.bnb_limit = 10;
  CHECK_THROWS_AS(solve_residual_integer(big, free30, tight), UnsupportedError);
}

TEST_CASE("randomized rounding") {
  const auto p = toy();
  const auto relaxed = solve_relaxed(p).x;
  const std::vector<double> prio{0.8, 0.9};
  const auto z = randomized_rounding(p, relaxed, prio, 3, 64);
  CHECK(p.feasible(z));
  const bool first = z == std::vector<double>{1.0, 0.0};
  const bool second = z == std::vector<double>{0.0, 1.0};
  const bool empty = z == std::vector<double>{0.0, 0.0};
  CHECK((first || second || empty));
  CHECK(p.value(z) <= 0.625 + 1e-12);
  CHECK(randomized_rounding(p, relaxed, prio, 3, 64) == z);

  const std::vector<double> integral{0.0, 1.0};
  CHECK(randomized_rounding(p, integral, prio, 1, 8) == integral);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto q = random_problem(500 + seed, 10, 8);
    const auto x = solve_relaxed(q).x;
    std::vector<double> pr(10);
    for (int j = 0; j < 10; ++j) pr[static_cast<std::size_t>(j)] = q.objective[static_cast<std::size_t>(j)];
    CHECK(q.feasible(randomized_rounding(q, x, pr, seed, 16), 1e-8));
  }
}

TEST_CASE("problem validation and text dump") {
  LpProblem p;
  p.objective = {1.0};
  p.rows.push_back({{{3, 1.0}}, 1.0, RowKind::Packing});
  CHECK_THROWS_AS(p.validate(), ValidationError);
  const auto text = to_lp_format(toy());
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
}

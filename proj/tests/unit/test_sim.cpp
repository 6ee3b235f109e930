#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "blip/rng.hpp"
#include "blip/sim.hpp"

using namespace blip;

namespace {

DetectionSet detections(const std::vector<std::vector<Index>>& sets) {
  DetectionSet d;
  for (const auto& s : sets) {
    auto g = make_group(make_index_set(s));
    g.pip = 1.0;
    d.discoveries.push_back({g, 1.0});
  }
  return d;
}

}  // namespace

TEST_CASE("ar design with k equal to one is iid") {
  const auto C = ark_covariance(6, 1, 3);
  CHECK((C - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-12);
  const auto X = gen_ark_design(20000, 4, 1, 5);
  const Eigen::MatrixXd S = (X.transpose() * X) / 20000.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) CHECK(std::abs(S(i, j) - (i == j ? 1.0 : 0.0)) < 0.05);
  }
}

TEST_CASE("ar design has unit variance columns") {
  const Index n = 100000;
  const auto X = gen_ark_design(n, 10, 5, 7);
  const auto C = ark_covariance(10, 5, 7);
  for (Index j = 0; j < 10; ++j) {
    const double m = X.col(j).mean();
    const double v = (X.col(j).array() - m).square().sum() / static_cast<double>(n);
    CHECK(std::abs(v - 1.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(n)));
    CHECK(C(j, j) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gen_ark_design(10, 5, 0, 1), ValidationError);
  CHECK(gen_ark_design(10, 5, 3, 1) == gen_ark_design(10, 5, 3, 1));
}

TEST_CASE("ar correlation decays beyond the lag window on average") {
  double near = 0.0, far = 0.0;
  int n_near = 0, n_far = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto C = ark_covariance(30, 3, seed);
    for (Index i = 0; i < 30; ++i) {
      for (Index j = i + 1; j < 30; ++j) {
        if (j - i <= 3) {
          near += std::abs(C(i, j));
          ++n_near;
        } else if (j - i >= 8) {
          far += std::abs(C(i, j));
          ++n_far;
        }
      }
    }
  }
  CHECK(far / n_far < near / n_near);
}

TEST_CASE("sparse glm coefficients") {
  const auto X = gen_ark_design(50, 20, 3, 1);
  const auto all = gen_sparse_glm(X, 1.0, 4.0, 1.0, Link::Gaussian, 2);
  CHECK(all.signals.size() == 20);
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const Index p = 1 + static_cast<Index>(rng.below(200));
    const double s = rng.uniform();
    const auto k = n_nonzero(s, p);
    CHECK(k == static_cast<Index>(std::ceil(s * static_cast<double>(p) - 1e-9)));
    if (p <= 40) {
      const auto Xp = gen_ark_design(10, p, 2, static_cast<std::uint64_t>(t));
      const auto d = gen_sparse_glm(Xp, s, 2.0, 1.0, Link::Gaussian, static_cast<std::uint64_t>(t));
      CHECK(static_cast<Index>(d.signals.size()) == k);
      for (Index j = 0; j < p; ++j) {
        const bool is_signal = std::binary_search(d.signals.begin(), d.signals.end(), j);
        if (is_signal) CHECK(std::abs(d.beta(j)) > 0.1 * std::sqrt(2.0));
        else CHECK(d.beta(j) == 0.0);
      }
    }
  }
  CHECK(n_nonzero(0.05, 100) == 5);
  const auto probit = gen_sparse_glm(X, 0.1, 1.0, 1.0, Link::Probit, 3);
  for (Eigen::Index i = 0; i < probit.response.size(); ++i)
    CHECK((probit.response(i) == 0.0 || probit.response(i) == 1.0));
  CHECK(parse_link("probit") == Link::Probit);
  CHECK(link_name(Link::Gaussian) == "gaussian");
  CHECK_THROWS_AS(parse_link("logit"), ValidationError);
}

TEST_CASE("change point basis") {
  Eigen::MatrixXd expect(3, 3);
  expect << 1, 0, 0, 1, 1, 0, 1, 1, 1;
  CHECK(changepoint_design(3) == expect);
  CHECK_THROWS_AS(changepoint_design(1), ValidationError);
  const auto X = changepoint_design(100);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(100);
  beta(1) = 2.0;
  const Eigen::VectorXd mu = X * beta;
  CHECK(mu(0) == 0.0);
  CHECK(mu(1) == 2.0);
  CHECK(mu(2) == 2.0);
  beta.setZero();
  beta(50) = 5.0;
  beta(52) = -5.0;
  const Eigen::VectorXd jump = X * beta;
  CHECK(jump(49) == 0.0);
  CHECK(jump(50) == 5.0);
  CHECK(jump(51) == 5.0);
  CHECK(jump(52) == 0.0);
}

TEST_CASE("evaluation metrics") {
  const auto truth = Truth::discrete({1, 4, 7});
  const auto perfect = evaluate(detections({{1}, {4}, {7}}), truth, WeightFn::inverse_size());
  CHECK(perfect.power == 3.0);
  CHECK(perfect.normalized_power == 1.0);
  CHECK(perfect.fdp == 0.0);
  const auto pair = evaluate(detections({{4, 5}}), truth, WeightFn::inverse_size());
  CHECK(pair.power == 0.5);
  const auto mixed = evaluate(detections({{1, 2}, {3}}), truth, WeightFn::inverse_size());
  CHECK(mixed.fdp == 0.5);
  CHECK(evaluate(DetectionSet{}, truth, WeightFn::inverse_size()).fdp == 0.0);

  // Random detections recounted by hand.
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<Index> sig;
    for (Index j = 0; j < 30; ++j) {
      if (rng.uniform() < 0.15) sig.push_back(j);
    }
    std::vector<std::vector<Index>> sets;
    for (Index start = 0; start < 30; start += 1 + static_cast<Index>(rng.below(4))) {
      const Index len = 1 + static_cast<Index>(rng.below(3));
      if (rng.uniform() < 0.4) {
        std::vector<Index> s;
        for (Index j = start; j < std::min<Index>(30, start + len); ++j) s.push_back(j);
        sets.push_back(s);
      }
    }
    const auto det = detections(sets);
    double power = 0.0;
    int falses = 0;
    for (const auto& s : sets) {
      bool hit = false;
      for (Index j : s) hit = hit || std::find(sig.begin(), sig.end(), j) != sig.end();
      if (hit) power += 1.0 / static_cast<double>(s.size());
      else ++falses;
    }
    const auto r = evaluate(det, Truth::discrete(sig), WeightFn::inverse_size());
    CHECK(r.power == doctest::Approx(power));
    CHECK(r.fdp == doctest::Approx(sets.empty() ? 0.0 : static_cast<double>(falses) / static_cast<double>(sets.size())));
  }
}

TEST_CASE("continuous truth and count intervals") {
  const auto truth = Truth::continuous({0.5, 0.5, 0.8, 0.8}, 2);
  auto g = make_group(Sphere{{0.5, 0.55}, 0.1});
  CHECK(is_true_discovery(g, truth));
  auto far = make_group(Sphere{{0.2, 0.2}, 0.05});
  CHECK_FALSE(is_true_discovery(far, truth));
  CHECK(is_true_discovery(far, truth, 0.5));
  auto two = make_group(Sphere{{0.65, 0.65}, 0.3}, CountInterval{2, 2});
  CHECK(is_true_discovery(two, truth));
  auto three = make_group(Sphere{{0.65, 0.65}, 0.3}, CountInterval{3, 4});
  CHECK_FALSE(is_true_discovery(three, truth));
}

TEST_CASE("average jaccard") {
  const auto a = detections({{1, 2}});
  const auto b = detections({{2, 3}});
  CHECK(avg_jaccard(a, a) == 1.0);
  CHECK(avg_jaccard(a, detections({{7}})) == 0.0);
  CHECK(avg_jaccard(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(avg_jaccard(DetectionSet{}, DetectionSet{}) == 1.0);
  CHECK(avg_jaccard(a, DetectionSet{}) == 0.0);
}

TEST_CASE("scenario driver") {
  Scenario sc;
  sc.n = 60;
  sc.p = 20;
  sc.k = 3;
  sc.s = 0.1;
  sc.tau2 = 4.0;
  sc.replicates = 2;
  sc.n_iter = 200;
  sc.burn_in = 40;
  sc.max_group_size = 5;
  const auto rows = run_scenario(sc, 11, 1);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.fdp >= 0.0);
    CHECK(r.fdp <= 1.0);
    CHECK(r.power >= 0.0);
  }
  const auto again = run_scenario(sc, 11, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].power == again[i].power);
    CHECK(rows[i].n_discoveries == again[i].n_discoveries);
  }
  Scenario bad = sc;
  bad.methods = {"oracle"};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

#include <doctest.h>

#include <boost/math/distributions/beta.hpp>
#include <cmath>

#include "blip/samplers.hpp"
#include "blip/sim.hpp"
#include "oracles.hpp"

using namespace blip;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <class F>
Moments moments(int n, F&& draw) {
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    s += x;
    ss += x * x;
  }
  const double m = s / n;
  return {m, ss / n - m * m};
}

std::vector<double> marginal_pips(const SampleSet& s, Index p) {
  std::vector<double> out(static_cast<std::size_t>(p), 0.0);
  for (const auto& row : s.signals) {
    for (Index j : row) out[static_cast<std::size_t>(j)] += 1.0;
  }
  for (double& v : out) v /= static_cast<double>(s.size());
  return out;
}

/// Data drawn from the model with the given hyperparameters.
void conjugate_data(std::uint64_t seed, Index n, Index p, const FixedHyper& h, Eigen::MatrixXd& X,
                    Eigen::VectorXd& y) {
  X = gen_ark_design(n, p, 2, seed);
  Rng rng(seed, 5);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (Index j = 0; j < p; ++j) {
    if (rng.uniform() > h.p0) beta(j) = std::sqrt(h.tau2) * rng.normal();
  }
  y = X * beta;
  for (Index i = 0; i < n; ++i) y(i) += std::sqrt(h.sigma2) * rng.normal();
}

}  // namespace

TEST_CASE("config validation") {
  LssConfig c;
  CHECK_NOTHROW(c.validate());
  c.burn_in = c.n_iter;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.block_size = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.prior.p_min = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(3, 2);
  Eigen::VectorXd y(3);
  y << 1.0, std::nan(""), 0.0;
  CHECK_THROWS_AS(lss_gibbs(X, y, LssConfig{}), ValidationError);
  Eigen::VectorXd z(3);
  z << 1.0, 0.5, 0.0;
  CHECK_THROWS_AS(pss_gibbs(X, z, LssConfig{}), ValidationError);
}

TEST_CASE("block weights match the dense marginal likelihood") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd X = gen_ark_design(20, 3, 2, seed);
    Rng rng(seed, 9);
    Eigen::VectorXd r(20);
    for (int i = 0; i < 20; ++i) r(i) = rng.normal();
    const double s2 = 0.7, t2 = 1.3, p0 = 0.8;
    const auto lw = block_log_weights(X, r, s2, t2, p0);
    REQUIRE(lw.size() == 8);
    std::vector<double> ref(8);
    for (std::uint32_t m = 0; m < 8; ++m)
      ref[m] = oracle::log_prior(m, 3, p0) + oracle::gaussian_log_marginal(X, r, m, s2, t2);
    const auto a = oracle::normalize_log(lw);
    const auto b = oracle::normalize_log(ref);
    double total = 0.0;
    for (std::size_t m = 0; m < 8; ++m) {
      CHECK(a[m] == doctest::Approx(b[m]).epsilon(1e-8));
      total += a[m];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("active conditional matches direct Gaussian conditioning") {
  const Eigen::MatrixXd X = gen_ark_design(15, 3, 2, 4);
  Eigen::VectorXd r(15);
  Rng rng(2);
  for (int i = 0; i < 15; ++i) r(i) = rng.normal();
  const double s2 = 0.5, t2 = 2.0;
  const auto got = active_conditional(X, r, s2, t2);
  const Eigen::MatrixXd S = s2 * Eigen::MatrixXd::Identity(15, 15) + t2 * X * X.transpose();
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  const Eigen::VectorXd mean = t2 * X.transpose() * ldlt.solve(r);
  const Eigen::MatrixXd cov = t2 * Eigen::MatrixXd::Identity(3, 3) - t2 * t2 * X.transpose() * ldlt.solve(X);
  CHECK((got.mean - mean).norm() <= 1e-8 * mean.norm());
  CHECK((got.cov - cov).norm() <= 1e-8 * cov.norm());
}

TEST_CASE("hyperparameter draws match their targets") {
  const int N = 100000;
  Hyperpriors h;
  Rng rng(77);
  Eigen::VectorXd r(10);
  for (int i = 0; i < 10; ++i) r(i) = 0.3 * i - 1.0;
  {
    const double a = h.a_sigma + 5.0, b = h.b_sigma + r.squaredNorm() / 2.0;
    const double mean = b / (a - 1.0), var = b * b / ((a - 1.0) * (a - 1.0) * (a - 2.0));
    const auto m = moments(N, [&] { return draw_sigma2(r, h, rng); });
    CHECK(std::abs(m.mean - mean) < 3.0 * std::sqrt(var / N) + 1e-12);
  }
  {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(8);
    beta(1) = 1.5;
    beta(4) = -0.5;
    beta(6) = 2.0;
    Hyperpriors hh = h;
    hh.a_tau = 4.0;
    const double a = hh.a_tau + 1.5, b = hh.b_tau + beta.squaredNorm() / 2.0;
    const double mean = b / (a - 1.0), var = b * b / ((a - 1.0) * (a - 1.0) * (a - 2.0));
    const auto m = moments(N, [&] { return draw_tau2(beta, hh, rng); });
    CHECK(std::abs(m.mean - mean) < 3.0 * std::sqrt(var / N));
  }
  for (double pmin : {0.0, 0.9, 0.999}) {
    Hyperpriors hp = h;
    hp.p_min = pmin;
    const boost::math::beta_distribution<> dist(hp.a0 + 40.0, hp.b0 + 10.0);
    // Truncated moments by Simpson integration.
    const int K = 20000;
    double z = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i <= K; ++i) {
      const double x = pmin + (1.0 - pmin) * i / K;
      const double w = (i == 0 || i == K) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double f = x >= 1.0 ? 0.0 : boost::math::pdf(dist, x);
      z += w * f;
      m1 += w * f * x;
      m2 += w * f * x * x;
    }
    const double mean = m1 / z, var = m2 / z - mean * mean;
    const auto m = moments(N, [&] { return draw_p0(50, 10, hp, rng); });
    CHECK(std::abs(m.mean - mean) < 3.0 * std::sqrt(var / N) + 1e-9);
    CHECK(m.mean >= pmin);
  }
}

TEST_CASE("truncated normal moments") {
  Rng rng(123);
  const int N = 1000000;
  const auto full = moments(N, [&] { return sample_truncated_normal(0.0, 1.0, -INFINITY, INFINITY, rng); });
  CHECK(std::abs(full.mean) < 0.01);
  const auto half = moments(N, [&] { return sample_truncated_normal(0.0, 1.0, 0.0, INFINITY, rng); });
  CHECK(std::abs(half.mean - std::sqrt(2.0 / M_PI)) < 0.005);
  double lo = INFINITY;
  const auto tail = moments(N, [&] {
    const double x = sample_truncated_normal(0.0, 1.0, 8.0, INFINITY, rng);
    lo = std::min(lo, x);
    return x;
  });
  const double phi8 = std::exp(-32.0) / std::sqrt(2.0 * M_PI);
  const double mills = phi8 / (0.5 * std::erfc(8.0 / std::sqrt(2.0)));
  CHECK(lo >= 8.0);
  CHECK(std::abs(tail.mean - mills) < 0.01);
  // Lower tail, shifted and scaled.
  const auto neg = moments(200000, [&] { return sample_truncated_normal(1.0, 4.0, -INFINITY, -9.0, rng); });
  CHECK(neg.mean < -9.0);
  const double phi5 = std::exp(-12.5) / std::sqrt(2.0 * M_PI);
  CHECK(std::abs(neg.mean - (1.0 - 2.0 * phi5 / (0.5 * std::erfc(5.0 / std::sqrt(2.0))))) < 0.01);
  // Narrow two-sided interval: mean near the midpoint.
  const auto narrow = moments(200000, [&] { return sample_truncated_normal(0.0, 1.0, 2.0, 2.01, rng); });
  CHECK(narrow.mean > 2.0);
  CHECK(narrow.mean < 2.01);
  CHECK_THROWS_AS(sample_truncated_normal(0.0, 1.0, 1.0, 1.0, rng), ValidationError);
  CHECK_THROWS_AS(sample_truncated_normal(0.0, 0.0, 0.0, 1.0, rng), ValidationError);
}

TEST_CASE("single variable linear posterior") {
  Eigen::MatrixXd X(30, 1);
  Eigen::VectorXd y(30);
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    X(i, 0) = rng.normal();
    y(i) = 0.4 * X(i, 0) + rng.normal();
  }
  const FixedHyper h{1.0, 1.0, 0.5};
  const auto post = oracle::linear_posterior(X, y, h.sigma2, h.tau2, h.p0);
  LssConfig c;
  c.n_iter = 20000;
  c.burn_in = 500;
  c.fixed = h;
  c.seed = 1;
  const auto res = lss_gibbs(X, y, c);
  CHECK(std::abs(marginal_pips(res.samples, 1)[0] - post[1]) < 0.02);
}

TEST_CASE("linear sampler matches enumeration") {
  const FixedHyper h{1.0, 0.5, 0.7};
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  conjugate_data(31, 40, 6, h, X, y);
  const auto post = oracle::linear_posterior(X, y, h.sigma2, h.tau2, h.p0);
  LssConfig c;
  c.n_iter = 10000;
  c.burn_in = 500;
  c.chains = 2;
  c.block_size = 3;
  c.fixed = h;
  c.seed = 8;
  const auto res = lss_gibbs(X, y, c);
  CHECK(res.samples.size() == 19000);
  CHECK(res.max_residual_drift < 1e-8);
  const auto pips = marginal_pips(res.samples, 6);
  for (Index j = 0; j < 6; ++j) CHECK(std::abs(pips[static_cast<std::size_t>(j)] - oracle::group_pip(post, {j})) < 0.03);

  // Column permutation permutes the pips.
  Eigen::MatrixXd Xr = X.rowwise().reverse();
  const auto rev = marginal_pips(lss_gibbs(Xr, y, c).samples, 6);
  for (Index j = 0; j < 6; ++j) CHECK(std::abs(rev[static_cast<std::size_t>(5 - j)] - pips[static_cast<std::size_t>(j)]) < 0.04);

  // Same seed, same draws; thread count does not matter.
  LssConfig one = c;
  one.n_iter = 300;
  one.burn_in = 30;
  LssConfig threaded = one;
  threaded.threads = 1;
  CHECK(lss_gibbs(X, y, one).samples.signals == lss_gibbs(X, y, threaded).samples.signals);
}

TEST_CASE("hyperprior sampler runs and stays consistent") {
  const Eigen::MatrixXd X = gen_ark_design(60, 12, 3, 3);
  const auto data = gen_sparse_glm(X, 0.2, 4.0, 1.0, Link::Gaussian, 4);
  LssConfig c;
  c.n_iter = 1500;
  c.burn_in = 200;
  c.chains = 2;
  c.store_beta = true;
  c.init_active_prob = 0.3;
  c.seed = 2;
  const auto res = lss_gibbs(X, data.response, c);
  CHECK(res.max_residual_drift < 1e-8);
  REQUIRE(res.beta.size() == 2);
  CHECK(res.beta[0].rows() == 1300);
  for (std::size_t i = 0; i < res.samples.size(); i += 97) {
    const int chain = res.samples.chain[i];
    const auto row = static_cast<Eigen::Index>(i % 1300);
    std::vector<Index> nz;
    for (Index j = 0; j < 12; ++j) {
      if (res.beta[static_cast<std::size_t>(chain)](row, j) != 0.0) nz.push_back(j);
    }
    CHECK(nz == res.samples.signals[i]);
  }
}

TEST_CASE("probit sampler matches quadrature enumeration") {
  const Eigen::MatrixXd X = gen_ark_design(25, 3, 1, 6);
  Rng rng(3);
  Eigen::VectorXd z(25);
  for (int i = 0; i < 25; ++i) z(i) = (1.2 * X(i, 0) + rng.normal()) >= 0.0 ? 1.0 : 0.0;
  const FixedHyper h{1.0, 1.0, 0.6};
  const auto post = oracle::probit_posterior(X, z, h.sigma2, h.tau2, h.p0, 20);
  LssConfig c;
  c.n_iter = 15000;
  c.burn_in = 500;
  c.chains = 2;
  c.fixed = h;
  c.block_size = 3;
  c.seed = 4;
  const auto res = pss_gibbs(X, z, c);
  const auto pips = marginal_pips(res.samples, 3);
  for (Index j = 0; j < 3; ++j) CHECK(std::abs(pips[static_cast<std::size_t>(j)] - oracle::group_pip(post, {j})) < 0.05);

  // Strong separation drives the pip to one.
  Eigen::MatrixXd x1(20, 1);
  Eigen::VectorXd z1(20);
  for (int i = 0; i < 20; ++i) {
    x1(i, 0) = (i < 10 ? -1.0 : 1.0) * (1.0 + 0.1 * i);
    z1(i) = i < 10 ? 0.0 : 1.0;
  }
  LssConfig c1 = c;
  c1.n_iter = 3000;
  c1.fixed = FixedHyper{1.0, 4.0, 0.5};
  CHECK(marginal_pips(pss_gibbs(x1, z1, c1).samples, 1)[0] > 0.99);
}

// Blocked Gibbs samplers for spike-and-slab linear and probit regression,
// plus the truncated normal sampler used for probit data augmentation.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "blip/pips.hpp"
#include "blip/rng.hpp"

namespace blip {

struct Hyperpriors {
  double a_sigma = 2.0, b_sigma = 1.0;
  double a_tau = 2.0, b_tau = 1.0;
  double a0 = 1.0, b0 = 1.0;
  double p_min = 0.9;

  static Hyperpriors misspecified() { return {}; }
};

/// Known hyperparameters; p0 is the prior null probability.
struct FixedHyper {
  double sigma2 = 1.0;
  double tau2 = 1.0;
  double p0 = 0.9;
};

struct LssConfig {
  int n_iter = 2000;
  int burn_in = 200;
  int block_size = 5;
  int chains = 1;
  std::uint64_t seed = 0;
  Hyperpriors prior;
  std::optional<FixedHyper> fixed;
  double init_active_prob = 0.0;  // > 0 starts each chain from a random active set
  bool shift_blocks = true;       // random block offset every iteration
  bool store_beta = false;
  int threads = 0;                // 0: one thread per chain, capped by hardware
  int recompute_every = 100;      // exact residual refresh period

  void validate() const;
};

struct LssResult {
  SampleSet samples;                 // post burn-in draws, all chains in order
  std::vector<Eigen::MatrixXd> beta;  // per chain, draws x p (if stored)
  double max_residual_drift = 0.0;   // largest |r - (y - X beta)| seen at refreshes
};

LssResult lss_gibbs(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const LssConfig& cfg);

/// z must be 0/1. Latent responses are refreshed before every block update.
LssResult pss_gibbs(const Eigen::MatrixXd& X, const Eigen::VectorXd& z, const LssConfig& cfg);

/// One exact draw from N(mu, sigma2) restricted to (lo, hi); either bound
/// may be infinite.
double sample_truncated_normal(double mu, double sigma2, double lo, double hi, Rng& rng);

/// Unnormalized log-probabilities of every active subset of a block (bit i
/// of the index marks column i of XJ as active), given the partial residual
/// r = y - X_{-J} beta_{-J}.
std::vector<double> block_log_weights(const Eigen::MatrixXd& XJ, const Eigen::VectorXd& r,
                                      double sigma2, double tau2, double p0);

struct GaussianMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Conditional law of the active coefficients given the partial residual.
GaussianMoments active_conditional(const Eigen::MatrixXd& XA, const Eigen::VectorXd& r, double sigma2,
                                   double tau2);

double draw_sigma2(const Eigen::VectorXd& r, const Hyperpriors& prior, Rng& rng);
double draw_tau2(const Eigen::VectorXd& beta, const Hyperpriors& prior, Rng& rng);
/// Beta(a0 + p - k, b0 + k) truncated to [p_min, 1].
double draw_p0(Eigen::Index p, Eigen::Index n_active, const Hyperpriors& prior, Rng& rng);

}  // namespace blip

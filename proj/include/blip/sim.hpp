// Synthetic data generators, detection metrics and a small simulation
// driver for regression experiments.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blip/core.hpp"

namespace blip {

/// n i.i.d. rows of a non-stationary AR process with unit-variance columns.
/// Each column draws Dirichlet(0.2, 0.8/(k-1), ...) weights over its own
/// innovation and the previous k-1 columns; k = 1 gives i.i.d. columns.
Eigen::MatrixXd gen_ark_design(Index n, Index p, int k, std::uint64_t seed);

/// Population covariance of the design produced by gen_ark_design.
Eigen::MatrixXd ark_covariance(Index p, int k, std::uint64_t seed);

enum class Link { Gaussian, Probit };
Link parse_link(const std::string& s);
std::string link_name(Link l);

struct GlmData {
  Eigen::VectorXd response;  // y, or z in {0,1} for probit
  Eigen::VectorXd beta;
  std::vector<Index> signals;  // sorted support of beta
};

/// ceil(s p) nonzero coefficients drawn N(0, tau2) conditioned on
/// |beta_j| > 0.1 tau; y ~ N(X beta, sigma2 I); probit returns 1(y >= 0).
GlmData gen_sparse_glm(const Eigen::MatrixXd& X, double s, double tau2, double sigma2, Link link,
                       std::uint64_t seed);

/// Number of nonzero coefficients for sparsity s over p locations.
Index n_nonzero(double s, Index p);

/// T x T step basis: column j is one in rows j..T-1.
Eigen::MatrixXd changepoint_design(Index T);

/// Ground truth: signal indices, or signal points (flattened, `dim` wide).
struct Truth {
  std::vector<Index> signals;
  std::vector<double> points;
  std::size_t dim = 0;

  static Truth discrete(std::vector<Index> s) { return {std::move(s), {}, 0}; }
  static Truth continuous(std::vector<double> pts, std::size_t dim) { return {{}, std::move(pts), dim}; }
  [[nodiscard]] std::size_t size() const noexcept { return dim == 0 ? signals.size() : points.size() / dim; }
};

struct EvalResult {
  double power = 0.0;
  double normalized_power = 0.0;
  double fdp = 0.0;
  std::size_t n_true = 0;
  std::size_t n_false = 0;
};

/// True-discovery indicator of one group: a signal lies in the region
/// (within `slack` for continuous regions), or for count-interval groups the
/// number of such signals lies in the interval.
bool is_true_discovery(const CandidateGroup& g, const Truth& truth, double slack = 0.0);

EvalResult evaluate(const DetectionSet& det, const Truth& truth, const WeightFn& weight,
                    double slack = 0.0);

/// Symmetrized best-match Jaccard similarity between two index-set
/// detection sets; 1 when both are empty.
double avg_jaccard(const DetectionSet& a, const DetectionSet& b);

// ============================================================================
// Simulation driver
// ============================================================================
struct Scenario {
  std::string name = "default";
  Index n = 100;
  Index p = 50;
  int k = 5;
  double s = 0.05;
  double tau2 = 1.0;
  double sigma2 = 1.0;
  Link link = Link::Gaussian;
  std::string error = "fdr";
  double q = 0.1;
  std::vector<std::string> methods{"well", "misspec"};
  int replicates = 1;
  int n_iter = 500;
  int burn_in = 100;
  int chains = 2;
  int block_size = 5;
  int max_group_size = 25;

  void validate() const;
};

struct SimRow {
  std::string scenario;
  int replicate = 0;
  std::string method;
  double power = 0.0;
  double normalized_power = 0.0;
  double fdp = 0.0;
  std::size_t n_discoveries = 0;
  double runtime_ms = 0.0;
};

/// Runs every method on every replicate. Methods: "well" (sampler with the
/// true sigma2, tau2 and p0 = 1 - s) and "misspec" (default hyperpriors).
std::vector<SimRow> run_scenario(const Scenario& sc, std::uint64_t seed, int threads = 0);

}  // namespace blip

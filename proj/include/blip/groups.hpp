// Candidate group generation: contiguous windows, agglomerative clustering
// trees, lattice sphere/cube families and canonical deduplication.
#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blip/core.hpp"
#include "blip/pips.hpp"

namespace blip {

inline constexpr int kDefaultMaxGroupSize = 25;

/// Every window of at most `max_size` consecutive entries of `locations`.
std::vector<CandidateGroup> contiguous_groups(std::span<const Index> locations, int max_size);

enum class Linkage { Single, Average, Complete };

Linkage parse_linkage(const std::string& s);

/// Clusters of size <= max_size from the full agglomerative merge tree.
/// `labels` maps matrix rows to location indices (identity when empty).
/// Ties in the minimum dissimilarity go to the lowest (i, j) cluster pair.
std::vector<CandidateGroup> hierarchical_groups(const Eigen::MatrixXd& dissimilarity,
                                                Linkage linkage, int max_size,
                                                std::span<const Index> labels = {});

enum class DissimilarityKind { AbsOneMinus, OnePlus };

Eigen::MatrixXd dissimilarity_from_corr(const Eigen::MatrixXd& corr, DissimilarityKind kind);

enum class Shape { Sphere, Cube };

struct LatticeResult {
  std::vector<CandidateGroup> groups;
  std::vector<std::string> warnings;
};

/// Regions of each radius centered at lattice points r*z inside the box,
/// plus one region of each radius around every extra center.
LatticeResult lattice_regions(const LocationSpace& space, std::span<const double> radii, Shape shape,
                              const std::vector<std::vector<double>>& extra_centers = {});

/// `n` radii evenly spaced on the log scale between lo and hi (inclusive).
std::vector<double> log_spaced(double lo, double hi, int n);

/// One group per canonical region (+count interval); survivors keep the
/// first-seen id and are ordered by canonical key.
std::vector<CandidateGroup> dedupe(const std::vector<CandidateGroup>& groups,
                                   double quantum = 1e-9);

struct RegressionGroupOptions {
  std::vector<double> kappa_grid{0.0, 0.01, 0.02, 0.03, 0.05, 0.1, 0.2};
  int max_size = kDefaultMaxGroupSize;
};

/// Union over the kappa grid of contiguous groups and clustering trees on
/// the retained locations (single, average and complete linkage) under
/// |1 - corr(X)| and 1 + corr of the sampled inclusion indicators. X may be
/// empty, which skips the first dissimilarity.
std::vector<CandidateGroup> default_regression_groups(const SampleSet& samples, Index p,
                                                      const Eigen::MatrixXd& X,
                                                      const RegressionGroupOptions& opts = {});

/// Correlation matrix of the columns of M; zero-variance columns get zero
/// correlation with everything (and unit diagonal).
Eigen::MatrixXd column_correlation(const Eigen::MatrixXd& M);

}  // namespace blip

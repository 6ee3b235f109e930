// Posterior inclusion probabilities for candidate groups: from posterior
// samples (discrete or continuous locations), SuSiE-style per-effect
// probability matrices, and pooled MCMC chains.
#pragma once

#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "blip/core.hpp"

namespace blip {

/// N posterior draws of signal-location sets.
struct SampleSet {
  std::size_t dim = 0;  // 0 for discrete samples
  std::vector<std::vector<Index>> signals;   // discrete rows
  std::vector<std::vector<double>> points;   // continuous rows, flattened m_i * dim
  std::vector<int> chain;                    // optional per-row chain id

  [[nodiscard]] bool is_discrete() const noexcept { return dim == 0; }
  [[nodiscard]] std::size_t size() const noexcept {
    return is_discrete() ? signals.size() : points.size();
  }
  [[nodiscard]] std::size_t points_in_row(std::size_t i) const { return points[i].size() / dim; }
  [[nodiscard]] std::span<const double> point(std::size_t i, std::size_t k) const {
    return {points[i].data() + k * dim, dim};
  }

  void add_discrete(std::vector<Index> row, int chain_id = 0);
  void add_continuous(std::vector<double> flat_points, int chain_id = 0);

  /// Throws if rows are malformed or fall outside `space`.
  void validate(const LocationSpace* space = nullptr) const;
};

/// Per-group and per-location posterior inclusion probabilities.
struct PipTable {
  std::unordered_map<GroupId, double> pips;
  std::map<Index, double> marginals;
  std::size_t n_samples = 0;  // 0 when not derived from samples

  [[nodiscard]] double get(GroupId id) const;
  [[nodiscard]] bool has(GroupId id) const { return pips.count(id) > 0; }
  /// Writes each group's pip; groups absent from the table receive 0.
  void apply(std::vector<CandidateGroup>& groups) const;
};

/// Rows are the L single-effect probability vectors, each summing to one.
struct SusieAlphas {
  Eigen::MatrixXd alpha;  // L x p
  void validate() const;
};

/// p_G = fraction of samples with a signal in G; also fills marginals for
/// every location appearing in some group.
PipTable pips_from_samples(const SampleSet& samples, const std::vector<CandidateGroup>& groups,
                           const LocationSpace* space = nullptr);

/// Marginal inclusion frequency of every location 0..p-1.
std::vector<double> location_marginals(const SampleSet& samples, Index p);

/// Returns all candidate groups containing a point. Built from an arbitrary
/// sphere/cube family; lattice-centered regions are found by rounding the
/// point to nearby lattice cells, other centers through a uniform bucket grid.
class RegionLocator {
 public:
  explicit RegionLocator(const std::vector<CandidateGroup>& groups);

  /// Ids of every group whose region contains `x` (closed containment).
  void locate(std::span<const double> x, std::vector<GroupId>& out) const;
  [[nodiscard]] std::size_t n_classes() const noexcept { return classes_.size(); }

 private:
  struct CellHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept;
  };
  using CellMap = std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, CellHash>;
  struct Class {
    bool sphere = true;
    double reach = 0.0;
    CellMap lattice;  // keyed by integer lattice coordinate z (center = reach * z)
    CellMap buckets;  // keyed by floor(center / reach)
  };
  std::vector<Class> classes_;
  std::vector<GroupId> ids_;
  std::vector<Region> regions_;
};

/// Sample-driven PIP estimation for continuous locations. Only groups hit by
/// some sample appear in the returned table.
PipTable pips_continuous(const SampleSet& samples, const std::vector<CandidateGroup>& groups,
                         const RegionLocator& locator);

/// Naive per-group containment scan; the reference for pips_continuous.
PipTable pips_continuous_naive(const SampleSet& samples,
                               const std::vector<CandidateGroup>& groups);

/// For each (region, interval) pair, pip = fraction of samples whose point
/// count inside the region lies in the interval.
std::vector<CandidateGroup> count_interval_pips(const SampleSet& samples,
                                                const std::vector<Region>& regions,
                                                const std::vector<CountInterval>& intervals);

/// p_G = 1 - prod_i (1 - min(1, sum_{j in G} alpha_ij)).
PipTable pips_from_susie(const SusieAlphas& alphas, const std::vector<CandidateGroup>& groups);

/// Concatenates chains; pooled PIPs equal PIPs on the concatenation.
SampleSet merge_chains(const std::vector<SampleSet>& chains);

enum class ChainWeighting { PerSample, PerChain };

/// Pools per-chain tables over the same group universe. PerSample weights
/// each chain by its sample count; PerChain averages chains equally.
PipTable merge_chains(const std::vector<PipTable>& chains,
                      ChainWeighting weighting = ChainWeighting::PerSample);

/// Robust lower-bound mode: p_G <- max(0, p_G - delta).
PipTable lower_bound_pips(const PipTable& table, double delta);

}  // namespace blip

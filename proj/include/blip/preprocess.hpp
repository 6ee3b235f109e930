// PIP-based pruning of candidate groups and locations before solving.
#pragma once

#include <map>
#include <optional>
#include <vector>

#include "blip/core.hpp"

namespace blip {

inline constexpr double kDefaultKappaGroup = 0.5;
inline constexpr double kDefaultKappaLoc = 0.001;

/// FDR keeps p_G >= kappa; the other error rates keep p_G >= 1 - level.
std::vector<CandidateGroup> prefilter_groups(const std::vector<CandidateGroup>& groups,
                                             const ErrorRateSpec& spec,
                                             double kappa = kDefaultKappaGroup);

/// Locations whose marginal PIP is at least kappa_loc, in increasing order.
std::vector<Index> prefilter_locations(const std::map<Index, double>& marginals,
                                       double kappa_loc = kDefaultKappaLoc);

/// Throws UnsupportedError for continuous spaces.
std::vector<Index> prefilter_locations(const LocationSpace& space,
                                       const std::map<Index, double>& marginals,
                                       double kappa_loc = kDefaultKappaLoc);

/// Drops G2 whenever a kept G1 strictly inside it has p1 w1 >= p2 w2 and
/// p1 >= 1 - alpha. Pairs with w1 <= w2 are ignored. alpha defaults to q/2.
/// Only FDR and local FDR are narrowed; other rates pass through.
std::vector<CandidateGroup> prenarrow(const std::vector<CandidateGroup>& groups,
                                      const ErrorRateSpec& spec, const WeightFn& weight,
                                      std::optional<double> alpha = std::nullopt);

}  // namespace blip

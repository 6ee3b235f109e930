// Random small problem instances shared by several test binaries.
#pragma once

#include <vector>

#include "blip/core.hpp"
#include "blip/groups.hpp"
#include "blip/rng.hpp"

namespace inst {

/// Up to `m` distinct index-set groups over `p` locations with random pips
/// and stored weights.
inline std::vector<blip::CandidateGroup> random_index_groups(std::uint64_t seed, int m, blip::Index p,
                                                             int max_size = 3) {
  blip::Rng rng(seed, 7);
  std::vector<blip::CandidateGroup> gs;
  for (int k = 0; k < m; ++k) {
    std::vector<blip::Index> idx;
    const auto size = 1 + rng.below(static_cast<std::uint64_t>(max_size));
    for (std::uint64_t t = 0; t < size; ++t) idx.push_back(static_cast<blip::Index>(rng.below(static_cast<std::uint64_t>(p))));
    auto g = blip::make_group(blip::make_index_set(idx));
    g.pip = rng.uniform() < 0.5 ? 0.7 + 0.3 * rng.uniform() : rng.uniform();
    g.weight = 0.2 + rng.uniform();
    gs.push_back(g);
  }
  return blip::dedupe(gs);
}

/// Random circles in the unit square.
inline std::vector<blip::CandidateGroup> random_circles(std::uint64_t seed, int m) {
  blip::Rng rng(seed, 8);
  std::vector<blip::CandidateGroup> gs;
  for (int k = 0; k < m; ++k) {
    auto g = blip::make_group(blip::Sphere{{rng.uniform(), rng.uniform()}, 0.05 + 0.2 * rng.uniform()});
    g.pip = rng.uniform();
    g.weight = 1.0;
    gs.push_back(g);
  }
  return blip::dedupe(gs);
}

inline bool overlaps(const blip::CandidateGroup& a, const blip::CandidateGroup& b) {
  return blip::intersects(a.region, b.region);
}

}  // namespace inst

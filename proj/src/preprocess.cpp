#include "blip/preprocess.hpp"

#include <algorithm>
#include <numeric>

namespace blip {

std::vector<CandidateGroup> prefilter_groups(const std::vector<CandidateGroup>& groups,
                                             const ErrorRateSpec& spec, double kappa) {
  spec.validate();
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw ValidationError("kappa must lie in [0,1]");
  const double floor = spec.kind == ErrorKind::FDR ? kappa : 1.0 - spec.level();
  std::vector<CandidateGroup> out;
  for (const auto& g : groups) {
    if (g.pip >= floor) out.push_back(g);
  }
  return out;
}

std::vector<Index> prefilter_locations(const std::map<Index, double>& marginals, double kappa_loc) {
  if (!(kappa_loc >= 0.0 && kappa_loc <= 1.0)) throw ValidationError("kappa_loc must lie in [0,1]");
  std::vector<Index> out;
  for (const auto& [l, p] : marginals) {
    if (p >= kappa_loc) out.push_back(l);
  }
  return out;
}

std::vector<Index> prefilter_locations(const LocationSpace& space,
                                       const std::map<Index, double>& marginals, double kappa_loc) {
  if (!space.is_discrete())
    throw UnsupportedError("location prefiltering is not defined for continuous locations");
  return prefilter_locations(marginals, kappa_loc);
}

std::vector<CandidateGroup> prenarrow(const std::vector<CandidateGroup>& groups,
                                      const ErrorRateSpec& spec, const WeightFn& weight,
                                      std::optional<double> alpha) {
  spec.validate();
  if (spec.kind != ErrorKind::FDR && spec.kind != ErrorKind::LocalFDR) return groups;
  const double a = alpha.value_or(spec.q / 2.0);
  if (!(a >= 0.0 && a < spec.q)) throw ValidationError("prenarrow alpha must lie in [0, q)");

  const std::size_t n = groups.size();
  std::vector<double> w(n), size(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = weight(groups[i]);
    size[i] = is_index_set(groups[i].region) ? static_cast<double>(region_size(groups[i].region)) : 0.0;
  }
  auto extent = [&](std::size_t i) {
    if (const auto* s = std::get_if<Sphere>(&groups[i].region)) return s->radius;
    if (const auto* c = std::get_if<Cube>(&groups[i].region)) return c->halfwidth;
    return size[i];
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return extent(x) < extent(y); });

  std::vector<char> keep(n, 1);
  std::vector<std::size_t> anchors;  // kept groups that can narrow larger ones
  for (std::size_t i : order) {
    const double v2 = groups[i].pip * w[i];
    for (std::size_t k : anchors) {
      if (groups[k].id == groups[i].id || !(w[k] > w[i])) continue;
      if (groups[k].count_interval || groups[i].count_interval) continue;
      if (groups[k].pip * w[k] >= v2 && is_subset(groups[k].region, groups[i].region) &&
          !is_subset(groups[i].region, groups[k].region)) {
        keep[i] = 0;
        break;
      }
    }
    if (keep[i] && groups[i].pip >= 1.0 - a) anchors.push_back(i);
  }
  std::vector<CandidateGroup> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.push_back(groups[i]);
  }
  return out;
}

}  // namespace blip

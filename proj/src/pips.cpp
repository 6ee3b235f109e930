#include "blip/pips.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace blip {

// ----------------------------------------------------------------------------
// SampleSet
// ----------------------------------------------------------------------------
void SampleSet::add_discrete(std::vector<Index> row, int chain_id) {
  std::sort(row.begin(), row.end());
  row.erase(std::unique(row.begin(), row.end()), row.end());
  signals.push_back(std::move(row));
  chain.push_back(chain_id);
}

void SampleSet::add_continuous(std::vector<double> flat_points, int chain_id) {
  if (dim == 0) throw ValidationError("continuous sample set needs dim >= 1");
  if (flat_points.size() % dim != 0) throw ValidationError("point row length not a multiple of dim");
  points.push_back(std::move(flat_points));
  chain.push_back(chain_id);
}

void SampleSet::validate(const LocationSpace* space) const {
  if (!chain.empty() && chain.size() != size())
    throw ValidationError("chain ids must match the number of samples");
  if (is_discrete()) {
    if (!points.empty()) throw ValidationError("discrete sample set holds points");
    for (const auto& row : signals) {
      for (Index j : row) {
        if (j < 0) throw ValidationError("negative signal index in sample");
        if (space && (!space->is_discrete() || j >= space->size()))
          throw ValidationError("signal index out of range");
      }
    }
    return;
  }
  if (!signals.empty()) throw ValidationError("continuous sample set holds index rows");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() % dim != 0) throw ValidationError("point row length not a multiple of dim");
    if (!space) continue;
    if (space->dim() != dim) throw ValidationError("sample dimension does not match space");
    for (std::size_t k = 0; k < points_in_row(i); ++k) {
      if (!space->contains(point(i, k))) throw ValidationError("sample point outside bounds");
    }
  }
}

// ----------------------------------------------------------------------------
// PipTable
// ----------------------------------------------------------------------------
double PipTable::get(GroupId id) const {
  auto it = pips.find(id);
  return it == pips.end() ? 0.0 : it->second;
}

void PipTable::apply(std::vector<CandidateGroup>& groups) const {
  for (auto& g : groups) g.pip = get(g.id);
}

void SusieAlphas::validate() const {
  if (alpha.rows() < 1 || alpha.cols() < 1) throw ValidationError("alpha matrix is empty");
  for (Eigen::Index i = 0; i < alpha.rows(); ++i) {
    for (Eigen::Index j = 0; j < alpha.cols(); ++j) {
      const double a = alpha(i, j);
      if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("alpha entries must lie in [0,1]");
    }
    if (std::abs(alpha.row(i).sum() - 1.0) > 1e-6)
      throw ValidationError("alpha rows must sum to one");
  }
}

// ----------------------------------------------------------------------------
// Discrete estimators
// ----------------------------------------------------------------------------
PipTable pips_from_samples(const SampleSet& samples, const std::vector<CandidateGroup>& groups,
                           const LocationSpace* space) {
  if (!samples.is_discrete()) throw ValidationError("pips_from_samples needs discrete samples");
  samples.validate(space);
  const std::size_t n = samples.size();
  if (n == 0) throw ValidationError("sample set is empty");

  // Inverted index: location -> rows in which it is a signal.
  std::unordered_map<Index, std::vector<std::uint32_t>> rows_of;
  for (std::size_t i = 0; i < n; ++i) {
    for (Index j : samples.signals[i]) rows_of[j].push_back(static_cast<std::uint32_t>(i));
  }

  PipTable table;
  table.n_samples = n;
  std::vector<std::size_t> stamp(n, 0);
  std::size_t current = 0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (const auto& g : groups) {
    const auto* set = std::get_if<IndexSet>(&g.region);
    if (!set) throw ValidationError("pips_from_samples needs index set regions");
    if (space && !set->indices.empty() && set->indices.back() >= space->size())
      throw ValidationError("group index out of range");
    ++current;
    std::size_t hits = 0;
    for (Index j : set->indices) {
      auto it = rows_of.find(j);
      if (it == rows_of.end()) continue;
      for (auto row : it->second) {
        if (stamp[row] != current) {
          stamp[row] = current;
          ++hits;
        }
      }
      if (!table.marginals.count(j)) {
        table.marginals[j] = static_cast<double>(it->second.size()) * inv_n;
      }
    }
    for (Index j : set->indices) table.marginals.try_emplace(j, 0.0);
    table.pips[g.id] = static_cast<double>(hits) * inv_n;
  }
  return table;
}

std::vector<double> location_marginals(const SampleSet& samples, Index p) {
  if (!samples.is_discrete()) throw UnsupportedError("marginals need discrete samples");
  std::vector<double> m(static_cast<std::size_t>(p), 0.0);
  if (samples.size() == 0) return m;
  for (const auto& row : samples.signals) {
    for (Index j : row) {
      if (j < 0 || j >= p) throw ValidationError("signal index out of range");
      m[static_cast<std::size_t>(j)] += 1.0;
    }
  }
  for (double& x : m) x /= static_cast<double>(samples.size());
  return m;
}

// ----------------------------------------------------------------------------
// Continuous locator
// ----------------------------------------------------------------------------
std::size_t RegionLocator::CellHash::operator()(const std::vector<std::int64_t>& v) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (auto x : v) {
    h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

RegionLocator::RegionLocator(const std::vector<CandidateGroup>& groups) {
  std::map<std::pair<bool, std::int64_t>, std::size_t> class_of;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    const std::vector<double>* center = nullptr;
    double reach = 0.0;
    bool sphere = true;
    if (const auto* s = std::get_if<Sphere>(&g.region)) {
      center = &s->center;
      reach = s->radius;
    } else if (const auto* c = std::get_if<Cube>(&g.region)) {
      center = &c->center;
      reach = c->halfwidth;
      sphere = false;
    } else {
      throw ValidationError("region locator needs sphere or cube regions");
    }
    validate_region(g.region);
    const auto key = std::make_pair(sphere, std::llround(reach * 1e12));
    auto [it, inserted] = class_of.try_emplace(key, classes_.size());
    if (inserted) {
      Class cls;
      cls.sphere = sphere;
      cls.reach = reach;
      classes_.push_back(std::move(cls));
    }
    Class& cls = classes_[it->second];

    std::vector<std::int64_t> z(center->size());
    bool on_lattice = true;
    for (std::size_t i = 0; i < center->size(); ++i) {
      const double c = (*center)[i];
      z[i] = std::llround(c / cls.reach);
      if (std::abs(c - cls.reach * static_cast<double>(z[i])) > 1e-9 * std::max(1.0, std::abs(c)))
        on_lattice = false;
    }
    const std::size_t slot = ids_.size();
    ids_.push_back(g.id);
    regions_.push_back(g.region);
    if (on_lattice) {
      cls.lattice[z].push_back(slot);
    } else {
      for (std::size_t i = 0; i < center->size(); ++i)
        z[i] = static_cast<std::int64_t>(std::floor((*center)[i] / cls.reach));
      cls.buckets[z].push_back(slot);
    }
  }
}

void RegionLocator::locate(std::span<const double> x, std::vector<GroupId>& out) const {
  out.clear();
  const std::size_t d = x.size();
  std::vector<std::int64_t> lo(d), hi(d), z(d);
  auto visit_box = [&](const CellMap& map) {
    if (map.empty()) return;
    z = lo;
    while (true) {
      auto it = map.find(z);
      if (it != map.end()) {
        for (auto slot : it->second) {
          if (contains_point(regions_[slot], x)) out.push_back(ids_[slot]);
        }
      }
      std::size_t i = 0;
      for (; i < d; ++i) {
        if (++z[i] <= hi[i]) break;
        z[i] = lo[i];
      }
      if (i == d) break;
    }
  };
  for (const auto& cls : classes_) {
    for (std::size_t i = 0; i < d; ++i) {
      const double u = x[i] / cls.reach;
      lo[i] = static_cast<std::int64_t>(std::floor(u)) - 1;
      hi[i] = static_cast<std::int64_t>(std::ceil(u)) + 1;
    }
    visit_box(cls.lattice);
    for (std::size_t i = 0; i < d; ++i) {
      const auto cell = static_cast<std::int64_t>(std::floor(x[i] / cls.reach));
      lo[i] = cell - 1;
      hi[i] = cell + 1;
    }
    visit_box(cls.buckets);
  }
}

PipTable pips_continuous(const SampleSet& samples, const std::vector<CandidateGroup>& groups,
                         const RegionLocator& locator) {
  if (samples.is_discrete()) throw ValidationError("pips_continuous needs continuous samples");
  const std::size_t n = samples.size();
  if (n == 0) throw ValidationError("sample set is empty");
  std::unordered_map<GroupId, std::size_t> known;
  known.reserve(groups.size());
  for (const auto& g : groups) known.emplace(g.id, 0);

  std::vector<GroupId> hits, row_hits;
  for (std::size_t i = 0; i < n; ++i) {
    row_hits.clear();
    for (std::size_t k = 0; k < samples.points_in_row(i); ++k) {
      locator.locate(samples.point(i, k), hits);
      row_hits.insert(row_hits.end(), hits.begin(), hits.end());
    }
    std::sort(row_hits.begin(), row_hits.end());
    row_hits.erase(std::unique(row_hits.begin(), row_hits.end()), row_hits.end());
    for (GroupId id : row_hits) {
      auto it = known.find(id);
      if (it == known.end()) throw InternalError("locator returned a group outside the candidate set");
      ++it->second;
    }
  }
  PipTable table;
  table.n_samples = n;
  for (const auto& [id, count] : known) {
    if (count > 0) table.pips[id] = static_cast<double>(count) / static_cast<double>(n);
  }
  return table;
}

PipTable pips_continuous_naive(const SampleSet& samples,
                               const std::vector<CandidateGroup>& groups) {
  const std::size_t n = samples.size();
  PipTable table;
  table.n_samples = n;
  for (const auto& g : groups) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < samples.points_in_row(i); ++k) {
        if (contains_point(g.region, samples.point(i, k))) {
          ++count;
          break;
        }
      }
    }
    if (count > 0) table.pips[g.id] = static_cast<double>(count) / static_cast<double>(n);
  }
  return table;
}

std::vector<CandidateGroup> count_interval_pips(const SampleSet& samples,
                                                const std::vector<Region>& regions,
                                                const std::vector<CountInterval>& intervals) {
  if (samples.is_discrete()) throw ValidationError("count intervals need continuous samples");
  for (const auto& j : intervals) {
    if (j.lo < 1 || j.hi < j.lo) throw ValidationError("count interval needs 1 <= lo <= hi");
  }
  const std::size_t n = samples.size();
  std::vector<CandidateGroup> out;
  out.reserve(regions.size() * intervals.size());
  std::vector<int> counts(n);
  for (const auto& region : regions) {
    validate_region(region);
    for (std::size_t i = 0; i < n; ++i) {
      int c = 0;
      for (std::size_t k = 0; k < samples.points_in_row(i); ++k) {
        if (contains_point(region, samples.point(i, k))) ++c;
      }
      counts[i] = c;
    }
    for (const auto& j : intervals) {
      auto g = make_group(region, j);
      const auto hit = std::count_if(counts.begin(), counts.end(),
                                     [&](int c) { return j.contains(c); });
      g.pip = n ? static_cast<double>(hit) / static_cast<double>(n) : 0.0;
      out.push_back(std::move(g));
    }
  }
  return out;
}

PipTable pips_from_susie(const SusieAlphas& alphas, const std::vector<CandidateGroup>& groups) {
  alphas.validate();
  const auto L = alphas.alpha.rows();
  const auto p = alphas.alpha.cols();
  PipTable table;
  for (const auto& g : groups) {
    const auto* set = std::get_if<IndexSet>(&g.region);
    if (!set) throw ValidationError("SuSiE aggregation needs index set regions");
    double miss = 1.0;
    for (Eigen::Index i = 0; i < L; ++i) {
      double s = 0.0;
      for (Index j : set->indices) {
        if (j < 0 || j >= p) throw ValidationError("group index outside alpha columns");
        s += alphas.alpha(i, j);
      }
      miss *= 1.0 - std::clamp(s, 0.0, 1.0);
    }
    table.pips[g.id] = std::clamp(1.0 - miss, 0.0, 1.0);
    for (Index j : set->indices) {
      if (table.marginals.count(j)) continue;
      double mj = 1.0;
      for (Eigen::Index i = 0; i < L; ++i) mj *= 1.0 - alphas.alpha(i, j);
      table.marginals[j] = 1.0 - mj;
    }
  }
  return table;
}

// ----------------------------------------------------------------------------
// Chains
// ----------------------------------------------------------------------------
SampleSet merge_chains(const std::vector<SampleSet>& chains) {
  SampleSet out;
  if (chains.empty()) return out;
  out.dim = chains.front().dim;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const auto& s = chains[c];
    if (s.dim != out.dim) throw ValidationError("chains mix discrete and continuous samples");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const int id = s.chain.empty() ? static_cast<int>(c) : s.chain[i];
      if (s.is_discrete()) {
        out.signals.push_back(s.signals[i]);
      } else {
        out.points.push_back(s.points[i]);
      }
      out.chain.push_back(id);
    }
  }
  return out;
}

PipTable merge_chains(const std::vector<PipTable>& chains, ChainWeighting weighting) {
  PipTable out;
  if (chains.empty()) return out;
  const auto& first = chains.front();
  double total = 0.0;
  std::vector<double> w(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const auto& t = chains[c];
    if (t.pips.size() != first.pips.size())
      throw ValidationError("chains do not share a group universe");
    for (const auto& [id, _] : first.pips) {
      if (!t.pips.count(id)) throw ValidationError("chains do not share a group universe");
    }
    if (weighting == ChainWeighting::PerSample) {
      if (t.n_samples == 0) throw ValidationError("per-sample pooling needs sample counts");
      w[c] = static_cast<double>(t.n_samples);
    } else {
      w[c] = 1.0;
    }
    total += w[c];
    out.n_samples += t.n_samples;
  }
  for (const auto& [id, _] : first.pips) {
    double s = 0.0;
    for (std::size_t c = 0; c < chains.size(); ++c) s += w[c] * chains[c].pips.at(id);
    out.pips[id] = s / total;
  }
  std::map<Index, double> msum;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (const auto& [j, m] : chains[c].marginals) msum[j] += w[c] * m;
  }
  for (auto& [j, s] : msum) out.marginals[j] = s / total;
  return out;
}

PipTable lower_bound_pips(const PipTable& table, double delta) {
  if (!(delta >= 0.0)) throw ValidationError("lower-bound delta must be nonnegative");
  PipTable out = table;
  for (auto& [_, p] : out.pips) p = std::max(0.0, p - delta);
  return out;
}

}  // namespace blip

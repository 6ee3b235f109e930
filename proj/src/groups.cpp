#include "blip/groups.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace blip {

std::vector<CandidateGroup> contiguous_groups(std::span<const Index> locations, int max_size) {
  if (max_size < 1) throw ValidationError("max_size must be at least 1");
  for (std::size_t i = 1; i < locations.size(); ++i) {
    if (locations[i] <= locations[i - 1])
      throw ValidationError("locations must be sorted and unique");
  }
  std::vector<CandidateGroup> out;
  const std::size_t n = locations.size();
  for (std::size_t s = 1; s <= static_cast<std::size_t>(max_size) && s <= n; ++s) {
    for (std::size_t i = 0; i + s <= n; ++i) {
      std::vector<Index> idx(locations.begin() + static_cast<std::ptrdiff_t>(i),
                             locations.begin() + static_cast<std::ptrdiff_t>(i + s));
      out.push_back(make_group(IndexSet{std::move(idx)}));
    }
  }
  return out;
}

Linkage parse_linkage(const std::string& s) {
  if (s == "single") return Linkage::Single;
  if (s == "average") return Linkage::Average;
  if (s == "complete") return Linkage::Complete;
  throw ValidationError("unknown linkage: " + s);
}

namespace {

void validate_dissimilarity(const Eigen::MatrixXd& d) {
  if (d.rows() != d.cols()) throw ValidationError("dissimilarity matrix must be square");
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (std::abs(d(i, i)) > 1e-12) throw ValidationError("dissimilarity diagonal must be zero");
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      const double x = d(i, j);
      if (!std::isfinite(x) || x < 0.0) throw ValidationError("dissimilarities must be finite and >= 0");
      if (std::abs(x - d(j, i)) > 1e-12 * std::max(1.0, std::abs(x)))
        throw ValidationError("dissimilarity matrix must be symmetric");
    }
  }
}

}  // namespace

std::vector<CandidateGroup> hierarchical_groups(const Eigen::MatrixXd& dissimilarity,
                                                Linkage linkage, int max_size,
                                                std::span<const Index> labels) {
  if (max_size < 1) throw ValidationError("max_size must be at least 1");
  validate_dissimilarity(dissimilarity);
  const auto n = static_cast<std::size_t>(dissimilarity.rows());
  if (!labels.empty() && labels.size() != n)
    throw ValidationError("labels must match the dissimilarity dimension");
  auto label = [&](std::size_t i) { return labels.empty() ? static_cast<Index>(i) : labels[i]; };

  std::vector<CandidateGroup> out;
  std::vector<std::vector<Index>> members(n);
  for (std::size_t i = 0; i < n; ++i) {
    members[i] = {label(i)};
    out.push_back(make_group(IndexSet{members[i]}));
  }
  Eigen::MatrixXd D = dissimilarity;
  std::vector<bool> active(n, true);
  for (std::size_t step = 1; step < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (active[j] && D(i, j) < best) {
          best = D(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    const double ni = static_cast<double>(members[bi].size());
    const double nj = static_cast<double>(members[bj].size());
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      double v = 0.0;
      switch (linkage) {
        case Linkage::Single: v = std::min(D(bi, k), D(bj, k)); break;
        case Linkage::Complete: v = std::max(D(bi, k), D(bj, k)); break;
        case Linkage::Average: v = (ni * D(bi, k) + nj * D(bj, k)) / (ni + nj); break;
      }
      D(bi, k) = D(k, bi) = v;
    }
    active[bj] = false;
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    members[bj].clear();
    if (members[bi].size() <= static_cast<std::size_t>(max_size)) {
      out.push_back(make_group(make_index_set(members[bi])));
    }
  }
  return out;
}

Eigen::MatrixXd dissimilarity_from_corr(const Eigen::MatrixXd& corr, DissimilarityKind kind) {
  if (corr.rows() != corr.cols()) throw ValidationError("correlation matrix must be square");
  Eigen::MatrixXd d(corr.rows(), corr.cols());
  for (Eigen::Index i = 0; i < corr.rows(); ++i) {
    for (Eigen::Index j = 0; j < corr.cols(); ++j) {
      d(i, j) = kind == DissimilarityKind::AbsOneMinus ? std::abs(1.0 - corr(i, j)) : 1.0 + corr(i, j);
    }
    d(i, i) = 0.0;
  }
  return d;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > 0.0) || n < 1) throw ValidationError("log spacing needs positive ends and n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

LatticeResult lattice_regions(const LocationSpace& space, std::span<const double> radii, Shape shape,
                              const std::vector<std::vector<double>>& extra_centers) {
  if (space.is_discrete()) throw UnsupportedError("lattice regions need a continuous space");
  const auto& bounds = space.bounds();
  const std::size_t d = space.dim();
  const double quantum = 1e-9 * space.max_extent();
  for (const auto& c : extra_centers) {
    if (!space.contains(c)) throw ValidationError("extra center outside bounds");
  }
  LatticeResult res;
  auto emit = [&](std::vector<double> center, double r) {
    Region region = shape == Shape::Sphere ? Region{Sphere{std::move(center), r}}
                                           : Region{Cube{std::move(center), r}};
    CandidateGroup g;
    g.id = canonical_id(region, std::nullopt, quantum);
    g.region = std::move(region);
    res.groups.push_back(std::move(g));
  };
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("radii must be positive");
    if (r > space.min_extent()) {
      std::ostringstream os;
      os << "radius " << r << " exceeds the box extent; skipped";
      res.warnings.push_back(os.str());
      continue;
    }
    std::vector<std::int64_t> lo(d), hi(d), z(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double tol = 1e-9 * std::max(1.0, std::abs(bounds[i].hi - bounds[i].lo));
      lo[i] = static_cast<std::int64_t>(std::ceil((bounds[i].lo - tol) / r));
      hi[i] = static_cast<std::int64_t>(std::floor((bounds[i].hi + tol) / r));
    }
    bool empty = false;
    for (std::size_t i = 0; i < d; ++i) empty = empty || lo[i] > hi[i];
    if (empty) continue;
    z = lo;
    while (true) {
      std::vector<double> c(d);
      for (std::size_t i = 0; i < d; ++i) c[i] = r * static_cast<double>(z[i]);
      emit(std::move(c), r);
      std::size_t i = 0;
      for (; i < d; ++i) {
        if (++z[i] <= hi[i]) break;
        z[i] = lo[i];
      }
      if (i == d) break;
    }
    for (const auto& c : extra_centers) emit(c, r);
  }
  res.groups = dedupe(res.groups, quantum);
  return res;
}

std::vector<CandidateGroup> dedupe(const std::vector<CandidateGroup>& groups, double quantum) {
  std::map<std::string, const CandidateGroup*> seen;
  for (const auto& g : groups) seen.try_emplace(canonical_key(g.region, g.count_interval, quantum), &g);
  std::vector<CandidateGroup> out;
  out.reserve(seen.size());
  for (const auto& [_, g] : seen) out.push_back(*g);
  return out;
}

Eigen::MatrixXd column_correlation(const Eigen::MatrixXd& M) {
  const auto p = M.cols();
  const auto n = static_cast<double>(M.rows());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, p);
  if (M.rows() == 0) {
    C.diagonal().setOnes();
    return C;
  }
  Eigen::MatrixXd Z = M.rowwise() - M.colwise().mean();
  Eigen::VectorXd sd(p);
  for (Eigen::Index j = 0; j < p; ++j) sd(j) = std::sqrt(Z.col(j).squaredNorm() / n);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (sd(j) > 1e-12) Z.col(j) /= sd(j);
    else Z.col(j).setZero();
  }
  C = Z.transpose() * Z / n;
  for (Eigen::Index j = 0; j < p; ++j) C(j, j) = 1.0;
  return C;
}

std::vector<CandidateGroup> default_regression_groups(const SampleSet& samples, Index p,
                                                      const Eigen::MatrixXd& X,
                                                      const RegressionGroupOptions& opts) {
  if (p < 1) throw ValidationError("p must be at least 1");
  if (X.size() != 0 && X.cols() != p) throw ValidationError("design matrix has the wrong width");
  if (samples.size() == 0) return {};
  const auto marg = location_marginals(samples, p);

  Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(samples.size()), p);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (Index j : samples.signals[i]) eps(static_cast<Eigen::Index>(i), j) = 1.0;
  }
  const Eigen::MatrixXd d2_full = dissimilarity_from_corr(column_correlation(eps), DissimilarityKind::OnePlus);
  Eigen::MatrixXd d1_full;
  if (X.size() != 0) d1_full = dissimilarity_from_corr(column_correlation(X), DissimilarityKind::AbsOneMinus);

  std::vector<CandidateGroup> all;
  for (double kappa : opts.kappa_grid) {
    std::vector<Index> keep;
    for (Index j = 0; j < p; ++j) {
      if (marg[static_cast<std::size_t>(j)] >= kappa) keep.push_back(j);
    }
    if (keep.empty()) continue;
    auto seq = contiguous_groups(keep, opts.max_size);
    all.insert(all.end(), seq.begin(), seq.end());
    const auto k = static_cast<Eigen::Index>(keep.size());
    auto sub = [&](const Eigen::MatrixXd& full) {
      Eigen::MatrixXd s(k, k);
      for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b) s(a, b) = full(keep[a], keep[b]);
      return s;
    };
    std::vector<Eigen::MatrixXd> dists;
    if (X.size() != 0) dists.push_back(sub(d1_full));
    dists.push_back(sub(d2_full));
    for (const auto& dm : dists) {
      for (Linkage l : {Linkage::Single, Linkage::Average, Linkage::Complete}) {
        auto tree = hierarchical_groups(dm, l, opts.max_size, keep);
        all.insert(all.end(), tree.begin(), tree.end());
      }
    }
  }
  return dedupe(all);
}

}  // namespace blip

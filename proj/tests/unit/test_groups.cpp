#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "blip/groups.hpp"
#include "blip/rng.hpp"
#include "blip/sim.hpp"

using namespace blip;

namespace {

std::set<std::vector<Index>> index_sets(const std::vector<CandidateGroup>& gs) {
  std::set<std::vector<Index>> out;
  for (const auto& g : gs) out.insert(std::get<IndexSet>(g.region).indices);
  return out;
}

// Reference agglomerative clustering: recomputes linkage distances from
// scratch over member lists at every step.
std::set<std::vector<Index>> reference_tree(const Eigen::MatrixXd& D, Linkage link, int max_size) {
  std::vector<std::vector<Index>> clusters;
  for (Index i = 0; i < D.rows(); ++i) clusters.push_back({i});
  std::set<std::vector<Index>> out(clusters.begin(), clusters.end());
  auto dist = [&](const std::vector<Index>& a, const std::vector<Index>& b) {
    double best = link == Linkage::Single ? 1e300 : (link == Linkage::Complete ? -1e300 : 0.0);
    for (Index x : a) {
      for (Index y : b) {
        const double d = D(x, y);
        if (link == Linkage::Single) best = std::min(best, d);
        else if (link == Linkage::Complete) best = std::max(best, d);
        else best += d;
      }
    }
    if (link == Linkage::Average) best /= static_cast<double>(a.size() * b.size());
    return best;
  };
  while (clusters.size() > 1) {
    std::size_t bi = 0, bj = 1;
    double bd = 1e300;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double d = dist(clusters[i], clusters[j]);
        if (d < bd - 1e-12) {
          bd = d;
          bi = i;
          bj = j;
        }
      }
    }
    std::vector<Index> merged = clusters[bi];
    merged.insert(merged.end(), clusters[bj].begin(), clusters[bj].end());
    std::sort(merged.begin(), merged.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    clusters[bi] = merged;
    if (static_cast<int>(merged.size()) <= max_size) out.insert(merged);
  }
  return out;
}

}  // namespace

TEST_CASE("contiguous windows") {
  const std::vector<Index> locs{1, 2, 3};
  CHECK(index_sets(contiguous_groups(locs, 2)) ==
        std::set<std::vector<Index>>{{1}, {2}, {3}, {1, 2}, {2, 3}});
  const std::vector<Index> sparse{4, 9, 17};
  CHECK(index_sets(contiguous_groups(sparse, 3)).count({4, 9, 17}) == 1);
  CHECK(contiguous_groups(std::vector<Index>{}, 3).empty());
  const std::vector<Index> bad{3, 1};
  CHECK_THROWS_AS(contiguous_groups(bad, 2), ValidationError);
}

TEST_CASE("contiguous count formula holds exhaustively") {
  for (int n = 0; n <= 200; n += 7) {
    std::vector<Index> locs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) locs[static_cast<std::size_t>(i)] = 2 * i;
    for (int m : {1, 2, 5, 25, 300}) {
      std::size_t expect = 0;
      for (int s = 1; s <= m; ++s) expect += static_cast<std::size_t>(std::max(0, n - s + 1));
      CHECK(contiguous_groups(locs, m).size() == expect);
    }
  }
}

TEST_CASE("hierarchical clustering examples") {
  Eigen::MatrixXd D2(2, 2);
  D2 << 0, 0.3, 0.3, 0;
  for (auto l : {Linkage::Single, Linkage::Average, Linkage::Complete})
    CHECK(index_sets(hierarchical_groups(D2, l, 2)) == std::set<std::vector<Index>>{{0}, {1}, {0, 1}});
  Eigen::MatrixXd D3(3, 3);
  D3 << 0, 0.1, 0.9, 0.1, 0, 0.9, 0.9, 0.9, 0;
  CHECK(index_sets(hierarchical_groups(D3, Linkage::Single, 2)) ==
        std::set<std::vector<Index>>{{0}, {1}, {2}, {0, 1}});
  Eigen::MatrixXd asym = D3;
  asym(0, 1) = 0.2;
  CHECK_THROWS_AS(hierarchical_groups(asym, Linkage::Single, 2), ValidationError);
}

TEST_CASE("hierarchical clustering matches reference and is laminar") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Eigen::MatrixXd X = gen_ark_design(200, 10, 3, seed);
    const Eigen::MatrixXd D = dissimilarity_from_corr(column_correlation(X), DissimilarityKind::AbsOneMinus);
    for (auto l : {Linkage::Single, Linkage::Average, Linkage::Complete}) {
      const auto got = index_sets(hierarchical_groups(D, l, 6));
      CHECK(got == reference_tree(D, l, 6));
      for (const auto& a : got) {
        for (const auto& b : got) {
          std::vector<Index> inter;
          std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
          CHECK((inter.empty() || inter == a || inter == b));
        }
      }
    }
  }
}

TEST_CASE("dissimilarities from correlation") {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  const auto D = dissimilarity_from_corr(I, DissimilarityKind::AbsOneMinus);
  CHECK(D(0, 1) == 1.0);
  CHECK(D(1, 1) == 0.0);
  Eigen::MatrixXd C = I;
  C(0, 1) = C(1, 0) = 0.99;
  CHECK(dissimilarity_from_corr(C, DissimilarityKind::AbsOneMinus)(0, 1) == doctest::Approx(0.01));
  C(0, 1) = C(1, 0) = -0.4;
  const auto D2 = dissimilarity_from_corr(C, DissimilarityKind::OnePlus);
  CHECK(D2(0, 1) == doctest::Approx(0.6));
  CHECK(D2(0, 0) == 0.0);
}

TEST_CASE("lattice regions") {
  const auto unit = LocationSpace::continuous({{0.0, 1.0}, {0.0, 1.0}});
  const std::vector<double> half{0.5};
  CHECK(lattice_regions(unit, half, Shape::Sphere).groups.size() == 9);
  const std::vector<double> big{2.0, 0.5};
  const auto res = lattice_regions(unit, big, Shape::Cube);
  CHECK(res.groups.size() == 9);
  CHECK(res.warnings.size() == 1);
  const std::vector<std::vector<double>> extra{{0.5, 0.5}, {0.3, 0.3}};
  CHECK(lattice_regions(unit, half, Shape::Sphere, extra).groups.size() == 10);
}

TEST_CASE("lattice containment is bounded by five circles per radius") {
  const auto unit = LocationSpace::continuous({{0.0, 1.0}, {0.0, 1.0}});
  const auto radii = log_spaced(0.05, 0.2, 4);
  CHECK(radii.front() == doctest::Approx(0.05));
  CHECK(radii.back() == doctest::Approx(0.2));
  const auto groups = lattice_regions(unit, radii, Shape::Sphere).groups;
  Rng rng(11);
  for (int t = 0; t < 2000; ++t) {
    const double x[] = {rng.uniform(), rng.uniform()};
    std::size_t hits = 0;
    for (const auto& g : groups) hits += contains_point(g.region, x) ? 1 : 0;
    CHECK(hits <= 5 * radii.size());
  }
}

TEST_CASE("dedupe keeps first id and sorts by key") {
  auto a = make_group(make_index_set({1, 2}));
  auto b = a;
  b.id = 99;
  auto c = make_group(make_index_set({0}));
  const auto out = dedupe({a, b, c});
  REQUIRE(out.size() == 2);
  CHECK(std::find_if(out.begin(), out.end(), [&](const CandidateGroup& g) { return g.id == a.id; }) != out.end());
  auto s1 = make_group(Sphere{{0.5, 0.5}, 0.1});
  auto s2 = make_group(Sphere{{0.5 + 1e-13, 0.5}, 0.1});
  s2.id = 5;
  CHECK(dedupe({s1, s2}).size() == 1);
}

TEST_CASE("default regression groups have no duplicates") {
  const Eigen::MatrixXd X = gen_ark_design(60, 15, 3, 4);
  SampleSet s;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    std::vector<Index> row;
    for (Index j = 0; j < 15; ++j) {
      if (rng.uniform() < 0.1 + 0.05 * static_cast<double>(j % 3)) row.push_back(j);
    }
    s.add_discrete(row);
  }
  RegressionGroupOptions opts;
  opts.max_size = 5;
  const auto groups = default_regression_groups(s, 15, X, opts);
  std::set<std::string> keys;
  for (const auto& g : groups) {
    CHECK(region_size(g.region) <= 5);
    keys.insert(canonical_key(g.region, g.count_interval));
  }
  CHECK(keys.size() == groups.size());
  const std::vector<Index> all{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
  for (const auto& g : contiguous_groups(all, 5)) CHECK(keys.count(canonical_key(g.region, std::nullopt)) == 1);
}

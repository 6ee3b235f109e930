// Intersection graphs of candidate regions and a greedy edge clique cover
// that turns pairwise disjointness into one packing row per clique.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "blip/core.hpp"
#include "blip/lpsolve.hpp"

namespace blip {

/// Vertices are positions in the input group list.
struct IntersectionGraph {
  std::vector<GroupId> vertices;
  std::vector<std::pair<int, int>> edges;  // (u, v) with u < v, lexicographic
  std::vector<std::vector<int>> adj;       // sorted neighbor lists

  [[nodiscard]] std::size_t n_vertices() const noexcept { return vertices.size(); }
  [[nodiscard]] bool has_edge(int u, int v) const;

  static IntersectionGraph from_edges(std::size_t n, std::vector<std::pair<int, int>> edges);
};

/// Edge iff the regions overlap with positive measure (or share an index).
IntersectionGraph build_intersection_graph(const std::vector<CandidateGroup>& groups);

using Clique = std::vector<int>;

/// Greedy cover: every uncovered edge, in lexicographic order, is grown into
/// a clique by repeatedly adding the common neighbor of largest residual
/// degree (ties to the lowest vertex). `ops`, if given, counts elementary
/// neighbor-set operations.
std::vector<Clique> edge_clique_cover(const IntersectionGraph& graph, std::uint64_t* ops = nullptr);

/// True iff every edge lies in some clique and every clique is complete.
bool is_valid_cover(const IntersectionGraph& graph, const std::vector<Clique>& cover);

/// One packing row sum_{G in C} x_G <= 1 per clique.
std::vector<LpRow> clique_constraints(const std::vector<Clique>& cover);

/// One packing row per location shared by at least two index-set groups.
std::vector<LpRow> location_constraints(const std::vector<CandidateGroup>& groups);

}  // namespace blip

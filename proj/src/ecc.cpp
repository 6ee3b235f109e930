#include "blip/ecc.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace blip {

namespace {

std::uint64_t edge_key(int u, int v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

}  // namespace

bool IntersectionGraph::has_edge(int u, int v) const {
  const auto& a = adj[static_cast<std::size_t>(u)];
  return std::binary_search(a.begin(), a.end(), v);
}

IntersectionGraph IntersectionGraph::from_edges(std::size_t n, std::vector<std::pair<int, int>> edges) {
  IntersectionGraph g;
  g.vertices.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.vertices[i] = i;
  for (auto& [u, v] : edges) {
    if (u == v) throw ValidationError("intersection graphs have no self-loops");
    if (u < 0 || v < 0 || static_cast<std::size_t>(std::max(u, v)) >= n)
      throw ValidationError("edge references an unknown vertex");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.adj.resize(n);
  for (const auto& [u, v] : edges) {
    g.adj[static_cast<std::size_t>(u)].push_back(v);
    g.adj[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& a : g.adj) std::sort(a.begin(), a.end());
  g.edges = std::move(edges);
  return g;
}

IntersectionGraph build_intersection_graph(const std::vector<CandidateGroup>& groups) {
  const std::size_t n = groups.size();
  if (n > 0) {
    const bool discrete = is_index_set(groups.front().region);
    for (const auto& g : groups) {
      if (is_index_set(g.region) != discrete)
        throw ValidationError("cannot mix discrete and continuous regions in one graph");
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (intersects(groups[i].region, groups[j].region))
        edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  auto g = IntersectionGraph::from_edges(n, std::move(edges));
  for (std::size_t i = 0; i < n; ++i) g.vertices[i] = groups[i].id;
  return g;
}

std::vector<Clique> edge_clique_cover(const IntersectionGraph& graph, std::uint64_t* ops) {
  const std::size_t n = graph.n_vertices();
  std::uint64_t count = 0;
  std::vector<long> degree(n);
  for (std::size_t v = 0; v < n; ++v) degree[v] = static_cast<long>(graph.adj[v].size());
  std::unordered_set<std::uint64_t> uncovered;
  uncovered.reserve(graph.edges.size() * 2);
  for (const auto& [u, v] : graph.edges) uncovered.insert(edge_key(u, v));

  // Connected components, labelled by their lowest vertex.
  std::vector<int> comp(n, -1);
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{static_cast<int>(s)};
    comp[s] = static_cast<int>(s);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int w : graph.adj[static_cast<std::size_t>(u)]) {
        if (comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = static_cast<int>(s);
          stack.push_back(w);
        }
      }
    }
  }
  std::map<int, std::vector<std::pair<int, int>>> by_comp;
  for (const auto& e : graph.edges) by_comp[comp[static_cast<std::size_t>(e.first)]].push_back(e);

  std::vector<Clique> cover;
  std::vector<int> cand, next;
  for (const auto& [_, edges] : by_comp) {
    for (const auto& [v1, v2] : edges) {
      ++count;
      if (!uncovered.count(edge_key(v1, v2))) continue;
      Clique c{v1, v2};
      cand.clear();
      const auto& a1 = graph.adj[static_cast<std::size_t>(v1)];
      const auto& a2 = graph.adj[static_cast<std::size_t>(v2)];
      std::set_intersection(a1.begin(), a1.end(), a2.begin(), a2.end(), std::back_inserter(cand));
      count += a1.size() + a2.size();
      std::erase_if(cand, [&](int v) { return degree[static_cast<std::size_t>(v)] <= 0; });
      while (!cand.empty()) {
        int star = cand.front();
        for (int v : cand) {
          if (degree[static_cast<std::size_t>(v)] > degree[static_cast<std::size_t>(star)]) star = v;
        }
        c.push_back(star);
        const auto& as = graph.adj[static_cast<std::size_t>(star)];
        next.clear();
        std::set_intersection(cand.begin(), cand.end(), as.begin(), as.end(), std::back_inserter(next));
        count += cand.size() + as.size();
        std::erase_if(next, [&](int v) { return degree[static_cast<std::size_t>(v)] <= 0; });
        cand.swap(next);
      }
      std::sort(c.begin(), c.end());
      for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = i + 1; j < c.size(); ++j) {
          ++count;
          if (uncovered.erase(edge_key(c[i], c[j]))) {
            --degree[static_cast<std::size_t>(c[i])];
            --degree[static_cast<std::size_t>(c[j])];
          }
        }
      }
      cover.push_back(std::move(c));
    }
  }
  if (!uncovered.empty()) throw InternalError("edge clique cover left edges uncovered");
  if (ops) *ops = count;
  return cover;
}

bool is_valid_cover(const IntersectionGraph& graph, const std::vector<Clique>& cover) {
  std::unordered_set<std::uint64_t> covered;
  for (const auto& c : cover) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        if (c[i] == c[j] || !graph.has_edge(c[i], c[j])) return false;
        covered.insert(edge_key(c[i], c[j]));
      }
    }
  }
  for (const auto& [u, v] : graph.edges) {
    if (!covered.count(edge_key(u, v))) return false;
  }
  return true;
}

std::vector<LpRow> clique_constraints(const std::vector<Clique>& cover) {
  std::vector<LpRow> rows;
  rows.reserve(cover.size());
  for (const auto& c : cover) {
    LpRow row;
    for (int v : c) row.coeffs.emplace_back(v, 1.0);
    row.rhs = 1.0;
    row.kind = RowKind::Packing;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LpRow> location_constraints(const std::vector<CandidateGroup>& groups) {
  std::map<Index, std::vector<int>> members;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto* s = std::get_if<IndexSet>(&groups[g].region);
    if (!s) throw ValidationError("location constraints need index set regions");
    for (Index l : s->indices) members[l].push_back(static_cast<int>(g));
  }
  std::vector<LpRow> rows;
  for (const auto& [_, m] : members) {
    if (m.size() < 2) continue;
    LpRow row;
    for (int g : m) row.coeffs.emplace_back(g, 1.0);
    row.rhs = 1.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace blip

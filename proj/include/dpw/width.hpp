#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpw/common.hpp"
#include "dpw/decomposition.hpp"
#include "dpw/graph.hpp"

namespace dpw {

// ---------------------------------------------------------------------------
// Small structural helpers.

/// Connected components as sorted vertex lists, ordered by smallest member.
inline std::vector<std::vector<int>> connected_components(const Graph& g) {
  std::map<int, std::vector<int>> adj;
  for (const auto& e : g.edges()) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::set<int> unseen(g.vertices().begin(), g.vertices().end());
  std::vector<std::vector<int>> comps;
  while (!unseen.empty()) {
    int root = *unseen.begin();
    std::vector<int> comp, stack = {root};
    unseen.erase(root);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (int u : adj[v])
        if (unseen.count(u)) {
          unseen.erase(u);
          stack.push_back(u);
        }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

/// All maximal cliques (Bron-Kerbosch with pivoting). Desk scale only.
inline std::vector<std::vector<int>> maximal_cliques(const Graph& g) {
  const auto& vs = g.vertices();
  int n = static_cast<int>(vs.size());
  if (n > 30) throw size_error("maximal_cliques: too many vertices");
  std::vector<std::uint64_t> adj(n, 0);
  for (const auto& e : g.edges()) {
    int iu = static_cast<int>(std::lower_bound(vs.begin(), vs.end(), e.u) - vs.begin());
    int iv = static_cast<int>(std::lower_bound(vs.begin(), vs.end(), e.v) - vs.begin());
    adj[iu] |= 1ull << iv;
    adj[iv] |= 1ull << iu;
  }
  std::vector<std::vector<int>> out;
  auto expand = [&](auto&& self, std::uint64_t r, std::uint64_t p, std::uint64_t x) -> void {
    if (p == 0 && x == 0) {
      std::vector<int> clique;
      for (int i = 0; i < n; ++i)
        if (r & (1ull << i)) clique.push_back(vs[i]);
      out.push_back(std::move(clique));
      return;
    }
    std::uint64_t px = p | x;
    int pivot = std::countr_zero(px);
    std::uint64_t cand = p & ~adj[pivot];
    while (cand) {
      int v = std::countr_zero(cand);
      cand &= cand - 1;
      std::uint64_t bit = 1ull << v;
      self(self, r | bit, p & adj[v], x & adj[v]);
      p &= ~bit;
      x |= bit;
    }
  };
  if (n > 0) expand(expand, 0, (n == 64) ? ~0ull : ((1ull << n) - 1), 0);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Exact solvers. Both work per connected component (the width of a disjoint
// union is the max over components), so the vertex cap applies to the largest
// component rather than the whole graph.

namespace detail {

struct IndexedComponent {
  std::vector<int> ids;             // index -> vertex id
  std::vector<std::uint32_t> adj;   // index -> neighbor mask
};

inline IndexedComponent index_component(const Graph& g, const std::vector<int>& comp) {
  IndexedComponent ic;
  ic.ids = comp;
  ic.adj.assign(comp.size(), 0);
  for (const auto& e : g.edges()) {
    auto iu = std::lower_bound(comp.begin(), comp.end(), e.u);
    auto iv = std::lower_bound(comp.begin(), comp.end(), e.v);
    if (iu == comp.end() || *iu != e.u || iv == comp.end() || *iv != e.v) continue;
    int a = static_cast<int>(iu - comp.begin());
    int b = static_cast<int>(iv - comp.begin());
    ic.adj[a] |= 1u << b;
    ic.adj[b] |= 1u << a;
  }
  return ic;
}

/// Vertex-separation dynamic program over subsets. Returns the optimal
/// layout; pathwidth equals the vertex separation number.
inline std::vector<int> optimal_separation_layout(const IndexedComponent& ic) {
  int k = static_cast<int>(ic.ids.size());
  std::uint32_t full = (k == 32) ? ~0u : ((1u << k) - 1);
  std::vector<int> f(std::size_t(1) << k, 0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    int boundary = 0;
    for (std::uint32_t t = s; t;) {
      int v = std::countr_zero(t);
      t &= t - 1;
      if (ic.adj[v] & ~s) ++boundary;
    }
    int best = INT32_MAX;
    for (std::uint32_t t = s; t;) {
      int v = std::countr_zero(t);
      t &= t - 1;
      best = std::min(best, f[s & ~(1u << v)]);
    }
    f[s] = std::max(boundary, best);
  }
  std::vector<int> layout(k);
  std::uint32_t s = full;
  for (int pos = k - 1; pos >= 0; --pos) {
    for (std::uint32_t t = s; t;) {
      int v = std::countr_zero(t);
      t &= t - 1;
      if (f[s & ~(1u << v)] <= f[s]) {
        layout[pos] = v;
        s &= ~(1u << v);
        break;
      }
    }
  }
  return layout;
}

/// Standard conversion from a layout to a path decomposition: the bag at
/// position i holds v_i plus every earlier vertex that still has a neighbor
/// at or beyond position i.
inline PathDecomposition layout_to_pd(const IndexedComponent& ic, const std::vector<int>& layout) {
  int k = static_cast<int>(layout.size());
  std::vector<int> pos(k);
  for (int i = 0; i < k; ++i) pos[layout[i]] = i;
  std::vector<int> max_nbr_pos(k, -1);
  for (int v = 0; v < k; ++v)
    for (std::uint32_t t = ic.adj[v]; t;) {
      int u = std::countr_zero(t);
      t &= t - 1;
      max_nbr_pos[v] = std::max(max_nbr_pos[v], pos[u]);
    }
  PathDecomposition pd;
  for (int i = 0; i < k; ++i) {
    std::vector<int> bag = {ic.ids[layout[i]]};
    for (int j = 0; j < i; ++j)
      if (max_nbr_pos[layout[j]] >= i) bag.push_back(ic.ids[layout[j]]);
    std::sort(bag.begin(), bag.end());
    pd.bags.push_back(std::move(bag));
  }
  return pd;
}

/// Vertices outside s (and distinct from v) reachable from v via paths whose
/// interior lies inside s. This is v's clique size when eliminated right
/// after s in an elimination order.
inline int elimination_degree(const IndexedComponent& ic, std::uint32_t s, int v) {
  std::uint32_t seen = 1u << v;
  std::uint32_t stack = 1u << v;
  std::uint32_t outside = 0;
  while (stack) {
    int x = std::countr_zero(stack);
    stack &= stack - 1;
    for (std::uint32_t t = ic.adj[x] & ~seen; t;) {
      int y = std::countr_zero(t);
      t &= t - 1;
      seen |= 1u << y;
      if (s & (1u << y))
        stack |= 1u << y;
      else
        outside |= 1u << y;
    }
  }
  return std::popcount(outside);
}

inline std::vector<int> optimal_elimination_order(const IndexedComponent& ic) {
  int k = static_cast<int>(ic.ids.size());
  std::uint32_t full = (k == 32) ? ~0u : ((1u << k) - 1);
  std::vector<int> f(std::size_t(1) << k, 0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    int best = INT32_MAX;
    for (std::uint32_t t = s; t;) {
      int v = std::countr_zero(t);
      t &= t - 1;
      std::uint32_t rest = s & ~(1u << v);
      best = std::min(best, std::max(f[rest], elimination_degree(ic, rest, v)));
    }
    f[s] = best;
  }
  std::vector<int> order(k);
  std::uint32_t s = full;
  for (int pos = k - 1; pos >= 0; --pos) {
    for (std::uint32_t t = s; t;) {
      int v = std::countr_zero(t);
      t &= t - 1;
      std::uint32_t rest = s & ~(1u << v);
      if (std::max(f[rest], elimination_degree(ic, rest, v)) == f[s]) {
        order[pos] = v;
        s = rest;
        break;
      }
    }
  }
  return order;
}

}  // namespace detail

/// Minimum-width path decomposition via the vertex-separation subset DP.
/// The cap bounds the largest connected component.
inline std::pair<int, PathDecomposition> exact_pathwidth(const Graph& g, int cap = 0) {
  if (cap <= 0) cap = default_caps().exact_solver_vertices;
  if (g.num_vertices() == 0) return {-1, PathDecomposition{}};
  PathDecomposition pd;
  for (const auto& comp : connected_components(g)) {
    if (static_cast<int>(comp.size()) > cap)
      throw size_error("exact_pathwidth: component of " + std::to_string(comp.size()) +
                       " vertices exceeds cap " + std::to_string(cap));
    auto ic = detail::index_component(g, comp);
    auto layout = detail::optimal_separation_layout(ic);
    auto part = detail::layout_to_pd(ic, layout);
    pd.bags.insert(pd.bags.end(), part.bags.begin(), part.bags.end());
  }
  auto report = validate(pd, g);
  if (!report.ok()) throw property_violation("exact_pathwidth: witness failed validation");
  return {pd.width(), pd};
}

/// Minimum-width tree decomposition via the elimination-order subset DP.
inline std::pair<int, TreeDecomposition> exact_treewidth(const Graph& g, int cap = 0) {
  if (cap <= 0) cap = default_caps().exact_solver_vertices;
  if (g.num_vertices() == 0) return {-1, TreeDecomposition{}};
  TreeDecomposition td;
  int next_node = 0;
  std::vector<int> component_roots;
  for (const auto& comp : connected_components(g)) {
    if (static_cast<int>(comp.size()) > cap)
      throw size_error("exact_treewidth: component of " + std::to_string(comp.size()) +
                       " vertices exceeds cap " + std::to_string(cap));
    auto ic = detail::index_component(g, comp);
    auto order = detail::optimal_elimination_order(ic);
    int k = static_cast<int>(comp.size());
    // Simulate the elimination to recover bags and the tree structure.
    std::vector<std::set<int>> fill(k);
    for (int v = 0; v < k; ++v)
      for (std::uint32_t t = ic.adj[v]; t;) {
        int u = std::countr_zero(t);
        t &= t - 1;
        fill[v].insert(u);
      }
    std::vector<int> pos(k);
    for (int i = 0; i < k; ++i) pos[order[i]] = i;
    int base = next_node;
    for (int i = 0; i < k; ++i) {
      int v = order[i];
      std::vector<int> bag = {ic.ids[v]};
      int parent_pos = INT32_MAX;
      for (int u : fill[v]) {
        bag.push_back(ic.ids[u]);
        parent_pos = std::min(parent_pos, pos[u]);
      }
      std::sort(bag.begin(), bag.end());
      td.bags[base + i] = std::move(bag);
      if (parent_pos != INT32_MAX)
        td.links.push_back({base + i, base + parent_pos});
      else if (i + 1 < k)
        td.links.push_back({base + i, base + i + 1});
      for (int a : fill[v])
        for (int b : fill[v])
          if (a != b) fill[a].insert(b);
      for (int u : fill[v]) fill[u].erase(v);
    }
    component_roots.push_back(base + k - 1);
    next_node += k;
  }
  for (std::size_t i = 0; i + 1 < component_roots.size(); ++i)
    td.links.push_back({component_roots[i], component_roots[i + 1]});
  auto report = validate(td, g);
  if (!report.ok()) throw property_violation("exact_treewidth: witness failed validation");
  return {td.width(), td};
}

// ---------------------------------------------------------------------------
// Tree partitions.

/// Best-effort tree partition. For each connected component and a handful of
/// BFS roots, the bags are the intersections of the distance layers with the
/// connected components of the graph restricted to that layer and deeper;
/// this always satisfies the partition and adjacency conditions. The
/// smallest-width attempt wins; target_width only stops the search early.
inline TreePartition heuristic_tree_partition(const Graph& g, int target_width = 0) {
  if (g.num_vertices() == 0)
    throw invalid_argument("heuristic_tree_partition: graph must be nonempty");

  auto build = [&](const std::vector<int>& roots) {
    std::map<int, std::vector<int>> adj;
    for (const auto& e : g.edges()) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    for (auto& [v, ns] : adj) std::sort(ns.begin(), ns.end());
    // BFS layers per component, component roots taken from `roots` order.
    std::map<int, int> layer;
    std::vector<std::vector<int>> layer_vertices;
    for (int root : roots) {
      if (layer.count(root)) continue;
      std::vector<int> frontier = {root};
      layer[root] = 0;
      int depth = 0;
      while (!frontier.empty()) {
        if (static_cast<int>(layer_vertices.size()) <= depth) layer_vertices.resize(depth + 1);
        auto& lv = layer_vertices[depth];
        lv.insert(lv.end(), frontier.begin(), frontier.end());
        std::vector<int> next;
        for (int v : frontier)
          for (int u : adj[v])
            if (!layer.count(u)) {
              layer[u] = depth + 1;
              next.push_back(u);
            }
        frontier = std::move(next);
        ++depth;
      }
    }
    int depth_count = static_cast<int>(layer_vertices.size());
    // Bottom-up union-find over the graph restricted to layers >= i. After
    // the layer-i unions, rep_at[i] snapshots the component representative
    // of every vertex in layers i and i+1.
    std::map<int, int> uf;
    for (int v : g.vertices()) uf[v] = v;
    auto find = [&](int x) {
      while (uf[x] != x) x = uf[x] = uf[uf[x]];
      return x;
    };
    std::vector<std::map<int, int>> rep_at(depth_count);
    for (int i = depth_count - 1; i >= 0; --i) {
      for (int v : layer_vertices[i])
        for (int u : adj[v])
          if (layer[u] >= i) {
            int ru = find(u), rv = find(v);
            if (ru != rv) uf[std::max(ru, rv)] = std::min(ru, rv);
          }
      for (int v : layer_vertices[i]) rep_at[i][v] = find(v);
      if (i + 1 < depth_count)
        for (int v : layer_vertices[i + 1]) rep_at[i][v] = find(v);
    }
    // Bags are the layer-i slices of the (>= i) components; the bag of a
    // deeper slice hangs under the layer-above slice of the same component.
    TreePartition tp;
    int next_node = 0;
    std::vector<std::map<int, int>> node_of(depth_count);  // layer -> rep -> node id
    for (int i = 0; i < depth_count; ++i) {
      std::map<int, std::vector<int>> groups;
      for (int v : layer_vertices[i]) groups[rep_at[i][v]].push_back(v);
      for (auto& [rep, bag] : groups) {
        std::sort(bag.begin(), bag.end());
        node_of[i][rep] = next_node;
        if (i > 0) tp.links.push_back({next_node, node_of[i - 1].at(rep_at[i - 1].at(bag[0]))});
        tp.bags[next_node] = std::move(bag);
        ++next_node;
      }
    }
    return tp;
  };

  // Candidate roots: all vertices when small, otherwise lowest ids plus a
  // maximum-degree vertex.
  std::vector<int> candidates;
  if (g.num_vertices() <= 8) {
    candidates = g.vertices();
  } else {
    for (int i = 0; i < 4; ++i) candidates.push_back(g.vertices()[i]);
    int best_v = g.vertices()[0], best_d = -1;
    for (int v : g.vertices())
      if (g.degree(v) > best_d) {
        best_d = g.degree(v);
        best_v = v;
      }
    candidates.push_back(best_v);
  }
  std::optional<TreePartition> best;
  for (int root : candidates) {
    std::vector<int> roots = {root};
    for (int v : g.vertices()) roots.push_back(v);  // remaining components by id
    TreePartition tp = build(roots);
    if (!best || tp.width() < best->width()) best = std::move(tp);
    if (target_width > 0 && best->width() <= target_width) break;
  }
  auto report = validate(*best, g);
  if (!report.ok())
    throw property_violation("heuristic_tree_partition: construction failed validation: " +
                             report.problems.front());
  return *best;
}

namespace detail {

/// Rooting of a tree-partition forest: lowest node id per component becomes
/// the root; depth and a global BFS discovery order are recorded.
struct RootedForest {
  std::map<int, int> parent;  // root maps to itself
  std::map<int, int> depth;
  std::map<int, int> discovery;  // BFS discovery index
  std::vector<int> bfs_order;
};

inline RootedForest root_forest(const TreePartition& tp) {
  std::map<int, std::vector<int>> adj;
  std::set<int> nodes;
  for (const auto& [node, bag] : tp.bags) nodes.insert(node);
  for (const auto& [a, b] : tp.links) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& [n, ns] : adj) std::sort(ns.begin(), ns.end());
  RootedForest rf;
  int counter = 0;
  for (int root : nodes) {
    if (rf.parent.count(root)) continue;
    rf.parent[root] = root;
    rf.depth[root] = 0;
    std::vector<int> frontier = {root};
    while (!frontier.empty()) {
      std::vector<int> next;
      for (int v : frontier) {
        rf.discovery[v] = counter++;
        rf.bfs_order.push_back(v);
        for (int u : adj[v])
          if (!rf.parent.count(u)) {
            rf.parent[u] = v;
            rf.depth[u] = rf.depth[v] + 1;
            next.push_back(u);
          }
      }
      frontier = std::move(next);
    }
  }
  return rf;
}

}  // namespace detail

/// Tree decomposition induced by a tree partition: each non-root bag absorbs
/// its parent's bag. Width is at most 2*width(tp) - 1.
inline TreeDecomposition induce_tree_decomposition(const TreePartition& tp, const Graph& g) {
  auto report = validate(tp, g);
  if (!report.ok())
    throw invalid_argument("induce_tree_decomposition: invalid tree partition: " +
                           report.problems.front());
  auto rf = detail::root_forest(tp);
  TreeDecomposition td;
  std::vector<int> roots;
  for (const auto& [node, bag] : tp.bags) {
    std::vector<int> merged = bag;
    if (rf.parent.at(node) == node) {
      roots.push_back(node);
    } else {
      const auto& pbag = tp.bags.at(rf.parent.at(node));
      merged.insert(merged.end(), pbag.begin(), pbag.end());
      std::sort(merged.begin(), merged.end());
    }
    td.bags[node] = std::move(merged);
  }
  td.links = tp.links;
  for (std::size_t i = 0; i + 1 < roots.size(); ++i) td.links.push_back({roots[i], roots[i + 1]});
  auto check = validate(td, g);
  if (!check.ok())
    throw property_violation("induce_tree_decomposition: result failed validation: " +
                             check.problems.front());
  if (!tp.bags.empty() && td.width() > 2 * tp.width() - 1)
    throw property_violation("induce_tree_decomposition: width bound 2w-1 violated");
  return td;
}

/// True iff every maximal clique of g has all its pairs inside a single part.
inline bool cover_preserves_cliques(const DCover& cover, const Graph& g) {
  for (const auto& clique : maximal_cliques(g)) {
    bool inside_some = false;
    for (const auto& part : cover.parts) {
      bool all = true;
      for (int v : clique)
        if (!part.graph.has_vertex(v)) {
          all = false;
          break;
        }
      if (all)
        for (std::size_t i = 0; i < clique.size() && all; ++i)
          for (std::size_t j = i + 1; j < clique.size() && all; ++j)
            if (!part.graph.has_edge(clique[i], clique[j])) all = false;
      if (all) {
        inside_some = true;
        break;
      }
    }
    if (!inside_some) return false;
  }
  return true;
}

/// Splits g into two subgraphs of pathwidth at most 2*width(tp) - 1 each,
/// together covering g and keeping every clique inside one part. Bags of the
/// induced tree decomposition are grouped by the parity of their layer; each
/// part takes the union of the subgraphs spanned by its bags, and its path
/// decomposition concatenates sibling groups (ordered by the parent's BFS
/// discovery, members by node id).
inline DCover even_odd_split(const TreePartition& tp, const Graph& g) {
  auto report = validate(tp, g);
  if (!report.ok())
    throw invalid_argument("even_odd_split: invalid tree partition: " + report.problems.front());
  TreeDecomposition induced = induce_tree_decomposition(tp, g);
  auto rf = detail::root_forest(tp);

  DCover cover;
  for (int parity = 0; parity <= 1; ++parity) {  // 0: odd layers (roots), 1: even
    std::vector<int> nodes;
    for (const auto& [node, bag] : tp.bags)
      if (rf.depth.at(node) % 2 == parity) nodes.push_back(node);
    // Sibling groups: nodes sharing a parent; roots form their own groups.
    std::sort(nodes.begin(), nodes.end(), [&](int a, int b) {
      int ka = (rf.parent.at(a) == a) ? rf.discovery.at(a) : rf.discovery.at(rf.parent.at(a));
      int kb = (rf.parent.at(b) == b) ? rf.discovery.at(b) : rf.discovery.at(rf.parent.at(b));
      if (ka != kb) return ka < kb;
      return a < b;
    });
    DCover::Part part;
    std::set<int> vs;
    std::map<int, Edge> es;
    for (int node : nodes) {
      const auto& bag = induced.bags.at(node);
      part.pd.bags.push_back(bag);
      vs.insert(bag.begin(), bag.end());
      for (const auto& e : g.edges())
        if (detail::bag_contains(bag, e.u) && detail::bag_contains(bag, e.v)) es.insert({e.id, e});
    }
    std::vector<Edge> edge_list;
    for (const auto& [id, e] : es) edge_list.push_back(e);
    part.graph = Graph::from_parts(std::vector<int>(vs.begin(), vs.end()), std::move(edge_list));
    cover.parts.push_back(std::move(part));
  }

  auto structure = validate_cover_structure(cover, g);
  if (!structure.ok())
    throw property_violation("even_odd_split: cover failed validation: " +
                             structure.problems.front());
  int bound = 2 * tp.width() - 1;
  for (const auto& part : cover.parts)
    if (part.pd.width() > bound)
      throw property_violation("even_odd_split: part width exceeds 2w-1");
  cover.clique_preserving = cover_preserves_cliques(cover, g);
  if (!cover.clique_preserving)
    throw property_violation("even_odd_split: cover is not clique preserving");
  return cover;
}

// ---------------------------------------------------------------------------
// d-cover search.

enum class CoverMode { Exact, Heuristic };

namespace detail {

/// Pathwidth of the subgraph spanned by an edge subset, memoized by mask.
struct PartWidthCache {
  const Graph& g;
  std::map<std::uint32_t, int> cache;

  int width(std::uint32_t mask) {
    auto it = cache.find(mask);
    if (it != cache.end()) return it->second;
    std::vector<int> ids;
    for (std::size_t i = 0; i < g.edges().size(); ++i)
      if (mask & (1u << i)) ids.push_back(g.edges()[i].id);
    int w = exact_pathwidth(edge_induced_subgraph(g, ids)).first;
    cache[mask] = w;
    return w;
  }
};

inline Graph edges_to_part(const Graph& g, const std::vector<int>& edge_ids,
                           bool absorb_isolated) {
  Graph part = edge_induced_subgraph(g, edge_ids);
  if (!absorb_isolated) return part;
  std::vector<int> vs = part.vertices();
  for (int v : g.vertices())
    if (g.degree(v) == 0) vs.push_back(v);
  return Graph::from_parts(std::move(vs), std::vector<Edge>(part.edges().begin(), part.edges().end()));
}

}  // namespace detail

/// Searches for a d-part cover minimizing the maximum part pathwidth.
/// Exact mode enumerates canonical d-colorings of the edge set (first edge
/// fixed to color 0, each later edge at most one color beyond the current
/// maximum) and scores parts with the exact solver. Heuristic mode uses the
/// even/odd split for d=2 and a greedy edge coloring otherwise.
inline DCover d_cover_search(const Graph& g, int d, CoverMode mode, int edge_cap = 0) {
  if (d < 1) throw invalid_argument("d_cover_search: d must be >= 1");
  if (edge_cap <= 0) edge_cap = default_caps().exact_cover_edges;

  auto finish = [&](std::vector<std::vector<int>> color_classes) {
    DCover cover;
    for (int c = 0; c < d; ++c) {
      DCover::Part part;
      part.graph = detail::edges_to_part(
          g, c < static_cast<int>(color_classes.size()) ? color_classes[c] : std::vector<int>{},
          /*absorb_isolated=*/c == 0);
      auto [w, pd] = exact_pathwidth(part.graph);
      part.pd = std::move(pd);
      cover.parts.push_back(std::move(part));
    }
    auto structure = validate_cover_structure(cover, g);
    if (!structure.ok())
      throw property_violation("d_cover_search: cover failed validation: " +
                               structure.problems.front());
    cover.clique_preserving = cover_preserves_cliques(cover, g);
    return cover;
  };

  if (mode == CoverMode::Heuristic) {
    if (d == 2 && g.num_vertices() > 0) return even_odd_split(heuristic_tree_partition(g), g);
    if (d == 1) {
      DCover cover;
      DCover::Part part;
      part.graph = g;
      auto [w, pd] = exact_pathwidth(g);
      part.pd = std::move(pd);
      cover.parts.push_back(std::move(part));
      cover.clique_preserving = true;
      return cover;
    }
    // Greedy: assign each edge to the color with the fewest already-colored
    // edges touching its endpoints.
    std::vector<std::vector<int>> classes(d);
    std::vector<std::map<int, int>> incident(d);  // color -> vertex -> count
    for (const auto& e : g.edges()) {
      int best_c = 0, best_score = INT32_MAX;
      for (int c = 0; c < d; ++c) {
        int score = incident[c][e.u] + incident[c][e.v];
        if (score < best_score) {
          best_score = score;
          best_c = c;
        }
      }
      classes[best_c].push_back(e.id);
      incident[best_c][e.u]++;
      incident[best_c][e.v]++;
    }
    return finish(std::move(classes));
  }

  int m = g.num_edges();
  if (m > edge_cap)
    throw size_error("d_cover_search: " + std::to_string(m) + " edges exceeds exact cap " +
                     std::to_string(edge_cap));
  if (m == 0) return finish({});

  detail::PartWidthCache cache{g, {}};
  std::vector<int> coloring(m, 0);
  std::vector<int> best_coloring;
  int best_width = INT32_MAX;
  auto score = [&](const std::vector<int>& col) {
    std::vector<std::uint32_t> masks(d, 0);
    for (int i = 0; i < m; ++i) masks[col[i]] |= 1u << i;
    int w = -1;
    for (int c = 0; c < d; ++c) w = std::max(w, cache.width(masks[c]));
    return w;
  };
  auto rec = [&](auto&& self, int i, int max_used) -> void {
    if (i == m) {
      int w = score(coloring);
      if (w < best_width) {
        best_width = w;
        best_coloring = coloring;
      }
      return;
    }
    int limit = std::min(d - 1, max_used + 1);
    for (int c = 0; c <= limit; ++c) {
      coloring[i] = c;
      self(self, i + 1, std::max(max_used, c));
    }
  };
  rec(rec, 0, -1);

  std::vector<std::vector<int>> classes(d);
  for (int i = 0; i < m; ++i) classes[best_coloring[i]].push_back(g.edges()[i].id);
  return finish(std::move(classes));
}

// ---------------------------------------------------------------------------
// Incidence lift.

/// The incidence expansion of g: g itself plus one fresh vertex per edge,
/// adjacent to that edge's endpoints. Vertex ids must be dense; the fresh
/// vertex for edge e gets id |V| + e.id, matching the variable numbering of
/// the edge-padded CNF of g.
inline Graph incidence_expand(const Graph& g) {
  if (!g.has_dense_vertices())
    throw invalid_argument("incidence_expand: vertex ids must be dense 0..n-1");
  int n = g.num_vertices();
  std::vector<int> vs = g.vertices();
  std::vector<Edge> es;
  int next_id = 0;
  for (const auto& e : g.edges()) {
    int x = n + e.id;
    vs.push_back(x);
    es.push_back({next_id++, e.u, e.v});
    es.push_back({next_id++, e.u, x});
    es.push_back({next_id++, x, e.v});
  }
  return Graph::from_parts(std::move(vs), std::move(es));
}

/// Lifts a cover of g to a cover of incidence_expand(g). Each part gains the
/// fresh vertices of its own edges; in the part's path decomposition, every
/// bag is replicated once per edge it hosts, and each replica absorbs that
/// edge's fresh vertex. Part widths grow by at most one.
inline DCover lift_cover_to_incidence(const DCover& cover, const Graph& g) {
  auto structure = validate_cover_structure(cover, g);
  if (!structure.ok())
    throw invalid_argument("lift_cover_to_incidence: invalid cover: " +
                           structure.problems.front());
  Graph h = incidence_expand(g);
  int n = g.num_vertices();
  DCover lifted;
  for (const auto& part : cover.parts) {
    DCover::Part lp;
    std::vector<int> vs = part.graph.vertices();
    std::vector<Edge> es;
    int next_id = 0;
    for (const auto& e : part.graph.edges()) {
      int x = n + e.id;
      vs.push_back(x);
      es.push_back({next_id++, e.u, e.v});
      es.push_back({next_id++, e.u, x});
      es.push_back({next_id++, x, e.v});
    }
    lp.graph = Graph::from_parts(std::move(vs), std::move(es));
    // Assign each part edge to the first bag holding both endpoints.
    std::map<std::size_t, std::vector<int>> hosted;  // bag index -> edge ids
    for (const auto& e : part.graph.edges()) {
      for (std::size_t b = 0; b < part.pd.bags.size(); ++b)
        if (detail::bag_contains(part.pd.bags[b], e.u) &&
            detail::bag_contains(part.pd.bags[b], e.v)) {
          hosted[b].push_back(e.id);
          break;
        }
    }
    for (std::size_t b = 0; b < part.pd.bags.size(); ++b) {
      auto it = hosted.find(b);
      if (it == hosted.end()) {
        lp.pd.bags.push_back(part.pd.bags[b]);
        continue;
      }
      std::sort(it->second.begin(), it->second.end());
      for (int eid : it->second) {
        std::vector<int> bag = part.pd.bags[b];
        bag.push_back(n + eid);
        std::sort(bag.begin(), bag.end());
        lp.pd.bags.push_back(std::move(bag));
      }
    }
    if (lp.pd.width() > part.pd.width() + 1)
      throw property_violation("lift_cover_to_incidence: width grew by more than one");
    lifted.parts.push_back(std::move(lp));
  }
  auto lifted_structure = validate_cover_structure(lifted, h);
  if (!lifted_structure.ok())
    throw property_violation("lift_cover_to_incidence: lifted cover failed validation: " +
                             lifted_structure.problems.front());
  lifted.clique_preserving = cover_preserves_cliques(lifted, h);
  return lifted;
}

/// Certified lower bound on the d-cover pathwidth: some part keeps at least
/// |E|/d edges, and a graph on at most |V| vertices with that many edges has
/// treewidth (hence pathwidth) at least |E|/(d*|V|).
inline int cover_pathwidth_lower_bound(const Graph& g, int d) {
  if (d < 1) throw invalid_argument("cover_pathwidth_lower_bound: d must be >= 1");
  long long e = g.num_edges(), v = g.num_vertices();
  if (e == 0 || v == 0) return 0;
  return static_cast<int>((e + d * v - 1) / (d * v));
}

}  // namespace dpw

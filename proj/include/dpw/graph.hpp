#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dpw/common.hpp"

namespace dpw {

/// Undirected edge with a stable identifier. Endpoints are normalized so
/// that u < v.
struct Edge {
  int id;
  int u;
  int v;

  std::pair<int, int> endpoints() const { return {u, v}; }
  bool operator==(const Edge&) const = default;
};

/// Simple undirected graph over integer vertex ids. Vertex and edge ids are
/// stable under subgraph extraction, which lets covers and decompositions of
/// a subgraph refer back to the host graph. Instances are immutable after
/// construction.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from explicit parts. Rejects self-loops, duplicate
  /// endpoint pairs, duplicate edge ids, and edges with unknown endpoints.
  static Graph from_parts(std::vector<int> vertices, std::vector<Edge> edges) {
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.id < b.id; });
    std::set<std::pair<int, int>> pairs;
    std::set<int> ids;
    for (auto& e : edges) {
      if (e.u == e.v) throw invalid_argument("Graph: self-loop on vertex " + std::to_string(e.u));
      if (e.u > e.v) std::swap(e.u, e.v);
      if (!std::binary_search(vertices.begin(), vertices.end(), e.u) ||
          !std::binary_search(vertices.begin(), vertices.end(), e.v))
        throw invalid_argument("Graph: edge " + std::to_string(e.id) + " has unknown endpoint");
      if (!pairs.insert(e.endpoints()).second)
        throw invalid_argument("Graph: duplicate edge {" + std::to_string(e.u) + "," +
                               std::to_string(e.v) + "}");
      if (!ids.insert(e.id).second)
        throw invalid_argument("Graph: duplicate edge id " + std::to_string(e.id));
    }
    Graph g;
    g.vertices_ = std::move(vertices);
    g.edges_ = std::move(edges);
    return g;
  }

  /// Convenience: vertices 0..n-1, edges given as endpoint pairs with ids
  /// assigned in input order.
  static Graph from_edge_pairs(int n, const std::vector<std::pair<int, int>>& pairs) {
    std::vector<int> vs(n);
    for (int i = 0; i < n; ++i) vs[i] = i;
    std::vector<Edge> es;
    es.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
      es.push_back({static_cast<int>(i), pairs[i].first, pairs[i].second});
    return from_parts(std::move(vs), std::move(es));
  }

  const std::vector<int>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  bool has_vertex(int v) const {
    return std::binary_search(vertices_.begin(), vertices_.end(), v);
  }

  std::optional<Edge> find_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    for (const auto& e : edges_)
      if (e.u == u && e.v == v) return e;
    return std::nullopt;
  }

  bool has_edge(int u, int v) const { return find_edge(u, v).has_value(); }

  std::optional<Edge> edge_by_id(int id) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), id,
                               [](const Edge& e, int x) { return e.id < x; });
    if (it != edges_.end() && it->id == id) return *it;
    return std::nullopt;
  }

  /// Sorted neighbor list.
  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (const auto& e : edges_) {
      if (e.u == v) out.push_back(e.v);
      if (e.v == v) out.push_back(e.u);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  int degree(int v) const {
    int d = 0;
    for (const auto& e : edges_)
      if (e.u == v || e.v == v) ++d;
    return d;
  }

  /// True when vertex ids are exactly 0..n-1.
  bool has_dense_vertices() const {
    for (int i = 0; i < num_vertices(); ++i)
      if (vertices_[i] != i) return false;
    return true;
  }

  bool operator==(const Graph&) const = default;

 private:
  std::vector<int> vertices_;  // sorted
  std::vector<Edge> edges_;    // sorted by id
};

/// Union of two graphs over a shared id space. Edges are equal iff they join
/// the same endpoint pair; when the same pair carries different ids, the
/// first operand's id wins. An id of the second operand that is already
/// taken by a different pair is remapped to the smallest unused id.
inline Graph graph_union(const Graph& g1, const Graph& g2) {
  std::vector<int> vs = g1.vertices();
  vs.insert(vs.end(), g2.vertices().begin(), g2.vertices().end());
  std::vector<Edge> es = g1.edges();
  std::set<std::pair<int, int>> pairs;
  std::set<int> used;
  for (const auto& e : es) {
    pairs.insert(e.endpoints());
    used.insert(e.id);
  }
  for (const auto& e : g2.edges()) {
    if (pairs.count(e.endpoints())) continue;
    int id = e.id;
    if (used.count(id)) {
      id = 0;
      while (used.count(id)) ++id;
    }
    es.push_back({id, e.u, e.v});
    pairs.insert(e.endpoints());
    used.insert(id);
  }
  return Graph::from_parts(std::move(vs), std::move(es));
}

/// G[S]: subgraph induced by a vertex set. Edge ids are preserved.
inline Graph induced_subgraph(const Graph& g, const std::vector<int>& s) {
  std::set<int> keep(s.begin(), s.end());
  for (int v : keep)
    if (!g.has_vertex(v))
      throw invalid_argument("induced_subgraph: unknown vertex " + std::to_string(v));
  std::vector<Edge> es;
  for (const auto& e : g.edges())
    if (keep.count(e.u) && keep.count(e.v)) es.push_back(e);
  return Graph::from_parts(std::vector<int>(keep.begin(), keep.end()), std::move(es));
}

/// Subgraph spanned by an edge id set; vertices are exactly the endpoints,
/// so the result has no isolated vertices.
inline Graph edge_induced_subgraph(const Graph& g, const std::vector<int>& edge_ids) {
  std::vector<Edge> es;
  std::set<int> vs;
  for (int id : edge_ids) {
    auto e = g.edge_by_id(id);
    if (!e) throw invalid_argument("edge_induced_subgraph: unknown edge id " + std::to_string(id));
    es.push_back(*e);
    vs.insert(e->u);
    vs.insert(e->v);
  }
  return Graph::from_parts(std::vector<int>(vs.begin(), vs.end()), std::move(es));
}

inline int max_degree(const Graph& g) {
  int best = 0;
  for (int v : g.vertices()) best = std::max(best, g.degree(v));
  return best;
}

/// True iff s induces a clique in g and every pair of s is an edge of host.
inline bool is_clique_contained(const Graph& g, const Graph& host, const std::vector<int>& s) {
  for (int v : s)
    if (!g.has_vertex(v))
      throw invalid_argument("is_clique_contained: unknown vertex " + std::to_string(v));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (!g.has_edge(s[i], s[j])) return false;
      if (!host.has_edge(s[i], s[j])) return false;
    }
  return true;
}

/// Structural equality: same vertex set and same endpoint-pair set. Edge ids
/// are ignored, which is what comparisons across independently constructed
/// graphs need.
inline bool same_structure(const Graph& a, const Graph& b) {
  if (a.vertices() != b.vertices()) return false;
  std::set<std::pair<int, int>> pa, pb;
  for (const auto& e : a.edges()) pa.insert(e.endpoints());
  for (const auto& e : b.edges()) pb.insert(e.endpoints());
  return pa == pb;
}

// ---------------------------------------------------------------------------
// Generators. All are deterministic for fixed parameters and seed.

inline Graph path_graph(int n) {
  if (n < 1) throw invalid_argument("path_graph: n must be >= 1");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < n; ++i) pairs.push_back({i, i + 1});
  return Graph::from_edge_pairs(n, pairs);
}

inline Graph cycle_graph(int n) {
  if (n < 3) throw invalid_argument("cycle_graph: n must be >= 3");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < n; ++i) pairs.push_back({i, i + 1});
  pairs.push_back({0, n - 1});
  return Graph::from_edge_pairs(n, pairs);
}

/// r x c grid. Vertex (i,j) has id i*c + j; row edges come first per cell.
inline Graph grid_graph(int rows, int cols) {
  if (rows < 1 || cols < 1) throw invalid_argument("grid_graph: dimensions must be >= 1");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      int v = i * cols + j;
      if (j + 1 < cols) pairs.push_back({v, v + 1});
      if (i + 1 < rows) pairs.push_back({v, v + cols});
    }
  return Graph::from_edge_pairs(rows * cols, pairs);
}

inline Graph complete_graph(int n) {
  if (n < 1) throw invalid_argument("complete_graph: n must be >= 1");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  return Graph::from_edge_pairs(n, pairs);
}

/// Star on n vertices with center 0.
inline Graph star_graph(int n) {
  if (n < 2) throw invalid_argument("star_graph: n must be >= 2");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i < n; ++i) pairs.push_back({0, i});
  return Graph::from_edge_pairs(n, pairs);
}

/// Random tree: vertex i attaches to a uniformly chosen earlier vertex.
inline Graph random_tree(int n, Rng& rng) {
  if (n < 1) throw invalid_argument("random_tree: n must be >= 1");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i < n; ++i) {
    int p = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i)));
    pairs.push_back({p, i});
  }
  return Graph::from_edge_pairs(n, pairs);
}

/// Random partial k-tree: build a k-tree by repeatedly attaching a new vertex
/// to a random existing k-clique, then keep each edge with probability
/// keep_percent/100. Treewidth is at most k by construction.
inline Graph random_partial_ktree(int n, int k, int keep_percent, Rng& rng) {
  if (n < 1) throw invalid_argument("random_partial_ktree: n must be >= 1");
  if (k < 1) throw invalid_argument("random_partial_ktree: k must be >= 1");
  if (keep_percent < 0 || keep_percent > 100)
    throw invalid_argument("random_partial_ktree: keep_percent must be in [0,100]");
  std::set<std::pair<int, int>> all;
  int base = std::min(n, k + 1);
  for (int i = 0; i < base; ++i)
    for (int j = i + 1; j < base; ++j) all.insert({i, j});
  std::vector<std::vector<int>> cliques;  // k-cliques available for attachment
  if (base == k + 1) {
    for (int skip = 0; skip < base; ++skip) {
      std::vector<int> q;
      for (int i = 0; i < base; ++i)
        if (i != skip) q.push_back(i);
      cliques.push_back(q);
    }
  }
  for (int v = base; v < n; ++v) {
    if (cliques.empty()) {
      // k+1 > n at the start; fall back to attaching to all previous vertices
      std::vector<int> q;
      for (int i = 0; i < v; ++i) q.push_back(i);
      cliques.push_back(q);
    }
    const std::vector<int> q = cliques[rng.next_below(cliques.size())];
    for (int u : q) all.insert({std::min(u, v), std::max(u, v)});
    for (std::size_t drop = 0; drop < q.size(); ++drop) {
      std::vector<int> nq;
      for (std::size_t i = 0; i < q.size(); ++i)
        if (i != drop) nq.push_back(q[i]);
      nq.push_back(v);
      std::sort(nq.begin(), nq.end());
      cliques.push_back(nq);
    }
  }
  std::vector<std::pair<int, int>> pairs;
  for (const auto& p : all)
    if (rng.chance(static_cast<std::uint64_t>(keep_percent), 100)) pairs.push_back(p);
  return Graph::from_edge_pairs(n, pairs);
}

// ---------------------------------------------------------------------------
// Edge-list text format: optional "n <count>" header declaring vertices
// 0..count-1, one "u v" pair per line, '#' starts a comment.

inline void write_edge_list(const Graph& g, std::ostream& os) {
  os << "n " << g.num_vertices() << "\n";
  for (const auto& e : g.edges()) os << e.u << " " << e.v << "\n";
}

inline Graph read_edge_list(std::istream& is) {
  std::vector<std::pair<int, int>> pairs;
  std::set<int> vs;
  int declared = -1;
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "n") {
      if (!(ls >> declared) || declared < 0)
        throw invalid_argument("edge list: bad vertex count header");
      continue;
    }
    int u = 0, v = 0;
    try {
      u = std::stoi(first);
    } catch (const std::exception&) {
      throw invalid_argument("edge list: bad token '" + first + "'");
    }
    if (!(ls >> v)) throw invalid_argument("edge list: line with a single endpoint");
    pairs.push_back({u, v});
    vs.insert(u);
    vs.insert(v);
  }
  if (declared >= 0) {
    for (int i = 0; i < declared; ++i) vs.insert(i);
    for (int v : vs)
      if (v >= declared)
        throw invalid_argument("edge list: endpoint " + std::to_string(v) +
                               " outside declared vertex range");
  }
  std::vector<Edge> es;
  es.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i)
    es.push_back({static_cast<int>(i), pairs[i].first, pairs[i].second});
  return Graph::from_parts(std::vector<int>(vs.begin(), vs.end()), std::move(es));
}

inline void write_dot(const Graph& g, std::ostream& os) {
  os << "graph g {\n";
  for (int v : g.vertices()) os << "  " << v << ";\n";
  for (const auto& e : g.edges())
    os << "  " << e.u << " -- " << e.v << " [label=\"e" << e.id << "\"];\n";
  os << "}\n";
}

}  // namespace dpw

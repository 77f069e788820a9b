#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpw/cnf.hpp"
#include "dpw/graph.hpp"

namespace dpw {

struct NbpEdge {
  int id;
  int from;
  int to;
  std::optional<Literal> label;
};

/// Nondeterministic branching program: a DAG with one source, one sink,
/// multi-edges allowed, and optional literal labels. A total assignment is
/// carried when some source-sink path uses only literals it contains.
/// Between one ordered node pair there is at most one unlabeled edge and at
/// most one edge per literal. Immutable after construction.
class Nbp {
 public:
  Nbp() = default;

  static Nbp from_parts(std::vector<int> nodes, std::vector<NbpEdge> edges, int source,
                        int sink) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::sort(edges.begin(), edges.end(),
              [](const NbpEdge& a, const NbpEdge& b) { return a.id < b.id; });
    Nbp z;
    z.nodes_ = std::move(nodes);
    z.edges_ = std::move(edges);
    z.source_ = source;
    z.sink_ = sink;
    z.validate_and_index();
    return z;
  }

  const std::vector<int>& nodes() const { return nodes_; }
  const std::vector<NbpEdge>& edges() const { return edges_; }
  int source() const { return source_; }
  int sink() const { return sink_; }
  int size() const { return static_cast<int>(edges_.size()); }  // |Z| = edge count

  const NbpEdge& edge_by_id(int id) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), id,
                               [](const NbpEdge& e, int x) { return e.id < x; });
    if (it == edges_.end() || it->id != id)
      throw invalid_argument("Nbp: unknown edge id " + std::to_string(id));
    return *it;
  }

  /// Edge indices (into edges()) leaving / entering a node.
  const std::vector<int>& out_indices(int node) const { return out_.at(node); }
  const std::vector<int>& in_indices(int node) const { return in_.at(node); }

  /// Nodes in a fixed topological order (by Kahn's algorithm, smallest id
  /// first among ready nodes).
  const std::vector<int>& topo_order() const { return topo_; }

  /// Sorted ids of the variables appearing as labels.
  std::vector<int> var_set() const {
    std::set<int> vs;
    for (const auto& e : edges_)
      if (e.label) vs.insert(e.label->var);
    return std::vector<int>(vs.begin(), vs.end());
  }

 private:
  void validate_and_index() {
    std::set<int> node_set(nodes_.begin(), nodes_.end());
    if (!node_set.count(source_)) throw invalid_argument("Nbp: source is not a node");
    if (!node_set.count(sink_)) throw invalid_argument("Nbp: sink is not a node");
    if (source_ == sink_ && !edges_.empty())
      throw invalid_argument("Nbp: source equals sink in a program with edges");
    std::set<int> ids;
    std::set<std::tuple<int, int, int, bool>> slots;  // from, to, var(-1 unlab), polarity
    for (const auto& e : edges_) {
      if (!node_set.count(e.from) || !node_set.count(e.to))
        throw invalid_argument("Nbp: edge " + std::to_string(e.id) + " has unknown endpoint");
      if (!ids.insert(e.id).second)
        throw invalid_argument("Nbp: duplicate edge id " + std::to_string(e.id));
      auto slot = e.label ? std::make_tuple(e.from, e.to, e.label->var, e.label->positive)
                          : std::make_tuple(e.from, e.to, -1, false);
      if (!slots.insert(slot).second)
        throw invalid_argument("Nbp: parallel edges with the same label between " +
                               std::to_string(e.from) + " and " + std::to_string(e.to));
    }
    for (int v : nodes_) {
      out_[v];
      in_[v];
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      out_[edges_[i].from].push_back(static_cast<int>(i));
      in_[edges_[i].to].push_back(static_cast<int>(i));
    }
    std::map<int, int> indeg;
    for (int v : nodes_) indeg[v] = static_cast<int>(in_[v].size());
    std::set<int> ready;
    for (int v : nodes_)
      if (indeg[v] == 0) ready.insert(v);
    while (!ready.empty()) {
      int v = *ready.begin();
      ready.erase(ready.begin());
      topo_.push_back(v);
      for (int ei : out_[v])
        if (--indeg[edges_[ei].to] == 0) ready.insert(edges_[ei].to);
    }
    if (topo_.size() != nodes_.size()) throw invalid_argument("Nbp: graph has a cycle");
    for (int v : nodes_) {
      if (in_[v].empty() && v != source_)
        throw invalid_argument("Nbp: node " + std::to_string(v) + " has no in-edges");
      if (out_[v].empty() && v != sink_)
        throw invalid_argument("Nbp: node " + std::to_string(v) + " has no out-edges");
    }
    if (!in_[source_].empty()) throw invalid_argument("Nbp: source has in-edges");
    if (!out_[sink_].empty()) throw invalid_argument("Nbp: sink has out-edges");
  }

  std::vector<int> nodes_;
  std::vector<NbpEdge> edges_;
  std::map<int, std::vector<int>> out_, in_;
  std::vector<int> topo_;
  int source_ = 0, sink_ = 0;
};

inline bool is_monotone(const Nbp& z) {
  for (const auto& e : z.edges())
    if (e.label && !e.label->positive) return false;
  return true;
}

/// True iff some consistent source-sink path's labels are contained in s.
/// Equivalent formulation: the sink is reachable using only edges whose
/// label (if any) appears in s.
inline bool carries(const Nbp& z, const LiteralSet& s) {
  std::set<int> reached = {z.source()};
  for (int v : z.topo_order()) {
    if (!reached.count(v)) continue;
    for (int ei : z.out_indices(v)) {
      const auto& e = z.edges()[ei];
      if (!e.label || s.contains(*e.label)) reached.insert(e.to);
    }
  }
  return reached.count(z.sink()) > 0;
}

/// All carried total assignments over Var(z), in lexicographic order.
inline std::vector<LiteralSet> carried_assignments(const Nbp& z, int cap = 0) {
  if (cap <= 0) cap = default_caps().enumeration_vars;
  std::vector<int> vars = z.var_set();
  int n = static_cast<int>(vars.size());
  if (n > cap)
    throw size_error("carried_assignments: " + std::to_string(n) + " variables exceeds cap " +
                     std::to_string(cap));
  std::vector<LiteralSet> out;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    LiteralSet s = assignment_from_mask(vars, mask);
    if (carries(z, s)) out.push_back(s);
  }
  return out;
}

/// Set equality between the carried assignments of z and the models of f.
/// The variable universes must match exactly.
inline bool represents(const Nbp& z, const Cnf& f, int cap = 0) {
  if (cap <= 0) cap = default_caps().enumeration_vars;
  std::vector<int> zvars = z.var_set();
  if (zvars != f.var_ids())
    throw invalid_argument("represents: variable universes differ");
  int n = static_cast<int>(zvars.size());
  if (n > cap)
    throw size_error("represents: " + std::to_string(n) + " variables exceeds cap " +
                     std::to_string(cap));
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    LiteralSet s = assignment_from_mask(zvars, mask);
    if (carries(z, s) != satisfies(s, f)) return false;
  }
  return true;
}

/// Maximum, over variables x and source-sink paths P, of the number of
/// x-labeled edges on P. Longest-path DP per variable, no path enumeration.
inline int read_bound(const Nbp& z) {
  int best = 0;
  for (int x : z.var_set()) {
    std::map<int, int> cnt;
    cnt[z.source()] = 0;
    for (int v : z.topo_order()) {
      if (!cnt.count(v)) continue;
      for (int ei : z.out_indices(v)) {
        const auto& e = z.edges()[ei];
        int c = cnt[v] + (e.label && e.label->var == x ? 1 : 0);
        auto it = cnt.find(e.to);
        if (it == cnt.end() || it->second < c) cnt[e.to] = c;
      }
    }
    best = std::max(best, cnt[z.sink()]);
  }
  return best;
}

/// Number of source-sink paths (saturating at cap+1).
inline long long count_paths(const Nbp& z, long long cap) {
  std::map<int, long long> cnt;
  cnt[z.source()] = 1;
  for (int v : z.topo_order()) {
    if (!cnt.count(v)) continue;
    for (int ei : z.out_indices(v)) {
      long long& c = cnt[z.edges()[ei].to];
      c = std::min(c + cnt[v], cap + 1);
    }
  }
  return cnt.count(z.sink()) ? cnt[z.sink()] : (z.source() == z.sink() ? 1 : 0);
}

/// All source-sink paths as edge-id sequences, in DFS order following edge
/// ids. Throws size_error when the count exceeds the cap.
inline std::vector<std::vector<int>> enumerate_paths(const Nbp& z, long long cap = 0) {
  if (cap <= 0) cap = default_caps().path_count;
  if (count_paths(z, cap) > cap)
    throw size_error("enumerate_paths: more than " + std::to_string(cap) + " paths");
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto dfs = [&](auto&& self, int v) -> void {
    if (v == z.sink()) {
      out.push_back(cur);
      if (z.sink() != z.source() || !cur.empty()) return;
    }
    for (int ei : z.out_indices(v)) {
      cur.push_back(z.edges()[ei].id);
      self(self, z.edges()[ei].to);
      cur.pop_back();
    }
  };
  dfs(dfs, z.source());
  return out;
}

/// Node sequence visited by an edge-id path starting at the source.
inline std::vector<int> path_nodes(const Nbp& z, const std::vector<int>& path) {
  std::vector<int> ns = {z.source()};
  for (int id : path) {
    const auto& e = z.edge_by_id(id);
    if (e.from != ns.back())
      throw invalid_argument("path_nodes: edge sequence is not a path from the source");
    ns.push_back(e.to);
  }
  return ns;
}

/// Greedy fragmentation of a path into read-once pieces: cut exactly when
/// the next labeled edge repeats a variable of the running fragment. Returns
/// the indices where fragments start; greedy is optimal per path.
inline std::vector<std::size_t> greedy_fragment_starts(const Nbp& z, const std::vector<int>& path) {
  std::vector<std::size_t> starts;
  std::set<int> frag_vars;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i == 0) starts.push_back(0);
    const auto& e = z.edge_by_id(path[i]);
    if (!e.label) continue;
    if (frag_vars.count(e.label->var)) {
      starts.push_back(i);
      frag_vars.clear();
    }
    frag_vars.insert(e.label->var);
  }
  if (path.empty()) starts.push_back(0);
  return starts;
}

enum class SeparabilityMode { Auto, PathEnumeration, FragmentDp };

/// Maximum over source-sink paths of the minimal number of read-once
/// fragments. The subset DP (state: current fragment's variable set) is
/// exact and avoids path enumeration; it is used automatically when the
/// label alphabet has at most 20 variables.
inline int separability_number(const Nbp& z, SeparabilityMode mode = SeparabilityMode::Auto,
                               long long path_cap = 0) {
  std::vector<int> vars = z.var_set();
  if (mode == SeparabilityMode::Auto)
    mode = vars.size() <= 20 ? SeparabilityMode::FragmentDp : SeparabilityMode::PathEnumeration;
  if (mode == SeparabilityMode::FragmentDp) {
    if (vars.size() > 20) throw size_error("separability_number: too many variables for the DP");
    std::map<int, int> bit;
    for (std::size_t i = 0; i < vars.size(); ++i) bit[vars[i]] = static_cast<int>(i);
    // state: variables of the running fragment -> most cuts seen so far
    std::map<int, std::map<std::uint32_t, int>> states;
    states[z.source()][0] = 0;
    for (int v : z.topo_order()) {
      auto it = states.find(v);
      if (it == states.end()) continue;
      for (int ei : z.out_indices(v)) {
        const auto& e = z.edges()[ei];
        for (const auto& [frag, cuts] : it->second) {
          std::uint32_t nfrag = frag;
          int ncuts = cuts;
          if (e.label) {
            std::uint32_t b = 1u << bit[e.label->var];
            if (frag & b) {
              nfrag = b;
              ncuts = cuts + 1;
            } else {
              nfrag = frag | b;
            }
          }
          auto& slot = states[e.to][nfrag];
          slot = std::max(slot, ncuts);
        }
      }
    }
    int best = 0;
    for (const auto& [frag, cuts] : states[z.sink()]) best = std::max(best, cuts);
    return best + 1;
  }
  auto paths = enumerate_paths(z, path_cap);
  std::size_t best = 1;
  for (const auto& p : paths) best = std::max(best, greedy_fragment_starts(z, p).size());
  return static_cast<int>(best);
}

// ---------------------------------------------------------------------------
// Constructions.

namespace detail {

/// Chain program for one star: a long edge labeled with the center variable
/// in parallel with per-leaf (leaf var | edge var) choice segments.
inline Nbp star_program(int center_var, const std::vector<std::pair<int, int>>& leaf_and_edge_vars) {
  int m = static_cast<int>(leaf_and_edge_vars.size());
  if (m < 1) throw invalid_argument("star_program: need at least one leaf");
  std::vector<int> nodes(m + 1);
  for (int i = 0; i <= m; ++i) nodes[i] = i;
  std::vector<NbpEdge> edges;
  int id = 0;
  edges.push_back({id++, 0, m, pos(center_var)});
  for (int i = 0; i < m; ++i) {
    edges.push_back({id++, i, i + 1, pos(leaf_and_edge_vars[i].first)});
    edges.push_back({id++, i, i + 1, pos(leaf_and_edge_vars[i].second)});
  }
  return Nbp::from_parts(std::move(nodes), std::move(edges), 0, m);
}

}  // namespace detail

/// Identifies the sink of each program with the source of the next. Nodes
/// and edges are renumbered sequentially. For monotone inputs the carried
/// set of the chain is the intersection of the inputs' carried sets.
inline Nbp chain(const std::vector<Nbp>& zs) {
  if (zs.empty()) throw invalid_argument("chain: need at least one program");
  if (zs.size() == 1) return zs[0];
  std::vector<int> nodes;
  std::vector<NbpEdge> edges;
  int next_node = 0, next_edge = 0;
  int source = -1;
  int carry = -1;  // global id of the previous program's sink
  for (std::size_t i = 0; i < zs.size(); ++i) {
    std::map<int, int> local;
    if (i > 0) local[zs[i].source()] = carry;
    for (int v : zs[i].nodes()) {
      if (local.count(v)) continue;
      local[v] = next_node++;
      nodes.push_back(local[v]);
    }
    for (const auto& e : zs[i].edges())
      edges.push_back({next_edge++, local[e.from], local[e.to], e.label});
    if (i == 0) source = local[zs[i].source()];
    carry = local[zs[i].sink()];
  }
  return Nbp::from_parts(std::move(nodes), std::move(edges), source, carry);
}

/// Read-once monotone program for the edge-padded CNF of a star graph.
/// 2m+1 edges for m leaves.
inline Nbp build_star_mnbp(const Graph& star) {
  if (!star.has_dense_vertices())
    throw invalid_argument("build_star_mnbp: vertex ids must be dense 0..n-1");
  int n = star.num_vertices();
  int m = star.num_edges();
  if (n < 2 || m != n - 1) throw invalid_argument("build_star_mnbp: not a star");
  int center = -1;
  if (n == 2) {
    center = 0;
  } else {
    for (int v : star.vertices())
      if (star.degree(v) == m) center = v;
    if (center < 0) throw invalid_argument("build_star_mnbp: not a star");
  }
  std::vector<std::pair<int, int>> leaves;  // (leaf var, edge var)
  for (int v : star.vertices()) {
    if (v == center) continue;
    auto e = star.find_edge(center, v);
    if (!e) throw invalid_argument("build_star_mnbp: not a star");
    leaves.push_back({v, n + e->id});
  }
  std::sort(leaves.begin(), leaves.end());
  return detail::star_program(center, leaves);
}

/// Monotone separable program for the edge-padded CNF of the complete graph:
/// one star program per vertex (that vertex as center over all others),
/// chained. Exactly n(2n-1) edges; separability is at most n.
inline Nbp build_kn_smnbp(int n) {
  if (n < 2) throw invalid_argument("build_kn_smnbp: n must be >= 2");
  Graph kn = complete_graph(n);
  std::map<std::pair<int, int>, int> edge_var;
  for (const auto& e : kn.edges()) edge_var[{e.u, e.v}] = n + e.id;
  std::vector<Nbp> stars;
  for (int c = 0; c < n; ++c) {
    std::vector<std::pair<int, int>> leaves;
    for (int v = 0; v < n; ++v) {
      if (v == c) continue;
      leaves.push_back({v, edge_var.at({std::min(c, v), std::max(c, v)})});
    }
    stars.push_back(detail::star_program(c, leaves));
  }
  return chain(stars);
}

/// Splits every edge into three, keeping the label on the middle piece. The
/// carried assignments are unchanged; afterwards no two junction nodes are
/// adjacent and every labeled edge joins two subdivision nodes.
inline Nbp subdivide(const Nbp& z) {
  std::vector<int> nodes = z.nodes();
  int base = nodes.empty() ? 0 : nodes.back() + 1;
  std::vector<NbpEdge> edges;
  int j = 0;
  for (const auto& e : z.edges()) {
    int a = base + 2 * j, b = base + 2 * j + 1;
    nodes.push_back(a);
    nodes.push_back(b);
    edges.push_back({3 * j, e.from, a, std::nullopt});
    edges.push_back({3 * j + 1, a, b, e.label});
    edges.push_back({3 * j + 2, b, e.to, std::nullopt});
    ++j;
  }
  return Nbp::from_parts(std::move(nodes), std::move(edges), z.source(), z.sink());
}

// ---------------------------------------------------------------------------
// Per-node and per-path analysis.

struct NodeClassification {
  std::map<int, bool> junction;   // in- or out-degree above one
  std::map<int, bool> read_once;  // every source-to-node path is read-once
  std::vector<int> minimally_non_read_once;  // all strict ancestors read-once
};

inline NodeClassification classify_vertices(const Nbp& z) {
  NodeClassification nc;
  for (int v : z.nodes())
    nc.junction[v] = z.in_indices(v).size() > 1 || z.out_indices(v).size() > 1;
  // Per-variable maximum label count over source-to-node paths.
  std::map<int, int> worst;  // node -> max repeats of any single variable
  for (int v : z.nodes()) worst[v] = 0;
  for (int x : z.var_set()) {
    std::map<int, int> cnt;
    cnt[z.source()] = 0;
    for (int v : z.topo_order()) {
      if (!cnt.count(v)) continue;
      for (int ei : z.out_indices(v)) {
        const auto& e = z.edges()[ei];
        int c = cnt[v] + (e.label && e.label->var == x ? 1 : 0);
        auto it = cnt.find(e.to);
        if (it == cnt.end() || it->second < c) cnt[e.to] = c;
      }
    }
    for (const auto& [v, c] : cnt) worst[v] = std::max(worst[v], c);
  }
  for (int v : z.nodes()) nc.read_once[v] = worst[v] <= 1;
  // Ancestor sets via reverse reachability.
  for (int v : z.nodes()) {
    if (nc.read_once[v]) continue;
    bool minimal = true;
    std::set<int> seen = {v};
    std::vector<int> stack = {v};
    while (!stack.empty() && minimal) {
      int x = stack.back();
      stack.pop_back();
      for (int ei : z.in_indices(x)) {
        int u = z.edges()[ei].from;
        if (seen.insert(u).second) {
          if (!nc.read_once[u]) minimal = false;
          stack.push_back(u);
        }
      }
    }
    if (minimal) nc.minimally_non_read_once.push_back(v);
  }
  return nc;
}

struct PathAnalysis {
  std::vector<int> path;                     // edge ids, source to sink
  std::vector<std::size_t> fragment_starts;  // greedy read-once fragmentation
  std::optional<int> pivot;                  // first non-read-once node on the path
  std::optional<int> prepivot;               // its predecessor on the path
  std::optional<std::vector<int>> yardsticks;
};

/// Pivot and pre-pivot of a source-sink path: the first node on the path
/// that some source-to-node path reaches non-read-once, and the path node
/// just before it. The pre-pivot is always a read-once node.
inline PathAnalysis pivot_prepivot(const Nbp& z, const std::vector<int>& path) {
  PathAnalysis pa;
  pa.path = path;
  pa.fragment_starts = greedy_fragment_starts(z, path);
  auto ns = path_nodes(z, path);
  if (ns.back() != z.sink())
    throw invalid_argument("pivot_prepivot: path does not end at the sink");
  auto nc = classify_vertices(z);
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (!nc.read_once.at(ns[i])) {
      pa.pivot = ns[i];
      if (i > 0) pa.prepivot = ns[i - 1];
      break;
    }
  return pa;
}

/// Subprogram spanned by all x-to-y paths; node and edge ids are preserved.
/// x == y yields the single-node empty program.
inline Nbp extract_between(const Nbp& z, int x, int y) {
  std::set<int> fwd = {x};
  for (int v : z.topo_order()) {
    if (!fwd.count(v)) continue;
    for (int ei : z.out_indices(v)) fwd.insert(z.edges()[ei].to);
  }
  if (!fwd.count(y))
    throw invalid_argument("extract_between: " + std::to_string(y) + " unreachable from " +
                           std::to_string(x));
  if (x == y) return Nbp::from_parts({x}, {}, x, x);
  std::set<int> bwd = {y};
  for (auto it = z.topo_order().rbegin(); it != z.topo_order().rend(); ++it) {
    if (!bwd.count(*it)) continue;
    for (int ei : z.in_indices(*it)) bwd.insert(z.edges()[ei].from);
  }
  std::vector<int> nodes;
  for (int v : z.nodes())
    if (fwd.count(v) && bwd.count(v)) nodes.push_back(v);
  std::vector<NbpEdge> edges;
  for (const auto& e : z.edges())
    if (fwd.count(e.from) && bwd.count(e.from) && fwd.count(e.to) && bwd.count(e.to))
      edges.push_back(e);
  return Nbp::from_parts(std::move(nodes), std::move(edges), x, y);
}

/// Memo for span read-once queries; share one instance when analyzing many
/// paths of the same program.
struct SpanCache {
  std::map<std::pair<int, int>, bool> read_once;
};

/// True iff every x-to-y path is read-once (no variable labels two edges of
/// one path). Per-variable longest-path DP on the spanned subprogram.
inline bool span_read_once(const Nbp& z, int x, int y, SpanCache* cache = nullptr) {
  if (cache) {
    auto it = cache->read_once.find({x, y});
    if (it != cache->read_once.end()) return it->second;
  }
  Nbp span = extract_between(z, x, y);
  for (int var : span.var_set()) {
    std::map<int, int> cnt;
    cnt[span.source()] = 0;
    for (int v : span.topo_order()) {
      if (!cnt.count(v)) continue;
      for (int ei : span.out_indices(v)) {
        const auto& e = span.edges()[ei];
        int c = cnt[v] + (e.label && e.label->var == var ? 1 : 0);
        auto it = cnt.find(e.to);
        if (it == cnt.end() || it->second < c) cnt[e.to] = c;
      }
    }
    if (cnt.count(span.sink()) && cnt[span.sink()] >= 2) {
      if (cache) cache->read_once[{x, y}] = false;
      return false;
    }
  }
  if (cache) cache->read_once[{x, y}] = true;
  return true;
}

/// Minimal marking of a source-sink path with nodes u_1 = source, ...,
/// u_{a+1} = sink such that every program path between consecutive marks is
/// read-once. Returns the marks when a <= d, otherwise nothing. Ties prefer
/// the earliest cut positions.
inline std::optional<std::vector<int>> yardsticks_for_path(const Nbp& z,
                                                           const std::vector<int>& path, int d,
                                                           SpanCache* cache = nullptr) {
  auto ns = path_nodes(z, path);
  if (ns.back() != z.sink())
    throw invalid_argument("yardsticks_for_path: path does not end at the sink");
  int m = static_cast<int>(ns.size());
  SpanCache local;
  if (!cache) cache = &local;
  auto ro = [&](int i, int j) { return span_read_once(z, ns[i], ns[j], cache); };
  const int inf = INT32_MAX / 2;
  std::vector<int> best(m, inf), pred(m, -1);
  best[0] = 0;
  for (int i = 1; i < m; ++i)
    for (int j = 0; j < i; ++j) {
      if (best[j] == inf || !ro(j, i)) continue;
      if (best[j] + 1 < best[i]) {
        best[i] = best[j] + 1;
        pred[i] = j;
      }
    }
  if (m == 1) return std::vector<int>{ns[0]};  // single-node program
  if (best[m - 1] == inf || best[m - 1] > d) return std::nullopt;
  std::vector<int> marks;
  for (int i = m - 1; i >= 0; i = pred[i]) {
    marks.push_back(ns[i]);
    if (i == 0) break;
  }
  std::reverse(marks.begin(), marks.end());
  return marks;
}

/// Small fixture: a separable monotone program with two source-sink paths,
/// one of which repeats a variable before the merge node, so that path
/// admits no yardstick marking until the program is subdivided.
inline Nbp make_no_yardstick_example() {
  std::vector<int> nodes = {0, 1, 2, 3, 4, 5};
  std::vector<NbpEdge> edges = {
      {0, 0, 1, pos(3)}, {1, 0, 2, pos(1)}, {2, 1, 3, pos(3)},
      {3, 2, 3, pos(2)}, {4, 3, 4, pos(1)}, {5, 4, 5, pos(2)},
  };
  return Nbp::from_parts(std::move(nodes), std::move(edges), 0, 5);
}

// ---------------------------------------------------------------------------
// Serialization.

inline nlohmann::json to_json(const Nbp& z) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : z.edges()) {
    nlohmann::json label;
    if (e.label) label = {{"var", e.label->var}, {"positive", e.label->positive}};
    edges.push_back({{"id", e.id}, {"from", e.from}, {"to", e.to}, {"label", label}});
  }
  return {{"nodes", z.nodes()}, {"edges", edges}, {"source", z.source()}, {"sink", z.sink()}};
}

inline Nbp nbp_from_json(const nlohmann::json& j) {
  std::vector<NbpEdge> edges;
  for (const auto& e : j.at("edges")) {
    std::optional<Literal> label;
    if (!e.at("label").is_null())
      label = Literal{e.at("label").at("var").get<int>(), e.at("label").at("positive").get<bool>()};
    edges.push_back({e.at("id").get<int>(), e.at("from").get<int>(), e.at("to").get<int>(), label});
  }
  return Nbp::from_parts(j.at("nodes").get<std::vector<int>>(), std::move(edges),
                         j.at("source").get<int>(), j.at("sink").get<int>());
}

inline void write_dot(const Nbp& z, std::ostream& os) {
  os << "digraph nbp {\n";
  for (int v : z.nodes()) os << "  " << v << ";\n";
  for (const auto& e : z.edges()) {
    os << "  " << e.from << " -> " << e.to;
    if (e.label)
      os << " [label=\"" << (e.label->positive ? "" : "!") << "x" << e.label->var << "\"]";
    os << ";\n";
  }
  os << "}\n";
}

}  // namespace dpw

#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpw/graph.hpp"

namespace dpw {

/// Tree decomposition: a tree over node ids plus one bag of graph vertices
/// per node. Width is the largest bag size minus one (-1 for the empty
/// decomposition of the empty graph).
struct TreeDecomposition {
  std::vector<std::pair<int, int>> links;  // tree edges over node ids
  std::map<int, std::vector<int>> bags;    // node id -> sorted vertex set

  int width() const {
    int w = -1;
    for (const auto& [node, bag] : bags) w = std::max(w, static_cast<int>(bag.size()) - 1);
    return w;
  }
};

/// Path decomposition: bags in sequence order.
struct PathDecomposition {
  std::vector<std::vector<int>> bags;

  int width() const {
    int w = -1;
    for (const auto& bag : bags) w = std::max(w, static_cast<int>(bag.size()) - 1);
    return w;
  }
};

/// Tree-partition decomposition: a forest over node ids whose bags partition
/// the vertex set; bags of distinct nodes see an edge of the graph exactly
/// when the nodes are adjacent in the forest. Width is the largest bag size
/// (not minus one).
struct TreePartition {
  std::vector<std::pair<int, int>> links;  // forest edges over node ids
  std::map<int, std::vector<int>> bags;

  int width() const {
    int w = 0;
    for (const auto& [node, bag] : bags) w = std::max(w, static_cast<int>(bag.size()));
    return w;
  }
};

/// Cover of a graph by subgraphs, each carrying its own path decomposition.
struct DCover {
  struct Part {
    Graph graph;
    PathDecomposition pd;
  };
  std::vector<Part> parts;
  bool clique_preserving = false;

  int max_width() const {
    int w = -1;
    for (const auto& p : parts) w = std::max(w, p.pd.width());
    return w;
  }
};

/// Violation list produced by the validators. Empty report == valid.
struct ValidationReport {
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
  void add(std::string msg) { problems.push_back(std::move(msg)); }
  void merge(const ValidationReport& other, const std::string& prefix) {
    for (const auto& p : other.problems) problems.push_back(prefix + p);
  }
};

namespace detail {

/// Checks that `links` over the key set of `bags` forms a forest, and
/// optionally that it is connected (a single tree).
inline void check_forest(const std::vector<std::pair<int, int>>& links,
                         const std::set<int>& nodes, bool require_tree,
                         ValidationReport& report) {
  std::map<int, int> parent;
  for (int n : nodes) parent[n] = n;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : links) {
    if (!nodes.count(a) || !nodes.count(b)) {
      report.add("link {" + std::to_string(a) + "," + std::to_string(b) +
                 "} mentions unknown node");
      continue;
    }
    int ra = find(a), rb = find(b);
    if (ra == rb) {
      report.add("links contain a cycle through node " + std::to_string(a));
      return;
    }
    parent[ra] = rb;
  }
  if (require_tree && !nodes.empty()) {
    int root = find(*nodes.begin());
    for (int n : nodes)
      if (find(n) != root) {
        report.add("decomposition tree is not connected");
        return;
      }
  }
}

inline bool bag_contains(const std::vector<int>& bag, int v) {
  return std::binary_search(bag.begin(), bag.end(), v);
}

}  // namespace detail

/// Validates the three tree/path decomposition conditions: every vertex in
/// some bag, every edge inside some bag, and the nodes holding any fixed
/// vertex forming a subtree. Reports every violation with a witness.
inline ValidationReport validate(const TreeDecomposition& td, const Graph& g) {
  ValidationReport report;
  std::set<int> nodes;
  for (const auto& [node, bag] : td.bags) {
    nodes.insert(node);
    if (!std::is_sorted(bag.begin(), bag.end()))
      report.add("bag " + std::to_string(node) + " is not sorted");
  }
  detail::check_forest(td.links, nodes, /*require_tree=*/true, report);
  if (!report.ok()) return report;

  for (int v : g.vertices()) {
    bool found = false;
    for (const auto& [node, bag] : td.bags)
      if (detail::bag_contains(bag, v)) {
        found = true;
        break;
      }
    if (!found) report.add("union violation: vertex " + std::to_string(v) + " in no bag");
  }
  for (const auto& e : g.edges()) {
    bool found = false;
    for (const auto& [node, bag] : td.bags)
      if (detail::bag_contains(bag, e.u) && detail::bag_contains(bag, e.v)) {
        found = true;
        break;
      }
    if (!found)
      report.add("containment violation: edge {" + std::to_string(e.u) + "," +
                 std::to_string(e.v) + "} (id " + std::to_string(e.id) + ") in no bag");
  }
  // Connectedness: nodes holding v must induce a connected subgraph of the tree.
  std::map<int, std::vector<int>> adj;
  for (const auto& [a, b] : td.links) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (int v : g.vertices()) {
    std::set<int> holding;
    for (const auto& [node, bag] : td.bags)
      if (detail::bag_contains(bag, v)) holding.insert(node);
    if (holding.size() <= 1) continue;
    std::set<int> seen;
    std::vector<int> stack = {*holding.begin()};
    seen.insert(*holding.begin());
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : adj[x])
        if (holding.count(y) && !seen.count(y)) {
          seen.insert(y);
          stack.push_back(y);
        }
    }
    if (seen.size() != holding.size())
      report.add("connectedness violation: vertex " + std::to_string(v) +
                 " appears in a disconnected node set");
  }
  return report;
}

inline ValidationReport validate(const PathDecomposition& pd, const Graph& g) {
  ValidationReport report;
  for (std::size_t i = 0; i < pd.bags.size(); ++i)
    if (!std::is_sorted(pd.bags[i].begin(), pd.bags[i].end()))
      report.add("bag " + std::to_string(i) + " is not sorted");
  if (!report.ok()) return report;

  for (int v : g.vertices()) {
    int first = -1, last = -1;
    bool gap = false;
    for (std::size_t i = 0; i < pd.bags.size(); ++i)
      if (detail::bag_contains(pd.bags[i], v)) {
        if (first < 0) first = static_cast<int>(i);
        if (last >= 0 && static_cast<int>(i) != last + 1) gap = true;
        last = static_cast<int>(i);
      }
    if (first < 0)
      report.add("union violation: vertex " + std::to_string(v) + " in no bag");
    else if (gap)
      report.add("connectedness violation: vertex " + std::to_string(v) +
                 " occurs in a non-contiguous bag range");
  }
  for (const auto& e : g.edges()) {
    bool found = false;
    for (const auto& bag : pd.bags)
      if (detail::bag_contains(bag, e.u) && detail::bag_contains(bag, e.v)) {
        found = true;
        break;
      }
    if (!found)
      report.add("containment violation: edge {" + std::to_string(e.u) + "," +
                 std::to_string(e.v) + "} (id " + std::to_string(e.id) + ") in no bag");
  }
  return report;
}

inline ValidationReport validate(const TreePartition& tp, const Graph& g) {
  ValidationReport report;
  std::set<int> nodes;
  std::map<int, int> owner;  // vertex -> node id
  for (const auto& [node, bag] : tp.bags) {
    nodes.insert(node);
    if (bag.empty()) report.add("bag " + std::to_string(node) + " is empty");
    for (int v : bag) {
      if (!g.has_vertex(v))
        report.add("bag " + std::to_string(node) + " mentions unknown vertex " +
                   std::to_string(v));
      else if (owner.count(v))
        report.add("partition violation: vertex " + std::to_string(v) +
                   " appears in bags " + std::to_string(owner[v]) + " and " +
                   std::to_string(node));
      else
        owner[v] = node;
    }
  }
  detail::check_forest(tp.links, nodes, /*require_tree=*/false, report);
  if (!report.ok()) return report;
  for (int v : g.vertices())
    if (!owner.count(v))
      report.add("partition violation: vertex " + std::to_string(v) + " in no bag");
  if (!report.ok()) return report;

  std::set<std::pair<int, int>> forest_adj;
  for (auto [a, b] : tp.links) {
    if (a > b) std::swap(a, b);
    forest_adj.insert({a, b});
  }
  std::set<std::pair<int, int>> edge_adj;
  for (const auto& e : g.edges()) {
    int a = owner[e.u], b = owner[e.v];
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    edge_adj.insert({a, b});
  }
  for (const auto& [a, b] : edge_adj)
    if (!forest_adj.count({a, b}))
      report.add("adjacency violation: bags " + std::to_string(a) + " and " +
                 std::to_string(b) + " share an edge but are not forest-adjacent");
  for (const auto& [a, b] : forest_adj)
    if (!edge_adj.count({a, b}))
      report.add("adjacency violation: bags " + std::to_string(a) + " and " +
                 std::to_string(b) + " are forest-adjacent but share no edge");
  return report;
}

/// Validates a cover: each part's decomposition against its subgraph, each
/// part being a subgraph of g, and union of parts == g. Clique preservation
/// is checked separately by the width module (it needs clique enumeration).
inline ValidationReport validate_cover_structure(const DCover& cover, const Graph& g) {
  ValidationReport report;
  std::set<int> vs;
  std::set<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < cover.parts.size(); ++i) {
    const auto& part = cover.parts[i];
    for (int v : part.graph.vertices()) {
      if (!g.has_vertex(v))
        report.add("part " + std::to_string(i) + " has unknown vertex " + std::to_string(v));
      vs.insert(v);
    }
    for (const auto& e : part.graph.edges()) {
      if (!g.has_edge(e.u, e.v))
        report.add("part " + std::to_string(i) + " has edge {" + std::to_string(e.u) + "," +
                   std::to_string(e.v) + "} absent from the covered graph");
      pairs.insert(e.endpoints());
    }
    report.merge(validate(part.pd, part.graph), "part " + std::to_string(i) + ": ");
  }
  for (int v : g.vertices())
    if (!vs.count(v)) report.add("cover misses vertex " + std::to_string(v));
  for (const auto& e : g.edges())
    if (!pairs.count(e.endpoints()))
      report.add("cover misses edge {" + std::to_string(e.u) + "," + std::to_string(e.v) + "}");
  return report;
}

// ---------------------------------------------------------------------------
// JSON round trip. Schema: {"kind": "path"|"tree"|"tree_partition",
// "nodes": [...], "edges": [[a,b],...], "bags": {"id": [vertex,...]}}.

namespace detail {

inline nlohmann::json bags_to_json(const std::map<int, std::vector<int>>& bags) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [node, bag] : bags) j[std::to_string(node)] = bag;
  return j;
}

inline std::map<int, std::vector<int>> bags_from_json(const nlohmann::json& j) {
  std::map<int, std::vector<int>> bags;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::vector<int> bag = it.value().get<std::vector<int>>();
    std::sort(bag.begin(), bag.end());
    bags[std::stoi(it.key())] = std::move(bag);
  }
  return bags;
}

}  // namespace detail

inline nlohmann::json to_json(const TreeDecomposition& td) {
  std::vector<int> nodes;
  for (const auto& [node, bag] : td.bags) nodes.push_back(node);
  return {{"kind", "tree"},
          {"nodes", nodes},
          {"edges", td.links},
          {"bags", detail::bags_to_json(td.bags)}};
}

inline nlohmann::json to_json(const TreePartition& tp) {
  std::vector<int> nodes;
  for (const auto& [node, bag] : tp.bags) nodes.push_back(node);
  return {{"kind", "tree_partition"},
          {"nodes", nodes},
          {"edges", tp.links},
          {"bags", detail::bags_to_json(tp.bags)}};
}

inline nlohmann::json to_json(const PathDecomposition& pd) {
  std::vector<int> nodes;
  std::vector<std::pair<int, int>> links;
  nlohmann::json bags = nlohmann::json::object();
  for (std::size_t i = 0; i < pd.bags.size(); ++i) {
    nodes.push_back(static_cast<int>(i));
    if (i + 1 < pd.bags.size()) links.push_back({static_cast<int>(i), static_cast<int>(i) + 1});
    bags[std::to_string(i)] = pd.bags[i];
  }
  return {{"kind", "path"}, {"nodes", nodes}, {"edges", links}, {"bags", bags}};
}

inline TreeDecomposition tree_decomposition_from_json(const nlohmann::json& j) {
  if (j.at("kind") != "tree") throw invalid_argument("expected kind=tree");
  TreeDecomposition td;
  td.links = j.at("edges").get<std::vector<std::pair<int, int>>>();
  td.bags = detail::bags_from_json(j.at("bags"));
  return td;
}

inline TreePartition tree_partition_from_json(const nlohmann::json& j) {
  if (j.at("kind") != "tree_partition") throw invalid_argument("expected kind=tree_partition");
  TreePartition tp;
  tp.links = j.at("edges").get<std::vector<std::pair<int, int>>>();
  tp.bags = detail::bags_from_json(j.at("bags"));
  return tp;
}

inline PathDecomposition path_decomposition_from_json(const nlohmann::json& j) {
  if (j.at("kind") != "path") throw invalid_argument("expected kind=path");
  auto bags = detail::bags_from_json(j.at("bags"));
  // Node ids give the sequence order.
  PathDecomposition pd;
  for (const auto& [node, bag] : bags) pd.bags.push_back(bag);
  return pd;
}

inline nlohmann::json to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.id, e.u, e.v});
  return {{"vertices", g.vertices()}, {"edges", edges}};
}

inline Graph graph_from_json(const nlohmann::json& j) {
  std::vector<Edge> es;
  for (const auto& e : j.at("edges")) es.push_back({e.at(0), e.at(1), e.at(2)});
  return Graph::from_parts(j.at("vertices").get<std::vector<int>>(), std::move(es));
}

inline nlohmann::json to_json(const DCover& cover) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : cover.parts)
    parts.push_back({{"graph", to_json(p.graph)}, {"decomposition", to_json(p.pd)}});
  return {{"kind", "cover"},
          {"clique_preserving", cover.clique_preserving},
          {"parts", parts}};
}

inline DCover cover_from_json(const nlohmann::json& j) {
  if (j.at("kind") != "cover") throw invalid_argument("expected kind=cover");
  DCover cover;
  cover.clique_preserving = j.at("clique_preserving").get<bool>();
  for (const auto& p : j.at("parts"))
    cover.parts.push_back(
        {graph_from_json(p.at("graph")), path_decomposition_from_json(p.at("decomposition"))});
  return cover;
}

}  // namespace dpw

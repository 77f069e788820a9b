#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpw/cnf.hpp"
#include "dpw/decomposition.hpp"

namespace dpw {

/// Ordered binary decision diagram. Internal nodes test one variable and
/// branch on its polarity; lo/hi point at node indices or at the sink
/// sentinels. Every root-to-sink path respects `order` (strictly increasing
/// positions), which gives obliviousness and read-once for free.
struct Obdd {
  static constexpr int kTrue = -1;
  static constexpr int kFalse = -2;

  struct Node {
    int var;
    int lo;  // branch for var = false
    int hi;  // branch for var = true
  };

  std::vector<Node> nodes;
  int source = kFalse;
  std::vector<int> order;  // variable ids, test order

  static bool is_sink(int ref) { return ref < 0; }

  /// Internal nodes plus however many sinks are actually reachable.
  int node_count() const {
    bool t = source == kTrue, f = source == kFalse;
    for (const auto& n : nodes) {
      t = t || n.lo == kTrue || n.hi == kTrue;
      f = f || n.lo == kFalse || n.hi == kFalse;
    }
    return static_cast<int>(nodes.size()) + (t ? 1 : 0) + (f ? 1 : 0);
  }
};

/// Sweep order induced by a path decomposition: variables sorted by the
/// first bag that contains them, then last bag, then id.
inline std::vector<int> order_from_path_decomposition(const PathDecomposition& pd) {
  std::map<int, std::pair<int, int>> range;  // var -> (first, last)
  for (std::size_t i = 0; i < pd.bags.size(); ++i)
    for (int v : pd.bags[i]) {
      auto it = range.find(v);
      if (it == range.end())
        range[v] = {static_cast<int>(i), static_cast<int>(i)};
      else
        it->second.second = static_cast<int>(i);
    }
  std::vector<int> vars;
  for (const auto& [v, r] : range) vars.push_back(v);
  std::sort(vars.begin(), vars.end(), [&](int a, int b) {
    if (range[a].first != range[b].first) return range[a].first < range[b].first;
    if (range[a].second != range[b].second) return range[a].second < range[b].second;
    return a < b;
  });
  return vars;
}

/// Structural check: branch determinism and strictly increasing variable
/// positions along every edge.
inline ValidationReport validate(const Obdd& z) {
  ValidationReport report;
  std::map<int, int> pos;
  for (std::size_t i = 0; i < z.order.size(); ++i) {
    if (pos.count(z.order[i])) report.add("order repeats a variable");
    pos[z.order[i]] = static_cast<int>(i);
  }
  auto check_ref = [&](int ref, std::size_t from) {
    if (Obdd::is_sink(ref)) {
      if (ref != Obdd::kTrue && ref != Obdd::kFalse) report.add("bad sink reference");
      return;
    }
    if (ref < 0 || ref >= static_cast<int>(z.nodes.size())) {
      report.add("edge out of range");
      return;
    }
    if (pos[z.nodes[ref].var] <= pos[z.nodes[from].var])
      report.add("order violation on edge from node " + std::to_string(from));
  };
  for (std::size_t i = 0; i < z.nodes.size(); ++i) {
    if (!pos.count(z.nodes[i].var)) report.add("node tests a variable outside the order");
    check_ref(z.nodes[i].lo, i);
    check_ref(z.nodes[i].hi, i);
  }
  if (!Obdd::is_sink(z.source) &&
      (z.source < 0 || z.source >= static_cast<int>(z.nodes.size())))
    report.add("source out of range");
  return report;
}

/// Compiles a CNF into an OBDD by sweeping the bags of a path decomposition
/// of its primal graph left to right. The automaton state is the partial
/// assignment restricted to the variables that are both already assigned and
/// still inside the frontier bag; states are merged per level by equality
/// and die as soon as a fully assigned clause is unsatisfied. The result has
/// at most 2^(w+1) * (|Var| + 1) nodes for decomposition width w.
inline Obdd compile(const Cnf& f, const PathDecomposition& pd) {
  Graph primal = primal_graph(f);
  auto report = validate(pd, primal);
  if (!report.ok())
    throw invalid_argument("compile: path decomposition invalid for the primal graph: " +
                           report.problems.front());
  std::vector<int> full_order = order_from_path_decomposition(pd);
  std::set<int> in_order(full_order.begin(), full_order.end());
  std::vector<int> order;
  for (int v : full_order)
    if (f.kind_of(v)) order.push_back(v);
  for (const auto& v : f.vars())
    if (!in_order.count(v.id))
      throw invalid_argument("compile: variable " + std::to_string(v.id) +
                             " absent from every bag");

  Obdd z;
  z.order = order;
  if (f.num_clauses() == 0) {
    z.source = Obdd::kTrue;
    return z;
  }
  int n = static_cast<int>(order.size());
  std::map<int, int> pos;
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  std::map<int, std::pair<int, int>> range;
  for (std::size_t i = 0; i < pd.bags.size(); ++i)
    for (int v : pd.bags[i]) {
      auto it = range.find(v);
      if (it == range.end())
        range[v] = {static_cast<int>(i), static_cast<int>(i)};
      else
        it->second.second = static_cast<int>(i);
    }

  // live_in[i]: positions (< i) of variables still visible when x_i is
  // assigned, i.e. those whose bag interval reaches x_i's first bag.
  std::vector<std::vector<int>> live_in(n + 1);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (range[order[j]].second >= range[order[i]].first) live_in[i].push_back(j);
  // Clauses are checked at the level of their last-ordered variable.
  std::vector<std::vector<int>> due(n);
  for (int c = 0; c < f.num_clauses(); ++c) {
    int last = 0;
    for (const auto& l : f.clauses()[c]) last = std::max(last, pos[l.var]);
    due[last].push_back(c);
  }

  // State: polarity bits for live_in[i], in that vector's order.
  using State = std::vector<bool>;
  std::map<State, int> frontier;  // state -> node index at current level
  z.nodes.push_back({order[0], Obdd::kFalse, Obdd::kFalse});
  z.source = 0;
  frontier[{}] = 0;
  for (int i = 0; i < n; ++i) {
    std::map<State, int> next;
    for (const auto& [state, node_idx] : frontier) {
      for (int b = 0; b <= 1; ++b) {
        // Assemble the assignment visible at this level.
        std::map<int, bool> visible;
        for (std::size_t k = 0; k < live_in[i].size(); ++k)
          visible[live_in[i][k]] = state[k];
        visible[i] = b != 0;
        bool dead = false;
        for (int c : due[i]) {
          bool sat = false;
          for (const auto& l : f.clauses()[c])
            if (visible.at(pos[l.var]) == l.positive) {
              sat = true;
              break;
            }
          if (!sat) {
            dead = true;
            break;
          }
        }
        int target;
        if (dead) {
          target = Obdd::kFalse;
        } else if (i + 1 == n) {
          target = Obdd::kTrue;
        } else {
          State proj;
          proj.reserve(live_in[i + 1].size());
          for (int p : live_in[i + 1]) proj.push_back(visible.at(p));
          auto it = next.find(proj);
          if (it == next.end()) {
            z.nodes.push_back({order[i + 1], Obdd::kFalse, Obdd::kFalse});
            it = next.emplace(std::move(proj), static_cast<int>(z.nodes.size()) - 1).first;
          }
          target = it->second;
        }
        if (b == 0)
          z.nodes[node_idx].lo = target;
        else
          z.nodes[node_idx].hi = target;
      }
    }
    frontier = std::move(next);
  }
  // Unsatisfiable inputs leave no edge into the accepting sink; collapse the
  // dead levels into the bare false sink.
  bool accepting = false;
  for (const auto& node : z.nodes)
    if (node.lo == Obdd::kTrue || node.hi == Obdd::kTrue) accepting = true;
  if (!accepting) {
    z.nodes.clear();
    z.source = Obdd::kFalse;
  }
  return z;
}

/// True-sink reachability under a total assignment. Variables outside s are
/// rejected; extra literals in s are ignored.
inline bool evaluate(const Obdd& z, const LiteralSet& s) {
  for (int v : z.order)
    if (!s.assigns(v))
      throw invalid_argument("evaluate: assignment misses variable " + std::to_string(v));
  int cur = z.source;
  while (!Obdd::is_sink(cur)) {
    const auto& node = z.nodes[cur];
    cur = *s.polarity(node.var) ? node.hi : node.lo;
  }
  return cur == Obdd::kTrue;
}

/// Satisfying-assignment count over Var(z), weighting skipped levels by
/// powers of two.
inline std::uint64_t count_models(const Obdd& z) {
  int n = static_cast<int>(z.order.size());
  std::map<int, int> pos;
  for (int i = 0; i < n; ++i) pos[z.order[i]] = i;
  std::vector<std::uint64_t> weight(z.nodes.size(), 0);
  auto pos_of = [&](int ref) { return Obdd::is_sink(ref) ? n : pos[z.nodes[ref].var]; };
  auto weight_of = [&](int ref) -> std::uint64_t {
    if (ref == Obdd::kTrue) return 1;
    if (ref == Obdd::kFalse) return 0;
    return weight[ref];
  };
  // Nodes in decreasing variable position are safe to process in one pass
  // (children always test later variables).
  std::vector<int> idx(z.nodes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return pos[z.nodes[a].var] > pos[z.nodes[b].var]; });
  for (int i : idx) {
    const auto& node = z.nodes[i];
    int p = pos[node.var];
    weight[i] = weight_of(node.lo) * (1ull << (pos_of(node.lo) - p - 1)) +
                weight_of(node.hi) * (1ull << (pos_of(node.hi) - p - 1));
  }
  if (Obdd::is_sink(z.source)) return z.source == Obdd::kTrue ? (1ull << n) : 0;
  return weight[z.source] * (1ull << pos_of(z.source));
}

/// True iff the conjunction of the diagrams has exactly the model set of f.
/// Each diagram's variables must be declared in f; assignments are
/// enumerated over Var(f).
inline bool conjunction_represents(const std::vector<Obdd>& zs, const Cnf& f, int cap = 0) {
  if (cap <= 0) cap = default_caps().enumeration_vars;
  if (f.num_vars() > cap)
    throw size_error("conjunction_represents: " + std::to_string(f.num_vars()) +
                     " variables exceeds cap " + std::to_string(cap));
  for (const auto& z : zs)
    for (int v : z.order)
      if (!f.kind_of(v))
        throw invalid_argument("conjunction_represents: diagram variable " + std::to_string(v) +
                               " not declared in the CNF");
  std::vector<int> ids = f.var_ids();
  int n = static_cast<int>(ids.size());
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    LiteralSet s = assignment_from_mask(ids, mask);
    bool conj = true;
    for (const auto& z : zs)
      if (!evaluate(z, s)) {
        conj = false;
        break;
      }
    if (conj != satisfies(s, f)) return false;
  }
  return true;
}

inline nlohmann::json to_json(const Obdd& z) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : z.nodes) nodes.push_back({{"var", n.var}, {"lo", n.lo}, {"hi", n.hi}});
  return {{"order", z.order}, {"source", z.source}, {"nodes", nodes}};
}

inline Obdd obdd_from_json(const nlohmann::json& j) {
  Obdd z;
  z.order = j.at("order").get<std::vector<int>>();
  z.source = j.at("source").get<int>();
  for (const auto& n : j.at("nodes"))
    z.nodes.push_back({n.at("var").get<int>(), n.at("lo").get<int>(), n.at("hi").get<int>()});
  auto report = validate(z);
  if (!report.ok()) throw invalid_argument("obdd_from_json: " + report.problems.front());
  return z;
}

inline void write_dot(const Obdd& z, std::ostream& os) {
  os << "digraph obdd {\n  T [shape=box,label=\"1\"];\n  F [shape=box,label=\"0\"];\n";
  auto ref = [](int r) {
    if (r == Obdd::kTrue) return std::string("T");
    if (r == Obdd::kFalse) return std::string("F");
    return "n" + std::to_string(r);
  };
  for (std::size_t i = 0; i < z.nodes.size(); ++i) {
    os << "  n" << i << " [label=\"x" << z.nodes[i].var << "\"];\n";
    os << "  n" << i << " -> " << ref(z.nodes[i].lo) << " [style=dashed];\n";
    os << "  n" << i << " -> " << ref(z.nodes[i].hi) << ";\n";
  }
  os << "}\n";
}

}  // namespace dpw

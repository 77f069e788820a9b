#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpw/decomposition.hpp"
#include "dpw/graph.hpp"

namespace dpw {

struct Literal {
  int var;
  bool positive;

  Literal negated() const { return {var, !positive}; }
  auto operator<=>(const Literal&) const = default;
};

inline Literal pos(int var) { return {var, true}; }
inline Literal neg(int var) { return {var, false}; }

/// Proper set of literals: no variable occurs with both polarities. Doubles
/// as a (partial) assignment to its variables.
class LiteralSet {
 public:
  LiteralSet() = default;

  explicit LiteralSet(std::vector<Literal> lits) {
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 0; i + 1 < lits.size(); ++i)
      if (lits[i].var == lits[i + 1].var)
        throw invalid_argument("LiteralSet: variable " + std::to_string(lits[i].var) +
                               " occurs with both polarities");
    lits_ = std::move(lits);
  }

  const std::vector<Literal>& literals() const { return lits_; }
  std::size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }

  bool contains(Literal l) const { return std::binary_search(lits_.begin(), lits_.end(), l); }

  bool assigns(int var) const {
    auto it = std::lower_bound(lits_.begin(), lits_.end(), Literal{var, false});
    return it != lits_.end() && it->var == var;
  }

  std::optional<bool> polarity(int var) const {
    auto it = std::lower_bound(lits_.begin(), lits_.end(), Literal{var, false});
    if (it != lits_.end() && it->var == var) return it->positive;
    return std::nullopt;
  }

  std::vector<int> vars() const {
    std::vector<int> out;
    out.reserve(lits_.size());
    for (const auto& l : lits_) out.push_back(l.var);
    return out;
  }

  /// Restriction to the given variables.
  LiteralSet project(const std::set<int>& keep) const {
    std::vector<Literal> out;
    for (const auto& l : lits_)
      if (keep.count(l.var)) out.push_back(l);
    return LiteralSet(std::move(out));
  }

  /// Union; rejects conflicting polarities.
  LiteralSet merged_with(const LiteralSet& other) const {
    std::vector<Literal> out = lits_;
    out.insert(out.end(), other.lits_.begin(), other.lits_.end());
    return LiteralSet(std::move(out));
  }

  /// True when every literal of this set appears in `total`.
  bool subset_of(const LiteralSet& total) const {
    for (const auto& l : lits_)
      if (!total.contains(l)) return false;
    return true;
  }

  auto operator<=>(const LiteralSet&) const = default;

 private:
  std::vector<Literal> lits_;  // sorted, unique vars
};

/// Total assignment over sorted variable ids, decoded from a bit mask where
/// bit 0 is the first (most significant in lexicographic terms) variable.
inline LiteralSet assignment_from_mask(const std::vector<int>& sorted_vars, std::uint64_t mask) {
  std::vector<Literal> lits;
  lits.reserve(sorted_vars.size());
  for (std::size_t i = 0; i < sorted_vars.size(); ++i)
    lits.push_back({sorted_vars[i], (mask >> (sorted_vars.size() - 1 - i)) & 1 ? true : false});
  return LiteralSet(std::move(lits));
}

enum class VarKind { Vertex, Edge, Plain };

struct Var {
  int id;
  VarKind kind;
};

using Clause = std::vector<Literal>;  // sorted, proper

/// CNF over a declared variable set. Clauses are proper literal sets;
/// tautological and duplicate clauses are rejected at construction.
class Cnf {
 public:
  Cnf() = default;

  static Cnf from_parts(std::vector<Var> vars, std::vector<Clause> clauses) {
    std::sort(vars.begin(), vars.end(), [](const Var& a, const Var& b) { return a.id < b.id; });
    for (std::size_t i = 0; i + 1 < vars.size(); ++i)
      if (vars[i].id == vars[i + 1].id)
        throw invalid_argument("Cnf: duplicate variable id " + std::to_string(vars[i].id));
    std::set<Clause> seen;
    for (auto& c : clauses) {
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      for (std::size_t i = 0; i + 1 < c.size(); ++i)
        if (c[i].var == c[i + 1].var)
          throw invalid_argument("Cnf: clause with both polarities of variable " +
                                 std::to_string(c[i].var));
      for (const auto& l : c)
        if (!std::binary_search(vars.begin(), vars.end(), Var{l.var, VarKind::Plain},
                                [](const Var& a, const Var& b) { return a.id < b.id; }))
          throw invalid_argument("Cnf: clause uses undeclared variable " + std::to_string(l.var));
      if (!seen.insert(c).second) throw invalid_argument("Cnf: duplicate clause");
    }
    Cnf f;
    f.vars_ = std::move(vars);
    f.clauses_ = std::move(clauses);
    return f;
  }

  const std::vector<Var>& vars() const { return vars_; }
  const std::vector<Clause>& clauses() const { return clauses_; }
  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_clauses() const { return static_cast<int>(clauses_.size()); }

  std::vector<int> var_ids() const {
    std::vector<int> out;
    out.reserve(vars_.size());
    for (const auto& v : vars_) out.push_back(v.id);
    return out;
  }

  std::optional<VarKind> kind_of(int id) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), id,
                               [](const Var& a, int x) { return a.id < x; });
    if (it != vars_.end() && it->id == id) return it->kind;
    return std::nullopt;
  }

 private:
  std::vector<Var> vars_;  // sorted by id
  std::vector<Clause> clauses_;
};

/// The edge-padded CNF of a graph: variables are the vertices (ids kept) and
/// the edges (ids offset by |V|); every edge {u,v} contributes the all-
/// positive clause (u or x_e or v). Requires dense vertex ids and no
/// isolated vertices; clauses follow edge id order.
inline Cnf psi_of_graph(const Graph& g) {
  if (!g.has_dense_vertices())
    throw invalid_argument("psi_of_graph: vertex ids must be dense 0..n-1");
  for (int v : g.vertices())
    if (g.degree(v) == 0)
      throw invalid_argument("psi_of_graph: isolated vertex " + std::to_string(v));
  int n = g.num_vertices();
  std::vector<Var> vars;
  for (int v : g.vertices()) vars.push_back({v, VarKind::Vertex});
  std::vector<Clause> clauses;
  for (const auto& e : g.edges()) {
    vars.push_back({n + e.id, VarKind::Edge});
    clauses.push_back({pos(e.u), pos(e.v), pos(n + e.id)});
  }
  return Cnf::from_parts(std::move(vars), std::move(clauses));
}

/// Reconstructs the graph from an edge-padded CNF (inverse of psi_of_graph).
inline Graph psi_to_graph(const Cnf& f) {
  std::vector<int> vertices;
  int n = 0;
  for (const auto& v : f.vars())
    if (v.kind == VarKind::Vertex) {
      vertices.push_back(v.id);
      ++n;
    }
  std::vector<Edge> edges;
  for (const auto& c : f.clauses()) {
    std::vector<int> vs, es;
    for (const auto& l : c) {
      if (!l.positive) throw invalid_argument("psi_to_graph: negative literal in clause");
      auto k = f.kind_of(l.var);
      if (k == VarKind::Vertex)
        vs.push_back(l.var);
      else if (k == VarKind::Edge)
        es.push_back(l.var);
      else
        throw invalid_argument("psi_to_graph: untagged variable " + std::to_string(l.var));
    }
    if (vs.size() != 2 || es.size() != 1)
      throw invalid_argument("psi_to_graph: clause is not (u or e or v)");
    edges.push_back({es[0] - n, vs[0], vs[1]});
  }
  if (static_cast<int>(edges.size()) + n != f.num_vars())
    throw invalid_argument("psi_to_graph: unused edge variables");
  return Graph::from_parts(std::move(vertices), std::move(edges));
}

/// Primal graph: variables as vertices, one clique per clause. Edge ids are
/// assigned in sorted endpoint order.
inline Graph primal_graph(const Cnf& f) {
  std::set<std::pair<int, int>> pairs;
  for (const auto& c : f.clauses())
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        int a = c[i].var, b = c[j].var;
        if (a > b) std::swap(a, b);
        pairs.insert({a, b});
      }
  std::vector<Edge> es;
  int id = 0;
  for (const auto& [a, b] : pairs) es.push_back({id++, a, b});
  return Graph::from_parts(f.var_ids(), std::move(es));
}

/// Largest number of clauses any single variable occurs in.
inline int max_var_occurrence(const Cnf& f) {
  std::map<int, int> count;
  for (const auto& c : f.clauses())
    for (const auto& l : c) count[l.var]++;
  int best = 0;
  for (const auto& [v, k] : count) best = std::max(best, k);
  return best;
}

/// Set-intersection satisfaction: s satisfies f iff s shares a literal with
/// every clause. Partial assignments are allowed.
inline bool satisfies(const LiteralSet& s, const Cnf& f) {
  for (const auto& c : f.clauses()) {
    bool hit = false;
    for (const auto& l : c)
      if (s.contains(l)) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

/// All satisfying total assignments, in lexicographic order of the sorted
/// variable ids (first variable most significant, false before true). This
/// is the library's brute-force oracle.
inline std::vector<LiteralSet> enumerate_models(const Cnf& f, int cap = 0) {
  if (cap <= 0) cap = default_caps().enumeration_vars;
  int n = f.num_vars();
  if (n > cap)
    throw size_error("enumerate_models: " + std::to_string(n) + " variables exceeds cap " +
                     std::to_string(cap));
  std::vector<int> ids = f.var_ids();
  std::map<int, int> pos_of;
  for (int i = 0; i < n; ++i) pos_of[ids[i]] = i;
  // Clause bitmasks for the fast inner check.
  struct MaskClause {
    std::uint64_t care = 0;
    std::uint64_t want = 0;
  };
  std::vector<MaskClause> mcs;
  for (const auto& c : f.clauses()) {
    MaskClause mc;
    for (const auto& l : c) {
      std::uint64_t bit = 1ull << (n - 1 - pos_of[l.var]);
      mc.care |= bit;
      if (l.positive) mc.want |= bit;
    }
    mcs.push_back(mc);
  }
  std::vector<LiteralSet> models;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    bool ok = true;
    for (const auto& mc : mcs)
      if (((mask & mc.care) ^ mc.want) == mc.care) {  // every literal falsified
        ok = false;
        break;
      }
    if (ok) models.push_back(assignment_from_mask(ids, mask));
  }
  return models;
}

/// Splits f along a clique-preserving 2-cover of its primal graph: a clause
/// whose variable clique lies in part 1 goes to the first CNF, the rest go
/// to the second. Each output declares only its own variables.
inline std::pair<Cnf, Cnf> split_by_cover(const Cnf& f, const DCover& cover) {
  if (cover.parts.size() != 2)
    throw invalid_argument("split_by_cover: cover must have exactly two parts");
  auto in_part = [&](const Clause& c, const DCover::Part& part) {
    for (const auto& l : c)
      if (!part.graph.has_vertex(l.var)) return false;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        if (!part.graph.has_edge(c[i].var, c[j].var)) return false;
    return true;
  };
  std::vector<Clause> c1, c2;
  for (const auto& c : f.clauses()) {
    if (in_part(c, cover.parts[0]))
      c1.push_back(c);
    else if (in_part(c, cover.parts[1]))
      c2.push_back(c);
    else
      throw invalid_argument("split_by_cover: cover is not clique preserving for some clause");
  }
  auto project = [&](const std::vector<Clause>& cs) {
    std::set<int> used;
    for (const auto& c : cs)
      for (const auto& l : c) used.insert(l.var);
    std::vector<Var> vars;
    for (const auto& v : f.vars())
      if (used.count(v.id)) vars.push_back(v);
    return Cnf::from_parts(std::move(vars), cs);
  };
  return {project(c1), project(c2)};
}

// ---------------------------------------------------------------------------
// DIMACS round trip. Variables are written 1-based in sorted id order; the
// vertex/edge tagging is preserved in "c vmap" comment lines.

inline void write_dimacs(const Cnf& f, std::ostream& os) {
  std::vector<int> ids = f.var_ids();
  std::map<int, int> dimacs_of;
  for (std::size_t i = 0; i < ids.size(); ++i) dimacs_of[ids[i]] = static_cast<int>(i) + 1;
  auto tag_line = [&](VarKind kind, const char* name) {
    std::vector<int> tagged;
    for (const auto& v : f.vars())
      if (v.kind == kind) tagged.push_back(dimacs_of[v.id]);
    if (tagged.empty()) return;
    os << "c vmap " << name;
    for (int t : tagged) os << " " << t;
    os << "\n";
  };
  os << "p cnf " << f.num_vars() << " " << f.num_clauses() << "\n";
  tag_line(VarKind::Vertex, "vertex");
  tag_line(VarKind::Edge, "edge");
  os << "c vmap ids";
  for (int id : ids) os << " " << id;
  os << "\n";
  for (const auto& c : f.clauses()) {
    for (const auto& l : c) os << (l.positive ? "" : "-") << dimacs_of[l.var] << " ";
    os << "0\n";
  }
}

inline Cnf read_dimacs(std::istream& is) {
  int nvars = -1, nclauses = -1;
  std::vector<int> ids;
  std::set<int> vertex_tagged, edge_tagged;
  std::vector<Clause> clauses;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") {
      std::string kw;
      if (ls >> kw && kw == "vmap") {
        std::string what;
        ls >> what;
        int x;
        if (what == "ids") {
          while (ls >> x) ids.push_back(x);
        } else if (what == "vertex") {
          while (ls >> x) vertex_tagged.insert(x);
        } else if (what == "edge") {
          while (ls >> x) edge_tagged.insert(x);
        }
      }
      continue;
    }
    if (tok == "p") {
      std::string fmt;
      if (!(ls >> fmt >> nvars >> nclauses) || fmt != "cnf")
        throw invalid_argument("DIMACS: bad problem line");
      continue;
    }
    if (nvars < 0) throw invalid_argument("DIMACS: clause before problem line");
    Clause c;
    int lit = std::stoi(tok);
    while (lit != 0) {
      int v = std::abs(lit);
      if (v < 1 || v > nvars) throw invalid_argument("DIMACS: literal out of range");
      c.push_back({v, lit > 0});
      if (!(ls >> lit)) throw invalid_argument("DIMACS: clause not terminated by 0");
    }
    clauses.push_back(std::move(c));
  }
  if (nvars < 0) throw invalid_argument("DIMACS: missing problem line");
  if (ids.empty())
    for (int i = 1; i <= nvars; ++i) ids.push_back(i);
  if (static_cast<int>(ids.size()) != nvars)
    throw invalid_argument("DIMACS: vmap ids length mismatch");
  std::vector<Var> vars;
  for (int i = 1; i <= nvars; ++i) {
    VarKind kind = VarKind::Plain;
    if (vertex_tagged.count(i)) kind = VarKind::Vertex;
    if (edge_tagged.count(i)) kind = VarKind::Edge;
    vars.push_back({ids[i - 1], kind});
  }
  // Remap literals from 1-based DIMACS numbering to the stable ids.
  for (auto& c : clauses)
    for (auto& l : c) l.var = ids[l.var - 1];
  return Cnf::from_parts(std::move(vars), std::move(clauses));
}

inline nlohmann::json to_json(const LiteralSet& s) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& l : s.literals()) j.push_back({{"var", l.var}, {"positive", l.positive}});
  return j;
}

inline nlohmann::json models_to_json(const std::vector<LiteralSet>& models) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& m : models) j.push_back(to_json(m));
  return j;
}

}  // namespace dpw

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dpw/cnf.hpp"
#include "dpw/dyadic.hpp"
#include "dpw/graph.hpp"

namespace dpw {

/// The exact probability model over the satisfying assignments of the
/// edge-padded CNF of a graph: a model S has probability
/// 2^-(|V| + |Free(S)|), where an edge is free unless both endpoints are
/// negative. Probabilities are exact dyadic rationals throughout.
struct VEModel {
  Graph graph;
  Cnf psi;
  std::vector<int> clause_edge;  // clause index -> edge id

  int edge_var(int edge_id) const { return graph.num_vertices() + edge_id; }
};

inline VEModel make_ve_model(const Graph& g) {
  VEModel m;
  m.graph = g;
  m.psi = psi_of_graph(g);
  for (const auto& e : g.edges()) m.clause_edge.push_back(e.id);
  return m;
}

/// Per-edge classification under a (possibly partial) assignment:
///  - enforced: both endpoints occur negatively; free otherwise;
///  - guarded: both endpoints are assigned (either polarity).
struct EdgeClasses {
  std::vector<int> free_edges;      // edge ids
  std::vector<int> enforced_edges;  // edge ids
  std::vector<int> guarded_edges;   // edge ids

  bool is_free(int edge_id) const {
    return std::binary_search(free_edges.begin(), free_edges.end(), edge_id);
  }
  bool is_guarded(int edge_id) const {
    return std::binary_search(guarded_edges.begin(), guarded_edges.end(), edge_id);
  }
};

inline EdgeClasses classify_edges(const Graph& g, const LiteralSet& s) {
  EdgeClasses ec;
  for (const auto& e : g.edges()) {
    auto pu = s.polarity(e.u), pv = s.polarity(e.v);
    bool enforced = pu && pv && !*pu && !*pv;
    if (enforced)
      ec.enforced_edges.push_back(e.id);
    else
      ec.free_edges.push_back(e.id);
    if (pu && pv) ec.guarded_edges.push_back(e.id);
  }
  return ec;
}

/// Vertex-variable / edge-variable halves of an assignment.
inline std::pair<LiteralSet, LiteralSet> split_assignment(const VEModel& m, const LiteralSet& s) {
  std::vector<Literal> sv, se;
  for (const auto& l : s.literals()) {
    auto kind = m.psi.kind_of(l.var);
    if (!kind)
      throw invalid_argument("assignment mentions unknown variable " + std::to_string(l.var));
    if (*kind == VarKind::Vertex)
      sv.push_back(l);
    else
      se.push_back(l);
  }
  return {LiteralSet(std::move(sv)), LiteralSet(std::move(se))};
}

/// Guarded: every assigned edge variable lies between two assigned vertices.
inline bool is_guarded_assignment(const VEModel& m, const LiteralSet& s) {
  auto [sv, se] = split_assignment(m, s);
  auto ec = classify_edges(m.graph, s);
  for (const auto& l : se.literals())
    if (!ec.is_guarded(l.var - m.graph.num_vertices())) return false;
  return true;
}

/// Valid: no clause is falsified, i.e. every assigned enforced edge variable
/// occurs positively.
inline bool is_valid_assignment(const VEModel& m, const LiteralSet& s) {
  auto ec = classify_edges(m.graph, s);
  for (int eid : ec.enforced_edges) {
    auto p = s.polarity(m.edge_var(eid));
    if (p && !*p) return false;
  }
  return true;
}

/// Probability of one total satisfying assignment.
inline Dyadic pr_assignment(const VEModel& m, const LiteralSet& s) {
  if (static_cast<int>(s.size()) != m.psi.num_vars())
    throw invalid_argument("pr_assignment: assignment is not total");
  for (const auto& l : s.literals())
    if (!m.psi.kind_of(l.var))
      throw invalid_argument("pr_assignment: unknown variable " + std::to_string(l.var));
  if (!satisfies(s, m.psi))
    throw invalid_argument("pr_assignment: assignment does not satisfy the CNF");
  auto ec = classify_edges(m.graph, s);
  return Dyadic::pow2_neg(m.graph.num_vertices() +
                          static_cast<int>(ec.free_edges.size()));
}

enum class PrMode { ClosedForm, Oracle };

/// Probability that a random model extends the partial assignment s.
/// The closed form 2^-(|S_V| + |Free(S) ∩ S_E|) requires s to be guarded and
/// valid; the oracle sums pr_assignment over all extensions and works for
/// any s. The two agree on guarded valid inputs.
inline Dyadic pr_extension(const VEModel& m, const LiteralSet& s, PrMode mode) {
  if (mode == PrMode::ClosedForm) {
    if (!is_guarded_assignment(m, s))
      throw invalid_argument("pr_extension: closed form requires a guarded assignment");
    if (!is_valid_assignment(m, s))
      throw invalid_argument("pr_extension: closed form requires a valid assignment");
    auto [sv, se] = split_assignment(m, s);
    auto ec = classify_edges(m.graph, s);
    int free_assigned = 0;
    for (const auto& l : se.literals())
      if (ec.is_free(l.var - m.graph.num_vertices())) ++free_assigned;
    return Dyadic::pow2_neg(static_cast<int>(sv.size()) + free_assigned);
  }
  Dyadic sum = Dyadic::zero();
  for (const auto& model : enumerate_models(m.psi))
    if (s.subset_of(model)) sum += pr_assignment(m, model);
  return sum;
}

// ---------------------------------------------------------------------------
// Clause fixing.

/// A family of assignments fixes a clause with a proper nonempty witness
/// subset when every member intersects the witness. The extended form for
/// partial assignments additionally confines each member's intersection with
/// the clause to the witness.
inline bool fix_holds(const std::vector<LiteralSet>& family, const Clause& clause,
                      const Clause& witness, bool extended = false) {
  if (witness.empty() || witness.size() >= clause.size())
    throw invalid_argument("fix_holds: witness must be a proper nonempty subset");
  for (const auto& w : witness)
    if (!std::binary_search(clause.begin(), clause.end(), w))
      throw invalid_argument("fix_holds: witness literal outside the clause");
  for (const auto& s : family) {
    bool hit = false;
    for (const auto& w : witness)
      if (s.contains(w)) {
        hit = true;
        break;
      }
    if (!hit) return false;
    if (extended)
      for (const auto& l : clause)
        if (s.contains(l) && !std::binary_search(witness.begin(), witness.end(), l)) return false;
  }
  return true;
}

/// Searches the proper nonempty subsets of the clause (smallest first, then
/// lexicographic) for a fixing witness.
inline std::optional<Clause> find_fix_witness(const std::vector<LiteralSet>& family,
                                              const Clause& clause, bool extended = false) {
  int k = static_cast<int>(clause.size());
  std::vector<Clause> subsets;
  for (int mask = 1; mask < (1 << k) - 1; ++mask) {
    Clause sub;
    for (int i = 0; i < k; ++i)
      if (mask & (1 << i)) sub.push_back(clause[i]);
    subsets.push_back(std::move(sub));
  }
  std::sort(subsets.begin(), subsets.end(), [](const Clause& a, const Clause& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  for (const auto& sub : subsets)
    if (fix_holds(family, clause, sub, extended)) return sub;
  return std::nullopt;
}

/// All models whose intersection with the witness is nonempty (the fixing
/// event for one clause).
inline std::vector<LiteralSet> models_fixing(const std::vector<LiteralSet>& models,
                                             const Clause& witness) {
  std::vector<LiteralSet> out;
  for (const auto& s : models) {
    for (const auto& w : witness)
      if (s.contains(w)) {
        out.push_back(s);
        break;
      }
  }
  return out;
}

struct FixedProbReport {
  bool ok = false;
  Dyadic pr;
  BigInt bound_num, bound_den;  // (7/8)^|M|
  std::vector<Clause> witnesses;
};

/// Exact check that a family of models fixing a matching of clauses has
/// probability at most (7/8)^|M|. The matching clauses must be pairwise
/// variable-disjoint and the family must fix each of them.
inline FixedProbReport verify_fixedprob(const VEModel& m, const std::vector<int>& matching,
                                        const std::vector<LiteralSet>& family) {
  std::set<int> seen_vars;
  for (int ci : matching) {
    if (ci < 0 || ci >= m.psi.num_clauses())
      throw invalid_argument("verify_fixedprob: bad clause index");
    for (const auto& l : m.psi.clauses()[ci]) {
      if (seen_vars.count(l.var))
        throw invalid_argument("verify_fixedprob: clauses do not form a matching");
      seen_vars.insert(l.var);
    }
  }
  FixedProbReport report;
  for (int ci : matching) {
    auto w = find_fix_witness(family, m.psi.clauses()[ci]);
    if (!w)
      throw invalid_argument("verify_fixedprob: family does not fix clause " +
                             std::to_string(ci));
    report.witnesses.push_back(*w);
  }
  std::set<LiteralSet> distinct(family.begin(), family.end());
  Dyadic pr = Dyadic::zero();
  for (const auto& s : distinct) pr += pr_assignment(m, s);
  report.pr = pr;
  int q = static_cast<int>(matching.size());
  report.bound_num = bigint_pow(7, q);
  report.bound_den = bigint_pow(8, q);
  report.ok = pr.leq_fraction(report.bound_num, report.bound_den);
  return report;
}

}  // namespace dpw

#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "dpw/nbp.hpp"
#include "oracles.hpp"

using namespace dpw;

namespace {

/// Chain program querying the given variables in sequence.
Nbp chain_of_vars(const std::vector<int>& vars) {
  std::vector<int> nodes;
  std::vector<NbpEdge> edges;
  for (std::size_t i = 0; i <= vars.size(); ++i) nodes.push_back(static_cast<int>(i));
  for (std::size_t i = 0; i < vars.size(); ++i)
    edges.push_back({static_cast<int>(i), static_cast<int>(i), static_cast<int>(i) + 1,
                     pos(vars[i])});
  return Nbp::from_parts(std::move(nodes), std::move(edges), 0,
                         static_cast<int>(vars.size()));
}

/// The no-yardstick fixture with its (2,3) edge subdivided, as in the
/// discussion of the example: afterwards both paths admit markings.
Nbp patched_example() {
  std::vector<int> nodes = {0, 1, 2, 3, 4, 5, 6};
  std::vector<NbpEdge> edges = {
      {0, 0, 1, pos(3)}, {1, 0, 2, pos(1)}, {2, 1, 3, pos(3)},  {3, 2, 6, pos(2)},
      {4, 6, 3, std::nullopt}, {5, 3, 4, pos(1)}, {6, 4, 5, pos(2)},
  };
  return Nbp::from_parts(std::move(nodes), std::move(edges), 0, 5);
}

}  // namespace

TEST_CASE("program validation", "[nbp]") {
  CHECK_THROWS_AS(Nbp::from_parts({0, 1}, {{0, 0, 1, {}}, {1, 1, 0, {}}}, 0, 1),
                  invalid_argument);  // cycle
  CHECK_THROWS_AS(Nbp::from_parts({0, 1, 2}, {{0, 0, 2, {}}}, 0, 2),
                  invalid_argument);  // node 1 disconnected
  CHECK_THROWS_AS(Nbp::from_parts({0, 1}, {{0, 0, 1, pos(3)}, {1, 0, 1, pos(3)}}, 0, 1),
                  invalid_argument);  // duplicate parallel literal
  // Parallel edges with distinct literals are allowed.
  CHECK_NOTHROW(Nbp::from_parts({0, 1}, {{0, 0, 1, pos(3)}, {1, 0, 1, neg(3)}}, 0, 1));
}

TEST_CASE("carried assignments", "[nbp]") {
  SECTION("single labeled edge") {
    Nbp z = chain_of_vars({7});
    auto carried = carried_assignments(z);
    REQUIRE(carried.size() == 1);
    CHECK(carried[0].contains(pos(7)));
  }
  SECTION("parallel opposite literals carry both totals") {
    Nbp z = Nbp::from_parts({0, 1}, {{0, 0, 1, pos(3)}, {1, 0, 1, neg(3)}}, 0, 1);
    CHECK(carried_assignments(z).size() == 2);
  }
  SECTION("star program carries exactly the models") {
    Graph star = star_graph(4);
    Nbp z = build_star_mnbp(star);
    auto carried = carried_assignments(z);
    auto models = enumerate_models(psi_of_graph(star));
    CHECK(carried == models);
  }
  SECTION("inconsistent paths never carry") {
    // x then not-x in sequence: no total assignment contains both.
    Nbp z = Nbp::from_parts({0, 1, 2}, {{0, 0, 1, pos(3)}, {1, 1, 2, neg(3)}}, 0, 2);
    CHECK(carried_assignments(z).empty());
  }
  SECTION("matches the path-enumeration oracle") {
    Nbp z = make_no_yardstick_example();
    auto vars = z.var_set();
    for (std::uint64_t mask = 0; mask < (1ull << vars.size()); ++mask) {
      LiteralSet s = assignment_from_mask(vars, mask);
      CHECK(carries(z, s) == oracles::carries(z, s));
    }
  }
}

TEST_CASE("representation checks", "[nbp]") {
  SECTION("star programs represent their padded CNFs") {
    for (int n : {2, 3, 4}) {
      Graph star = star_graph(n);
      CHECK(represents(build_star_mnbp(star), psi_of_graph(star)));
    }
  }
  SECTION("complete-graph program represents the padded CNF") {
    CHECK(represents(build_kn_smnbp(4), psi_of_graph(complete_graph(4))));
  }
  SECTION("CNF with an empty clause is never represented") {
    Graph star = star_graph(3);
    Nbp z = build_star_mnbp(star);
    Cnf base = psi_of_graph(star);
    std::vector<Clause> clauses = base.clauses();
    clauses.push_back({});
    Cnf unsat = Cnf::from_parts(base.vars(), clauses);
    CHECK_FALSE(represents(z, unsat));
  }
  SECTION("variable mismatch is rejected") {
    CHECK_THROWS_AS(represents(build_star_mnbp(star_graph(3)),
                               psi_of_graph(star_graph(4))),
                    invalid_argument);
  }
}

TEST_CASE("monotonicity", "[nbp]") {
  CHECK(is_monotone(build_star_mnbp(star_graph(4))));
  CHECK_FALSE(is_monotone(Nbp::from_parts({0, 1}, {{0, 0, 1, neg(2)}}, 0, 1)));
  CHECK(is_monotone(Nbp::from_parts({0, 1}, {{0, 0, 1, {}}}, 0, 1)));
}

TEST_CASE("read bound", "[nbp]") {
  CHECK(read_bound(make_no_yardstick_example()) == 2);
  CHECK(read_bound(build_star_mnbp(star_graph(4))) == 1);
  for (int n : {2, 3, 4, 5}) CHECK(read_bound(build_kn_smnbp(n)) <= n);
}

TEST_CASE("read bound never exceeds separability", "[nbp]") {
  // Each of the d read-once fragments contributes at most one occurrence.
  for (const Nbp& z : {make_no_yardstick_example(), build_kn_smnbp(3), build_kn_smnbp(4),
                       chain_of_vars({1, 1, 2, 2}), subdivide(make_no_yardstick_example())})
    CHECK(read_bound(z) <= separability_number(z));
}

TEST_CASE("separability", "[nbp]") {
  SECTION("reference query sequences") {
    CHECK(separability_number(chain_of_vars({1, 3, 1, 2})) == 2);
    CHECK(separability_number(chain_of_vars({1, 1, 2, 2})) > 2);
    CHECK(separability_number(chain_of_vars({1, 1, 2, 2})) == 3);
  }
  SECTION("read-once programs") {
    CHECK(separability_number(build_star_mnbp(star_graph(5))) == 1);
  }
  SECTION("fixture") {
    CHECK(separability_number(make_no_yardstick_example()) == 2);
  }
  SECTION("both modes agree") {
    for (const Nbp& z : {make_no_yardstick_example(), build_kn_smnbp(3),
                         subdivide(make_no_yardstick_example())})
      CHECK(separability_number(z, SeparabilityMode::FragmentDp) ==
            separability_number(z, SeparabilityMode::PathEnumeration));
  }
  SECTION("path cap raises a size error") {
    CHECK_THROWS_AS(separability_number(build_kn_smnbp(4), SeparabilityMode::PathEnumeration, 5),
                    size_error);
  }
}

namespace {

/// Random layered monotone program over a small variable alphabet.
Nbp random_layered_program(Rng& rng, int layers, int width, int vars) {
  std::vector<std::vector<int>> layer_nodes;
  int next = 0;
  layer_nodes.push_back({next++});  // source
  for (int l = 1; l + 1 < layers; ++l) {
    std::vector<int> nodes;
    int k = 1 + static_cast<int>(rng.next_below(width));
    for (int i = 0; i < k; ++i) nodes.push_back(next++);
    layer_nodes.push_back(nodes);
  }
  layer_nodes.push_back({next++});  // sink
  std::vector<int> nodes;
  for (const auto& l : layer_nodes) nodes.insert(nodes.end(), l.begin(), l.end());
  std::vector<NbpEdge> edges;
  std::set<std::tuple<int, int, int>> slots;
  int id = 0;
  auto add = [&](int from, int to) {
    int var = static_cast<int>(rng.next_below(vars));
    if (rng.chance(1, 5)) var = -1;  // unlabeled
    if (!slots.insert({from, to, var}).second) return;
    edges.push_back({id++, from, to,
                     var < 0 ? std::optional<Literal>{} : std::optional<Literal>{pos(var)}});
  };
  for (std::size_t l = 0; l + 1 < layer_nodes.size(); ++l) {
    for (int from : layer_nodes[l]) add(from, layer_nodes[l + 1][rng.next_below(layer_nodes[l + 1].size())]);
    for (int to : layer_nodes[l + 1]) add(layer_nodes[l][rng.next_below(layer_nodes[l].size())], to);
    if (rng.chance(1, 2))
      add(layer_nodes[l][rng.next_below(layer_nodes[l].size())],
          layer_nodes[l + 1][rng.next_below(layer_nodes[l + 1].size())]);
  }
  return Nbp::from_parts(std::move(nodes), std::move(edges), 0, next - 1);
}

}  // namespace

TEST_CASE("random programs agree with the path oracles", "[nbp]") {
  Rng rng(109);
  for (int it = 0; it < 25; ++it) {
    Nbp z = random_layered_program(rng, 3 + rng.next_below(3), 3, 5);
    auto vars = z.var_set();
    REQUIRE(vars.size() <= 6);
    for (std::uint64_t mask = 0; mask < (1ull << vars.size()); ++mask) {
      LiteralSet s = assignment_from_mask(vars, mask);
      CHECK(carries(z, s) == oracles::carries(z, s));
    }
    CHECK(separability_number(z, SeparabilityMode::FragmentDp) ==
          separability_number(z, SeparabilityMode::PathEnumeration));
    // Read bound against explicit path enumeration.
    int expected = 0;
    for (const auto& p : enumerate_paths(z)) {
      std::map<int, int> count;
      for (int eid : p) {
        const auto& e = z.edge_by_id(eid);
        if (e.label) expected = std::max(expected, ++count[e.label->var]);
      }
    }
    CHECK(read_bound(z) == expected);
    // Subdivision preserves everything.
    Nbp s = subdivide(z);
    CHECK(s.size() == 3 * z.size());
    CHECK(carried_assignments(s) == carried_assignments(z));
  }
}

TEST_CASE("star construction", "[nbp]") {
  Nbp z = build_star_mnbp(star_graph(4));
  CHECK(z.size() == 7);
  CHECK(is_monotone(z));
  CHECK(read_bound(z) == 1);
  CHECK(build_star_mnbp(star_graph(2)).size() == 3);
  CHECK_THROWS_AS(build_star_mnbp(path_graph(4)), invalid_argument);
}

TEST_CASE("complete graph construction", "[nbp]") {
  SECTION("size formula") {
    for (int n = 2; n <= 6; ++n) CHECK(build_kn_smnbp(n).size() == n * (2 * n - 1));
  }
  SECTION("represents the padded CNF") {
    CHECK(represents(build_kn_smnbp(3), psi_of_graph(complete_graph(3))));
  }
  SECTION("separability within n") {
    for (int n : {2, 3, 4, 5}) CHECK(separability_number(build_kn_smnbp(n)) <= n);
  }
  SECTION("monotone") {
    for (int n : {2, 5}) CHECK(is_monotone(build_kn_smnbp(n)));
  }
}

TEST_CASE("chaining programs", "[nbp]") {
  SECTION("chain of one is the identity") {
    Nbp z = build_star_mnbp(star_graph(3));
    Nbp c = chain({z});
    CHECK(c.size() == z.size());
    CHECK(carried_assignments(c) == carried_assignments(z));
  }
  SECTION("chained carried set is the intersection for monotone programs") {
    Graph k3 = complete_graph(3);
    std::map<std::pair<int, int>, int> edge_var;
    for (const auto& e : k3.edges()) edge_var[{e.u, e.v}] = 3 + e.id;
    auto star_for = [&](int c) {
      std::vector<std::pair<int, int>> leaves;
      for (int v = 0; v < 3; ++v)
        if (v != c) leaves.push_back({v, edge_var.at({std::min(c, v), std::max(c, v)})});
      return detail::star_program(c, leaves);
    };
    Nbp chained = chain({star_for(0), star_for(1), star_for(2)});
    CHECK(chained.size() == build_kn_smnbp(3).size());
    CHECK(carried_assignments(chained) == carried_assignments(build_kn_smnbp(3)));
    // Intersection semantics.
    auto vars = chained.var_set();
    for (std::uint64_t mask = 0; mask < (1ull << vars.size()); ++mask) {
      LiteralSet s = assignment_from_mask(vars, mask);
      bool expect = carries(star_for(0), s) && carries(star_for(1), s) && carries(star_for(2), s);
      CHECK(carries(chained, s) == expect);
    }
  }
}

TEST_CASE("subdivision", "[nbp]") {
  Nbp z = make_no_yardstick_example();
  Nbp s = subdivide(z);
  CHECK(s.size() == 3 * z.size());
  CHECK(carried_assignments(s) == carried_assignments(z));

  SECTION("structural conditions") {
    auto degree_above_one = [&](const Nbp& p, int v) {
      return p.in_indices(v).size() > 1 || p.out_indices(v).size() > 1;
    };
    for (const auto& e : s.edges()) {
      CHECK_FALSE((degree_above_one(s, e.from) && degree_above_one(s, e.to)));
      if (e.label) {
        CHECK_FALSE(degree_above_one(s, e.from));
        CHECK_FALSE(degree_above_one(s, e.to));
      }
    }
  }
  SECTION("single edge becomes a three-edge path with the label in the middle") {
    Nbp one = chain_of_vars({4});
    Nbp sub = subdivide(one);
    REQUIRE(sub.size() == 3);
    CHECK_FALSE(sub.edges()[0].label.has_value());
    CHECK(sub.edges()[1].label == Literal{4, true});
    CHECK_FALSE(sub.edges()[2].label.has_value());
  }
  SECTION("representation is preserved") {
    Graph star = star_graph(3);
    CHECK(represents(subdivide(build_star_mnbp(star)), psi_of_graph(star)));
  }
}

TEST_CASE("vertex classification", "[nbp]") {
  Nbp z = make_no_yardstick_example();
  auto nc = classify_vertices(z);
  CHECK(nc.read_once.at(z.source()));
  CHECK_FALSE(nc.read_once.at(3));  // reached by the doubled-variable branch
  CHECK(std::count(nc.minimally_non_read_once.begin(), nc.minimally_non_read_once.end(), 3) == 1);

  SECTION("read-once programs have no minimal non-read-once nodes") {
    auto ro = classify_vertices(build_star_mnbp(star_graph(4)));
    CHECK(ro.minimally_non_read_once.empty());
  }
}

TEST_CASE("pivot and pre-pivot", "[nbp]") {
  Nbp z = make_no_yardstick_example();
  SECTION("doubled path has the merge node as pivot") {
    PathAnalysis pa = pivot_prepivot(z, {1, 3, 4, 5});
    REQUIRE(pa.pivot.has_value());
    CHECK(*pa.pivot == 3);
    REQUIRE(pa.prepivot.has_value());
    CHECK(*pa.prepivot == 2);
    CHECK(pa.fragment_starts.size() == 2);
  }
  SECTION("read-once program has no pivot") {
    Nbp star = build_star_mnbp(star_graph(3));
    auto paths = enumerate_paths(star);
    PathAnalysis pa = pivot_prepivot(star, paths.front());
    CHECK_FALSE(pa.pivot.has_value());
  }
  SECTION("after subdivision the pre-pivot suffix is one level less separable") {
    Nbp s = subdivide(z);
    int d = separability_number(s);
    for (const auto& path : enumerate_paths(s)) {
      PathAnalysis pa = pivot_prepivot(s, path);
      if (!pa.prepivot) continue;
      Nbp zv = extract_between(s, *pa.prepivot, s.sink());
      CHECK(separability_number(zv) <= d - 1);
      auto nc = classify_vertices(s);
      CHECK(nc.read_once.at(*pa.prepivot));
    }
  }
}

TEST_CASE("extract between", "[nbp]") {
  // Branching fixture in the shape of the two-terminal span figure: a side
  // branch from the source bypasses the x..y block.
  std::vector<int> nodes = {0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<NbpEdge> edges = {
      {0, 0, 1, {}},        // source to x
      {1, 0, 6, pos(1)},    // side branch
      {2, 1, 2, pos(1)}, {3, 1, 3, pos(1)}, {4, 1, 4, pos(2)},
      {5, 2, 5, pos(2)}, {6, 3, 5, pos(3)}, {7, 4, 5, pos(3)},
      {8, 5, 7, {}},        // y to sink
      {9, 6, 7, pos(4)},
  };
  Nbp z = Nbp::from_parts(std::move(nodes), std::move(edges), 0, 7);
  SECTION("span between the block terminals") {
    Nbp span = extract_between(z, 1, 5);
    CHECK(span.nodes() == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(span.size() == 6);
    CHECK(span.source() == 1);
    CHECK(span.sink() == 5);
  }
  SECTION("full span drops off-path nodes") {
    Nbp full = extract_between(z, 0, 7);
    CHECK(full.nodes().size() == z.nodes().size());
  }
  SECTION("degenerate and failing cases") {
    Nbp point = extract_between(z, 3, 3);
    CHECK(point.nodes() == std::vector<int>{3});
    CHECK(point.size() == 0);
    CHECK_THROWS_AS(extract_between(z, 5, 1), invalid_argument);
  }
}

TEST_CASE("yardstick markings", "[nbp]") {
  Nbp z = make_no_yardstick_example();
  SECTION("the doubled path cannot be marked") {
    CHECK_FALSE(yardsticks_for_path(z, {1, 3, 4, 5}, 2).has_value());
  }
  SECTION("the other path can") {
    CHECK(yardsticks_for_path(z, {0, 2, 4, 5}, 2).has_value());
  }
  SECTION("subdividing one edge fixes the failing path") {
    Nbp p = patched_example();
    for (const auto& path : enumerate_paths(p))
      CHECK(yardsticks_for_path(p, path, 2).has_value());
    // Same carried assignments as the original.
    CHECK(carried_assignments(p) == carried_assignments(z));
  }
  SECTION("full subdivision marks every path") {
    Nbp s = subdivide(z);
    int d = separability_number(s);
    SpanCache cache;
    for (const auto& path : enumerate_paths(s))
      CHECK(yardsticks_for_path(s, path, d, &cache).has_value());
  }
  SECTION("read-once program marks with the trivial pair") {
    Nbp star = build_star_mnbp(star_graph(3));
    auto paths = enumerate_paths(star);
    auto marks = yardsticks_for_path(star, paths.front(), 1);
    REQUIRE(marks.has_value());
    CHECK(marks->front() == star.source());
    CHECK(marks->back() == star.sink());
    CHECK(marks->size() == 2);
  }
}

TEST_CASE("program json round trip", "[nbp]") {
  for (const Nbp& z : {make_no_yardstick_example(), build_kn_smnbp(3)}) {
    Nbp back = nbp_from_json(to_json(z));
    CHECK(back.nodes() == z.nodes());
    CHECK(back.source() == z.source());
    CHECK(back.sink() == z.sink());
    REQUIRE(back.edges().size() == z.edges().size());
    for (std::size_t i = 0; i < z.edges().size(); ++i) {
      CHECK(back.edges()[i].from == z.edges()[i].from);
      CHECK(back.edges()[i].to == z.edges()[i].to);
      CHECK(back.edges()[i].label == z.edges()[i].label);
    }
  }
}

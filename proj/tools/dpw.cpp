// Command-line front end: graph generation, decomposition, CNF compilation
// into decision diagrams, branching-program analysis, and lower-bound
// certification. Every command is deterministic given inputs, seed, and
// caps; reruns produce byte-identical files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpw/cnf.hpp"
#include "dpw/common.hpp"
#include "dpw/decomposition.hpp"
#include "dpw/graph.hpp"
#include "dpw/lowerbound.hpp"
#include "dpw/nbp.hpp"
#include "dpw/obdd.hpp"
#include "dpw/vemodel.hpp"
#include "dpw/width.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSizeCap = 3;
constexpr int kExitPropertyViolation = 4;
constexpr int kSchemaVersion = 1;

void apply_env_caps() {
  auto read = [](const char* name, int& slot) {
    if (const char* v = std::getenv(name)) slot = std::atoi(v);
  };
  read("DPW_EXACT_CAP", dpw::default_caps().exact_solver_vertices);
  read("DPW_COVER_CAP", dpw::default_caps().exact_cover_edges);
  read("DPW_ENUM_CAP", dpw::default_caps().enumeration_vars);
  if (const char* v = std::getenv("DPW_PATH_CAP"))
    dpw::default_caps().path_count = std::atoll(v);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    os << content;
    if (!os) throw dpw::invalid_argument("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

dpw::Graph load_graph(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw dpw::invalid_argument("cannot read graph file " + path);
  return dpw::read_edge_list(is);
}

dpw::Cnf load_cnf(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw dpw::invalid_argument("cannot read CNF file " + path);
  return dpw::read_dimacs(is);
}

dpw::Nbp load_nbp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw dpw::invalid_argument("cannot read program file " + path);
  nlohmann::json j;
  is >> j;
  return dpw::nbp_from_json(j);
}

// ---------------------------------------------------------------------------

int run_gen(const std::string& kind, const std::vector<int>& params, std::uint64_t seed,
            const std::string& out, const std::string& psi_out, const std::string& dot_out) {
  auto need = [&](std::size_t k) {
    if (params.size() != k)
      throw dpw::invalid_argument("gen " + kind + ": expected " + std::to_string(k) +
                                  " parameter(s)");
  };
  dpw::Rng rng(seed);
  dpw::Graph g;
  if (kind == "path") {
    need(1);
    g = dpw::path_graph(params[0]);
  } else if (kind == "cycle") {
    need(1);
    g = dpw::cycle_graph(params[0]);
  } else if (kind == "grid") {
    need(2);
    g = dpw::grid_graph(params[0], params[1]);
  } else if (kind == "complete") {
    need(1);
    g = dpw::complete_graph(params[0]);
  } else if (kind == "star") {
    need(1);
    g = dpw::star_graph(params[0]);
  } else if (kind == "random_tree") {
    need(1);
    g = dpw::random_tree(params[0], rng);
  } else if (kind == "random_partial_ktree") {
    if (params.size() < 2 || params.size() > 3)
      throw dpw::invalid_argument("gen random_partial_ktree: expected n k [keep%]");
    int keep = params.size() == 3 ? params[2] : 70;
    g = dpw::random_partial_ktree(params[0], params[1], keep, rng);
  } else {
    throw dpw::invalid_argument("gen: unknown kind " + kind);
  }
  std::ostringstream gs;
  dpw::write_edge_list(g, gs);
  write_output(out, gs.str());
  if (!psi_out.empty()) {
    std::ostringstream cs;
    dpw::write_dimacs(dpw::psi_of_graph(g), cs);
    write_output(psi_out, cs.str());
  }
  if (!dot_out.empty()) {
    std::ostringstream ds;
    dpw::write_dot(g, ds);
    write_output(dot_out, ds.str());
  }
  return 0;
}

int run_decompose(const std::string& graph_path, const std::string& what, int cover_d,
                  bool exact, int target, const std::string& out) {
  dpw::Graph g = load_graph(graph_path);
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  if (what == "tw") {
    auto [w, td] = dpw::exact_treewidth(g);
    j["width"] = w;
    j["decomposition"] = dpw::to_json(td);
    if (!dpw::validate(dpw::tree_decomposition_from_json(j["decomposition"]), g).ok())
      throw dpw::property_violation("decompose: round-trip validation failed");
  } else if (what == "pw") {
    auto [w, pd] = dpw::exact_pathwidth(g);
    j["width"] = w;
    j["decomposition"] = dpw::to_json(pd);
    if (!dpw::validate(dpw::path_decomposition_from_json(j["decomposition"]), g).ok())
      throw dpw::property_violation("decompose: round-trip validation failed");
  } else if (what == "tpw") {
    auto tp = dpw::heuristic_tree_partition(g, target);
    j["width"] = tp.width();
    j["decomposition"] = dpw::to_json(tp);
    if (!dpw::validate(dpw::tree_partition_from_json(j["decomposition"]), g).ok())
      throw dpw::property_violation("decompose: round-trip validation failed");
  } else if (what == "cover") {
    auto cover =
        dpw::d_cover_search(g, cover_d, exact ? dpw::CoverMode::Exact : dpw::CoverMode::Heuristic);
    j["width"] = cover.max_width();
    j["cover"] = dpw::to_json(cover);
    if (!dpw::validate_cover_structure(dpw::cover_from_json(j["cover"]), g).ok())
      throw dpw::property_violation("decompose: round-trip validation failed");
  } else if (what == "even-odd") {
    auto cover = dpw::even_odd_split(dpw::heuristic_tree_partition(g, target), g);
    j["width"] = cover.max_width();
    j["cover"] = dpw::to_json(cover);
    if (!dpw::validate_cover_structure(dpw::cover_from_json(j["cover"]), g).ok())
      throw dpw::property_violation("decompose: round-trip validation failed");
  }
  write_output(out, dump(j));
  return 0;
}

long long node_bound(int width, int nvars) {  // 2^(w+1) * (n+1), width may be -1
  return (width + 1 >= 0 ? (1ll << (width + 1)) : 1) * (nvars + 1);
}

int run_compile(const std::string& cnf_path, const std::string& pd_path, bool two,
                const std::string& models_out, const std::string& dot_out,
                const std::string& out) {
  dpw::Cnf f = load_cnf(cnf_path);
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  int n = f.num_vars();
  if (!models_out.empty()) {
    nlohmann::json mj;
    mj["schema_version"] = kSchemaVersion;
    mj["models"] = dpw::models_to_json(dpw::enumerate_models(f));
    write_output(models_out, dump(mj));
  }
  if (two) {
    dpw::Graph primal = dpw::primal_graph(f);
    auto cover = dpw::even_odd_split(dpw::heuristic_tree_partition(primal), primal);
    auto [f1, f2] = dpw::split_by_cover(f, cover);
    dpw::Obdd z1 = dpw::compile(f1, cover.parts[0].pd);
    dpw::Obdd z2 = dpw::compile(f2, cover.parts[1].pd);
    bool ok = dpw::conjunction_represents({z1, z2}, f);
    auto part_json = [&](const dpw::Obdd& z, const dpw::PathDecomposition& pd) {
      long long bound = node_bound(pd.width(), n);
      return nlohmann::json{{"obdd", dpw::to_json(z)},
                            {"nodes", z.node_count()},
                            {"width", pd.width()},
                            {"node_bound", bound},
                            {"within_bound", z.node_count() <= bound}};
    };
    j["parts"] = {part_json(z1, cover.parts[0].pd), part_json(z2, cover.parts[1].pd)};
    j["represents"] = ok;
    write_output(out, dump(j));
    if (!ok)
      throw dpw::property_violation("compile --two: conjunction does not represent the CNF");
    return 0;
  }
  dpw::PathDecomposition pd;
  if (!pd_path.empty()) {
    std::ifstream is(pd_path);
    if (!is) throw dpw::invalid_argument("cannot read decomposition file " + pd_path);
    nlohmann::json pj;
    is >> pj;
    pd = dpw::path_decomposition_from_json(pj);
  } else {
    pd = dpw::exact_pathwidth(dpw::primal_graph(f)).second;
  }
  dpw::Obdd z = dpw::compile(f, pd);
  long long bound = node_bound(pd.width(), n);
  bool represents_ok = true;
  if (n <= dpw::default_caps().enumeration_vars) {
    auto models = dpw::enumerate_models(f);
    represents_ok = dpw::count_models(z) == models.size() &&
                    std::all_of(models.begin(), models.end(),
                                [&](const dpw::LiteralSet& s) { return dpw::evaluate(z, s); });
  }
  if (!dot_out.empty()) {
    std::ostringstream ds;
    dpw::write_dot(z, ds);
    write_output(dot_out, ds.str());
  }
  j["obdd"] = dpw::to_json(z);
  j["nodes"] = z.node_count();
  j["width"] = pd.width();
  j["node_bound"] = bound;
  j["within_bound"] = z.node_count() <= bound;
  j["models"] = dpw::count_models(z);
  j["represents"] = represents_ok;
  write_output(out, dump(j));
  if (!represents_ok)
    throw dpw::property_violation("compile: diagram does not represent the CNF");
  if (z.node_count() > bound)
    throw dpw::property_violation("compile: node bound exceeded");
  return 0;
}

int run_nbp(const std::string& build, int build_n, const std::string& in_path,
            const std::string& represents_path, bool subdivide_flag, int yardstick_d,
            const std::string& dot_out, const std::string& out) {
  dpw::Nbp z;
  if (!build.empty()) {
    if (build == "kn")
      z = dpw::build_kn_smnbp(build_n);
    else if (build == "star")
      z = dpw::build_star_mnbp(dpw::star_graph(build_n));
    else if (build == "example")
      z = dpw::make_no_yardstick_example();
    else
      throw dpw::invalid_argument("nbp --build: unknown kind " + build);
  } else if (!in_path.empty()) {
    z = load_nbp(in_path);
  } else {
    throw dpw::invalid_argument("nbp: need --build or --in");
  }
  if (subdivide_flag) z = dpw::subdivide(z);

  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["program"] = dpw::to_json(z);
  j["edges"] = z.size();
  j["nodes"] = z.nodes().size();
  j["monotone"] = dpw::is_monotone(z);
  j["read_bound"] = dpw::read_bound(z);
  j["separability"] = dpw::separability_number(z);
  if (yardstick_d >= 0) {
    int d = yardstick_d == 0 ? j["separability"].get<int>() : yardstick_d;
    auto paths = dpw::enumerate_paths(z);
    int without = 0;
    for (const auto& p : paths)
      if (!dpw::yardsticks_for_path(z, p, d)) ++without;
    j["yardsticks"] = {{"d", d},
                       {"paths", paths.size()},
                       {"paths_without", without},
                       {"all_paths_marked", without == 0}};
  }
  if (!represents_path.empty()) {
    dpw::Cnf f = load_cnf(represents_path);
    j["represents"] = dpw::represents(z, f);
  }
  if (!dot_out.empty()) {
    std::ostringstream ds;
    dpw::write_dot(z, ds);
    write_output(dot_out, ds.str());
  }
  write_output(out, dump(j));
  return 0;
}

int run_certify(const std::string& cnf_path, const std::string& prog_path, int d,
                const std::string& out) {
  dpw::Cnf f = load_cnf(cnf_path);
  dpw::Graph g = dpw::psi_to_graph(f);
  dpw::VEModel m = dpw::make_ve_model(g);
  dpw::Nbp z = load_nbp(prog_path);
  dpw::Certificate cert = dpw::certify_lower_bound(m, z, d);
  write_output(out, dump(dpw::to_json(cert)));
  if (!cert.union_covers_all || !cert.sum_at_least_one || !cert.sum_within_union_bound ||
      !cert.implied_triple_bound_ok)
    throw dpw::property_violation("certify: inequality chain failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  apply_env_caps();
  CLI::App app{"structural-width covers, decision-diagram compilation, and "
               "branching-program analysis"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a graph (and optionally its edge-padded CNF)");
  std::string gen_kind, gen_out, gen_psi, gen_dot;
  std::vector<int> gen_params;
  std::uint64_t gen_seed = 0;
  gen->add_option("kind", gen_kind,
                  "path|cycle|grid|complete|star|random_tree|random_partial_ktree")
      ->required();
  gen->add_option("params", gen_params, "size parameters");
  gen->add_option("-o,--out", gen_out, "graph output file (default stdout)");
  gen->add_option("--psi", gen_psi, "also write the edge-padded CNF (DIMACS)");
  gen->add_option("--dot", gen_dot, "also write a DOT rendering");
  gen->add_option("--seed", gen_seed, "random seed (default 0)");

  // decompose
  auto* dec = app.add_subcommand("decompose", "compute and validate decompositions");
  std::string dec_graph, dec_out;
  bool dec_tw = false, dec_pw = false, dec_tpw = false, dec_eo = false, dec_exact = false;
  int dec_cover = 0, dec_target = 0;
  dec->add_option("graph", dec_graph, "edge-list graph file")->required();
  dec->add_flag("--tw", dec_tw, "exact treewidth");
  dec->add_flag("--pw", dec_pw, "exact pathwidth");
  dec->add_flag("--tpw", dec_tpw, "heuristic tree partition");
  dec->add_option("--cover", dec_cover, "d-part cover");
  dec->add_flag("--exact", dec_exact, "exact cover search");
  dec->add_flag("--even-odd", dec_eo, "clique-preserving 2-cover via even/odd layers");
  dec->add_option("--target", dec_target, "width target for the tree-partition heuristic");
  dec->add_option("-o,--out", dec_out, "output file (default stdout)");

  // compile
  auto* comp = app.add_subcommand("compile", "compile a CNF into OBDDs");
  std::string comp_cnf, comp_pd, comp_out, comp_models, comp_dot;
  bool comp_two = false;
  comp->add_option("cnf", comp_cnf, "DIMACS CNF file")->required();
  comp->add_option("--pd", comp_pd, "path decomposition JSON (default: exact pathwidth)");
  comp->add_flag("--two", comp_two, "split along an even/odd cover into two OBDDs");
  comp->add_option("--models", comp_models, "also dump the enumerated models as JSON");
  comp->add_option("--dot", comp_dot, "also write a DOT rendering of the diagram");
  comp->add_option("-o,--out", comp_out, "output file (default stdout)");

  // nbp
  auto* nbp = app.add_subcommand("nbp", "analyze a branching program");
  std::string nbp_build, nbp_in, nbp_repr, nbp_out, nbp_dot;
  int nbp_build_n = 0, nbp_yard = -1;
  bool nbp_subdiv = false;
  nbp->add_option("--build", nbp_build, "kn|star|example");
  nbp->add_option("--n", nbp_build_n, "size parameter for --build");
  nbp->add_option("--in", nbp_in, "program JSON file");
  nbp->add_flag("--subdivide", nbp_subdiv, "subdivide every edge into three");
  nbp->add_option("--yardsticks", nbp_yard,
                  "check yardstick markings with this d (0: use separability)");
  nbp->add_option("--represents", nbp_repr, "compare against a DIMACS CNF");
  nbp->add_option("--dot", nbp_dot, "also write a DOT rendering");
  nbp->add_option("-o,--out", nbp_out, "output file (default stdout)");

  // certify
  auto* cert = app.add_subcommand("certify", "verify the lower-bound counting chain");
  std::string cert_cnf, cert_prog, cert_out;
  int cert_d = 0;
  cert->add_option("cnf", cert_cnf, "edge-padded DIMACS CNF")->required();
  cert->add_option("program", cert_prog, "program JSON file")->required();
  cert->add_option("-d", cert_d, "repetition bound (default: separability)");
  cert->add_option("-o,--out", cert_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return run_gen(gen_kind, gen_params, gen_seed, gen_out, gen_psi, gen_dot);
    if (*dec) {
      std::string what = dec_tw ? "tw"
                         : dec_pw ? "pw"
                         : dec_tpw ? "tpw"
                         : dec_eo ? "even-odd"
                         : dec_cover > 0 ? "cover"
                                         : "";
      if (what.empty())
        throw dpw::invalid_argument("decompose: pick one of --tw --pw --tpw --cover --even-odd");
      return run_decompose(dec_graph, what, dec_cover, dec_exact, dec_target, dec_out);
    }
    if (*comp)
      return run_compile(comp_cnf, comp_pd, comp_two, comp_models, comp_dot, comp_out);
    if (*nbp)
      return run_nbp(nbp_build, nbp_build_n, nbp_in, nbp_repr, nbp_subdiv, nbp_yard, nbp_dot,
                     nbp_out);
    if (*cert) return run_certify(cert_cnf, cert_prog, cert_d, cert_out);
  } catch (const dpw::size_error& e) {
    std::cerr << "size cap exceeded: " << e.what() << "\n";
    return kExitSizeCap;
  } catch (const dpw::property_violation& e) {
    std::cerr << "property violation: " << e.what() << "\n";
    return kExitPropertyViolation;
  } catch (const dpw::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string cli = DPW_CLI_PATH;

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() / ("dpw_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
  int rc = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

nlohmann::json jload(const std::string& path) {
  std::ifstream is(path);
  nlohmann::json j;
  is >> j;
  return j;
}

}  // namespace

TEST_CASE("generation commands", "[cli]") {
  TempDir t;
  SECTION("grid with padded CNF") {
    REQUIRE(run("gen grid 3 3 -o " + (t / "g.txt")) == 0);
    std::string g = slurp(t / "g.txt");
    CHECK(g.find("n 9") == 0);
  }
  SECTION("complete graph CNF has the documented shape") {
    REQUIRE(run("gen complete 4 -o " + (t / "k4.txt") + " --psi " + (t / "k4.cnf")) == 0);
    std::string cnf = slurp(t / "k4.cnf");
    CHECK(cnf.find("p cnf 10 6") != std::string::npos);
  }
  SECTION("star CNF") {
    REQUIRE(run("gen star 5 -o " + (t / "s.txt") + " --psi " + (t / "s.cnf")) == 0);
    CHECK(slurp(t / "s.cnf").find("p cnf 9 4") != std::string::npos);
  }
  SECTION("usage errors exit with 2") {
    CHECK(run("gen grid -o " + (t / "x.txt")) == 2);
    CHECK(run("gen mystery 3 -o " + (t / "x.txt")) == 2);
    CHECK(run("frobnicate") == 2);
  }
}

TEST_CASE("decomposition commands", "[cli]") {
  TempDir t;
  REQUIRE(run("gen path 6 -o " + (t / "p6.txt")) == 0);
  REQUIRE(run("gen grid 3 3 -o " + (t / "g33.txt")) == 0);

  SECTION("pathwidth of a path") {
    REQUIRE(run("decompose " + (t / "p6.txt") + " --pw -o " + (t / "pw.json")) == 0);
    CHECK(jload(t / "pw.json")["width"] == 1);
  }
  SECTION("exact grid cover") {
    REQUIRE(run("decompose " + (t / "g33.txt") + " --cover 2 --exact -o " +
                (t / "cover.json")) == 0);
    CHECK(jload(t / "cover.json")["width"] == 1);
  }
  SECTION("even-odd split of a tree is clique preserving") {
    REQUIRE(run("gen random_tree 9 --seed 4 -o " + (t / "t.txt")) == 0);
    REQUIRE(run("decompose " + (t / "t.txt") + " --even-odd -o " + (t / "eo.json")) == 0);
    auto j = jload(t / "eo.json");
    CHECK(j["cover"]["clique_preserving"] == true);
    CHECK(j["width"] <= 1);
  }
  SECTION("heuristic covers for any d") {
    REQUIRE(run("gen random_partial_ktree 12 2 70 --seed 3 -o " + (t / "g.txt")) == 0);
    REQUIRE(run("decompose " + (t / "g.txt") + " --cover 3 -o " + (t / "c3.json")) == 0);
    auto j = jload(t / "c3.json");
    CHECK(j["cover"]["parts"].size() == 3);
    REQUIRE(run("decompose " + (t / "g.txt") + " --tpw --target 3 -o " + (t / "t.json")) == 0);
    CHECK(jload(t / "t.json")["width"] >= 1);
  }
  SECTION("size caps exit with 3") {
    REQUIRE(run("gen complete 16 -o " + (t / "k16.txt")) == 0);
    CHECK(run("decompose " + (t / "k16.txt") + " --pw") == 3);
    CHECK(run("decompose " + (t / "k16.txt") + " --cover 2 --exact") == 3);
  }
  SECTION("missing mode flag exits with 2") {
    CHECK(run("decompose " + (t / "p6.txt")) == 2);
  }
}

TEST_CASE("compile commands", "[cli]") {
  TempDir t;
  SECTION("single diagram for a path CNF") {
    REQUIRE(run("gen path 4 -o " + (t / "p4.txt") + " --psi " + (t / "p4.cnf")) == 0);
    REQUIRE(run("compile " + (t / "p4.cnf") + " -o " + (t / "z.json")) == 0);
    auto j = jload(t / "z.json");
    CHECK(j["represents"] == true);
    CHECK(j["within_bound"] == true);
  }
  SECTION("two-diagram pipeline") {
    REQUIRE(run("gen random_partial_ktree 8 2 80 --seed 9 -o " + (t / "g.txt") + " --psi " +
                (t / "g.cnf")) == 0);
    REQUIRE(run("compile " + (t / "g.cnf") + " --two -o " + (t / "two.json")) == 0);
    auto j = jload(t / "two.json");
    CHECK(j["represents"] == true);
    for (const auto& part : j["parts"]) CHECK(part["within_bound"] == true);
  }
  SECTION("unsatisfiable toy CNF") {
    std::ofstream(t / "unsat.cnf") << "p cnf 1 2\n1 0\n-1 0\n";
    REQUIRE(run("compile " + (t / "unsat.cnf") + " -o " + (t / "u.json")) == 0);
    CHECK(jload(t / "u.json")["models"] == 0);
  }
}

TEST_CASE("program commands", "[cli]") {
  TempDir t;
  SECTION("complete-graph program represents its CNF") {
    REQUIRE(run("gen complete 4 -o " + (t / "k4.txt") + " --psi " + (t / "k4.cnf")) == 0);
    REQUIRE(run("nbp --build kn --n 4 --represents " + (t / "k4.cnf") + " -o " +
                (t / "r.json")) == 0);
    auto j = jload(t / "r.json");
    CHECK(j["represents"] == true);
    CHECK(j["edges"] == 28);
    CHECK(j["monotone"] == true);
  }
  SECTION("example fixture report") {
    REQUIRE(run("nbp --build example --yardsticks 2 -o " + (t / "e.json")) == 0);
    auto j = jload(t / "e.json");
    CHECK(j["read_bound"] == 2);
    CHECK(j["separability"] == 2);
    CHECK(j["yardsticks"]["all_paths_marked"] == false);
  }
  SECTION("subdivision triples the edges and marks all paths") {
    REQUIRE(run("nbp --build example --subdivide --yardsticks 2 -o " + (t / "s.json")) == 0);
    auto j = jload(t / "s.json");
    CHECK(j["edges"] == 18);
    CHECK(j["yardsticks"]["all_paths_marked"] == true);
  }
  SECTION("programs reload through --in") {
    REQUIRE(run("nbp --build star --n 4 -o " + (t / "a.json")) == 0);
    auto a = jload(t / "a.json");
    std::ofstream(t / "prog.json") << a["program"].dump();
    REQUIRE(run("nbp --in " + (t / "prog.json") + " -o " + (t / "b.json")) == 0);
    auto b = jload(t / "b.json");
    CHECK(a["program"] == b["program"]);
    CHECK(a["separability"] == b["separability"]);
  }
}

TEST_CASE("certification command", "[cli]") {
  TempDir t;
  REQUIRE(run("gen complete 3 -o " + (t / "k3.txt") + " --psi " + (t / "k3.cnf")) == 0);
  REQUIRE(run("nbp --build kn --n 3 --subdivide -o " + (t / "prog_report.json")) == 0);
  // Extract the program object for the certify input.
  auto report = jload(t / "prog_report.json");
  std::ofstream(t / "prog.json") << report["program"].dump();
  SECTION("valid pipeline certifies") {
    REQUIRE(run("certify " + (t / "k3.cnf") + " " + (t / "prog.json") + " -o " +
                (t / "cert.json")) == 0);
    auto j = jload(t / "cert.json");
    CHECK(j["chain"]["sum_at_least_one"] == true);
    CHECK(j["chain"]["union_covers_all_models"] == true);
    CHECK(j["beta"]["base_num"] == 8);
  }
  SECTION("non-monotone input exits with a usage error") {
    std::ofstream(t / "bad.json")
        << R"({"nodes":[0,1],"edges":[{"id":0,"from":0,"to":1,)"
        << R"("label":{"var":0,"positive":false}}],"source":0,"sink":1})";
    CHECK(run("certify " + (t / "k3.cnf") + " " + (t / "bad.json")) == 2);
  }
  SECTION("plain CNFs are rejected as certify input") {
    std::ofstream(t / "plain.cnf") << "p cnf 2 1\n1 2 0\n";
    CHECK(run("certify " + (t / "plain.cnf") + " " + (t / "prog.json")) == 2);
  }
  SECTION("help exits cleanly") {
    CHECK(run("--help") == 0);
  }
}

TEST_CASE("auxiliary outputs", "[cli]") {
  TempDir t;
  SECTION("model dumps and DOT renderings") {
    REQUIRE(run("gen complete 3 -o " + (t / "k3.txt") + " --psi " + (t / "k3.cnf") +
                " --dot " + (t / "k3.dot")) == 0);
    CHECK(slurp(t / "k3.dot").find("graph g {") == 0);
    REQUIRE(run("compile " + (t / "k3.cnf") + " --models " + (t / "models.json") + " --dot " +
                (t / "z.dot") + " -o " + (t / "z.json")) == 0);
    auto models = jload(t / "models.json");
    CHECK(models["models"].size() == 45);
    CHECK(slurp(t / "z.dot").find("digraph obdd") == 0);
    REQUIRE(run("nbp --build example --dot " + (t / "e.dot") + " -o " + (t / "e.json")) == 0);
    CHECK(slurp(t / "e.dot").find("digraph nbp") == 0);
  }
  SECTION("environment variables tighten the caps") {
    REQUIRE(run("gen complete 6 -o " + (t / "k6.txt")) == 0);
    int rc = std::system(("DPW_EXACT_CAP=4 " + cli + " decompose " + (t / "k6.txt") +
                          " --pw > /dev/null 2>&1")
                             .c_str());
    CHECK(WEXITSTATUS(rc) == 3);
    CHECK(run("decompose " + (t / "k6.txt") + " --pw") == 0);
  }
}

TEST_CASE("reruns are byte identical", "[cli]") {
  TempDir t;
  auto twice_equal = [&](const std::string& args, const std::string& out) {
    REQUIRE(run(args + " -o " + (t / (out + "1"))) == 0);
    REQUIRE(run(args + " -o " + (t / (out + "2"))) == 0);
    std::string a = slurp(t / (out + "1")), b = slurp(t / (out + "2"));
    CHECK(a == b);
    CHECK_FALSE(a.empty());
  };
  twice_equal("gen random_partial_ktree 10 2 70 --seed 13", "gen");
  REQUIRE(run("gen random_partial_ktree 10 2 70 --seed 13 -o " + (t / "g.txt")) == 0);
  twice_equal("decompose " + (t / "g.txt") + " --even-odd", "eo");
  REQUIRE(run("gen complete 3 -o " + (t / "k3.txt") + " --psi " + (t / "k3.cnf")) == 0);
  twice_equal("compile " + (t / "k3.cnf") + " --two", "two");
  twice_equal("nbp --build kn --n 3 --subdivide", "nbp");
}

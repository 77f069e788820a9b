#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace dpw {

/// Thrown when an operation's precondition is violated (bad ids, invalid
/// decompositions, malformed input files).
struct invalid_argument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an instance exceeds a configured size cap (exact solvers,
/// enumeration, path counting). Distinct from invalid_argument so callers
/// can map it to a dedicated exit code.
struct size_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a checked structural guarantee fails. These checks guard
/// results that are supposed to hold for every input, so seeing this
/// exception means a bug, not a user error.
struct property_violation : std::logic_error {
  using std::logic_error::logic_error;
};

/// Size caps shared by the exact solvers and enumeration oracles.
struct Caps {
  int exact_solver_vertices = 14;  // exact treewidth/pathwidth
  int exact_cover_edges = 12;      // exact d-cover search
  int enumeration_vars = 24;       // model / assignment enumeration
  long long path_count = 100000;   // source-sink path enumeration
};

inline Caps& default_caps() {
  static Caps caps;
  return caps;
}

/// Deterministic pseudo-random source. All randomness in the library and
/// the CLI funnels through one of these, seeded explicitly, so identical
/// seeds reproduce identical artifacts byte for byte.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform value in [0, n). n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw invalid_argument("Rng::next_below: n must be positive");
    return engine_() % n;
  }

  /// Bernoulli draw with probability num/den.
  bool chance(std::uint64_t num, std::uint64_t den) {
    return next_below(den) < num;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dpw

#pragma once

#include <map>
#include <vector>

#include "dpw/common.hpp"

namespace dpw {

/// Maximum bipartite matching by augmenting paths (Kuhn). The left side is
/// given explicitly, edges as (left, right) pairs. Returns matched pairs.
inline std::vector<std::pair<int, int>> max_bipartite_matching(
    const std::vector<int>& left, const std::vector<std::pair<int, int>>& edges) {
  std::map<int, std::vector<int>> adj;
  for (int l : left) adj[l];
  for (const auto& [l, r] : edges) adj[l].push_back(r);
  std::map<int, int> match_right;  // right vertex -> left vertex
  for (int l : left) {
    std::map<int, bool> visited;
    auto augment = [&](auto&& self, int u) -> bool {
      for (int r : adj[u]) {
        if (visited[r]) continue;
        visited[r] = true;
        if (!match_right.count(r) || self(self, match_right[r])) {
          match_right[r] = u;
          return true;
        }
      }
      return false;
    };
    augment(augment, l);
  }
  std::vector<std::pair<int, int>> out;
  for (const auto& [r, l] : match_right) out.push_back({l, r});
  return out;
}

}  // namespace dpw

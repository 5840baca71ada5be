#pragma once

#include <utility>
#include <vector>

#include "expdec/errors.hpp"

namespace expdec {

/// One round's partial matching on split-node coordinates 0..m-1 (we identify
/// split node x_e with the index of edge e). Unmatched coordinates implicitly
/// carry a diagonal 1 in the matrix view.
struct MatchingRound {
  std::vector<std::pair<int, int>> pairs;
  int round = 0;

  void validate(int m) const {
    std::vector<char> used(m, 0);
    for (auto [a, b] : pairs) {
      require_input(0 <= a && a < m && 0 <= b && b < m && a != b,
                    "MatchingRound: bad pair indices");
      require_input(!used[a] && !used[b], "MatchingRound: coordinate matched twice");
      used[a] = used[b] = 1;
    }
  }
};

/// Ordered matchings M_1..M_t. This is the entire implicit representation of
/// the flow matrix F_t = N_t ... N_1 N_1 ... N_t used by the projections;
/// the dense form exists only in the oracles.
using MatchingSequence = std::vector<MatchingRound>;

} // namespace expdec

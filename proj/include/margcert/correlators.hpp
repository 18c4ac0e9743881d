#pragma once

#include <array>

namespace margcert {

/// Index of a party pair in CorrelatorTable::doubles and MarginalTriple.
enum class Pair : int { AB = 0, AC = 1, BC = 2 };

/// One-, two- and three-party expectation values of a tripartite box with two
/// binary inputs per party.
///
/// doubles[pair][u][v] holds <X_u Y_v> for the pair (X, Y) in the order AB, AC,
/// BC. When has_triples is false the table describes marginals only.
struct CorrelatorTable {
  std::array<std::array<double, 2>, 3> singles{};
  std::array<std::array<std::array<double, 2>, 2>, 3> doubles{};
  std::array<std::array<std::array<double, 2>, 2>, 2> triples{};
  bool has_triples = true;

  double single(int party, int input) const { return singles[party][input]; }
  double pair(Pair p, int u, int v) const { return doubles[static_cast<int>(p)][u][v]; }
  double triple(int x, int y, int z) const { return triples[x][y][z]; }

  /// All entries in [-1 - tol, 1 + tol].
  bool in_range(double tol = 1e-12) const;
};

}  // namespace margcert

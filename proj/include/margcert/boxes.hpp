#pragma once

// Tripartite correlation boxes with two inputs {0, 1} and two outcomes
// {-1, +1} per party. Outcome -1 is stored at index 0 and +1 at index 1.

#include <array>
#include <string>
#include <vector>

#include "margcert/correlators.hpp"

namespace margcert {

/// Outcome value (+1/-1) of a stored outcome index (1/0).
constexpr int outcome_value(int index) { return 2 * index - 1; }

/// P(abc|xyz). Flat layout: 8 * (4x + 2y + z) + (4a + 2b + c), outputs fastest.
class TripartiteBox {
 public:
  TripartiteBox() { p_.fill(0.0); }
  explicit TripartiteBox(const std::array<double, 64>& p) : p_(p) {}

  static constexpr int index(int a, int b, int c, int x, int y, int z) {
    return 8 * (4 * x + 2 * y + z) + (4 * a + 2 * b + c);
  }

  double operator()(int a, int b, int c, int x, int y, int z) const { return p_[index(a, b, c, x, y, z)]; }
  double& operator()(int a, int b, int c, int x, int y, int z) { return p_[index(a, b, c, x, y, z)]; }

  const std::array<double, 64>& data() const { return p_; }
  std::array<double, 64>& data() { return p_; }

  double min_entry() const;
  /// Largest |sum_abc P(abc|xyz) - 1| over inputs.
  double normalization_error() const;

 private:
  std::array<double, 64> p_;
};

/// P(ab|xy). Flat layout: 4 * (2x + y) + (2a + b).
class BipartiteBox {
 public:
  BipartiteBox() { p_.fill(0.0); }
  explicit BipartiteBox(const std::array<double, 16>& p) : p_(p) {}

  static constexpr int index(int a, int b, int x, int y) { return 4 * (2 * x + y) + (2 * a + b); }

  double operator()(int a, int b, int x, int y) const { return p_[index(a, b, x, y)]; }
  double& operator()(int a, int b, int x, int y) { return p_[index(a, b, x, y)]; }

  const std::array<double, 16>& data() const { return p_; }
  std::array<double, 16>& data() { return p_; }

  /// Marginal of the first (side 0) or second (side 1) party for a given input,
  /// evaluated at the other party's input `other`.
  double single_marginal(int side, int outcome, int input, int other) const;

  /// <A_x B_y>.
  double correlator(int x, int y) const;

  /// Largest deviation of a one-party marginal across the other party's input.
  double signaling() const;

 private:
  std::array<double, 16> p_;
};

/// Bipartite boxes for AB, AC, BC. Party order inside each box follows the
/// pair name (pac has A first, C second).
struct MarginalTriple {
  BipartiteBox pab;
  BipartiteBox pac;
  BipartiteBox pbc;

  const BipartiteBox& operator[](Pair p) const;

  /// Largest mismatch between single-party marginals shared by two boxes,
  /// including internal signaling of each box.
  double consistency_error() const;
};

/// Correlator expansion result: the box plus the entries that came out negative.
struct BoxBuild {
  TripartiteBox box;
  std::vector<int> negative_entries;
  double most_negative = 0.0;

  bool valid(double tol = 1e-12) const { return most_negative >= -tol; }
};

namespace boxes {

/// P(abc|xyz) = 1/8 [1 + a<A_x> + b<B_y> + c<C_z> + ab<A_xB_y> + ac<A_xC_z>
///                   + bc<B_yC_z> + abc<A_xB_yC_z>].
BoxBuild box_from_correlators(const CorrelatorTable& t);

/// Inverse of box_from_correlators; lower-order correlators are read at dropped inputs 0.
CorrelatorTable correlators_from_box(const TripartiteBox& b);

struct SignalingCheck {
  bool nonsignaling = false;
  double max_violation = 0.0;
};

SignalingCheck is_nonsignaling(const TripartiteBox& b, double tol = 1e-12);

struct MarginalExtraction {
  MarginalTriple marginals;
  /// Largest difference between marginals taken at dropped input 0 and 1.
  double cross_input_deviation = 0.0;
};

/// Bipartite marginals at dropped input 0. Throws std::domain_error when the box
/// signals beyond tol.
MarginalExtraction marginals_with_deviation(const TripartiteBox& b, double tol = 1e-9);
MarginalTriple marginals(const TripartiteBox& b, double tol = 1e-9);

/// Correlator table of a marginal triple (has_triples = false).
CorrelatorTable marginal_correlators(const MarginalTriple& m);

/// Bipartite box from singles and the 2x2 correlator block.
BipartiteBox bipartite_from_correlators(const std::array<double, 2>& first, const std::array<double, 2>& second,
                                        const std::array<std::array<double, 2>, 2>& corr);

/// Marginal triple built directly from marginal correlators; ignores triples.
MarginalTriple marginals_from_correlators(const CorrelatorTable& t);

TripartiteBox uniform_box();
BipartiteBox uniform_bipartite();

/// Deterministic local box a = fa(x), b = fb(y), c = fc(z). Each strategy is a
/// 2-bit code: bit x of the code is the outcome index for input x.
TripartiteBox deterministic_box(int fa, int fb, int fc);

/// The tripartite no-signaling extremal box with <A_x> = <B_y> = <C_z> = 1/3,
/// two-party correlators 1 if both inputs are 0 and -1/3 otherwise, and
/// three-party correlators 1/3 if x+y+z <= 1 and -1 otherwise.
TripartiteBox box29();
CorrelatorTable box29_correlators();

/// weight_a * a + (1 - weight_a) * b.
TripartiteBox mix(const TripartiteBox& a, const TripartiteBox& b, double weight_a);

}  // namespace boxes

/// Linear functional over correlator entries plus a constant, with bound.
struct InequalitySpec {
  std::string name;
  CorrelatorTable coefficients{};
  double constant = 0.0;
  double bound = 0.0;

  bool uses_triples() const;
};

namespace boxes {

/// Value of the functional; throws std::invalid_argument if the spec uses
/// triple correlators and the table has none.
double evaluate_inequality(const InequalitySpec& spec, const CorrelatorTable& t);
bool violates(const InequalitySpec& spec, const CorrelatorTable& t, double tol = 1e-12);

/// -<A0(1 + B0 + B1 + C0)> - <A1(1 + B0 + C0 + C1)> - <B0 + C0 + B0C0 + B1C1> <= 4.
InequalitySpec marginal_witness_inequality();

/// S = A0B0C0 + A0B0C1 + A0B1C0 - A0B1C1 + A1B0C0 - A1B0C1 - A1B1C0 - A1B1C1 <= 4.
InequalitySpec svetlichny_inequality();

/// Svetlichny value maximized over party permutations, input swaps and
/// input-dependent outcome flips (absolute value taken).
double svetlichny_max(const CorrelatorTable& t);

/// P(000|000) + P(110|011) + P(011|101) + P(101|110) with bit o = (1 + a) / 2.
double gyni_value(const TripartiteBox& b);

/// Maximum |CHSH| over the 8 sign placements.
double chsh_max(const BipartiteBox& b);

/// All 8 CHSH forms: sign s * (E00 + E01 + E10 + E11 - 2 E_uv).
std::array<double, 8> chsh_values(const BipartiteBox& b);

}  // namespace boxes
}  // namespace margcert

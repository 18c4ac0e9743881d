#pragma once

// Local and Svetlichny-hybrid vertex families, LP membership of boxes and of
// marginal triples, and the triple-correlator range over no-signaling
// extensions of a marginal triple.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "margcert/boxes.hpp"
#include "margcert/lp.hpp"

namespace margcert::polytopes {

enum class VertexKind { LocalDeterministic, SvetlichnyHybrid };

/// Which parties form the (possibly internally signaling) pair of a hybrid vertex.
enum class Pairing { AB_C, AC_B, BC_A };

std::string to_string(Pairing p);

struct VertexFamily {
  VertexKind kind = VertexKind::LocalDeterministic;
  std::vector<TripartiteBox> vertices;
  /// Parallel to vertices; empty for the local family.
  std::vector<Pairing> pairing;
};

/// The 64 boxes a = f(x), b = g(y), c = h(z).
const VertexFamily& local_vertices();

/// The 3 x 16 x 16 x 4 = 3072 boxes with a deterministic joint strategy for the
/// pair (outputs functions of both pair inputs) and a deterministic singleton.
const VertexFamily& svetlichny_vertices();

struct MembershipReport {
  bool member = false;
  /// Mixture weights over the vertex family (member only).
  std::vector<double> weights;
  /// Farkas functional over the constraint rows (non-member only): y with
  /// y . row(v) <= 0 for every vertex v and y . target > 0.
  std::vector<double> certificate;
  /// Labels of the constraint rows the certificate refers to.
  std::vector<std::string> row_labels;
  /// Max |reconstruction - target| for members.
  double residual = 0.0;
  double phase1_value = 0.0;
  lp::LpStatus status = lp::LpStatus::NumericalFailure;
  lp::CertificateCheck check;
};

/// Weights over the 16 deterministic bipartite strategies reproducing b.
MembershipReport bipartite_local_membership(const BipartiteBox& b);

/// Weights over local_vertices() reproducing all 64 probabilities.
MembershipReport box_local_membership(const TripartiteBox& b);

/// Tripartite local boxes whose bipartite marginals equal m.
/// Throws std::invalid_argument when m is not internally consistent.
MembershipReport marginal_membership_pi(const MarginalTriple& m);

/// Mixtures of Svetlichny-hybrid vertices that are no-signaling as tripartite
/// boxes and have marginals m. Non-membership certifies that every
/// no-signaling extension of m is genuinely tripartite nonlocal in
/// Svetlichny's sense (and hence under any stricter bilocality notion).
MembershipReport marginal_membership_pi_prime_relaxed(const MarginalTriple& m);

/// Mixture sum_v w_v * vertex_v.
TripartiteBox mixture(const VertexFamily& family, const std::vector<double>& weights);

/// The LP used by a membership test, exposed for independent re-checking.
lp::LinearProgram pi_membership_program(const MarginalTriple& m);
lp::LinearProgram pi_prime_membership_program(const MarginalTriple& m);

struct CorrelatorRange {
  double min = 0.0;
  double max = 0.0;
  TripartiteBox min_witness;
  TripartiteBox max_witness;
};

struct ExtensionBounds {
  bool feasible = false;
  /// Indexed [x][y][z].
  std::array<std::array<std::array<CorrelatorRange, 2>, 2>, 2> range{};

  bool collapsed(double tol = 1e-7) const;
};

/// For every (x, y, z), the minimum and maximum of <A_x B_y C_z> over
/// no-signaling tripartite boxes with marginals m. Runs over raw probability
/// vectors: normalization, no-signaling and marginal equalities, P >= 0.
/// `parallel` runs the 16 programs on separate threads.
ExtensionBounds extension_bounds(const MarginalTriple& m, bool parallel = false);

}  // namespace margcert::polytopes

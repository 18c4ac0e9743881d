#pragma once

// Dense two-phase simplex for small, highly degenerate membership programs.
//
//   minimize / maximize  c^T x   subject to  A x = b,  x >= lower.
//
// Linearly dependent equality rows are removed first (an inconsistent one is
// reported as infeasible). Pricing is Dantzig's rule; a run of degenerate pivots switches to Bland's
// rule until the next strictly improving pivot. Ratio-test ties are broken
// lexicographically and the tableau is refactored every 50 pivots. No randomness: identical input
// gives bit-identical output.

#include <string>

#include <Eigen/Dense>

namespace margcert::lp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Sense { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(LpStatus s);

struct LinearProgram {
  Vector objective;
  Sense sense = Sense::Minimize;
  Matrix a_eq;
  Vector b_eq;
  /// Per-variable lower bounds; empty means all zero.
  Vector lower;

  /// Throws std::invalid_argument on inconsistent dimensions or non-finite data.
  void validate() const;
  Vector lower_bounds() const;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  /// Phase-1 optimum above this value declares the program infeasible.
  double infeasible_threshold = 1e-8;
  double pivot_tol = 1e-11;
  int max_iterations = 100000;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_run = 50;
};

/// Solver result.
///
/// `dual` has one entry per equality row. When Optimal, the reduced costs
/// c - A^T dual are >= 0 (minimize) or <= 0 (maximize) up to tolerance. When
/// Infeasible, `dual` is a Farkas certificate: A^T dual <= 0 componentwise and
/// (b - A lower)^T dual > 0.
struct LpOutcome {
  LpStatus status = LpStatus::NumericalFailure;
  double value = 0.0;
  Vector primal;
  Vector dual;
  double phase1_value = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
  bool bland_used = false;
};

LpOutcome solve(const LinearProgram& program, const LpOptions& options = {});

struct CertificateCheck {
  bool valid = false;
  /// Largest violated inequality (or residual) found in floating point.
  double max_violation = 0.0;
  /// Farkas margin (b^T y) for infeasibility certificates.
  double margin = 0.0;
  bool exact_checked = false;
  bool exact_valid = false;
  std::string detail;
};

/// Re-checks an outcome against the program data without trusting the solver:
/// primal feasibility and weak duality for Optimal, Farkas conditions for
/// Infeasible. With `exact`, data and certificate are rationalized (continued
/// fractions, denominators up to 10^6) and the Farkas or feasibility
/// conditions are re-checked in exact rational arithmetic. A rationalized Farkas
/// vector left slightly positive on tight columns is repaired through a row
/// with all entries positive (a normalization row) before the exact check.
CertificateCheck verify_lp_certificate(const LinearProgram& program, const LpOutcome& outcome, bool exact = false,
                                       double tol = 1e-9);

}  // namespace margcert::lp

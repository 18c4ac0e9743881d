#pragma once

// Small dense primal-dual interior-point solver for linear matrix inequalities.
//
//   maximize    b^T y
//   subject to  S_k(y) = C_k + sum_i y_i A_ki  >= 0   (PSD, every block k)
//               E y = f
//
// with Lagrangian dual
//
//   minimize    sum_k <C_k, X_k> + f^T lambda
//   subject to  sum_k <A_ki, X_k> - (E^T lambda)_i = -b_i,   X_k >= 0.
//
// Blocks are real symmetric. Complex Hermitian blocks are handled through the
// embedding H = R + iI  ->  [[R, -I], [I, R]] (see embed_hermitian).

#include <complex>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace margcert::sdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

struct Entry {
  int row;
  int col;
  double value;
};

/// Symmetric sparse matrix storing every nonzero of both triangles.
class SymSparse {
 public:
  /// Adds v at (r, c) and, when r != c, at (c, r).
  void add_symmetric(int r, int c, double v);
  /// Adds v at (r, c) only; callers keep the pattern symmetric.
  void add(int r, int c, double v) { entries_.push_back({r, c, v}); }

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t nnz() const { return entries_.size(); }

  /// Merges duplicates and drops exact zeros.
  void compress();
  Matrix dense(int dim) const;
  /// <A, G> = sum_{ab} A_ab G_ba.
  double inner(const Matrix& g) const;

 private:
  std::vector<Entry> entries_;
};

struct BlockTerm {
  int param;
  SymSparse coeff;
};

struct Block {
  int dim = 0;
  std::string label;
  SymSparse constant;
  std::vector<BlockTerm> terms;
};

struct SdpProblem {
  int num_params = 0;
  Vector objective;
  std::vector<Block> blocks;
  Matrix eq_matrix;
  Vector eq_rhs;

  void validate() const;
  Matrix block_value(std::size_t k, const Vector& y) const;
};

enum class SdpStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

std::string to_string(SdpStatus s);

struct SdpOptions {
  double tol = 1e-9;
  int max_iterations = 120;
  double step_fraction = 0.97;
  bool verbose = false;
};

struct SdpOutcome {
  SdpStatus status = SdpStatus::NumericalFailure;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  Vector y;
  std::vector<Matrix> slacks;
  std::vector<Matrix> duals;
  /// One multiplier per row of eq_matrix (zero on rows dropped as redundant).
  Vector eq_duals;
  /// Measured at the returned point.
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  double min_slack_eigenvalue = 0.0;
  double min_dual_eigenvalue = 0.0;
  int iterations = 0;
  int redundant_rows = 0;
};

SdpOutcome solve(const SdpProblem& problem, const SdpOptions& options = {});

/// Real-symmetric embedding of a sparse complex Hermitian matrix of dimension dim.
SymSparse embed_hermitian(const std::vector<std::tuple<int, int, std::complex<double>>>& entries, int dim);

/// Hermitian part H of an embedded matrix: H = ((S11 + S22) + i(S21 - S12)) / 2.
ComplexMatrix hermitian_from_embedding(const Matrix& s);

/// Hermitian Y with <embed(H), X> = Re tr(H Y) for every Hermitian H:
/// Y = (X11 + X22) + i(X21 - X12).
ComplexMatrix dual_from_embedding(const Matrix& x);

/// Largest alpha with M + alpha D >= 0 (infinity if unbounded), for M > 0.
double max_step(const Matrix& m, const Matrix& d);

}  // namespace margcert::sdp

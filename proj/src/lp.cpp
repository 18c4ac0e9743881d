#include "margcert/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace margcert::lp {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

void LinearProgram::validate() const {
  if (a_eq.cols() != objective.size()) throw std::invalid_argument("LinearProgram: objective size != column count");
  if (a_eq.rows() != b_eq.size()) throw std::invalid_argument("LinearProgram: rhs size != row count");
  if (lower.size() != 0 && lower.size() != objective.size())
    throw std::invalid_argument("LinearProgram: lower-bound size != column count");
  if (!a_eq.allFinite() || !b_eq.allFinite() || !objective.allFinite() || !lower.allFinite())
    throw std::invalid_argument("LinearProgram: non-finite data");
}

Vector LinearProgram::lower_bounds() const { return lower.size() ? lower : Vector::Zero(objective.size()); }

namespace {

// Row-major so that pivot row operations are contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b, const LpOptions& opt)
      : m_(static_cast<int>(a.rows())), n_(static_cast<int>(a.cols())), opt_(opt) {
    t_ = RowMatrix::Zero(m_, n_ + m_ + 1);
    t_.leftCols(n_) = a;
    t_.block(0, n_, m_, m_).setIdentity();
    t_.col(n_ + m_) = b;
    original_ = t_;
    basis_.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
  }

  int rows() const { return m_; }
  int structural() const { return n_; }
  const RowMatrix& table() const { return t_; }
  const std::vector<int>& basis() const { return basis_; }
  double rhs(int r) const { return t_(r, n_ + m_); }

  // Reduced costs d_j = c_j - c_B^T B^{-1} A_j over all n + m columns.
  void price(const Vector& cost) {
    cost_ = cost;
    d_ = cost;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) d_ -= cb * t_.row(i).head(n_ + m_).transpose();
    }
  }

  const Vector& reduced_costs() const { return d_; }

  double objective() const {
    double v = 0.0;
    for (int i = 0; i < m_; ++i) v += cost_(basis_[static_cast<std::size_t>(i)]) * rhs(i);
    return v;
  }

  enum class Result { Optimal, Unbounded, IterationLimit };

  // Runs simplex iterations; columns >= allowed_cols never enter.
  Result run(int allowed_cols, int& iterations, bool& bland_used) {
    bool bland = false;
    int degenerate = 0;
    int since_refactor = 0;
    while (true) {
      if (iterations >= opt_.max_iterations) return Result::IterationLimit;
      if (since_refactor >= kRefactorEvery) {
        refactor();
        since_refactor = 0;
      }
      int entering = choose_entering(allowed_cols, bland);
      if (entering < 0 && since_refactor > 0) {
        // Confirm optimality on a freshly factored tableau.
        refactor();
        since_refactor = 0;
        entering = choose_entering(allowed_cols, bland);
      }
      if (entering < 0) return Result::Optimal;
      const int leaving = choose_leaving(entering, bland);
      if (leaving < 0) return Result::Unbounded;
      const double step = rhs(leaving) / t_(leaving, entering);
      if (step <= opt_.feasibility_tol) {
        if (++degenerate >= opt_.degenerate_run && !bland) {
          bland = true;
          bland_used = true;
        }
      } else {
        // A strict improvement rules out returning to an earlier basis.
        degenerate = 0;
        bland = false;
      }
      pivot(leaving, entering);
      ++iterations;
      ++since_refactor;
    }
  }

  // Recomputes B^{-1} [A | I | b] and the reduced costs from the original data,
  // discarding roundoff accumulated by successive pivots.
  void refactor() {
    Matrix basis(m_, m_);
    for (int i = 0; i < m_; ++i) basis.col(i) = original_.col(basis_[static_cast<std::size_t>(i)]);
    const Eigen::PartialPivLU<Matrix> lu(basis);
    RowMatrix fresh = lu.solve(original_);
    if (!fresh.allFinite()) return;
    for (int i = 0; i < m_; ++i) fresh.col(basis_[static_cast<std::size_t>(i)]) = Vector::Unit(m_, i);
    t_ = std::move(fresh);
    price(cost_);
  }

  void pivot(int r, int c) {
    const double pv = t_(r, c);
    t_.row(r) /= pv;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    const double fd = d_(c);
    if (fd != 0.0) d_ -= fd * t_.row(r).head(n_ + m_).transpose();
    t_(r, c) = 1.0;
    for (int i = 0; i < m_; ++i)
      if (i != r) t_(i, c) = 0.0;
    d_(c) = 0.0;
    basis_[static_cast<std::size_t>(r)] = c;
  }

 private:
  int choose_entering(int allowed_cols, bool bland) const {
    const double tol = opt_.feasibility_tol;
    int best = -1;
    double best_val = -tol;
    for (int j = 0; j < allowed_cols; ++j) {
      if (d_(j) < -tol) {
        if (bland) return j;
        if (d_(j) < best_val) {
          best_val = d_(j);
          best = j;
        }
      }
    }
    return best;
  }

  // Minimum-ratio row; ties are broken lexicographically on the rows of
  // B^{-1} (the artificial block) scaled by the pivot column, which prevents
  // cycling. Bland mode breaks remaining ties by basis index.
  int choose_leaving(int c, bool bland) const {
    int best = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_; ++i) {
      const double a = t_(i, c);
      if (a <= opt_.pivot_tol) continue;
      const double ratio = std::max(rhs(i), 0.0) / a;
      if (best < 0 || ratio < best_ratio - 1e-12) {
        best = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + 1e-12) {
        const int cmp = lex_compare(i, best, c);
        if (cmp < 0 || (cmp == 0 && (bland ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(best)]
                                            : a > t_(best, c)))) {
          best = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
    }
    return best;
  }

  int lex_compare(int i, int k, int c) const {
    const double ai = t_(i, c), ak = t_(k, c);
    for (int j = n_; j < n_ + m_; ++j) {
      const double u = t_(i, j) / ai, v = t_(k, j) / ak;
      if (u < v - 1e-12) return -1;
      if (u > v + 1e-12) return 1;
    }
    return 0;
  }

  static constexpr int kRefactorEvery = 50;

  int m_;
  int n_;
  LpOptions opt_;
  RowMatrix original_;
  RowMatrix t_;
  std::vector<int> basis_;
  Vector cost_;
  Vector d_;
};

struct Residuals {
  double primal = 0.0;
  double bound = 0.0;
};

Residuals measure(const Matrix& a, const Vector& b, const Vector& x) {
  Residuals r;
  r.primal = a.rows() ? (a * x - b).cwiseAbs().maxCoeff() : 0.0;
  r.bound = x.size() ? std::max(0.0, -x.minCoeff()) : 0.0;
  return r;
}

LpOutcome solve_independent(const LinearProgram& program, const LpOptions& options) {
  const int m = static_cast<int>(program.a_eq.rows());
  const int n = static_cast<int>(program.a_eq.cols());
  const Vector lower = program.lower_bounds();
  const double sense = program.sense == Sense::Maximize ? -1.0 : 1.0;
  const Vector cost = sense * program.objective;

  // Shift x = lower + x', flip rows so the rhs is nonnegative.
  Vector b = program.b_eq - program.a_eq * lower;
  Vector row_sign = Vector::Ones(m);
  Matrix a = program.a_eq;
  for (int i = 0; i < m; ++i) {
    if (b(i) < 0.0) {
      row_sign(i) = -1.0;
      b(i) = -b(i);
      a.row(i) = -a.row(i);
    }
  }

  LpOutcome out;
  Tableau tab(a, b, options);

  // Phase 1: minimize the sum of artificials.
  Vector phase1_cost = Vector::Zero(n + m);
  phase1_cost.tail(m).setOnes();
  tab.price(phase1_cost);
  auto result = tab.run(n + m, out.iterations, out.bland_used);
  if (result == Tableau::Result::IterationLimit) return out;
  out.phase1_value = tab.objective();

  if (out.phase1_value > options.infeasible_threshold) {
    out.status = LpStatus::Infeasible;
    // y_i = 1 - d_{artificial i}; undo the row flips.
    out.dual = Vector(m);
    for (int i = 0; i < m; ++i) out.dual(i) = row_sign(i) * (1.0 - tab.reduced_costs()(n + i));
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  // Drive zero-level artificials out of the basis where a structural pivot exists.
  for (int r = 0; r < m; ++r) {
    if (tab.basis()[static_cast<std::size_t>(r)] < n) continue;
    int best = -1;
    double best_abs = 1e-9;
    for (int j = 0; j < n; ++j) {
      const double v = std::abs(tab.table()(r, j));
      if (v > best_abs) {
        best_abs = v;
        best = j;
      }
    }
    if (best >= 0) tab.pivot(r, best);
  }

  // Phase 2 over structural columns only.
  Vector phase2_cost = Vector::Zero(n + m);
  phase2_cost.head(n) = cost;
  tab.price(phase2_cost);
  result = tab.run(n, out.iterations, out.bland_used);
  if (result == Tableau::Result::IterationLimit) return out;
  if (result == Tableau::Result::Unbounded) {
    out.status = LpStatus::Unbounded;
    out.value = -sense * std::numeric_limits<double>::infinity();
    return out;
  }

  // Read the tableau solution, then refactor the final basis for accuracy.
  Vector x_tab = Vector::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int j = tab.basis()[static_cast<std::size_t>(i)];
    if (j < n) x_tab(j) = tab.rhs(i);
  }
  Matrix basis_matrix(m, m);
  Vector basis_cost(m);
  for (int i = 0; i < m; ++i) {
    const int j = tab.basis()[static_cast<std::size_t>(i)];
    if (j < n) {
      basis_matrix.col(i) = a.col(j);
      basis_cost(i) = cost(j);
    } else {
      basis_matrix.col(i) = Vector::Unit(m, j - n);
      basis_cost(i) = 0.0;
    }
  }
  Vector x_ref = Vector::Zero(n);
  Vector y_flip = Vector::Zero(m);
  bool refined = false;
  if (m > 0) {
    Eigen::FullPivLU<Matrix> lu(basis_matrix);
    if (lu.isInvertible()) {
      const Vector xb = lu.solve(b);
      for (int i = 0; i < m; ++i) {
        const int j = tab.basis()[static_cast<std::size_t>(i)];
        if (j < n) x_ref(j) = xb(i);
      }
      y_flip = basis_matrix.transpose().fullPivLu().solve(basis_cost);
      refined = true;
    }
  }
  if (!refined) {
    // Fall back to the tableau duals: y = c_B^T B^{-1}, B^{-1} in the artificial block.
    for (int i = 0; i < m; ++i) y_flip += basis_cost(i) * tab.table().row(i).segment(n, m).transpose();
  }

  const Residuals r_tab = measure(a, b, x_tab);
  const Residuals r_ref = measure(a, b, x_ref);
  const bool use_ref = refined && std::max(r_ref.primal, r_ref.bound) <= std::max(r_tab.primal, r_tab.bound);
  Vector x_shift = use_ref ? x_ref : x_tab;
  const Residuals r = use_ref ? r_ref : r_tab;

  out.primal = x_shift + lower;
  out.dual = Vector(m);
  for (int i = 0; i < m; ++i) out.dual(i) = sense * row_sign(i) * y_flip(i);
  out.value = program.objective.dot(out.primal);

  out.primal_residual = (program.a_eq * out.primal - program.b_eq).cwiseAbs().maxCoeff();
  out.primal_residual = std::max(out.primal_residual, r.bound);
  const Vector reduced = program.objective - program.a_eq.transpose() * out.dual;
  const double wrong_sign = n ? (sense * reduced).minCoeff() : 0.0;
  out.dual_residual = std::max(0.0, -wrong_sign);
  const double dual_value = program.b_eq.dot(out.dual) + reduced.dot(lower);
  out.duality_gap = std::abs(out.value - dual_value);

  const double scale = 1.0 + program.b_eq.cwiseAbs().maxCoeff();
  if (out.primal_residual > options.feasibility_tol * scale || out.dual_residual > 1e-7 ||
      out.duality_gap > 1e-8 * (1.0 + std::abs(out.value))) {
    out.status = LpStatus::NumericalFailure;
  } else {
    out.status = LpStatus::Optimal;
  }
  return out;
}

}  // namespace

LpOutcome solve(const LinearProgram& program, const LpOptions& options) {
  program.validate();
  const Eigen::Index m = program.a_eq.rows();
  if (m == 0) return solve_independent(program, options);

  // Keep a maximal independent set of rows (ascending order for determinism).
  Eigen::ColPivHouseholderQR<Matrix> qr(program.a_eq.transpose());
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  if (rank == m) return solve_independent(program, options);
  std::vector<Eigen::Index> keep(static_cast<std::size_t>(rank));
  for (Eigen::Index k = 0; k < rank; ++k) keep[static_cast<std::size_t>(k)] = qr.colsPermutation().indices()(k);
  std::sort(keep.begin(), keep.end());
  std::vector<bool> kept(static_cast<std::size_t>(m), false);
  for (Eigen::Index i : keep) kept[static_cast<std::size_t>(i)] = true;

  LinearProgram reduced = program;
  reduced.a_eq.resize(rank, program.a_eq.cols());
  reduced.b_eq.resize(rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    reduced.a_eq.row(k) = program.a_eq.row(keep[static_cast<std::size_t>(k)]);
    reduced.b_eq(k) = program.b_eq(keep[static_cast<std::size_t>(k)]);
  }

  // A dropped row is a combination c of kept rows; an rhs mismatch is infeasible
  // with Farkas vector +-(e_row - c), which annihilates A.
  const Eigen::ColPivHouseholderQR<Matrix> basis_qr(reduced.a_eq.transpose());
  const Vector shifted = program.b_eq - program.a_eq * program.lower_bounds();
  const Vector shifted_kept = reduced.b_eq - reduced.a_eq * program.lower_bounds();
  const double scale = 1.0 + shifted.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (kept[static_cast<std::size_t>(i)]) continue;
    const Vector c = basis_qr.solve(Vector(program.a_eq.row(i).transpose()));
    const double mismatch = shifted(i) - c.dot(shifted_kept);
    if (std::abs(mismatch) > options.infeasible_threshold * scale) {
      LpOutcome out;
      out.status = LpStatus::Infeasible;
      out.value = std::numeric_limits<double>::quiet_NaN();
      out.phase1_value = std::abs(mismatch);
      out.dual = Vector::Zero(m);
      const double sign = mismatch > 0.0 ? 1.0 : -1.0;
      out.dual(i) = sign;
      for (Eigen::Index k = 0; k < rank; ++k) out.dual(keep[static_cast<std::size_t>(k)]) = -sign * c(k);
      return out;
    }
  }

  LpOutcome out = solve_independent(reduced, options);
  if (out.dual.size() == rank) {
    Vector full = Vector::Zero(m);
    for (Eigen::Index k = 0; k < rank; ++k) full(keep[static_cast<std::size_t>(k)]) = out.dual(k);
    out.dual = std::move(full);
  }
  if (out.status == LpStatus::Optimal) {
    out.primal_residual = std::max(out.primal_residual, (program.a_eq * out.primal - program.b_eq).cwiseAbs().maxCoeff());
    if (out.primal_residual > options.feasibility_tol * (1.0 + program.b_eq.cwiseAbs().maxCoeff()))
      out.status = LpStatus::NumericalFailure;
  }
  return out;
}

}  // namespace margcert::lp

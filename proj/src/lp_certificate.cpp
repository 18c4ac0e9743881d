#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "margcert/lp.hpp"

namespace margcert::lp {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Best continued-fraction approximation with denominator <= max_den.
Rational rationalize(double v, std::int64_t max_den = 1000000) {
  if (!std::isfinite(v)) throw std::invalid_argument("rationalize: non-finite value");
  const bool negative = v < 0.0;
  double x = std::abs(v);
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = x;
  for (int k = 0; k < 64; ++k) {
    const double a_d = std::floor(frac);
    if (a_d > 1e15) break;
    const auto a = static_cast<std::int64_t>(a_d);
    const std::int64_t p2 = a * p1 + p0;
    const std::int64_t q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::abs(approx - x) <= 1e-15 * std::max(1.0, x)) break;
    const double rem = frac - a_d;
    if (rem <= 0.0) break;
    frac = 1.0 / rem;
  }
  if (q1 == 0) return Rational(0);
  Rational r(p1, q1);
  return negative ? Rational(-r) : r;
}

}  // namespace

CertificateCheck verify_lp_certificate(const LinearProgram& program, const LpOutcome& outcome, bool exact, double tol) {
  program.validate();
  CertificateCheck check;
  const Vector lower = program.lower_bounds();
  std::ostringstream detail;

  if (outcome.status == LpStatus::Infeasible) {
    if (outcome.dual.size() != program.a_eq.rows()) {
      check.detail = "certificate length does not match row count";
      return check;
    }
    const Vector aty = program.a_eq.transpose() * outcome.dual;
    const Vector shifted_b = program.b_eq - program.a_eq * lower;
    check.max_violation = aty.size() ? std::max(0.0, aty.maxCoeff()) : 0.0;
    check.margin = shifted_b.dot(outcome.dual);
    check.valid = check.max_violation <= tol && check.margin > tol;
    detail << "farkas: max(A^T y) = " << check.max_violation << ", b^T y = " << check.margin;

    if (exact) {
      check.exact_checked = true;
      const Eigen::Index m = program.a_eq.rows();
      const Eigen::Index n = program.a_eq.cols();
      std::vector<Rational> y(static_cast<std::size_t>(m));
      for (Eigen::Index i = 0; i < m; ++i) y[static_cast<std::size_t>(i)] = rationalize(outcome.dual(i));
      std::vector<std::vector<Rational>> a(static_cast<std::size_t>(m), std::vector<Rational>(static_cast<std::size_t>(n)));
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          if (program.a_eq(i, j) != 0.0) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = rationalize(program.a_eq(i, j));
      auto exact_check = [&](Rational& worst, Rational& margin) {
        worst = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
          Rational s = 0;
          for (Eigen::Index i = 0; i < m; ++i) s += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(i)];
          if (j == 0 || s > worst) worst = s;
        }
        margin = 0;
        for (Eigen::Index i = 0; i < m; ++i) margin += rationalize(shifted_b(i)) * y[static_cast<std::size_t>(i)];
        return worst <= 0 && margin > 0;
      };
      Rational worst, margin;
      bool ok = exact_check(worst, margin);
      if (!ok && worst > 0) {
        // Rounding can leave A^T y slightly positive on tight columns. A row with
        // all entries positive absorbs the excess: lowering its multiplier by
        // max_j (A^T y)_j / a_rj makes every column nonpositive.
        for (Eigen::Index r = 0; r < m && !ok; ++r) {
          const auto& row = a[static_cast<std::size_t>(r)];
          if (!std::all_of(row.begin(), row.end(), [](const Rational& v) { return v > 0; })) continue;
          Rational shift = 0;
          for (Eigen::Index j = 0; j < n; ++j) {
            Rational s = 0;
            for (Eigen::Index i = 0; i < m; ++i) s += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(i)];
            if (s / row[static_cast<std::size_t>(j)] > shift) shift = s / row[static_cast<std::size_t>(j)];
          }
          y[static_cast<std::size_t>(r)] -= shift;
          ok = exact_check(worst, margin);
          if (ok) detail << "; repaired on row " << r << " by " << static_cast<double>(shift);
        }
      }
      check.exact_valid = ok;
      detail << "; exact: " << (check.exact_valid ? "valid" : "invalid") << " (b^T y = " << static_cast<double>(margin)
             << ")";
    }
  } else if (outcome.status == LpStatus::Optimal) {
    const Vector& x = outcome.primal;
    const double residual = (program.a_eq * x - program.b_eq).cwiseAbs().maxCoeff();
    const double bound = std::max(0.0, (lower - x).maxCoeff());
    const double sense = program.sense == Sense::Maximize ? -1.0 : 1.0;
    const Vector reduced = program.objective - program.a_eq.transpose() * outcome.dual;
    const double dual_violation = std::max(0.0, -(sense * reduced).minCoeff());
    const double dual_value = program.b_eq.dot(outcome.dual) + reduced.dot(lower);
    const double gap = std::abs(program.objective.dot(x) - dual_value);
    check.max_violation = std::max({residual, bound});
    check.margin = gap;
    check.valid = check.max_violation <= tol && dual_violation <= 1e-7 && gap <= 1e-8 * (1.0 + std::abs(dual_value));
    detail << "primal residual " << residual << ", bound violation " << bound << ", dual violation "
           << dual_violation << ", gap " << gap;

    if (exact) {
      check.exact_checked = true;
      const Eigen::Index m = program.a_eq.rows();
      const Eigen::Index n = program.a_eq.cols();
      std::vector<Rational> xr(static_cast<std::size_t>(n));
      for (Eigen::Index j = 0; j < n; ++j) xr[static_cast<std::size_t>(j)] = rationalize(x(j));
      bool ok = true;
      for (Eigen::Index j = 0; j < n && ok; ++j)
        if (xr[static_cast<std::size_t>(j)] < rationalize(lower(j))) ok = false;
      for (Eigen::Index i = 0; i < m && ok; ++i) {
        Rational s = 0;
        for (Eigen::Index j = 0; j < n; ++j)
          if (program.a_eq(i, j) != 0.0) s += rationalize(program.a_eq(i, j)) * xr[static_cast<std::size_t>(j)];
        if (s != rationalize(program.b_eq(i))) ok = false;
      }
      check.exact_valid = ok;
      detail << "; exact feasibility: " << (ok ? "valid" : "invalid");
    }
  } else {
    detail << "no certificate for status " << to_string(outcome.status);
  }
  check.detail = detail.str();
  return check;
}

}  // namespace margcert::lp

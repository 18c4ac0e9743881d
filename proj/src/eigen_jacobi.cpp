#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "margcert/qkernel.hpp"

namespace margcert::qkernel {

std::vector<double> symmetric_eigenvalues(const RealMatrix& input, double tol) {
  if (input.rows() != input.cols()) throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
  const Eigen::Index n = input.rows();
  RealMatrix a = 0.5 * (input + input.transpose());
  const double norm = a.norm();
  if (norm == 0.0) return std::vector<double>(static_cast<std::size_t>(n), 0.0);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index q = 1; q < n; ++q)
      for (Eigen::Index p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= tol * norm) break;

    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A <- P^T A P with P = rotation in the (p, q) plane.
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  std::vector<double> values(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(values.begin(), values.end());
  return values;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eigenvalues: matrix not square");
  if (!is_hermitian(m, 1e-8 * (1.0 + m.cwiseAbs().maxCoeff())))
    throw std::invalid_argument("hermitian_eigenvalues: matrix not Hermitian");
  const Eigen::Index d = m.rows();
  RealMatrix embedded(2 * d, 2 * d);
  embedded.topLeftCorner(d, d) = m.real();
  embedded.bottomRightCorner(d, d) = m.real();
  embedded.topRightCorner(d, d) = -m.imag();
  embedded.bottomLeftCorner(d, d) = m.imag();
  const std::vector<double> doubled = symmetric_eigenvalues(embedded);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < doubled.size(); i += 2) values.push_back(0.5 * (doubled[i] + doubled[i + 1]));
  return values;
}

double min_eigenvalue(const ComplexMatrix& m) { return hermitian_eigenvalues(m).front(); }

bool is_psd(const ComplexMatrix& m, double tol) {
  const auto values = hermitian_eigenvalues(m);
  const double scale = std::max(std::abs(values.front()), std::abs(values.back()));
  return values.front() >= -tol * (1.0 + scale);
}

}  // namespace margcert::qkernel

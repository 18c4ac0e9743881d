#pragma once

// Dense complex linear algebra and qubit-state primitives.
//
// Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
// computational-basis index. For three qubits, qubit 0 is party A.

#include <array>
#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "margcert/correlators.hpp"

namespace margcert {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Largest supported register; dense storage of 2^7 x 2^7 is the ceiling.
inline constexpr int kMaxQubits = 7;

/// Default scale-aware PSD tolerance: lambda_min >= -kPsdTol * (1 + max|lambda|).
inline constexpr double kPsdTol = 1e-9;

namespace qkernel {

ComplexMatrix identity(int dim);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

/// Kronecker product a (x) b.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Projector |v><v|.
ComplexMatrix projector(const ComplexVector& v);

/// Computational basis ket from a bit string such as "001".
ComplexVector basis_ket(std::string_view bits);

/// Number of qubits of a square matrix of dimension 2^n; throws otherwise.
int qubit_count(const ComplexMatrix& m);

bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10);

/// Eigenvalues of a Hermitian matrix in ascending order. Cyclic Jacobi on the
/// real-symmetric embedding [[Re, -Im], [Im, Re]]; each eigenvalue of the
/// embedding appears twice and one copy is kept.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

/// Eigenvalues (ascending) of a real symmetric matrix by cyclic Jacobi.
std::vector<double> symmetric_eigenvalues(const RealMatrix& m, double tol = 1e-12);

double min_eigenvalue(const ComplexMatrix& m);
bool is_psd(const ComplexMatrix& m, double tol = kPsdTol);

/// Partial trace of an arbitrary 2^n-dimensional operator, keeping the listed
/// qubits in ascending order.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const int> keep);

/// Partial transpose on every qubit in `subsystems`.
ComplexMatrix partial_transpose(const ComplexMatrix& m, std::span<const int> subsystems);
ComplexMatrix partial_transpose(const ComplexMatrix& m, int subsystem);

/// Reorders tensor factors: qubit q of the input becomes qubit perm[q] of the output.
ComplexMatrix permute_qubits(const ComplexMatrix& m, std::span<const int> perm);

/// Hermitian, unit-trace, positive semidefinite operator on n qubits.
class DensityMatrix {
 public:
  /// Validates Hermiticity, trace and positivity; throws std::invalid_argument.
  explicit DensityMatrix(ComplexMatrix m, double tol = kPsdTol);

  int qubits() const { return qubits_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

  double purity() const;

 private:
  ComplexMatrix m_;
  int qubits_;
};

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep);

/// Two-outcome qubit observable cos(theta) sigma_z + sign * sin(theta) sigma_x.
struct Observable {
  double angle = 0.0;
  int sign = +1;

  ComplexMatrix matrix() const;
};

/// Observable n . sigma for a unit Bloch vector.
ComplexMatrix bloch_observable(const std::array<double, 3>& n);

/// Two settings per party, parties A, B, C.
struct MeasurementScenario {
  std::array<std::array<Observable, 2>, 3> settings;
};

/// A0,1 = cos(a) Z +/- sin(a) X; B0 = C0 = -Z; B1 = cos(b) Z + sin(b) X;
/// C1 = cos(b) Z - sin(b) X with a = 3.6241, b = 2.0221.
MeasurementScenario w_violation_scenario();

ComplexVector w_ket(int n);
ComplexVector ghz_ket(int n);

DensityMatrix w_state(int n);

/// p |W_n><W_n| + (1 - p) / 2^n * I.
DensityMatrix noisy_w(int n, double p);

/// Two-qubit reduction of noisy_w(n, p):
/// (2p/n)|psi+><psi+| + ((n-2)p/n)|00><00| + (1-p)/4 I.
DensityMatrix reduced_two_party(int n, double p);

/// (|01> + |10>) / sqrt(2).
ComplexVector psi_plus();

/// Expectation values tr(rho O1 (x) O2 (x) O3), identity for absent parties.
CorrelatorTable correlators_from_state(const DensityMatrix& rho, const MeasurementScenario& s);

}  // namespace qkernel
}  // namespace margcert

#include "margcert/qkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace margcert::qkernel {

namespace {

// Bit of qubit q inside a basis index of an n-qubit register.
constexpr int bit_shift(int n, int q) { return n - 1 - q; }

// Scatters the bits of `compact` (|positions| bits, MSB first) onto the
// listed qubit positions of an n-qubit index.
int scatter_bits(int compact, std::span<const int> positions, int n) {
  int out = 0;
  const int k = static_cast<int>(positions.size());
  for (int i = 0; i < k; ++i) {
    const int bit = (compact >> (k - 1 - i)) & 1;
    out |= bit << bit_shift(n, positions[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<int> checked_subset(std::span<const int> qubits, int n, const char* what) {
  std::vector<int> sorted(qubits.begin(), qubits.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument(std::string(what) + ": repeated qubit index");
  for (int q : sorted)
    if (q < 0 || q >= n) throw std::invalid_argument(std::string(what) + ": qubit index out of range");
  return sorted;
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument(std::string(what) + ": matrix not square");
}

}  // namespace

ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "tensor");
  require_square(b, "tensor");
  const Eigen::Index da = a.rows();
  const Eigen::Index db = b.rows();
  ComplexMatrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j) out.block(i * db, j * db, db, db) = a(i, j) * b;
  return out;
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

ComplexVector basis_ket(std::string_view bits) {
  if (bits.empty() || bits.size() > kMaxQubits) throw std::invalid_argument("basis_ket: bad length");
  int index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("basis_ket: expected 0/1 characters");
    index = 2 * index + (c - '0');
  }
  ComplexVector v = ComplexVector::Zero(1 << bits.size());
  v(index) = 1.0;
  return v;
}

int qubit_count(const ComplexMatrix& m) {
  require_square(m, "qubit_count");
  const auto d = m.rows();
  int n = 0;
  while ((Eigen::Index{1} << n) < d) ++n;
  if ((Eigen::Index{1} << n) != d || n < 1 || n > kMaxQubits)
    throw std::invalid_argument("qubit_count: dimension is not 2^n with 1 <= n <= 7");
  return n;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const int> keep) {
  const int n = qubit_count(m);
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  const std::vector<int> kept = checked_subset(keep, n, "partial_trace");
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

  const int dk = 1 << kept.size();
  const int dt = 1 << traced.size();
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (int i = 0; i < dk; ++i) {
    const int ri = scatter_bits(i, kept, n);
    for (int j = 0; j < dk; ++j) {
      const int rj = scatter_bits(j, kept, n);
      Complex sum = 0.0;
      for (int t = 0; t < dt; ++t) {
        const int rt = scatter_bits(t, traced, n);
        sum += m(ri | rt, rj | rt);
      }
      out(i, j) = sum;
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, std::span<const int> subsystems) {
  const int n = qubit_count(m);
  const std::vector<int> sub = checked_subset(subsystems, n, "partial_transpose");
  int mask = 0;
  for (int q : sub) mask |= 1 << bit_shift(n, q);
  const int d = static_cast<int>(m.rows());
  ComplexMatrix out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out((i & ~mask) | (j & mask), (j & ~mask) | (i & mask)) = m(i, j);
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, int subsystem) {
  const int sub[] = {subsystem};
  return partial_transpose(m, sub);
}

ComplexMatrix permute_qubits(const ComplexMatrix& m, std::span<const int> perm) {
  const int n = qubit_count(m);
  if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("permute_qubits: wrong permutation length");
  std::vector<int> check(perm.begin(), perm.end());
  std::sort(check.begin(), check.end());
  for (int q = 0; q < n; ++q)
    if (check[static_cast<std::size_t>(q)] != q) throw std::invalid_argument("permute_qubits: not a permutation");

  const int d = 1 << n;
  std::vector<int> map(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    int out = 0;
    for (int q = 0; q < n; ++q) {
      const int bit = (i >> bit_shift(n, q)) & 1;
      out |= bit << bit_shift(n, perm[static_cast<std::size_t>(q)]);
    }
    map[static_cast<std::size_t>(i)] = out;
  }
  ComplexMatrix result(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) result(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]) = m(i, j);
  return result;
}

DensityMatrix::DensityMatrix(ComplexMatrix m, double tol) : m_(std::move(m)), qubits_(qubit_count(m_)) {
  const double scale = 1.0 + m_.cwiseAbs().maxCoeff();
  if (!m_.allFinite()) throw std::invalid_argument("DensityMatrix: non-finite entries");
  if (!is_hermitian(m_, 1e-10 * scale)) throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (std::abs(m_.trace() - Complex(1.0)) > 1e-10) throw std::invalid_argument("DensityMatrix: trace != 1");
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
  if (!is_psd(m_, tol)) throw std::invalid_argument("DensityMatrix: not positive semidefinite");
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  return DensityMatrix(partial_trace(rho.matrix(), keep));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

ComplexMatrix Observable::matrix() const {
  if (sign != 1 && sign != -1) throw std::invalid_argument("Observable: sign must be +1 or -1");
  return std::cos(angle) * pauli_z() + static_cast<double>(sign) * std::sin(angle) * pauli_x();
}

ComplexMatrix bloch_observable(const std::array<double, 3>& n) {
  return n[0] * pauli_x() + n[1] * pauli_y() + n[2] * pauli_z();
}

MeasurementScenario w_violation_scenario() {
  constexpr double alpha = 3.6241;
  constexpr double beta = 2.0221;
  MeasurementScenario s;
  s.settings[0] = {Observable{alpha, +1}, Observable{alpha, -1}};
  s.settings[1] = {Observable{M_PI, +1}, Observable{beta, +1}};
  s.settings[2] = {Observable{M_PI, +1}, Observable{beta, -1}};
  return s;
}

ComplexVector w_ket(int n) {
  if (n < 3 || n > kMaxQubits) throw std::invalid_argument("w_ket: need 3 <= n <= 7");
  ComplexVector v = ComplexVector::Zero(1 << n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int q = 0; q < n; ++q) v(1 << q) = amp;
  return v;
}

ComplexVector ghz_ket(int n) {
  if (n < 2 || n > kMaxQubits) throw std::invalid_argument("ghz_ket: need 2 <= n <= 7");
  ComplexVector v = ComplexVector::Zero(1 << n);
  v(0) = v((1 << n) - 1) = 1.0 / std::sqrt(2.0);
  return v;
}

DensityMatrix w_state(int n) { return DensityMatrix(projector(w_ket(n))); }

DensityMatrix noisy_w(int n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("noisy_w: p outside [0, 1]");
  const ComplexVector w = w_ket(n);
  const int d = 1 << n;
  return DensityMatrix(p * projector(w) + (1.0 - p) / d * identity(d));
}

ComplexVector psi_plus() {
  ComplexVector v = ComplexVector::Zero(4);
  v(1) = v(2) = 1.0 / std::sqrt(2.0);
  return v;
}

DensityMatrix reduced_two_party(int n, double p) {
  if (n < 3 || n > kMaxQubits) throw std::invalid_argument("reduced_two_party: need 3 <= n <= 7");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("reduced_two_party: p outside [0, 1]");
  const double dn = static_cast<double>(n);
  return DensityMatrix((2.0 * p / dn) * projector(psi_plus()) + ((dn - 2.0) * p / dn) * projector(basis_ket("00")) +
                       (1.0 - p) / 4.0 * identity(4));
}

CorrelatorTable correlators_from_state(const DensityMatrix& rho, const MeasurementScenario& s) {
  if (rho.qubits() != 3) throw std::invalid_argument("correlators_from_state: expected a three-qubit state");
  const ComplexMatrix id = identity(2);
  std::array<std::array<ComplexMatrix, 2>, 3> ops;
  for (int party = 0; party < 3; ++party)
    for (int x = 0; x < 2; ++x) ops[party][x] = s.settings[party][x].matrix();

  auto expect = [&](const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c) {
    return (rho.matrix() * tensor(tensor(a, b), c)).trace().real();
  };

  CorrelatorTable t;
  for (int x = 0; x < 2; ++x) {
    t.singles[0][x] = expect(ops[0][x], id, id);
    t.singles[1][x] = expect(id, ops[1][x], id);
    t.singles[2][x] = expect(id, id, ops[2][x]);
  }
  for (int u = 0; u < 2; ++u) {
    for (int v = 0; v < 2; ++v) {
      t.doubles[0][u][v] = expect(ops[0][u], ops[1][v], id);
      t.doubles[1][u][v] = expect(ops[0][u], id, ops[2][v]);
      t.doubles[2][u][v] = expect(id, ops[1][u], ops[2][v]);
    }
  }
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) t.triples[x][y][z] = expect(ops[0][x], ops[1][y], ops[2][z]);
  t.has_triples = true;
  return t;
}

}  // namespace margcert::qkernel

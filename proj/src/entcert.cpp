#include "margcert/entcert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace margcert::entcert {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::CertifiedEntangled: return "certified-entangled";
    case Verdict::NotCertified: return "not-certified";
    case Verdict::InfeasibleMarginals: return "infeasible-marginals";
  }
  return "?";
}

bool CertResult::all_passed() const {
  return std::all_of(residuals.begin(), residuals.end(), [](const Residual& r) { return r.ok(); });
}

const Residual* CertResult::residual(const std::string& name) const {
  for (const Residual& r : residuals)
    if (r.name == name) return &r;
  return nullptr;
}

double CertResult::value(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  throw std::out_of_range("CertResult has no value named " + name);
}

double ppt_min_eig(const DensityMatrix& rho, std::span<const int> subset) {
  const int n = rho.qubits();
  if (subset.empty() || static_cast<int>(subset.size()) >= n)
    throw std::invalid_argument("ppt_min_eig: subset must be a nonempty proper subset");
  return qkernel::min_eigenvalue(qkernel::partial_transpose(rho.matrix(), subset));
}

double ppt_min_eig(const DensityMatrix& rho, std::initializer_list<int> subset) {
  return ppt_min_eig(rho, std::span<const int>(subset.begin(), subset.size()));
}

namespace {

std::array<ComplexMatrix, 3> paulis() { return {qkernel::pauli_x(), qkernel::pauli_y(), qkernel::pauli_z()}; }

void require_two_qubits(const DensityMatrix& rho, const char* what) {
  if (rho.qubits() != 2) throw std::invalid_argument(std::string(what) + ": two-qubit state required");
}

}  // namespace

Eigen::Matrix3d correlation_matrix(const DensityMatrix& rho) {
  require_two_qubits(rho, "correlation_matrix");
  const auto s = paulis();
  Eigen::Matrix3d t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = (rho.matrix() * qkernel::tensor(s[i], s[j])).trace().real();
  return t;
}

double horodecki_m(const DensityMatrix& rho) {
  const Eigen::Matrix3d t = correlation_matrix(rho);
  const std::vector<double> ev = qkernel::symmetric_eigenvalues(t.transpose() * t);
  return ev[1] + ev[2];
}

ChshSettings optimal_chsh_settings(const DensityMatrix& rho) {
  const Eigen::Matrix3d t = correlation_matrix(rho);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d s = svd.singularValues();
  const Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  const double theta = std::atan2(s(1), s(0));
  auto arr = [](const Eigen::Vector3d& x) { return std::array<double, 3>{x(0), x(1), x(2)}; };
  ChshSettings out;
  out.a = {arr(u.col(0)), arr(u.col(1))};
  out.b = {arr(std::cos(theta) * v.col(0) + std::sin(theta) * v.col(1)),
           arr(std::cos(theta) * v.col(0) - std::sin(theta) * v.col(1))};
  out.predicted = 2.0 * std::hypot(s(0), s(1));
  return out;
}

BipartiteBox two_qubit_box(const DensityMatrix& rho, const std::array<std::array<double, 3>, 2>& a,
                           const std::array<std::array<double, 3>, 2>& b) {
  require_two_qubits(rho, "two_qubit_box");
  const ComplexMatrix id = qkernel::identity(2);
  BipartiteBox box;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const ComplexMatrix ax = qkernel::bloch_observable(a[static_cast<std::size_t>(x)]);
      const ComplexMatrix by = qkernel::bloch_observable(b[static_cast<std::size_t>(y)]);
      for (int oa = 0; oa < 2; ++oa)
        for (int ob = 0; ob < 2; ++ob) {
          const ComplexMatrix pa = 0.5 * (id + static_cast<double>(outcome_value(oa)) * ax);
          const ComplexMatrix pb = 0.5 * (id + static_cast<double>(outcome_value(ob)) * by);
          box(oa, ob, x, y) = (rho.matrix() * qkernel::tensor(pa, pb)).trace().real();
        }
    }
  return box;
}

double p_sep(int n) {
  if (n < 3) throw std::invalid_argument("p_sep: n must be at least 3");
  const double nn = n;
  return nn / (4.0 - nn + 2.0 * std::sqrt(nn * nn - 4.0 * nn + 8.0));
}

double p_sep_bisection(int n, double tol) {
  if (n < 3) throw std::invalid_argument("p_sep_bisection: n must be at least 3");
  auto margin = [n](double p) { return ppt_min_eig(qkernel::reduced_two_party(n, p), {1}); };
  double lo = 0.0, hi = 1.0;
  if (margin(hi) >= 0.0) return 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (margin(mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ComplexMatrix witness_m(int n) {
  if (n < 3) throw std::invalid_argument("witness_m: n must be at least 3");
  const double nn = n;
  return (2.0 / nn) * qkernel::projector(qkernel::psi_plus()) +
         ((nn - 2.0) / nn) * qkernel::projector(qkernel::basis_ket("00")) - 0.25 * qkernel::identity(4);
}

CertResult certify_wstate(int n, double p, const sdp::SdpOptions& options) {
  CertResult out;
  out.kind = "dual-sdp";
  out.n = n;
  out.p_sep = p_sep(n);
  out.values.emplace_back("p", p);
  if (!(p >= 0.0 && p <= 1.0)) {
    out.verdict = Verdict::InfeasibleMarginals;
    out.notes.push_back("p outside [0, 1]: the prescribed reductions are not states");
    return out;
  }
  const double marginal_ppt = ppt_min_eig(qkernel::reduced_two_party(n, p), {1});
  out.values.emplace_back("marginal_ppt_min_eig", marginal_ppt);
  const MarginalSdp m = build_marginal_sdp(n);
  const double t = feasibility_margin(m, p, options);
  out.values.emplace_back("feasibility_margin", t);
  out.verdict = t < 0.0 ? Verdict::CertifiedEntangled : Verdict::NotCertified;
  if (out.verdict == Verdict::CertifiedEntangled)
    out.notes.push_back(marginal_ppt >= 0.0 ? "two-party reductions are separable, every compatible global state is NPT"
                                            : "two-party reductions are already entangled");
  if (n > 3) out.notes.push_back("PPT imposed across every bipartition (" + to_string(m.cuts) + ")");
  return out;
}

CertResult ghz_marginal_demo() {
  CertResult out;
  out.kind = "marginal-demo";
  out.n = 3;
  const DensityMatrix ghz(qkernel::projector(qkernel::ghz_ket(3)));
  const DensityMatrix mixed(0.5 * (qkernel::projector(qkernel::basis_ket("000")) +
                                   qkernel::projector(qkernel::basis_ket("111"))));
  const ComplexMatrix target =
      0.5 * (qkernel::projector(qkernel::basis_ket("00")) + qkernel::projector(qkernel::basis_ket("11")));
  static const char* pair_names[3] = {"AB", "AC", "BC"};
  static const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int k = 0; k < 3; ++k) {
    const ComplexMatrix g = qkernel::partial_trace(ghz, {pairs[k][0], pairs[k][1]}).matrix();
    const ComplexMatrix mx = qkernel::partial_trace(mixed, {pairs[k][0], pairs[k][1]}).matrix();
    out.residuals.push_back({std::string("ghz_marginal_") + pair_names[k], (g - target).cwiseAbs().maxCoeff(), 1e-12});
    out.residuals.push_back(
        {std::string("mixed_marginal_") + pair_names[k], (mx - target).cwiseAbs().maxCoeff(), 1e-12});
  }
  const double marginal_ppt = ppt_min_eig(DensityMatrix(target), {0});
  out.values.emplace_back("marginal_ppt_min_eig", marginal_ppt);
  out.residuals.push_back({"marginal_ppt", std::max(0.0, -marginal_ppt), 1e-12});
  static const char* cut_names[3] = {"A", "B", "C"};
  for (int q = 0; q < 3; ++q) {
    const double g = ppt_min_eig(ghz, {q});
    const double mx = ppt_min_eig(mixed, {q});
    out.values.emplace_back(std::string("ghz_ppt_min_eig_") + cut_names[q], g);
    out.values.emplace_back(std::string("mixed_ppt_min_eig_") + cut_names[q], mx);
    // GHZ must be strictly NPT: the residual is the eigenvalue itself.
    out.residuals.push_back({std::string("ghz_npt_") + cut_names[q], g, -1e-9});
    out.residuals.push_back({std::string("mixed_ppt_") + cut_names[q], std::max(0.0, -mx), 1e-12});
  }
  out.matrices.emplace_back("marginal", target);
  out.verdict = Verdict::NotCertified;
  out.notes.push_back("separable two-party marginals admit both an entangled (GHZ) and a separable global state");
  return out;
}

}  // namespace margcert::entcert

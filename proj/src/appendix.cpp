#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "margcert/entcert.hpp"

namespace margcert::entcert {

namespace {

using Decimal = boost::multiprecision::cpp_dec_float_50;

ComplexMatrix ketbra(const char* a, const char* b) {
  return qkernel::basis_ket(a) * qkernel::basis_ket(b).adjoint();
}

double max_eigenvalue(const ComplexMatrix& m) { return qkernel::hermitian_eigenvalues(m).back(); }

double hermiticity(const ComplexMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

const char* party_name(int q) { return q == 0 ? "A" : q == 1 ? "B" : "C"; }

}  // namespace

double sqrt17() {
  static const double v = static_cast<double>(boost::multiprecision::sqrt(Decimal(17)));
  return v;
}

double appendix_p_star() {
  static const double v = static_cast<double>(Decimal(3) / (Decimal(2) + boost::multiprecision::sqrt(Decimal(17))));
  return v;
}

DensityMatrix appendix_primal_state(double p) {
  if (!(p >= 0.0 && p <= 0.6)) throw std::invalid_argument("appendix_primal_state: p must lie in [0, 3/5]");
  const double s3 = std::sqrt(3.0);
  const ComplexVector w = (qkernel::basis_ket("001") + qkernel::basis_ket("010") + qkernel::basis_ket("100")) / s3;
  const ComplexVector wbar = (qkernel::basis_ket("011") + qkernel::basis_ket("101") + qkernel::basis_ket("110")) / s3;
  const ComplexMatrix sigma = (ketbra("001", "001") + ketbra("010", "010") + ketbra("100", "100")) / 3.0;
  const ComplexMatrix rho = p / 2.0 * (qkernel::projector(w) + qkernel::projector(wbar)) + 3.0 * (1.0 - p) / 4.0 * sigma +
                            p / 6.0 * ketbra("000", "000") + (3.0 - 5.0 * p) / 12.0 * ketbra("111", "111");
  return DensityMatrix(rho);
}

CertResult verify_primal_state(const ComplexMatrix& rho, double p, double tol) {
  if (rho.rows() != 8 || rho.cols() != 8) throw std::invalid_argument("verify_primal_state: 8x8 operator required");
  CertResult out;
  out.kind = "primal-state";
  out.n = 3;
  out.p_star = p;
  out.p_sep = p_sep(3);
  out.values.emplace_back("objective", p);
  out.residuals.push_back({"hermiticity", hermiticity(rho), tol});
  out.residuals.push_back({"trace", std::abs(rho.trace() - Complex(1.0, 0.0)), tol});
  const double lmin = qkernel::min_eigenvalue(rho);
  out.values.emplace_back("min_eigenvalue", lmin);
  out.residuals.push_back({"psd", std::max(0.0, -lmin), tol});
  for (int q = 0; q < 3; ++q) {
    const double l = qkernel::min_eigenvalue(qkernel::partial_transpose(rho, q));
    out.values.emplace_back(std::string("ppt_min_eig_") + party_name(q), l);
    out.residuals.push_back({std::string("ppt_") + party_name(q), std::max(0.0, -l), tol});
  }
  const ComplexMatrix target = qkernel::reduced_two_party(3, p).matrix();
  static const int keep[3][2] = {{1, 2}, {0, 2}, {0, 1}};
  for (int q = 0; q < 3; ++q) {
    const ComplexMatrix red = qkernel::partial_trace(rho, std::span<const int>(keep[q], 2));
    out.residuals.push_back({std::string("marginal_tr_") + party_name(q), (red - target).cwiseAbs().maxCoeff(), tol});
  }
  out.matrices.emplace_back("rho", rho);
  out.verdict = Verdict::NotCertified;
  out.notes.push_back(out.all_passed() ? "PPT completion exists at this p: entanglement is not certified here"
                                       : "state fails the program constraints");
  return out;
}

ComplexMatrix lift_n(const ComplexMatrix& n_x, int party) {
  const ComplexMatrix base = qkernel::tensor(qkernel::identity(2), n_x);
  static const int perms[3][3] = {{0, 1, 2}, {1, 0, 2}, {2, 0, 1}};
  if (party < 0 || party > 2) throw std::invalid_argument("lift_n: party must be 0, 1 or 2");
  return qkernel::permute_qubits(base, std::span<const int>(perms[party], 3));
}

DualCertificate appendix_dual_certificate(HcReading reading) {
  const double s = sqrt17();
  const double ps = appendix_p_star();
  const ComplexMatrix n = (1.0 + 5.0 / (3.0 * s)) * ps / 2.0 * ketbra("00", "00") +
                          (1.0 - s) * ps / 12.0 * (ketbra("01", "01") + ketbra("10", "10")) -
                          (1.0 + 11.0 / s) * ps / 6.0 * (ketbra("01", "10") + ketbra("10", "01")) +
                          2.0 * (1.0 / 3.0 + 1.0 / s) * ps * ketbra("11", "11");

  const ComplexMatrix bracket = -ketbra("000", "000") + ketbra("000", "110") + ketbra("000", "101");
  const ComplexMatrix hc_bracket = reading == HcReading::WholeBracket
                                       ? ComplexMatrix(bracket + bracket.adjoint())
                                       : ComplexMatrix(bracket + ketbra("110", "000") + ketbra("101", "000"));
  const ComplexVector v = qkernel::basis_ket("001") + qkernel::basis_ket("010");
  const ComplexMatrix corner = ketbra("001", "111") + ketbra("010", "111");
  const ComplexMatrix q = (1.0 + 5.0 / (3.0 * s)) * ps / 4.0 * hc_bracket -
                          (1.0 / 3.0 - 1.0 / s) * ps * v * v.adjoint() +
                          4.0 / (3.0 * s) * ps * (corner + corner.adjoint()) -
                          (3.0 / 5.0 - 1.0 / (3.0 * s)) * ps / 2.0 * (ketbra("101", "101") + ketbra("110", "110")) +
                          (1.0 / 5.0 - 7.0 / (3.0 * s)) * ps / 4.0 * (ketbra("101", "110") + ketbra("110", "101")) -
                          2.0 * (1.0 / 3.0 + 1.0 / s) * ps * ketbra("111", "111");

  DualCertificate c;
  static const int swap_ab[3] = {1, 0, 2};
  static const int swap_ac[3] = {2, 1, 0};
  c.n_x = {n, n, n};
  c.q_x = {q, qkernel::permute_qubits(q, swap_ab), qkernel::permute_qubits(q, swap_ac)};
  c.claimed_objective = ps;
  c.origin = reading == HcReading::WholeBracket ? "appendix (h.c. of the whole bracket)"
                                                : "appendix (h.c. of off-diagonal terms only)";
  return c;
}

CertResult verify_dual_certificate(const DualCertificate& c, double tol) {
  CertResult out;
  out.kind = "dual-sdp";
  out.n = 3;
  out.p_sep = p_sep(3);
  for (int x = 0; x < 3; ++x) {
    if (c.n_x[x].rows() != 4 || c.n_x[x].cols() != 4 || c.q_x[x].rows() != 8 || c.q_x[x].cols() != 8)
      throw std::invalid_argument("verify_dual_certificate: N_X must be 4x4 and Q_X 8x8");
  }
  const ComplexMatrix m = witness_m(3);
  ComplexMatrix sum_n = ComplexMatrix::Zero(4, 4);
  ComplexMatrix total = ComplexMatrix::Zero(8, 8);
  for (int x = 0; x < 3; ++x) {
    const std::string name = party_name(x);
    out.residuals.push_back({"hermitian_N_" + name, hermiticity(c.n_x[x]), 1e-12});
    out.residuals.push_back({"hermitian_Q_" + name, hermiticity(c.q_x[x]), 1e-12});
    const double qmax = max_eigenvalue(c.q_x[x]);
    out.values.emplace_back("Q_" + name + "_max_eigenvalue", qmax);
    out.residuals.push_back({"Q_" + name + "_nsd", std::max(0.0, qmax), tol});
    sum_n += c.n_x[x];
    total += lift_n(c.n_x[x], x) + qkernel::partial_transpose(c.q_x[x], x);
  }
  const Complex trace_mn = (m * sum_n).trace();
  out.values.emplace_back("trace_M_sumN", trace_mn.real());
  out.residuals.push_back({"trace_M_sumN", std::abs(trace_mn + 1.0), tol});
  const double lmin = qkernel::min_eigenvalue(total);
  out.values.emplace_back("dual_psd_min_eigenvalue", lmin);
  out.residuals.push_back({"dual_psd", std::max(0.0, -lmin), tol});
  const double objective = 0.25 * sum_n.trace().real();
  out.values.emplace_back("objective", objective);
  out.values.emplace_back("claimed_objective", c.claimed_objective);
  out.residuals.push_back({"objective_vs_claimed", std::abs(objective - c.claimed_objective), tol});
  out.p_star = objective;
  for (int x = 0; x < 3; ++x) {
    out.matrices.emplace_back(std::string("N_") + party_name(x), c.n_x[x]);
    out.matrices.emplace_back(std::string("Q_") + party_name(x), c.q_x[x]);
  }
  out.notes.push_back("origin: " + c.origin);
  if (out.all_passed()) {
    out.verdict = Verdict::CertifiedEntangled;
    out.notes.push_back("no PPT completion exists for p above the objective");
  } else {
    out.verdict = Verdict::NotCertified;
    for (const Residual& r : out.residuals)
      if (!r.ok()) out.notes.push_back("failed " + r.name + ": residual " + std::to_string(r.value));
  }
  return out;
}

DualCertificate dual_from_solution(const MarginalSdp& m, const sdp::SdpOutcome& out) {
  if (m.n != 3 || m.formulation != Formulation::Full)
    throw std::invalid_argument("dual_from_solution: needs the n = 3 full program");
  if (out.duals.size() != m.problem.blocks.size() || out.eq_duals.size() != static_cast<Eigen::Index>(m.row_pair.size()))
    throw std::invalid_argument("dual_from_solution: outcome does not match the program");
  DualCertificate c;
  for (int x = 0; x < 3; ++x) c.n_x[x] = ComplexMatrix::Zero(4, 4);
  for (std::size_t r = 0; r < m.row_pair.size(); ++r) {
    const auto [i, j] = m.row_pair[r];
    const int party = 3 - i - j;
    c.n_x[party] += out.eq_duals(static_cast<Eigen::Index>(r)) * m.row_basis[r];
  }
  for (std::size_t k = 0; k < m.ppt_cuts.size(); ++k) {
    const int party = m.ppt_cuts[k].front();
    c.q_x[party] = -sdp::dual_from_embedding(out.duals[k + 1]);
  }
  c.claimed_objective = out.dual_objective;
  c.origin = "solver multipliers";
  return c;
}

Sandwich weak_duality_sandwich(const CertResult& primal, const CertResult& dual) {
  Sandwich s;
  s.primal = primal.value("objective");
  s.dual = dual.value("objective");
  s.primal_feasible = primal.all_passed();
  s.dual_feasible = dual.all_passed();
  return s;
}

}  // namespace margcert::entcert

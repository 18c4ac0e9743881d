#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "margcert/boxes.hpp"
#include "margcert/entcert.hpp"
#include "margcert/qkernel.hpp"
#include "oracles.hpp"

using namespace margcert;
namespace ec = margcert::entcert;

namespace {

const double kPStar3 = 3.0 / (2.0 + std::sqrt(17.0));

oracle::CM reduced(int n, double p) { return oracle::partial_trace(oracle::noisy_w(n, p), n, {0, 1}); }

ec::PStarResult solve(int n, ec::Formulation f, ec::SolveMode mode = ec::SolveMode::Joint) {
  ec::PStarOptions o;
  o.formulation_set = true;
  o.formulation = f;
  o.mode = mode;
  return ec::solve_pstar(n, o);
}

}  // namespace

TEST(Ppt, Examples) {
  EXPECT_GE(ec::ppt_min_eig(ec::DensityMatrix(qkernel::projector(qkernel::basis_ket("010"))), {0}), 0.0);
  const ec::DensityMatrix ghz(qkernel::projector(qkernel::ghz_ket(3)));
  EXPECT_LT(ec::ppt_min_eig(ghz, {0}), 0.0);
  EXPECT_NEAR(ec::ppt_min_eig(ghz, {0}), oracle::min_eig(oracle::partial_transpose(ghz.matrix(), 3, {0})), 1e-12);
  EXPECT_THROW(ec::ppt_min_eig(ghz, {0, 1, 2}), std::invalid_argument);
  EXPECT_THROW(ec::ppt_min_eig(ghz, std::span<const int>{}), std::invalid_argument);
}

TEST(Ppt, ReducedStateChangesSignAtSeparabilityPoint) {
  const double ps = 3.0 / (1.0 + 2.0 * std::sqrt(5.0));
  EXPECT_NEAR(ps, 0.5482, 1e-4);
  EXPECT_GT(ec::ppt_min_eig(qkernel::reduced_two_party(3, ps - 1e-6), {1}), 0.0);
  EXPECT_LT(ec::ppt_min_eig(qkernel::reduced_two_party(3, ps + 1e-6), {1}), 0.0);
}

TEST(Horodecki, Examples) {
  EXPECT_NEAR(ec::horodecki_m(ec::DensityMatrix(qkernel::identity(4) / 4.0)), 0.0, 1e-14);
  EXPECT_NEAR(ec::horodecki_m(ec::DensityMatrix(qkernel::projector(qkernel::psi_plus()))), 2.0, 1e-12);
}

TEST(Horodecki, ReducedStateClosedForm) {
  const oracle::CM pauli[3] = {qkernel::pauli_x(), qkernel::pauli_y(), qkernel::pauli_z()};
  for (int k = 0; k <= 20; ++k) {
    const double p = k / 20.0;
    const oracle::CM r = reduced(3, p);
    // T from direct Pauli traces: diag(2p/3, 2p/3, -p/3).
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double t = (r * oracle::kron(pauli[i], pauli[j])).trace().real();
        const double expect = i != j ? 0.0 : (i < 2 ? 2.0 * p / 3.0 : -p / 3.0);
        EXPECT_NEAR(t, expect, 1e-14);
      }
    EXPECT_NEAR(ec::horodecki_m(qkernel::reduced_two_party(3, p)), 8.0 * p * p / 9.0, 1e-12);
  }
}

TEST(Horodecki, RejectsWrongDimension) {
  EXPECT_THROW(ec::horodecki_m(qkernel::noisy_w(3, 0.5)), std::invalid_argument);
}

TEST(Horodecki, ViolationImpliesChshViolation) {
  std::mt19937 rng(50);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  for (int trial = 0; trial < 50; ++trial) {
    // Mix a random pure state with a Bell state so that a good share exceed the criterion.
    const oracle::CM psi = oracle::random_state(4, rng);
    const double w = u(rng);
    const oracle::CM rho = w * oracle::proj((oracle::ket("01") + oracle::ket("10")) / std::sqrt(2.0)) + (1 - w) * psi;
    const ec::DensityMatrix dm(rho);
    const double m = ec::horodecki_m(dm);
    const ec::ChshSettings s = ec::optimal_chsh_settings(dm);
    const double chsh = boxes::chsh_max(ec::two_qubit_box(dm, s.a, s.b));
    EXPECT_NEAR(s.predicted, 2.0 * std::sqrt(m), 1e-9);
    EXPECT_NEAR(chsh, s.predicted, 1e-9);
    if (m > 1.0) {
      EXPECT_GT(chsh, 2.0);
      ++tested;
    }
  }
  EXPECT_GT(tested, 10);
}

TEST(PSep, TableValues) {
  const double table[5] = {0.5482, 0.7071, 0.8050, 0.8640, 0.9009};
  for (int n = 3; n <= 7; ++n) {
    EXPECT_NEAR(ec::p_sep(n), table[n - 3], 1e-4);
    EXPECT_NEAR(ec::p_sep(n), ec::p_sep_bisection(n), 1e-9);
  }
  EXPECT_NEAR(ec::p_sep(3), 3.0 / (1.0 + 2.0 * std::sqrt(5.0)), 1e-15);
  EXPECT_THROW(ec::p_sep(2), std::invalid_argument);
}

TEST(PSep, SixPartyBisectionAgainstOracle) {
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (oracle::min_eig(oracle::partial_transpose(reduced(6, mid), 2, {1})) >= 0.0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(lo, 0.8640, 1e-4);
  EXPECT_NEAR(ec::p_sep_bisection(6), lo, 1e-9);
}

TEST(PSep, PptMarginIsMonotone) {
  for (int n = 3; n <= 7; ++n) {
    double prev = 1.0;
    for (int k = 0; k <= 20; ++k) {
      const double v = ec::ppt_min_eig(qkernel::reduced_two_party(n, k / 20.0), {1});
      EXPECT_LE(v, prev + 1e-14) << "n=" << n << " k=" << k;
      prev = v;
    }
  }
}

TEST(WitnessM, ReducedStateDecomposition) {
  for (int n = 3; n <= 7; ++n)
    for (double p : {0.0, 0.3, 1.0})
      EXPECT_LT((reduced(n, p) - (oracle::CM::Identity(4, 4) / 4.0 + p * ec::witness_m(n))).cwiseAbs().maxCoeff(),
                1e-12);
}

TEST(MarginalSdp, ThreePartyStructure) {
  const ec::MarginalSdp m = ec::build_marginal_sdp(3);
  EXPECT_EQ(m.formulation, ec::Formulation::Full);
  ASSERT_EQ(m.problem.blocks.size(), 4u);
  for (const auto& b : m.problem.blocks) EXPECT_EQ(b.dim, 16);  // 8x8 Hermitian, embedded
  EXPECT_EQ(m.problem.eq_matrix.rows(), 48);
  EXPECT_EQ(m.ppt_cuts.size(), 3u);
  EXPECT_THROW(ec::build_marginal_sdp(2), std::invalid_argument);
  EXPECT_THROW(ec::build_marginal_sdp(8), std::invalid_argument);
}

TEST(MarginalSdp, StateParameterRoundTrip) {
  const ec::MarginalSdp m = ec::build_marginal_sdp(3);
  const oracle::CM rho = oracle::noisy_w(3, 0.4);
  const sdp::Vector y = m.parameters(rho, 0.4);
  EXPECT_LT((m.state(y) - rho).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(m.constraint_residual(y), 1e-14);
  // Wrong p breaks the marginal rows.
  EXPECT_GT(m.constraint_residual(m.parameters(rho, 0.5)), 1e-3);
}

TEST(MarginalSdp, AppendixStateSatisfiesConstraints) {
  const ec::MarginalSdp m = ec::build_marginal_sdp(3);
  const ec::DensityMatrix rho = ec::appendix_primal_state(kPStar3);
  EXPECT_LT(m.constraint_residual(m.parameters(rho.matrix(), kPStar3)), 1e-9);
}

TEST(SolvePStar, ThreeParties) {
  const ec::PStarResult r = solve(3, ec::Formulation::Full);
  ASSERT_EQ(r.status, sdp::SdpStatus::Optimal);
  EXPECT_NEAR(r.p_star, 0.4899, 1e-4);
  EXPECT_NEAR(r.p_star, kPStar3, 1e-6);
  EXPECT_LE(r.lower, r.upper + 1e-6);
  EXPECT_LE(r.lower - 1e-5, kPStar3);
  EXPECT_GE(r.upper + 1e-5, kPStar3);
  EXPECT_EQ(r.cert.verdict, ec::Verdict::CertifiedEntangled);
  EXPECT_LT(r.p_star, ec::p_sep(3));
  // The optimal state is a valid PPT state with the prescribed marginals.
  EXPECT_GE(oracle::min_eig(r.state), -1e-7);
  for (int q = 0; q < 3; ++q) EXPECT_GE(oracle::min_eig(oracle::partial_transpose(r.state, 3, {q})), -1e-7);
  EXPECT_LT((oracle::partial_trace(r.state, 3, {1, 2}) - reduced(3, r.p_star)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SolvePStar, FourParties) {
  const ec::PStarResult r = solve(4, ec::Formulation::Full);
  ASSERT_EQ(r.status, sdp::SdpStatus::Optimal);
  EXPECT_NEAR(r.p_star, 0.6180, 1e-3);
  EXPECT_LT(r.p_star, ec::p_sep(4));
}

TEST(SolvePStar, SymmetricMatchesFull) {
  for (int n : {3, 4}) {
    const ec::PStarResult f = solve(n, ec::Formulation::Full), s = solve(n, ec::Formulation::Symmetric);
    ASSERT_EQ(f.status, sdp::SdpStatus::Optimal);
    ASSERT_EQ(s.status, sdp::SdpStatus::Optimal);
    EXPECT_NEAR(f.p_star, s.p_star, 1e-6) << n;
  }
}

TEST(SolvePStar, BisectionMatchesJoint) {
  const ec::PStarResult b = solve(3, ec::Formulation::Full, ec::SolveMode::Bisection);
  EXPECT_EQ(b.mode, ec::SolveMode::Bisection);
  EXPECT_NEAR(b.p_star, kPStar3, 2e-6);
  EXPECT_LE(b.lower, b.upper);
  EXPECT_GT(b.solves, 5);
}

TEST(SolvePStar, WindowIsNonemptyForClosedForms) {
  const double table[5] = {0.4899, 0.6180, 0.7464, 0.8279, 0.8787};
  for (int n = 3; n <= 7; ++n) EXPECT_LT(table[n - 3], ec::p_sep(n));
}

TEST(CertifyWState, Verdicts) {
  EXPECT_EQ(ec::certify_wstate(3, 0.52).verdict, ec::Verdict::CertifiedEntangled);
  EXPECT_EQ(ec::certify_wstate(3, 0.45).verdict, ec::Verdict::NotCertified);
  EXPECT_EQ(ec::certify_wstate(3, 1.2).verdict, ec::Verdict::InfeasibleMarginals);
  const ec::CertResult c = ec::certify_wstate(3, 0.52);
  EXPECT_GT(c.value("marginal_ppt_min_eig"), 0.0);
  EXPECT_LT(c.value("feasibility_margin"), 0.0);
  EXPECT_THROW(c.value("missing"), std::out_of_range);
}

TEST(AppendixPrimal, ValidAtPStar) {
  const ec::DensityMatrix rho = ec::appendix_primal_state(ec::appendix_p_star());
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-14);
  for (std::vector<int> keep : {std::vector<int>{0, 1}, {0, 2}, {1, 2}})
    EXPECT_LT((oracle::partial_trace(rho.matrix(), 3, keep) - reduced(3, kPStar3)).cwiseAbs().maxCoeff(), 1e-12);
  for (int q = 0; q < 3; ++q) EXPECT_GE(oracle::min_eig(oracle::partial_transpose(rho.matrix(), 3, {q})), -1e-10);
  EXPECT_GE(oracle::min_eig(rho.matrix()), -1e-10);
  const ec::CertResult c = ec::verify_primal_state(rho.matrix(), ec::appendix_p_star());
  EXPECT_TRUE(c.all_passed());
  EXPECT_THROW(ec::appendix_primal_state(0.7), std::invalid_argument);
}

TEST(AppendixPrimal, ConstantsInHighPrecision) {
  EXPECT_NEAR(ec::appendix_p_star(), kPStar3, 1e-15);
  EXPECT_NEAR(ec::sqrt17() * ec::sqrt17(), 17.0, 1e-13);
}

TEST(AppendixDual, PrintedEntries) {
  const ec::DualCertificate c = ec::appendix_dual_certificate();
  const double ps = kPStar3, s17 = std::sqrt(17.0);
  for (const auto& n : c.n_x) {
    EXPECT_LT((n - n.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(n(0, 0).real(), (1.0 + 5.0 / (3.0 * s17)) * ps / 2.0, 1e-14);
  }
  EXPECT_NEAR(c.q_x[0](0, 6).real(), (1.0 + 5.0 / (3.0 * s17)) * ps / 4.0, 1e-14);
  EXPECT_NEAR(c.q_x[0](6, 0).real(), (1.0 + 5.0 / (3.0 * s17)) * ps / 4.0, 1e-14);
  double trace_sum = 0.0;
  for (const auto& n : c.n_x) trace_sum += n.trace().real();
  EXPECT_NEAR(trace_sum / 4.0, c.claimed_objective, 1e-12);
}

TEST(AppendixDual, VerifiesAndPinsPStar) {
  const ec::CertResult d = ec::verify_dual_certificate(ec::appendix_dual_certificate());
  EXPECT_TRUE(d.all_passed());
  EXPECT_NEAR(d.value("objective"), kPStar3, 1e-10);
  const ec::CertResult p = ec::verify_primal_state(ec::appendix_primal_state(kPStar3).matrix(), kPStar3);
  const ec::Sandwich s = ec::weak_duality_sandwich(p, d);
  EXPECT_TRUE(s.pins(1e-10));
  EXPECT_LE(s.primal, s.dual + 1e-12);
}

TEST(AppendixDual, OffDiagonalReadingFails) {
  const ec::CertResult d = ec::verify_dual_certificate(ec::appendix_dual_certificate(ec::HcReading::OffDiagonalOnly));
  EXPECT_FALSE(d.all_passed());
  EXPECT_FALSE(d.residual("Q_A_nsd")->ok());
}

TEST(AppendixDual, ZeroCertificateFailsTraceConstraint) {
  ec::DualCertificate z;
  for (auto& n : z.n_x) n = oracle::CM::Zero(4, 4);
  for (auto& q : z.q_x) q = oracle::CM::Zero(8, 8);
  const ec::CertResult d = ec::verify_dual_certificate(z);
  EXPECT_FALSE(d.all_passed());
  EXPECT_NEAR(d.residual("trace_M_sumN")->value, 1.0, 1e-15);
}

TEST(AppendixDual, DualPsdRecheckedWithQZero) {
  ec::DualCertificate c = ec::appendix_dual_certificate();
  for (auto& q : c.q_x) q = oracle::CM::Zero(8, 8);
  oracle::CM sum = oracle::CM::Zero(8, 8);
  for (int x = 0; x < 3; ++x) sum += ec::lift_n(c.n_x[static_cast<std::size_t>(x)], x);
  const ec::CertResult d = ec::verify_dual_certificate(c);
  EXPECT_NEAR(d.value("dual_psd_min_eigenvalue"), oracle::min_eig(sum), 1e-10);
}

TEST(AppendixDual, LiftPlacesIdentityOnParty) {
  std::mt19937 rng(2);
  const oracle::CM n = oracle::random_hermitian(4, rng), id = oracle::CM::Identity(2, 2);
  EXPECT_LT((ec::lift_n(n, 0) - oracle::kron(id, n)).cwiseAbs().maxCoeff(), 1e-15);
  // Party B: N acts on (A, C). Compare traces against product operators.
  const oracle::CM l = ec::lift_n(n, 1);
  const oracle::CM pauli[2] = {qkernel::pauli_x(), qkernel::pauli_z()};
  for (const auto& s : pauli)
    for (const auto& t : pauli)
      EXPECT_NEAR((l * oracle::kron(oracle::kron(s, id), t)).trace().real(), 2.0 * (n * oracle::kron(s, t)).trace().real(),
                  1e-12);
}

TEST(SolverDual, ExtractedCertificateVerifies) {
  const ec::MarginalSdp m = ec::build_marginal_sdp(3, ec::Formulation::Full);
  const sdp::SdpOutcome out = sdp::solve(m.problem);
  ASSERT_EQ(out.status, sdp::SdpStatus::Optimal);
  const ec::DualCertificate c = ec::dual_from_solution(m, out);
  const ec::CertResult d = ec::verify_dual_certificate(c, 1e-6);
  EXPECT_NEAR(d.value("objective"), kPStar3, 1e-5);
  for (const char* x : {"A", "B", "C"}) EXPECT_LE(d.value(std::string("Q_") + x + "_max_eigenvalue"), 1e-6);
  EXPECT_NEAR(d.value("trace_M_sumN"), -1.0, 1e-6);
  // Weak duality against the exact primal state.
  EXPECT_GE(d.value("objective") + 1e-6, kPStar3);
}

TEST(Ghz, Demo) {
  const ec::CertResult c = ec::ghz_marginal_demo();
  EXPECT_TRUE(c.all_passed());
  for (const char* x : {"A", "B", "C"}) {
    EXPECT_NEAR(c.value(std::string("ghz_ppt_min_eig_") + x), -0.5, 1e-12);
    EXPECT_GE(c.value(std::string("mixed_ppt_min_eig_") + x), 0.0);
  }
  const oracle::CM ghz = oracle::proj((oracle::ket("000") + oracle::ket("111")) / std::sqrt(2.0));
  const oracle::CM target = 0.5 * (oracle::proj(oracle::ket("00")) + oracle::proj(oracle::ket("11")));
  EXPECT_LT((oracle::partial_trace(ghz, 3, {0, 2}) - target).cwiseAbs().maxCoeff(), 1e-15);
}

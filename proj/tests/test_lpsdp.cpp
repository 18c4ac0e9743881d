#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "margcert/boxes.hpp"
#include "margcert/lp.hpp"
#include "margcert/polytopes.hpp"
#include "margcert/sdp.hpp"
#include "oracles.hpp"

using namespace margcert;

namespace {

// Columns are the 64 local deterministic boxes; last row is normalization.
lp::LinearProgram local_program(const TripartiteBox& target) {
  const auto& family = polytopes::local_vertices();
  lp::LinearProgram prog;
  prog.a_eq = lp::Matrix::Zero(65, 64);
  prog.b_eq = lp::Vector::Zero(65);
  for (int v = 0; v < 64; ++v) {
    for (int i = 0; i < 64; ++i) prog.a_eq(i, v) = family.vertices[static_cast<std::size_t>(v)].data()[i];
    prog.a_eq(64, v) = 1.0;
  }
  for (int i = 0; i < 64; ++i) prog.b_eq(i) = target.data()[i];
  prog.b_eq(64) = 1.0;
  prog.objective = lp::Vector::Zero(64);
  return prog;
}

sdp::Block diag_block(double c0, double c1, double a0, double a1, int param) {
  sdp::Block b;
  b.dim = 2;
  b.constant.add(0, 0, c0);
  b.constant.add(1, 1, c1);
  sdp::SymSparse a;
  a.add(0, 0, a0);
  a.add(1, 1, a1);
  b.terms.push_back({param, a});
  return b;
}

}  // namespace

TEST(Lp, SingleVariable) {
  // maximize x  s.t.  x + s = 1, x, s >= 0.
  lp::LinearProgram prog;
  prog.objective = lp::Vector::Zero(2);
  prog.objective(0) = 1.0;
  prog.sense = lp::Sense::Maximize;
  prog.a_eq = lp::Matrix::Ones(1, 2);
  prog.b_eq = lp::Vector::Ones(1);
  const lp::LpOutcome out = lp::solve(prog);
  ASSERT_EQ(out.status, lp::LpStatus::Optimal);
  EXPECT_NEAR(out.value, 1.0, 1e-12);
  EXPECT_TRUE(lp::verify_lp_certificate(prog, out).valid);
}

TEST(Lp, Unbounded) {
  lp::LinearProgram prog;
  prog.objective = lp::Vector::Ones(2);
  prog.sense = lp::Sense::Maximize;
  prog.a_eq = lp::Matrix(1, 2);
  prog.a_eq << 1.0, -1.0;
  prog.b_eq = lp::Vector::Zero(1);
  EXPECT_EQ(lp::solve(prog).status, lp::LpStatus::Unbounded);
}

TEST(Lp, RejectsBadDimensions) {
  lp::LinearProgram prog;
  prog.objective = lp::Vector::Ones(3);
  prog.a_eq = lp::Matrix::Ones(1, 2);
  prog.b_eq = lp::Vector::Ones(1);
  EXPECT_THROW(lp::solve(prog), std::invalid_argument);
  prog.objective = lp::Vector::Ones(2);
  prog.b_eq(0) = std::nan("");
  EXPECT_THROW(lp::solve(prog), std::invalid_argument);
}

TEST(Lp, UniformBoxIsLocal) {
  const lp::LinearProgram prog = local_program(boxes::uniform_box());
  const lp::LpOutcome out = lp::solve(prog);
  ASSERT_EQ(out.status, lp::LpStatus::Optimal);
  EXPECT_NEAR(out.primal.sum(), 1.0, 1e-9);
  EXPECT_GE(out.primal.minCoeff(), -1e-12);
  EXPECT_LT((prog.a_eq * out.primal - prog.b_eq).cwiseAbs().maxCoeff(), 1e-9);
  const lp::CertificateCheck check = lp::verify_lp_certificate(prog, out, true);
  EXPECT_TRUE(check.valid);
  EXPECT_TRUE(check.exact_valid);
}

TEST(Lp, Box29IsNotLocalAndFarkasCertificateChecks) {
  const lp::LinearProgram prog = local_program(boxes::box29());
  const lp::LpOutcome out = lp::solve(prog);
  ASSERT_EQ(out.status, lp::LpStatus::Infeasible);
  EXPECT_GT(out.phase1_value, 1e-8);
  // Inner-product check of the Farkas conditions done here by hand.
  const lp::Vector aty = prog.a_eq.transpose() * out.dual;
  EXPECT_LE(aty.maxCoeff(), 1e-9);
  EXPECT_GT(prog.b_eq.dot(out.dual), 1e-6);
  const lp::CertificateCheck check = lp::verify_lp_certificate(prog, out, true);
  EXPECT_TRUE(check.valid);
  EXPECT_TRUE(check.exact_checked);
  EXPECT_TRUE(check.exact_valid);
}

TEST(Lp, TamperedCertificateIsRejected) {
  const lp::LinearProgram prog = local_program(boxes::box29());
  lp::LpOutcome out = lp::solve(prog);
  ASSERT_EQ(out.status, lp::LpStatus::Infeasible);
  out.dual = -out.dual;
  EXPECT_FALSE(lp::verify_lp_certificate(prog, out).valid);
}

TEST(Lp, RandomLocalBoxWeightsReproduceBox) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(64);
  for (int trial = 0; trial < 20; ++trial) {
    double total = 0.0;
    for (double& v : w) total += (v = u(rng) < 0.2 ? u(rng) : 0.0);
    if (total == 0.0) continue;
    for (double& v : w) v /= total;
    const TripartiteBox b = polytopes::mixture(polytopes::local_vertices(), w);
    const lp::LinearProgram prog = local_program(b);
    const lp::LpOutcome out = lp::solve(prog);
    ASSERT_EQ(out.status, lp::LpStatus::Optimal);
    EXPECT_LT((prog.a_eq * out.primal - prog.b_eq).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Lp, PlantedOptimaAreRecovered) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 4 + trial % 5, k = 12 + trial % 7;
    lp::Matrix a(m, k);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) a(i, j) = g(rng);
    // Optimal x0 is supported on the first m columns; complementary slackness
    // with dual y and reduced costs s >= 0 vanishing on that support makes it optimal.
    lp::Vector x0 = lp::Vector::Zero(k), y(m), s = lp::Vector::Zero(k);
    for (int j = 0; j < m; ++j) x0(j) = 0.5 + u(rng);
    for (int i = 0; i < m; ++i) y(i) = g(rng);
    for (int j = m; j < k; ++j) s(j) = 0.1 + u(rng);
    lp::LinearProgram prog;
    prog.a_eq = a;
    prog.b_eq = a * x0;
    prog.objective = a.transpose() * y + s;
    const lp::LpOutcome out = lp::solve(prog);
    ASSERT_EQ(out.status, lp::LpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(out.value, prog.objective.dot(x0), 1e-8 * (1.0 + std::abs(out.value)));
    EXPECT_LE(out.primal_residual, 1e-9);
    EXPECT_LE(std::abs(out.duality_gap), 1e-8 * (1.0 + std::abs(out.value)));
  }
}

TEST(Lp, DeterministicOutput) {
  const lp::LinearProgram prog = polytopes::pi_prime_membership_program(boxes::marginals(boxes::box29()));
  const lp::LpOutcome a = lp::solve(prog), b = lp::solve(prog);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.iterations, b.iterations);
  ASSERT_EQ(a.primal.size(), b.primal.size());
  for (Eigen::Index i = 0; i < a.primal.size(); ++i) EXPECT_EQ(a.primal(i), b.primal(i));
  for (Eigen::Index i = 0; i < a.dual.size(); ++i) EXPECT_EQ(a.dual(i), b.dual(i));
}

TEST(Lp, LowerBoundsAreHonored) {
  // minimize x0 + x1 with x0 + x1 = 3, x0 >= 1, x1 >= 1.5.
  lp::LinearProgram prog;
  prog.objective = lp::Vector::Ones(2);
  prog.a_eq = lp::Matrix::Ones(1, 2);
  prog.b_eq = lp::Vector::Constant(1, 3.0);
  prog.lower = lp::Vector(2);
  prog.lower << 1.0, 1.5;
  const lp::LpOutcome out = lp::solve(prog);
  ASSERT_EQ(out.status, lp::LpStatus::Optimal);
  EXPECT_GE(out.primal(0), 1.0 - 1e-12);
  EXPECT_GE(out.primal(1), 1.5 - 1e-12);
  prog.b_eq(0) = 2.0;
  EXPECT_EQ(lp::solve(prog).status, lp::LpStatus::Infeasible);
}

TEST(Sdp, TwoByTwoDiagonal) {
  // maximize t  s.t.  diag(1 - t, 1 + t) >= 0.
  sdp::SdpProblem prob;
  prob.num_params = 1;
  prob.objective = sdp::Vector::Ones(1);
  prob.blocks.push_back(diag_block(1.0, 1.0, -1.0, 1.0, 0));
  const sdp::SdpOutcome out = sdp::solve(prob);
  ASSERT_EQ(out.status, sdp::SdpStatus::Optimal);
  EXPECT_NEAR(out.y(0), 1.0, 1e-6);
  EXPECT_LE(out.primal_objective, out.dual_objective + 1e-6);
}

TEST(Sdp, EqualityConstraint) {
  // maximize y0 + y1  s.t.  y0, y1 <= 1 blockwise and y0 - y1 = 0.5.
  sdp::SdpProblem prob;
  prob.num_params = 2;
  prob.objective = sdp::Vector::Ones(2);
  prob.blocks.push_back(diag_block(1.0, 3.0, -1.0, 1.0, 0));
  prob.blocks.push_back(diag_block(1.0, 3.0, -1.0, 1.0, 1));
  prob.eq_matrix = sdp::Matrix(1, 2);
  prob.eq_matrix << 1.0, -1.0;
  prob.eq_rhs = sdp::Vector::Constant(1, 0.5);
  const sdp::SdpOutcome out = sdp::solve(prob);
  ASSERT_EQ(out.status, sdp::SdpStatus::Optimal);
  EXPECT_NEAR(out.y(0), 1.0, 1e-6);
  EXPECT_NEAR(out.y(1), 0.5, 1e-6);
  EXPECT_NEAR(out.primal_objective, 1.5, 1e-6);
}

TEST(Sdp, WeakDualityOnRandomProblems) {
  std::mt19937 rng(99);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 3 + trial % 4, params = 2 + trial % 3;
    sdp::SdpProblem prob;
    prob.num_params = params;
    prob.objective = sdp::Vector(params);
    for (int i = 0; i < params; ++i) prob.objective(i) = g(rng);
    sdp::Block b;
    b.dim = dim;
    for (int i = 0; i < dim; ++i) b.constant.add(i, i, 1.0);
    for (int p = 0; p < params; ++p) {
      sdp::SymSparse a;
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) a.add_symmetric(i, j, g(rng));
      b.terms.push_back({p, a});
    }
    // A norm ball on y keeps the problem bounded.
    sdp::Block ball;
    ball.dim = params + 1;
    for (int i = 0; i <= params; ++i) ball.constant.add(i, i, 1.0);
    for (int p = 0; p < params; ++p) {
      sdp::SymSparse a;
      a.add_symmetric(0, p + 1, 1.0);
      ball.terms.push_back({p, a});
    }
    prob.blocks = {b, ball};
    const sdp::SdpOutcome out = sdp::solve(prob);
    ASSERT_EQ(out.status, sdp::SdpStatus::Optimal) << "trial " << trial;
    EXPECT_LE(out.primal_objective, out.dual_objective + 1e-6);
    EXPECT_NEAR(out.primal_objective, prob.objective.dot(out.y), 1e-9);
    // Slack blocks recomputed from y must be PSD.
    for (std::size_t k = 0; k < prob.blocks.size(); ++k)
      EXPECT_GE(oracle::min_eig(prob.block_value(k, out.y).cast<std::complex<double>>()), -1e-7);
  }
}

TEST(Sdp, InfeasibleIsReported) {
  // diag(-1 + 0 y) can never be PSD.
  sdp::SdpProblem prob;
  prob.num_params = 1;
  prob.objective = sdp::Vector::Ones(1);
  prob.blocks.push_back(diag_block(-1.0, 1.0, 0.0, 1.0, 0));
  const sdp::SdpOutcome out = sdp::solve(prob);
  EXPECT_NE(out.status, sdp::SdpStatus::Optimal);
}

TEST(Sdp, ValidateRejectsMalformedProblems) {
  sdp::SdpProblem prob;
  prob.num_params = 1;
  prob.objective = sdp::Vector::Ones(2);
  prob.blocks.push_back(diag_block(1.0, 1.0, -1.0, 1.0, 0));
  EXPECT_THROW(prob.validate(), std::invalid_argument);
}

TEST(Embedding, HermitianRoundTrip) {
  std::mt19937 rng(4);
  const oracle::CM h = oracle::random_hermitian(4, rng);
  std::vector<std::tuple<int, int, std::complex<double>>> entries;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) entries.emplace_back(i, j, h(i, j));
  const sdp::Matrix s = sdp::embed_hermitian(entries, 4).dense(8);
  EXPECT_LT((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((sdp::hermitian_from_embedding(s) - h).cwiseAbs().maxCoeff(), 1e-15);
  // Spectrum of the embedding is the spectrum of h doubled.
  const Eigen::VectorXd ev = oracle::eigenvalues(s.cast<std::complex<double>>());
  const Eigen::VectorXd eh = oracle::eigenvalues(h);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(ev(2 * i), eh(i), 1e-12);
    EXPECT_NEAR(ev(2 * i + 1), eh(i), 1e-12);
  }
}

TEST(Embedding, DualPairing) {
  std::mt19937 rng(5);
  const oracle::CM h = oracle::random_hermitian(3, rng);
  std::vector<std::tuple<int, int, std::complex<double>>> entries;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) entries.emplace_back(i, j, h(i, j));
  const sdp::SymSparse e = sdp::embed_hermitian(entries, 3);
  std::normal_distribution<double> g;
  sdp::Matrix x(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) x(i, j) = g(rng);
  x = 0.5 * (x + x.transpose()).eval();
  EXPECT_NEAR(e.inner(x), (h * sdp::dual_from_embedding(x)).trace().real(), 1e-12);
}

TEST(MaxStep, Diagonal) {
  const sdp::Matrix m = sdp::Matrix::Identity(2, 2);
  sdp::Matrix d = sdp::Matrix::Zero(2, 2);
  d(0, 0) = -4.0;
  d(1, 1) = 1.0;
  EXPECT_NEAR(sdp::max_step(m, d), 0.25, 1e-12);
  EXPECT_TRUE(std::isinf(sdp::max_step(m, sdp::Matrix::Identity(2, 2))));
}

#pragma once

// Entanglement certification from two-party marginals: PPT and Horodecki
// tests, separability thresholds of noisy W reductions, the marginal
// compatibility SDP, and checks of analytic primal/dual certificates.

#include <array>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "margcert/boxes.hpp"
#include "margcert/qkernel.hpp"
#include "margcert/sdp.hpp"

namespace margcert::entcert {

using qkernel::DensityMatrix;

enum class Verdict { CertifiedEntangled, NotCertified, InfeasibleMarginals };

std::string to_string(Verdict v);

struct Residual {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;

  bool ok() const { return value <= tolerance; }
};

/// Verdict plus every number it rests on.
struct CertResult {
  Verdict verdict = Verdict::NotCertified;
  /// "dual-sdp", "primal-state", "lp-farkas" or "marginal-demo".
  std::string kind;
  int n = 3;
  double p_star = 0.0;
  double p_sep = 0.0;
  std::vector<Residual> residuals;
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::pair<std::string, ComplexMatrix>> matrices;
  std::vector<std::string> notes;

  bool all_passed() const;
  const Residual* residual(const std::string& name) const;
  double value(const std::string& name) const;
};

// ---------------------------------------------------------------- criteria

/// Minimum eigenvalue of rho^{T_S} for a nonempty proper subset S of qubits.
double ppt_min_eig(const DensityMatrix& rho, std::span<const int> subset);
double ppt_min_eig(const DensityMatrix& rho, std::initializer_list<int> subset);

/// T_ij = tr(rho sigma_i (x) sigma_j).
Eigen::Matrix3d correlation_matrix(const DensityMatrix& rho);

/// Sum of the two largest eigenvalues of T^T T.
double horodecki_m(const DensityMatrix& rho);

struct ChshSettings {
  std::array<std::array<double, 3>, 2> a;
  std::array<std::array<double, 3>, 2> b;
  /// 2 sqrt(t1^2 + t2^2) with t1 >= t2 the top singular values of T.
  double predicted = 0.0;
};

/// Settings attaining the Horodecki optimum for a two-qubit state.
ChshSettings optimal_chsh_settings(const DensityMatrix& rho);

/// P(ab|xy) for projective measurements along Bloch vectors.
BipartiteBox two_qubit_box(const DensityMatrix& rho, const std::array<std::array<double, 3>, 2>& a,
                           const std::array<std::array<double, 3>, 2>& b);

/// n / (4 - n + 2 sqrt(n^2 - 4n + 8)).
double p_sep(int n);

/// PPT boundary of reduced_two_party(n, .) found by interval halving.
double p_sep_bisection(int n, double tol = 1e-12);

/// Traceless part of the two-party reduction: rho_red(n, p) = I/4 + p M_n.
/// For n = 3 this is 2/3 |psi+><psi+| + 1/3 |00><00| - 1/4 I.
ComplexMatrix witness_m(int n = 3);

// -------------------------------------------------------------- marginal SDP

enum class Formulation { Full, Symmetric };
enum class PptCuts { SingleParty, AllBipartitions };

std::string to_string(Formulation f);
std::string to_string(PptCuts c);

/// maximize p  s.t.  rho >= 0,  tr_{rest} rho = rho_red(n, p) on every pair,
/// rho^{T_S} >= 0 on the chosen cuts.
///
/// Full: rho is a general Hermitian operator expanded in the basis E_aa,
/// E_ab + E_ba, i(E_ab - E_ba); blocks are embedded as real 2d x 2d matrices.
/// Symmetric: rho is real and invariant under qubit permutations; parameters
/// are indicators of permutation orbits of basis pairs (i, j), one PT block per
/// cut size and marginal rows on qubits (0, 1) only.
struct MarginalSdp {
  int n = 3;
  Formulation formulation = Formulation::Full;
  PptCuts cuts = PptCuts::AllBipartitions;
  sdp::SdpProblem problem;
  /// Index of p among the parameters.
  int p_index = 0;
  /// Qubit subsets carrying a PT block, in block order after the state block.
  std::vector<std::vector<int>> ppt_cuts;
  /// Qubit pair of every equality row.
  std::vector<std::pair<int, int>> row_pair;
  /// 4x4 Hermitian basis element of every equality row.
  std::vector<ComplexMatrix> row_basis;
  /// Entries (row, col, value) of the 2^n operator multiplying each parameter.
  std::vector<std::vector<std::tuple<int, int, Complex>>> param_entries;

  /// The 2^n operator encoded by a parameter vector.
  ComplexMatrix state(const sdp::Vector& y) const;
  /// Parameters of an operator (projected onto the formulation's subspace) at value p.
  sdp::Vector parameters(const ComplexMatrix& rho, double p) const;
  /// Largest equality residual |E y - f| at the given parameters.
  double constraint_residual(const sdp::Vector& y) const;
};

MarginalSdp build_marginal_sdp(int n, Formulation f, PptCuts cuts = PptCuts::AllBipartitions);
/// Full for n <= 5, Symmetric above.
MarginalSdp build_marginal_sdp(int n);

enum class SolveMode { Joint, Bisection };

std::string to_string(SolveMode m);

struct PStarOptions {
  SolveMode mode = SolveMode::Joint;
  /// Defaults to Full for n <= 5 and Symmetric otherwise when unset.
  bool formulation_set = false;
  Formulation formulation = Formulation::Full;
  PptCuts cuts = PptCuts::AllBipartitions;
  sdp::SdpOptions sdp;
  double bisection_tol = 1e-6;
};

struct PStarResult {
  int n = 3;
  double p_star = 0.0;
  /// Joint mode: primal and dual objectives. Bisection mode: last feasible
  /// and first infeasible p.
  double lower = 0.0;
  double upper = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  int solves = 0;
  double seconds = 0.0;
  Formulation formulation = Formulation::Full;
  PptCuts cuts = PptCuts::AllBipartitions;
  SolveMode mode = SolveMode::Joint;
  sdp::SdpStatus status = sdp::SdpStatus::NumericalFailure;
  /// Optimal state (joint mode).
  ComplexMatrix state;
  CertResult cert;
};

/// Solver trouble is reported through `status`; the caller decides.
PStarResult solve_pstar(int n, const PStarOptions& options = {});

/// Largest t with every PSD block >= t I at fixed p; feasible iff t >= 0.
/// Throws std::runtime_error if the solver fails.
double feasibility_margin(const MarginalSdp& m, double p, const sdp::SdpOptions& options = {});

/// Verdict for the reductions of rho_W(n, p): certified entangled when the
/// feasibility margin at p is negative.
CertResult certify_wstate(int n, double p, const sdp::SdpOptions& options = {});

// ------------------------------------------------------------- certificates

/// 3 / (2 + sqrt 17) evaluated with 50-digit arithmetic.
double appendix_p_star();
/// sqrt(17) evaluated with 50-digit arithmetic.
double sqrt17();

/// p/2 (|W><W| + |Wbar><Wbar|) + 3(1-p)/4 sigma + p/6 |000><000| + (3-5p)/12 |111><111|.
/// Throws std::invalid_argument outside [0, 3/5].
DensityMatrix appendix_primal_state(double p);

/// Feasibility of a three-qubit state for the n = 3 program at value p.
CertResult verify_primal_state(const ComplexMatrix& rho, double p, double tol = 1e-9);

struct DualCertificate {
  std::array<ComplexMatrix, 3> n_x;
  std::array<ComplexMatrix, 3> q_x;
  double claimed_objective = 0.0;
  std::string origin;
};

/// How "(... + h.c.)" in the printed Q_A is expanded.
enum class HcReading {
  /// X + X^dagger of the whole bracket (the diagonal term doubles).
  WholeBracket,
  /// Only the off-diagonal terms get a conjugate partner.
  OffDiagonalOnly
};

/// The printed N_X, Q_A of the appendix, with Q_B, Q_C by party permutation.
DualCertificate appendix_dual_certificate(HcReading reading = HcReading::WholeBracket);

/// 1_X (x) N_X as an 8x8 operator: identity on party X, N_X on the other two in order.
ComplexMatrix lift_n(const ComplexMatrix& n_x, int party);

/// Checks Q_X <= 0, tr(M sum N) = -1, sum 1 (x) N + Q^{T_X} >= 0 and the
/// objective 1/4 tr(sum N); each residual is itemized.
CertResult verify_dual_certificate(const DualCertificate& c, double tol = 1e-8);

/// Dual certificate read off the multipliers of a solved n = 3 Full program.
DualCertificate dual_from_solution(const MarginalSdp& m, const sdp::SdpOutcome& out);

struct Sandwich {
  double primal = 0.0;
  double dual = 0.0;
  bool primal_feasible = false;
  bool dual_feasible = false;
  double gap() const { return dual - primal; }
  bool pins(double tol) const { return primal_feasible && dual_feasible && gap() >= -tol && gap() <= tol; }
};

Sandwich weak_duality_sandwich(const CertResult& primal, const CertResult& dual);

// -------------------------------------------------------------------- GHZ

/// GHZ and (|000><000| + |111><111|)/2 share all two-party marginals; the
/// marginal is separable, GHZ is NPT on every cut and the mixture is PPT.
CertResult ghz_marginal_demo();

}  // namespace margcert::entcert

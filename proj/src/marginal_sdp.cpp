#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include "margcert/entcert.hpp"

namespace margcert::entcert {

std::string to_string(Formulation f) { return f == Formulation::Full ? "full" : "symmetric"; }

std::string to_string(PptCuts c) { return c == PptCuts::SingleParty ? "single-party" : "all-bipartitions"; }

std::string to_string(SolveMode m) { return m == SolveMode::Joint ? "joint" : "bisection"; }

namespace {

using Triplet = std::tuple<int, int, Complex>;

int qubit_mask(const std::vector<int>& qubits, int n) {
  int mask = 0;
  for (int q : qubits) mask |= 1 << (n - 1 - q);
  return mask;
}

// Index pair of E_rc after partial transposition on the bits in mask.
std::pair<int, int> transposed(int r, int c, int mask) {
  return {(r & ~mask) | (c & mask), (c & ~mask) | (r & mask)};
}

// Two-bit index of qubits (i, j) inside a basis index.
int pair_bits(int idx, int n, int i, int j) {
  return (((idx >> (n - 1 - i)) & 1) << 1) | ((idx >> (n - 1 - j)) & 1);
}

// E_aa, E_ab + E_ba, i(E_ab - E_ba) for a < b.
std::vector<std::vector<Triplet>> hermitian_basis(int d) {
  std::vector<std::vector<Triplet>> out;
  out.reserve(static_cast<std::size_t>(d) * static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) out.push_back({{a, a, Complex(1.0, 0.0)}});
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      out.push_back({{a, b, Complex(1.0, 0.0)}, {b, a, Complex(1.0, 0.0)}});
      out.push_back({{a, b, Complex(0.0, 1.0)}, {b, a, Complex(0.0, -1.0)}});
    }
  return out;
}

ComplexMatrix dense(const std::vector<Triplet>& entries, int d) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (const auto& [r, c, v] : entries) m(r, c) += v;
  return m;
}

std::vector<std::vector<int>> cut_list(int n, Formulation f, PptCuts cuts) {
  std::vector<std::vector<int>> out;
  const int max_k = cuts == PptCuts::SingleParty ? 1 : n / 2;
  for (int k = 1; k <= max_k; ++k) {
    if (f == Formulation::Symmetric) {
      std::vector<int> c(static_cast<std::size_t>(k));
      for (int q = 0; q < k; ++q) c[static_cast<std::size_t>(q)] = q;
      out.push_back(c);
      continue;
    }
    // Complements give the same spectrum; for k = n/2 keep the half holding qubit 0.
    for (int mask = 0; mask < (1 << n); ++mask) {
      if (std::popcount(static_cast<unsigned>(mask)) != k) continue;
      std::vector<int> c;
      for (int q = 0; q < n; ++q)
        if (mask & (1 << q)) c.push_back(q);
      if (2 * k == n && c.front() != 0) continue;
      out.push_back(c);
    }
  }
  return out;
}

std::string cut_label(const std::vector<int>& cut) {
  std::string s = "rho^T{";
  for (std::size_t i = 0; i < cut.size(); ++i) s += (i ? "," : "") + std::to_string(cut[i]);
  return s + "}";
}

// Equality rows tr(b tr_rest rho) - p tr(b M) = tr(b)/4 for one qubit pair.
void add_pair_rows(MarginalSdp& m, int i, int j, const std::vector<ComplexMatrix>& small_basis,
                   std::vector<std::vector<double>>& rows, std::vector<double>& rhs) {
  const int n = m.n;
  const int rest = ((1 << n) - 1) & ~qubit_mask({i, j}, n);
  const ComplexMatrix mw = witness_m(n);
  const int cols = m.problem.num_params;
  for (const ComplexMatrix& b : small_basis) {
    std::vector<double> row(static_cast<std::size_t>(cols), 0.0);
    for (std::size_t k = 0; k < m.param_entries.size(); ++k)
      for (const auto& [r, c, v] : m.param_entries[k]) {
        if ((r & rest) != (c & rest)) continue;
        row[k] += (b(pair_bits(c, n, i, j), pair_bits(r, n, i, j)) * v).real();
      }
    row[static_cast<std::size_t>(m.p_index)] = -(b * mw).trace().real();
    rows.push_back(std::move(row));
    rhs.push_back(b.trace().real() / 4.0);
    m.row_pair.emplace_back(i, j);
    m.row_basis.push_back(b);
  }
}

void finish_rows(MarginalSdp& m, const std::vector<std::vector<double>>& rows, const std::vector<double>& rhs) {
  const auto nr = static_cast<Eigen::Index>(rows.size());
  m.problem.eq_matrix = sdp::Matrix::Zero(nr, m.problem.num_params);
  m.problem.eq_rhs = sdp::Vector(nr);
  for (Eigen::Index r = 0; r < nr; ++r) {
    for (int c = 0; c < m.problem.num_params; ++c)
      m.problem.eq_matrix(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    m.problem.eq_rhs(r) = rhs[static_cast<std::size_t>(r)];
  }
}

MarginalSdp build_full(int n, PptCuts cuts) {
  MarginalSdp m;
  m.n = n;
  m.formulation = Formulation::Full;
  m.cuts = cuts;
  const int d = 1 << n;
  m.param_entries = hermitian_basis(d);
  m.p_index = static_cast<int>(m.param_entries.size());
  m.problem.num_params = m.p_index + 1;
  m.problem.objective = sdp::Vector::Zero(m.problem.num_params);
  m.problem.objective(m.p_index) = 1.0;
  m.ppt_cuts = cut_list(n, Formulation::Full, cuts);

  sdp::Block state;
  state.dim = 2 * d;
  state.label = "rho";
  for (std::size_t k = 0; k < m.param_entries.size(); ++k)
    state.terms.push_back({static_cast<int>(k), sdp::embed_hermitian(m.param_entries[k], d)});
  m.problem.blocks.push_back(std::move(state));

  for (const auto& cut : m.ppt_cuts) {
    const int mask = qubit_mask(cut, n);
    sdp::Block b;
    b.dim = 2 * d;
    b.label = cut_label(cut);
    for (std::size_t k = 0; k < m.param_entries.size(); ++k) {
      std::vector<Triplet> t;
      for (const auto& [r, c, v] : m.param_entries[k]) {
        const auto [r2, c2] = transposed(r, c, mask);
        t.emplace_back(r2, c2, v);
      }
      b.terms.push_back({static_cast<int>(k), sdp::embed_hermitian(t, d)});
    }
    m.problem.blocks.push_back(std::move(b));
  }

  std::vector<ComplexMatrix> small;
  for (const auto& e : hermitian_basis(4)) small.push_back(dense(e, 4));
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) add_pair_rows(m, i, j, small, rows, rhs);
  finish_rows(m, rows, rhs);
  return m;
}

MarginalSdp build_symmetric(int n, PptCuts cuts) {
  MarginalSdp m;
  m.n = n;
  m.formulation = Formulation::Symmetric;
  m.cuts = cuts;
  const int d = 1 << n;
  const unsigned full = static_cast<unsigned>(d - 1);

  // Orbit of (i, j) under qubit permutations and transposition: the counts of
  // bit pairs 00 and 11 and the unordered counts of 01 and 10.
  std::map<int, int> orbit_of;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const auto ui = static_cast<unsigned>(i), uj = static_cast<unsigned>(j);
      const int n11 = std::popcount(ui & uj);
      const int n10 = std::popcount(ui & ~uj & full);
      const int n01 = std::popcount(~ui & uj & full);
      const int n00 = n - n11 - n10 - n01;
      const int key = ((n00 * 8 + n11) * 8 + std::min(n01, n10)) * 8 + std::max(n01, n10);
      auto [it, inserted] = orbit_of.try_emplace(key, static_cast<int>(m.param_entries.size()));
      if (inserted) m.param_entries.emplace_back();
      m.param_entries[static_cast<std::size_t>(it->second)].emplace_back(i, j, Complex(1.0, 0.0));
    }
  m.p_index = static_cast<int>(m.param_entries.size());
  m.problem.num_params = m.p_index + 1;
  m.problem.objective = sdp::Vector::Zero(m.problem.num_params);
  m.problem.objective(m.p_index) = 1.0;
  m.ppt_cuts = cut_list(n, Formulation::Symmetric, cuts);

  sdp::Block state;
  state.dim = d;
  state.label = "rho";
  for (std::size_t k = 0; k < m.param_entries.size(); ++k) {
    sdp::SymSparse s;
    for (const auto& [r, c, v] : m.param_entries[k]) s.add(r, c, v.real());
    state.terms.push_back({static_cast<int>(k), s});
  }
  m.problem.blocks.push_back(std::move(state));

  for (const auto& cut : m.ppt_cuts) {
    const int mask = qubit_mask(cut, n);
    sdp::Block b;
    b.dim = d;
    b.label = cut_label(cut);
    for (std::size_t k = 0; k < m.param_entries.size(); ++k) {
      sdp::SymSparse s;
      for (const auto& [r, c, v] : m.param_entries[k]) {
        const auto [r2, c2] = transposed(r, c, mask);
        s.add(r2, c2, v.real());
      }
      b.terms.push_back({static_cast<int>(k), s});
    }
    m.problem.blocks.push_back(std::move(b));
  }

  // Real symmetric 4x4 basis; the state is real, so imaginary rows vanish.
  std::vector<ComplexMatrix> small;
  for (const auto& e : hermitian_basis(4))
    if (std::get<2>(e.front()).imag() == 0.0) small.push_back(dense(e, 4));
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  add_pair_rows(m, 0, 1, small, rows, rhs);
  finish_rows(m, rows, rhs);
  return m;
}

sdp::SdpProblem with_margin(const MarginalSdp& m, double p) {
  sdp::SdpProblem q = m.problem;
  const int t = q.num_params;
  q.num_params += 1;
  q.objective = sdp::Vector::Zero(q.num_params);
  q.objective(t) = 1.0;
  for (sdp::Block& b : q.blocks) {
    sdp::SymSparse id;
    for (int a = 0; a < b.dim; ++a) id.add(a, a, -1.0);
    b.terms.push_back({t, id});
  }
  const Eigen::Index rows = m.problem.eq_matrix.rows();
  q.eq_matrix = sdp::Matrix::Zero(rows + 1, q.num_params);
  q.eq_matrix.topLeftCorner(rows, m.problem.num_params) = m.problem.eq_matrix;
  q.eq_matrix(rows, m.p_index) = 1.0;
  q.eq_rhs = sdp::Vector(rows + 1);
  q.eq_rhs.head(rows) = m.problem.eq_rhs;
  q.eq_rhs(rows) = p;
  return q;
}

}  // namespace

ComplexMatrix MarginalSdp::state(const sdp::Vector& y) const {
  const int d = 1 << n;
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < param_entries.size(); ++k)
    for (const auto& [r, c, v] : param_entries[k]) rho(r, c) += y(static_cast<Eigen::Index>(k)) * v;
  return rho;
}

sdp::Vector MarginalSdp::parameters(const ComplexMatrix& rho, double p) const {
  sdp::Vector y = sdp::Vector::Zero(problem.num_params);
  for (std::size_t k = 0; k < param_entries.size(); ++k) {
    Complex s = 0.0;
    double norm = 0.0;
    for (const auto& [r, c, v] : param_entries[k]) {
      s += std::conj(v) * rho(r, c);
      norm += std::norm(v);
    }
    y(static_cast<Eigen::Index>(k)) = s.real() / norm;
  }
  y(p_index) = p;
  return y;
}

double MarginalSdp::constraint_residual(const sdp::Vector& y) const {
  return (problem.eq_matrix * y - problem.eq_rhs).cwiseAbs().maxCoeff();
}

MarginalSdp build_marginal_sdp(int n, Formulation f, PptCuts cuts) {
  if (n < 3 || n > kMaxQubits) throw std::invalid_argument("build_marginal_sdp: n must lie in 3..7");
  if (f == Formulation::Full && n > 5)
    throw std::invalid_argument("build_marginal_sdp: the full formulation is limited to n <= 5");
  return f == Formulation::Full ? build_full(n, cuts) : build_symmetric(n, cuts);
}

MarginalSdp build_marginal_sdp(int n) {
  return build_marginal_sdp(n, n <= 5 ? Formulation::Full : Formulation::Symmetric);
}

double feasibility_margin(const MarginalSdp& m, double p, const sdp::SdpOptions& options) {
  const sdp::SdpOutcome out = sdp::solve(with_margin(m, p), options);
  if (out.status != sdp::SdpStatus::Optimal)
    throw std::runtime_error("feasibility SDP at p = " + std::to_string(p) + ": " + sdp::to_string(out.status));
  return out.primal_objective;
}

PStarResult solve_pstar(int n, const PStarOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  PStarResult r;
  r.n = n;
  r.mode = options.mode;
  r.cuts = options.cuts;
  r.formulation = options.formulation_set ? options.formulation : (n <= 5 ? Formulation::Full : Formulation::Symmetric);
  const MarginalSdp m = build_marginal_sdp(n, r.formulation, r.cuts);

  if (options.mode == SolveMode::Joint) {
    const sdp::SdpOutcome out = sdp::solve(m.problem, options.sdp);
    r.status = out.status;
    r.iterations = out.iterations;
    r.solves = 1;
    r.p_star = out.y(m.p_index);
    r.lower = out.primal_objective;
    r.upper = out.dual_objective;
    r.primal_infeasibility = out.primal_infeasibility;
    r.dual_infeasibility = out.dual_infeasibility;
    r.state = m.state(out.y);
  } else {
    double lo = 0.0, hi = 1.0;
    r.status = sdp::SdpStatus::Optimal;
    try {
      while (hi - lo > options.bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        (feasibility_margin(m, mid, options.sdp) >= 0.0 ? lo : hi) = mid;
        ++r.solves;
      }
    } catch (const std::runtime_error&) {
      r.status = sdp::SdpStatus::NumericalFailure;
    }
    r.lower = lo;
    r.upper = hi;
    r.p_star = 0.5 * (lo + hi);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  CertResult& c = r.cert;
  c.kind = "dual-sdp";
  c.n = n;
  c.p_star = r.p_star;
  c.p_sep = p_sep(n);
  c.values = {{"lower", r.lower}, {"upper", r.upper}, {"seconds", r.seconds}};
  if (options.mode == SolveMode::Joint) {
    c.residuals.push_back({"primal_infeasibility", r.primal_infeasibility, 1e-7});
    c.residuals.push_back({"dual_infeasibility", r.dual_infeasibility, 1e-7});
  }
  c.residuals.push_back({"bracket_width", r.upper - r.lower, options.mode == SolveMode::Joint ? 1e-6 : 2 * options.bisection_tol});
  const bool solved = r.status == sdp::SdpStatus::Optimal && c.all_passed();
  c.verdict = solved && r.p_star < c.p_sep ? Verdict::CertifiedEntangled : Verdict::NotCertified;
  c.notes.push_back("formulation " + to_string(r.formulation) + ", mode " + to_string(r.mode) + ", solver status " +
                    sdp::to_string(r.status));
  if (solved) c.notes.push_back("separable reductions with entangled completions for p in (p_star, p_sep]");
  if (n > 3) c.notes.push_back("PPT cuts: " + to_string(r.cuts));
  return r;
}

}  // namespace margcert::entcert

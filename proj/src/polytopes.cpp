#include "margcert/polytopes.hpp"

#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

namespace margcert::polytopes {

using lp::Matrix;
using lp::Vector;

std::string to_string(Pairing p) {
  switch (p) {
    case Pairing::AB_C: return "AB|C";
    case Pairing::AC_B: return "AC|B";
    case Pairing::BC_A: return "BC|A";
  }
  return "?";
}

namespace {

std::string sign_label(int o) { return o ? "+1" : "-1"; }

// Rows: 16 per pair (AB, AC, BC), each P_pair(o1 o2 | u v) at dropped input 0.
Matrix marginal_operator() {
  Matrix op = Matrix::Zero(48, 64);
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v)
      for (int o1 = 0; o1 < 2; ++o1)
        for (int o2 = 0; o2 < 2; ++o2) {
          const int local = BipartiteBox::index(o1, o2, u, v);
          for (int k = 0; k < 2; ++k) {
            op(local, TripartiteBox::index(o1, o2, k, u, v, 0)) += 1.0;
            op(16 + local, TripartiteBox::index(o1, k, o2, u, 0, v)) += 1.0;
            op(32 + local, TripartiteBox::index(k, o1, o2, 0, u, v)) += 1.0;
          }
        }
  return op;
}

std::vector<std::string> marginal_labels() {
  static const char* names[3] = {"P_AB", "P_AC", "P_BC"};
  std::vector<std::string> labels(48);
  for (int pair = 0; pair < 3; ++pair)
    for (int u = 0; u < 2; ++u)
      for (int v = 0; v < 2; ++v)
        for (int o1 = 0; o1 < 2; ++o1)
          for (int o2 = 0; o2 < 2; ++o2) {
            std::ostringstream s;
            s << names[pair] << "(" << sign_label(o1) << "," << sign_label(o2) << "|" << u << "," << v << ")";
            labels[static_cast<std::size_t>(16 * pair + BipartiteBox::index(o1, o2, u, v))] = s.str();
          }
  return labels;
}

// Rows: pair marginal at dropped input 0 minus dropped input 1.
Matrix nonsignaling_operator() {
  Matrix op = Matrix::Zero(48, 64);
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v)
      for (int o1 = 0; o1 < 2; ++o1)
        for (int o2 = 0; o2 < 2; ++o2) {
          const int local = BipartiteBox::index(o1, o2, u, v);
          for (int k = 0; k < 2; ++k) {
            op(local, TripartiteBox::index(o1, o2, k, u, v, 0)) += 1.0;
            op(local, TripartiteBox::index(o1, o2, k, u, v, 1)) -= 1.0;
            op(16 + local, TripartiteBox::index(o1, k, o2, u, 0, v)) += 1.0;
            op(16 + local, TripartiteBox::index(o1, k, o2, u, 1, v)) -= 1.0;
            op(32 + local, TripartiteBox::index(k, o1, o2, 0, u, v)) += 1.0;
            op(32 + local, TripartiteBox::index(k, o1, o2, 1, u, v)) -= 1.0;
          }
        }
  return op;
}

Matrix normalization_operator() {
  Matrix op = Matrix::Zero(8, 64);
  for (int in = 0; in < 8; ++in)
    for (int out = 0; out < 8; ++out) op(in, 8 * in + out) = 1.0;
  return op;
}

Vector marginal_vector(const MarginalTriple& m) {
  Vector v(48);
  for (int i = 0; i < 16; ++i) {
    v(i) = m.pab.data()[static_cast<std::size_t>(i)];
    v(16 + i) = m.pac.data()[static_cast<std::size_t>(i)];
    v(32 + i) = m.pbc.data()[static_cast<std::size_t>(i)];
  }
  return v;
}

Matrix vertex_matrix(const VertexFamily& family) {
  Matrix v(64, static_cast<Eigen::Index>(family.vertices.size()));
  for (std::size_t j = 0; j < family.vertices.size(); ++j)
    for (int i = 0; i < 64; ++i) v(i, static_cast<Eigen::Index>(j)) = family.vertices[j].data()[static_cast<std::size_t>(i)];
  return v;
}

void require_consistent(const MarginalTriple& m) {
  const double err = m.consistency_error();
  if (err > 1e-9)
    throw std::invalid_argument("inconsistent marginal triple (single-party mismatch " + std::to_string(err) + ")");
  for (const BipartiteBox* b : {&m.pab, &m.pac, &m.pbc})
    for (double p : b->data())
      if (p < -1e-12 || !std::isfinite(p)) throw std::invalid_argument("marginal triple has negative entries");
}

MembershipReport run_membership(const lp::LinearProgram& program, std::vector<std::string> labels) {
  MembershipReport rep;
  const lp::LpOutcome out = lp::solve(program);
  rep.status = out.status;
  rep.phase1_value = out.phase1_value;
  // Non-membership claims are re-checked in exact arithmetic.
  rep.check = lp::verify_lp_certificate(program, out, out.status == lp::LpStatus::Infeasible);
  rep.row_labels = std::move(labels);
  if (out.status == lp::LpStatus::Optimal) {
    rep.member = true;
    rep.weights.assign(out.primal.data(), out.primal.data() + out.primal.size());
    rep.residual = (program.a_eq * out.primal - program.b_eq).cwiseAbs().maxCoeff();
  } else if (out.status == lp::LpStatus::Infeasible) {
    rep.certificate.assign(out.dual.data(), out.dual.data() + out.dual.size());
  } else {
    throw std::runtime_error("membership LP failed: " + lp::to_string(out.status));
  }
  return rep;
}

lp::LinearProgram feasibility_program(Matrix a, Vector b) {
  lp::LinearProgram p;
  p.objective = Vector::Zero(a.cols());
  p.a_eq = std::move(a);
  p.b_eq = std::move(b);
  return p;
}

}  // namespace

const VertexFamily& local_vertices() {
  static const VertexFamily family = [] {
    VertexFamily f;
    f.kind = VertexKind::LocalDeterministic;
    for (int fa = 0; fa < 4; ++fa)
      for (int fb = 0; fb < 4; ++fb)
        for (int fc = 0; fc < 4; ++fc) f.vertices.push_back(boxes::deterministic_box(fa, fb, fc));
    return f;
  }();
  return family;
}

const VertexFamily& svetlichny_vertices() {
  static const VertexFamily family = [] {
    VertexFamily f;
    f.kind = VertexKind::SvetlichnyHybrid;
    for (Pairing pairing : {Pairing::AB_C, Pairing::AC_B, Pairing::BC_A}) {
      for (int g1 = 0; g1 < 16; ++g1)
        for (int g2 = 0; g2 < 16; ++g2)
          for (int h = 0; h < 4; ++h) {
            TripartiteBox box;
            for (int x = 0; x < 2; ++x)
              for (int y = 0; y < 2; ++y)
                for (int z = 0; z < 2; ++z) {
                  // (u, v) are the pair inputs, w the singleton input.
                  int u = x, v = y, w = z;
                  if (pairing == Pairing::AC_B) { u = x; v = z; w = y; }
                  if (pairing == Pairing::BC_A) { u = y; v = z; w = x; }
                  const int o1 = (g1 >> (2 * u + v)) & 1;
                  const int o2 = (g2 >> (2 * u + v)) & 1;
                  const int o3 = (h >> w) & 1;
                  int a = o1, b = o2, c = o3;
                  if (pairing == Pairing::AC_B) { a = o1; c = o2; b = o3; }
                  if (pairing == Pairing::BC_A) { b = o1; c = o2; a = o3; }
                  box(a, b, c, x, y, z) = 1.0;
                }
            f.vertices.push_back(box);
            f.pairing.push_back(pairing);
          }
    }
    return f;
  }();
  return family;
}

TripartiteBox mixture(const VertexFamily& family, const std::vector<double>& weights) {
  if (weights.size() != family.vertices.size()) throw std::invalid_argument("mixture: weight count mismatch");
  TripartiteBox out;
  for (std::size_t j = 0; j < weights.size(); ++j)
    for (std::size_t i = 0; i < 64; ++i) out.data()[i] += weights[j] * family.vertices[j].data()[i];
  return out;
}

MembershipReport bipartite_local_membership(const BipartiteBox& b) {
  Matrix a = Matrix::Zero(17, 16);
  Vector rhs(17);
  for (int fa = 0; fa < 4; ++fa)
    for (int fb = 0; fb < 4; ++fb) {
      const int col = 4 * fa + fb;
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) a(BipartiteBox::index((fa >> x) & 1, (fb >> y) & 1, x, y), col) = 1.0;
      a(16, col) = 1.0;
    }
  for (int i = 0; i < 16; ++i) rhs(i) = b.data()[static_cast<std::size_t>(i)];
  rhs(16) = 1.0;
  std::vector<std::string> labels;
  for (int i = 0; i < 16; ++i) labels.push_back("P[" + std::to_string(i) + "]");
  labels.push_back("normalization");
  return run_membership(feasibility_program(a, rhs), labels);
}

MembershipReport box_local_membership(const TripartiteBox& b) {
  const Matrix v = vertex_matrix(local_vertices());
  Matrix a(65, 64);
  a.topRows(64) = v;
  a.row(64).setOnes();
  Vector rhs(65);
  for (int i = 0; i < 64; ++i) rhs(i) = b.data()[static_cast<std::size_t>(i)];
  rhs(64) = 1.0;
  std::vector<std::string> labels;
  for (int i = 0; i < 64; ++i) labels.push_back("P[" + std::to_string(i) + "]");
  labels.push_back("normalization");
  return run_membership(feasibility_program(a, rhs), labels);
}

lp::LinearProgram pi_membership_program(const MarginalTriple& m) {
  const Matrix v = vertex_matrix(local_vertices());
  Matrix a(49, v.cols());
  a.topRows(48) = marginal_operator() * v;
  a.row(48).setOnes();
  Vector rhs(49);
  rhs.head(48) = marginal_vector(m);
  rhs(48) = 1.0;
  return feasibility_program(a, rhs);
}

lp::LinearProgram pi_prime_membership_program(const MarginalTriple& m) {
  const Matrix v = vertex_matrix(svetlichny_vertices());
  Matrix a(97, v.cols());
  a.topRows(48) = marginal_operator() * v;
  a.middleRows(48, 48) = nonsignaling_operator() * v;
  a.row(96).setOnes();
  Vector rhs = Vector::Zero(97);
  rhs.head(48) = marginal_vector(m);
  rhs(96) = 1.0;
  return feasibility_program(a, rhs);
}

MembershipReport marginal_membership_pi(const MarginalTriple& m) {
  require_consistent(m);
  auto labels = marginal_labels();
  labels.push_back("normalization");
  return run_membership(pi_membership_program(m), labels);
}

MembershipReport marginal_membership_pi_prime_relaxed(const MarginalTriple& m) {
  require_consistent(m);
  auto labels = marginal_labels();
  for (const auto& l : marginal_labels()) labels.push_back("NS " + l);
  labels.push_back("normalization");
  return run_membership(pi_prime_membership_program(m), labels);
}

bool ExtensionBounds::collapsed(double tol) const {
  if (!feasible) return false;
  for (const auto& sx : range)
    for (const auto& sy : sx)
      for (const CorrelatorRange& r : sy)
        if (r.max - r.min > tol) return false;
  return true;
}

ExtensionBounds extension_bounds(const MarginalTriple& m, bool parallel) {
  require_consistent(m);
  Matrix a(104, 64);
  a.topRows(8) = normalization_operator();
  a.middleRows(8, 48) = nonsignaling_operator();
  a.bottomRows(48) = marginal_operator();
  Vector rhs = Vector::Zero(104);
  rhs.head(8).setOnes();
  rhs.tail(48) = marginal_vector(m);

  auto solve_one = [&](int x, int y, int z, lp::Sense sense) {
    lp::LinearProgram p;
    p.objective = Vector::Zero(64);
    for (int ai = 0; ai < 2; ++ai)
      for (int bi = 0; bi < 2; ++bi)
        for (int ci = 0; ci < 2; ++ci)
          p.objective(TripartiteBox::index(ai, bi, ci, x, y, z)) =
              outcome_value(ai) * outcome_value(bi) * outcome_value(ci);
    p.sense = sense;
    p.a_eq = a;
    p.b_eq = rhs;
    return lp::solve(p);
  };

  std::vector<std::future<lp::LpOutcome>> pending;
  std::vector<lp::LpOutcome> results;
  for (int in = 0; in < 8; ++in)
    for (lp::Sense sense : {lp::Sense::Minimize, lp::Sense::Maximize}) {
      const int x = in >> 2 & 1, y = in >> 1 & 1, z = in & 1;
      if (parallel)
        pending.push_back(std::async(std::launch::async, solve_one, x, y, z, sense));
      else
        results.push_back(solve_one(x, y, z, sense));
    }
  for (auto& f : pending) results.push_back(f.get());

  ExtensionBounds eb;
  eb.feasible = true;
  for (int in = 0; in < 8; ++in) {
    const int x = in >> 2 & 1, y = in >> 1 & 1, z = in & 1;
    const lp::LpOutcome& lo = results[static_cast<std::size_t>(2 * in)];
    const lp::LpOutcome& hi = results[static_cast<std::size_t>(2 * in + 1)];
    if (lo.status == lp::LpStatus::Infeasible || hi.status == lp::LpStatus::Infeasible) {
      eb.feasible = false;
      return eb;
    }
    if (lo.status != lp::LpStatus::Optimal || hi.status != lp::LpStatus::Optimal)
      throw std::runtime_error("extension_bounds: LP failed (" + lp::to_string(lo.status) + ", " +
                               lp::to_string(hi.status) + ")");
    CorrelatorRange& r = eb.range[x][y][z];
    r.min = lo.value;
    r.max = hi.value;
    std::array<double, 64> plo{}, phi{};
    for (int i = 0; i < 64; ++i) {
      plo[static_cast<std::size_t>(i)] = lo.primal(i);
      phi[static_cast<std::size_t>(i)] = hi.primal(i);
    }
    r.min_witness = TripartiteBox(plo);
    r.max_witness = TripartiteBox(phi);
  }
  return eb;
}

}  // namespace margcert::polytopes

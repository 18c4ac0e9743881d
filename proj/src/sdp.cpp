#include "margcert/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <stdexcept>

namespace margcert::sdp {

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::MaxIterations: return "max-iterations";
    case SdpStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

void SymSparse::add_symmetric(int r, int c, double v) {
  entries_.push_back({r, c, v});
  if (r != c) entries_.push_back({c, r, v});
}

void SymSparse::compress() {
  std::map<std::pair<int, int>, double> merged;
  for (const Entry& e : entries_) merged[{e.row, e.col}] += e.value;
  entries_.clear();
  for (const auto& [rc, v] : merged)
    if (v != 0.0) entries_.push_back({rc.first, rc.second, v});
}

Matrix SymSparse::dense(int dim) const {
  Matrix m = Matrix::Zero(dim, dim);
  for (const Entry& e : entries_) m(e.row, e.col) += e.value;
  return m;
}

double SymSparse::inner(const Matrix& g) const {
  double s = 0.0;
  for (const Entry& e : entries_) s += e.value * g(e.col, e.row);
  return s;
}

void SdpProblem::validate() const {
  if (num_params <= 0) throw std::invalid_argument("SdpProblem: no parameters");
  if (objective.size() != num_params) throw std::invalid_argument("SdpProblem: objective size mismatch");
  if (eq_matrix.rows() != eq_rhs.size()) throw std::invalid_argument("SdpProblem: equality rhs size mismatch");
  if (eq_matrix.rows() > 0 && eq_matrix.cols() != num_params)
    throw std::invalid_argument("SdpProblem: equality matrix column count mismatch");
  if (blocks.empty()) throw std::invalid_argument("SdpProblem: no PSD blocks");
  for (const Block& b : blocks) {
    if (b.dim <= 0) throw std::invalid_argument("SdpProblem: empty block");
    auto check = [&](const SymSparse& s) {
      for (const Entry& e : s.entries())
        if (e.row < 0 || e.col < 0 || e.row >= b.dim || e.col >= b.dim || !std::isfinite(e.value))
          throw std::invalid_argument("SdpProblem: bad entry in block " + b.label);
      if ((s.dense(b.dim) - s.dense(b.dim).transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("SdpProblem: non-symmetric coefficient in block " + b.label);
    };
    check(b.constant);
    for (const BlockTerm& t : b.terms) {
      if (t.param < 0 || t.param >= num_params) throw std::invalid_argument("SdpProblem: bad parameter index");
      check(t.coeff);
    }
  }
}

Matrix SdpProblem::block_value(std::size_t k, const Vector& y) const {
  const Block& b = blocks.at(k);
  Matrix m = b.constant.dense(b.dim);
  for (const BlockTerm& t : b.terms)
    for (const Entry& e : t.coeff.entries()) m(e.row, e.col) += y(t.param) * e.value;
  return m;
}

double max_step(const Matrix& m, const Matrix& d) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return 0.0;
  const auto l = llt.matrixL();
  Matrix w = l.solve(d);
  w = l.solve(w.transpose()).transpose();
  w = 0.5 * (w + w.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(w, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

namespace {

double min_eig(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

struct PreparedBlock {
  int dim;
  Matrix constant;
  std::vector<int> params;
  std::vector<const SymSparse*> sparse;
  // Dense copies for terms with more than dim nonzeros (empty otherwise).
  std::vector<Matrix> dense;
};

class Solver {
 public:
  Solver(const SdpProblem& p, const SdpOptions& opt) : p_(p), opt_(opt), m_(p.num_params) {}

  SdpOutcome run();

 private:
  void prepare_blocks();
  bool reduce_equalities(SdpOutcome& out);
  Matrix apply(std::size_t k, const Vector& dy, bool with_constant) const;
  Vector adjoint(const std::vector<Matrix>& x) const;
  Matrix schur(const std::vector<Matrix>& x, const std::vector<Matrix>& sinv) const;

  struct Direction {
    Vector dy, dlam;
    std::vector<Matrix> ds, dx;
  };

  Direction direction(const Eigen::PartialPivLU<Matrix>& kkt, double sigma_mu, const std::vector<Matrix>* rc,
                      const std::vector<Matrix>& x, const std::vector<Matrix>& sinv, const std::vector<Matrix>& rp,
                      const Vector& rd, const Vector& re) const;

  const SdpProblem& p_;
  SdpOptions opt_;
  int m_;
  std::vector<PreparedBlock> blocks_;
  Matrix e_;
  Vector f_;
  std::vector<int> kept_rows_;
};

void Solver::prepare_blocks() {
  for (const Block& b : p_.blocks) {
    PreparedBlock pb;
    pb.dim = b.dim;
    pb.constant = b.constant.dense(b.dim);
    for (const BlockTerm& t : b.terms) {
      pb.params.push_back(t.param);
      pb.sparse.push_back(&t.coeff);
      pb.dense.push_back(static_cast<int>(t.coeff.nnz()) > b.dim ? t.coeff.dense(b.dim) : Matrix());
    }
    blocks_.push_back(std::move(pb));
  }
}

bool Solver::reduce_equalities(SdpOutcome& out) {
  const Eigen::Index q = p_.eq_matrix.rows();
  if (q == 0) {
    e_ = Matrix(0, m_);
    f_ = Vector(0);
    return true;
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(p_.eq_matrix.transpose());
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  std::vector<int> rows;
  for (Eigen::Index i = 0; i < rank; ++i) rows.push_back(qr.colsPermutation().indices()(i));
  std::sort(rows.begin(), rows.end());
  kept_rows_ = rows;
  e_ = Matrix(rank, m_);
  f_ = Vector(rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    e_.row(i) = p_.eq_matrix.row(rows[static_cast<std::size_t>(i)]);
    f_(i) = p_.eq_rhs(rows[static_cast<std::size_t>(i)]);
  }
  out.redundant_rows = static_cast<int>(q - rank);
  const Vector y0 = p_.eq_matrix.completeOrthogonalDecomposition().solve(p_.eq_rhs);
  const double residual = (p_.eq_matrix * y0 - p_.eq_rhs).norm();
  return residual <= 1e-8 * (1.0 + p_.eq_rhs.norm());
}

Matrix Solver::apply(std::size_t k, const Vector& dy, bool with_constant) const {
  const PreparedBlock& b = blocks_[k];
  Matrix out = with_constant ? b.constant : Matrix::Zero(b.dim, b.dim);
  for (std::size_t t = 0; t < b.params.size(); ++t) {
    const double v = dy(b.params[t]);
    if (v == 0.0) continue;
    if (b.dense[t].size())
      out.noalias() += v * b.dense[t];
    else
      for (const Entry& e : b.sparse[t]->entries()) out(e.row, e.col) += v * e.value;
  }
  return out;
}

Vector Solver::adjoint(const std::vector<Matrix>& x) const {
  Vector out = Vector::Zero(m_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const PreparedBlock& b = blocks_[k];
    for (std::size_t t = 0; t < b.params.size(); ++t) out(b.params[t]) += b.sparse[t]->inner(x[k]);
  }
  return out;
}

Matrix Solver::schur(const std::vector<Matrix>& x, const std::vector<Matrix>& sinv) const {
  Matrix mm = Matrix::Zero(m_, m_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const PreparedBlock& b = blocks_[k];
    Matrix t(b.dim, b.dim);
    for (std::size_t j = 0; j < b.params.size(); ++j) {
      // t = X A_j S^{-1}
      if (b.dense[j].size()) {
        t.noalias() = x[k] * b.dense[j] * sinv[k];
      } else {
        t.setZero();
        for (const Entry& e : b.sparse[j]->entries()) t.noalias() += e.value * x[k].col(e.row) * sinv[k].row(e.col);
      }
      for (std::size_t i = 0; i < b.params.size(); ++i) mm(b.params[i], b.params[j]) += b.sparse[i]->inner(t);
    }
  }
  return 0.5 * (mm + mm.transpose());
}

Solver::Direction Solver::direction(const Eigen::PartialPivLU<Matrix>& kkt, double sigma_mu,
                                    const std::vector<Matrix>* rc, const std::vector<Matrix>& x,
                                    const std::vector<Matrix>& sinv, const std::vector<Matrix>& rp, const Vector& rd,
                                    const Vector& re) const {
  const std::size_t nb = blocks_.size();
  std::vector<Matrix> g(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const int d = blocks_[k].dim;
    Matrix core = sigma_mu * Matrix::Identity(d, d);
    if (rc) core -= (*rc)[k];
    g[k] = core * sinv[k] - x[k] - x[k] * rp[k] * sinv[k];
  }
  const Vector rhs_y = adjoint(g) - rd;
  const Eigen::Index q = e_.rows();
  Vector rhs(m_ + q);
  rhs.head(m_) = rhs_y;
  rhs.tail(q) = re;
  const Vector sol = kkt.solve(rhs);

  Direction dir;
  dir.dy = sol.head(m_);
  dir.dlam = sol.tail(q);
  dir.ds.resize(nb);
  dir.dx.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const Matrix ady = apply(k, dir.dy, false);
    dir.ds[k] = rp[k] + ady;
    Matrix dx = g[k] - x[k] * ady * sinv[k];
    dir.dx[k] = 0.5 * (dx + dx.transpose());
  }
  return dir;
}

SdpOutcome Solver::run() {
  SdpOutcome out;
  p_.validate();
  prepare_blocks();
  if (!reduce_equalities(out)) {
    out.status = SdpStatus::Infeasible;
    return out;
  }
  const std::size_t nb = blocks_.size();
  const Eigen::Index q = e_.rows();
  int total_dim = 0;
  for (const auto& b : blocks_) total_dim += b.dim;

  Vector y = Vector::Zero(m_);
  Vector lam = Vector::Zero(q);
  std::vector<Matrix> s(nb), x(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    s[k] = Matrix::Identity(blocks_[k].dim, blocks_[k].dim);
    x[k] = Matrix::Identity(blocks_[k].dim, blocks_[k].dim);
  }
  const Vector& b = p_.objective;
  double c_norm = 0.0;
  for (const auto& pb : blocks_) c_norm = std::max(c_norm, pb.constant.norm());

  SdpStatus status = SdpStatus::MaxIterations;
  int it = 0;
  for (; it < opt_.max_iterations; ++it) {
    std::vector<Matrix> rp(nb);
    double rp_norm = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      rp[k] = apply(k, y, true) - s[k];
      rp_norm = std::max(rp_norm, rp[k].norm());
    }
    const Vector rd = -b - adjoint(x) + e_.transpose() * lam;
    const Vector re = f_ - e_ * y;
    double xs = 0.0, cx = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      xs += x[k].cwiseProduct(s[k]).sum();
      cx += blocks_[k].constant.cwiseProduct(x[k]).sum();
    }
    const double pobj = b.dot(y);
    const double dobj = cx + f_.dot(lam);
    const double mu = xs / total_dim;
    const double pinf = std::max(rp_norm / (1.0 + c_norm), q ? re.norm() / (1.0 + f_.norm()) : 0.0);
    const double dinf = rd.norm() / (1.0 + b.norm());
    const double gap = std::max(std::abs(pobj - dobj), xs) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (opt_.verbose)
      std::cerr << "it " << it << " pobj " << pobj << " dobj " << dobj << " pinf " << pinf << " dinf " << dinf
                << " gap " << gap << '\n';
    if (pinf < opt_.tol && dinf < opt_.tol && gap < opt_.tol) {
      status = SdpStatus::Optimal;
      break;
    }

    std::vector<Matrix> sinv(nb);
    bool ok = true;
    for (std::size_t k = 0; k < nb && ok; ++k) {
      Eigen::LLT<Matrix> llt(s[k]);
      if (llt.info() != Eigen::Success) ok = false;
      else sinv[k] = llt.solve(Matrix::Identity(blocks_[k].dim, blocks_[k].dim));
    }
    if (!ok) {
      status = SdpStatus::NumericalFailure;
      break;
    }

    Matrix kkt = Matrix::Zero(m_ + q, m_ + q);
    kkt.topLeftCorner(m_, m_) = schur(x, sinv);
    kkt.topRightCorner(m_, q) = e_.transpose();
    kkt.bottomLeftCorner(q, m_) = e_;
    Eigen::PartialPivLU<Matrix> lu(kkt);

    // Predictor.
    const Direction aff = direction(lu, 0.0, nullptr, x, sinv, rp, rd, re);
    double ap = 1.0, ad = 1.0;
    for (std::size_t k = 0; k < nb; ++k) {
      ap = std::min(ap, max_step(s[k], aff.ds[k]));
      ad = std::min(ad, max_step(x[k], aff.dx[k]));
    }
    double xs_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k)
      xs_aff += (x[k] + ad * aff.dx[k]).cwiseProduct(s[k] + ap * aff.ds[k]).sum();
    const double sigma = std::clamp(std::pow(std::max(xs_aff, 0.0) / xs, 3.0), 0.0, 1.0);

    // Corrector.
    std::vector<Matrix> rc(nb);
    for (std::size_t k = 0; k < nb; ++k) rc[k] = aff.dx[k] * aff.ds[k];
    const Direction dir = direction(lu, sigma * mu, &rc, x, sinv, rp, rd, re);
    double step_p = std::numeric_limits<double>::infinity(), step_d = step_p;
    for (std::size_t k = 0; k < nb; ++k) {
      step_p = std::min(step_p, max_step(s[k], dir.ds[k]));
      step_d = std::min(step_d, max_step(x[k], dir.dx[k]));
    }
    step_p = std::min(1.0, opt_.step_fraction * step_p);
    step_d = std::min(1.0, opt_.step_fraction * step_d);
    if (!dir.dy.allFinite() || step_p < 1e-12 || step_d < 1e-12) {
      status = SdpStatus::NumericalFailure;
      break;
    }
    y += step_p * dir.dy;
    lam += step_d * dir.dlam;
    for (std::size_t k = 0; k < nb; ++k) {
      s[k] += step_p * dir.ds[k];
      x[k] += step_d * dir.dx[k];
    }
  }

  out.status = status;
  out.iterations = it;
  out.y = y;
  out.duals = x;
  out.slacks.resize(nb);
  double rp_norm = 0.0;
  out.min_slack_eigenvalue = std::numeric_limits<double>::infinity();
  out.min_dual_eigenvalue = std::numeric_limits<double>::infinity();
  double cx = 0.0;
  for (std::size_t k = 0; k < nb; ++k) {
    out.slacks[k] = apply(k, y, true);
    rp_norm = std::max(rp_norm, (out.slacks[k] - s[k]).norm());
    out.min_slack_eigenvalue = std::min(out.min_slack_eigenvalue, min_eig(out.slacks[k]));
    out.min_dual_eigenvalue = std::min(out.min_dual_eigenvalue, min_eig(x[k]));
    cx += blocks_[k].constant.cwiseProduct(x[k]).sum();
  }
  out.eq_duals = Vector::Zero(p_.eq_matrix.rows());
  for (Eigen::Index i = 0; i < q; ++i) out.eq_duals(kept_rows_[static_cast<std::size_t>(i)]) = lam(i);
  out.primal_objective = b.dot(y);
  out.dual_objective = cx + f_.dot(lam);
  const Vector rd = -b - adjoint(x) + e_.transpose() * lam;
  out.primal_infeasibility =
      std::max(rp_norm, p_.eq_matrix.rows() ? (p_.eq_matrix * y - p_.eq_rhs).cwiseAbs().maxCoeff() : 0.0);
  out.dual_infeasibility = rd.cwiseAbs().maxCoeff();
  out.relative_gap = std::abs(out.primal_objective - out.dual_objective) /
                     (1.0 + std::abs(out.primal_objective) + std::abs(out.dual_objective));
  return out;
}

}  // namespace

SdpOutcome solve(const SdpProblem& problem, const SdpOptions& options) { return Solver(problem, options).run(); }

SymSparse embed_hermitian(const std::vector<std::tuple<int, int, std::complex<double>>>& entries, int dim) {
  SymSparse out;
  for (const auto& [r, c, v] : entries) {
    if (v.real() != 0.0) {
      out.add(r, c, v.real());
      out.add(r + dim, c + dim, v.real());
    }
    if (v.imag() != 0.0) {
      out.add(r, c + dim, -v.imag());
      out.add(r + dim, c, v.imag());
    }
  }
  out.compress();
  return out;
}

ComplexMatrix hermitian_from_embedding(const Matrix& s) {
  const Eigen::Index d = s.rows() / 2;
  const Matrix re = 0.5 * (s.topLeftCorner(d, d) + s.bottomRightCorner(d, d));
  const Matrix im = 0.5 * (s.bottomLeftCorner(d, d) - s.topRightCorner(d, d));
  ComplexMatrix h(d, d);
  h.real() = re;
  h.imag() = im;
  return h;
}

ComplexMatrix dual_from_embedding(const Matrix& x) {
  const Eigen::Index d = x.rows() / 2;
  ComplexMatrix y(d, d);
  y.real() = x.topLeftCorner(d, d) + x.bottomRightCorner(d, d);
  y.imag() = x.bottomLeftCorner(d, d) - x.topRightCorner(d, d);
  return y;
}

}  // namespace margcert::sdp

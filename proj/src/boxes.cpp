#include "margcert/boxes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace margcert {

double TripartiteBox::min_entry() const { return *std::min_element(p_.begin(), p_.end()); }

double TripartiteBox::normalization_error() const {
  double worst = 0.0;
  for (int in = 0; in < 8; ++in) {
    double sum = 0.0;
    for (int out = 0; out < 8; ++out) sum += p_[8 * in + out];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double BipartiteBox::single_marginal(int side, int outcome, int input, int other) const {
  double sum = 0.0;
  for (int o = 0; o < 2; ++o) sum += side == 0 ? (*this)(outcome, o, input, other) : (*this)(o, outcome, other, input);
  return sum;
}

double BipartiteBox::correlator(int x, int y) const {
  double e = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) e += outcome_value(a) * outcome_value(b) * (*this)(a, b, x, y);
  return e;
}

double BipartiteBox::signaling() const {
  double worst = 0.0;
  for (int side = 0; side < 2; ++side)
    for (int in = 0; in < 2; ++in)
      for (int o = 0; o < 2; ++o)
        worst = std::max(worst, std::abs(single_marginal(side, o, in, 0) - single_marginal(side, o, in, 1)));
  return worst;
}

const BipartiteBox& MarginalTriple::operator[](Pair p) const {
  switch (p) {
    case Pair::AB: return pab;
    case Pair::AC: return pac;
    case Pair::BC: return pbc;
  }
  throw std::invalid_argument("MarginalTriple: bad pair");
}

double MarginalTriple::consistency_error() const {
  // Each party appears in two boxes: (box, side) pairs per party.
  struct Slot {
    const BipartiteBox* box;
    int side;
  };
  const std::array<std::array<Slot, 2>, 3> slots{{
      {{{&pab, 0}, {&pac, 0}}},
      {{{&pab, 1}, {&pbc, 0}}},
      {{{&pac, 1}, {&pbc, 1}}},
  }};
  double worst = 0.0;
  for (const auto& party : slots) {
    for (int in = 0; in < 2; ++in) {
      for (int o = 0; o < 2; ++o) {
        const double ref = party[0].box->single_marginal(party[0].side, o, in, 0);
        for (const Slot& s : party)
          for (int other = 0; other < 2; ++other)
            worst = std::max(worst, std::abs(s.box->single_marginal(s.side, o, in, other) - ref));
      }
    }
  }
  return worst;
}

namespace boxes {

BoxBuild box_from_correlators(const CorrelatorTable& t) {
  BoxBuild out;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        for (int ai = 0; ai < 2; ++ai)
          for (int bi = 0; bi < 2; ++bi)
            for (int ci = 0; ci < 2; ++ci) {
              const double a = outcome_value(ai), b = outcome_value(bi), c = outcome_value(ci);
              double v = 1.0 + a * t.singles[0][x] + b * t.singles[1][y] + c * t.singles[2][z] +
                         a * b * t.doubles[0][x][y] + a * c * t.doubles[1][x][z] + b * c * t.doubles[2][y][z];
              if (t.has_triples) v += a * b * c * t.triples[x][y][z];
              v /= 8.0;
              out.box(ai, bi, ci, x, y, z) = v;
              if (v < 0.0) {
                out.negative_entries.push_back(TripartiteBox::index(ai, bi, ci, x, y, z));
                out.most_negative = std::min(out.most_negative, v);
              }
            }
  return out;
}

CorrelatorTable correlators_from_box(const TripartiteBox& b) {
  CorrelatorTable t;
  for (int ai = 0; ai < 2; ++ai)
    for (int bi = 0; bi < 2; ++bi)
      for (int ci = 0; ci < 2; ++ci) {
        const double a = outcome_value(ai), bb = outcome_value(bi), c = outcome_value(ci);
        for (int u = 0; u < 2; ++u) {
          t.singles[0][u] += a * b(ai, bi, ci, u, 0, 0);
          t.singles[1][u] += bb * b(ai, bi, ci, 0, u, 0);
          t.singles[2][u] += c * b(ai, bi, ci, 0, 0, u);
          for (int v = 0; v < 2; ++v) {
            t.doubles[0][u][v] += a * bb * b(ai, bi, ci, u, v, 0);
            t.doubles[1][u][v] += a * c * b(ai, bi, ci, u, 0, v);
            t.doubles[2][u][v] += bb * c * b(ai, bi, ci, 0, u, v);
            for (int w = 0; w < 2; ++w) t.triples[u][v][w] += a * bb * c * b(ai, bi, ci, u, v, w);
          }
        }
      }
  t.has_triples = true;
  return t;
}

namespace {

// Marginal over the parties in `keep_mask` (bit 2 = A, bit 1 = B, bit 0 = C)
// for the outcome/input assignment embedded in (ai, bi, ci, x, y, z).
double subset_marginal(const TripartiteBox& b, int keep_mask, int ai, int bi, int ci, int x, int y, int z) {
  double sum = 0.0;
  for (int a = 0; a < 2; ++a) {
    if ((keep_mask & 4) && a != ai) continue;
    for (int bb = 0; bb < 2; ++bb) {
      if ((keep_mask & 2) && bb != bi) continue;
      for (int c = 0; c < 2; ++c) {
        if ((keep_mask & 1) && c != ci) continue;
        sum += b(a, bb, c, x, y, z);
      }
    }
  }
  return sum;
}

}  // namespace

SignalingCheck is_nonsignaling(const TripartiteBox& b, double tol) {
  double worst = 0.0;
  for (int mask : {1, 2, 4, 3, 5, 6}) {
    for (int in = 0; in < 8; ++in) {
      const int x = in >> 2 & 1, y = in >> 1 & 1, z = in & 1;
      // Reference: dropped parties' inputs set to 0.
      const int rx = (mask & 4) ? x : 0, ry = (mask & 2) ? y : 0, rz = (mask & 1) ? z : 0;
      for (int out = 0; out < 8; ++out) {
        const int a = out >> 2 & 1, bb = out >> 1 & 1, c = out & 1;
        const double d =
            subset_marginal(b, mask, a, bb, c, x, y, z) - subset_marginal(b, mask, a, bb, c, rx, ry, rz);
        worst = std::max(worst, std::abs(d));
      }
    }
  }
  return {worst <= tol, worst};
}

MarginalExtraction marginals_with_deviation(const TripartiteBox& b, double tol) {
  const SignalingCheck ns = is_nonsignaling(b, tol);
  if (!ns.nonsignaling)
    throw std::domain_error("marginals: box signals beyond tolerance (violation " + std::to_string(ns.max_violation) + ")");
  MarginalExtraction out;
  double dev = 0.0;
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v)
      for (int o1 = 0; o1 < 2; ++o1)
        for (int o2 = 0; o2 < 2; ++o2) {
          double ab[2] = {0, 0}, ac[2] = {0, 0}, bc[2] = {0, 0};
          for (int dropped = 0; dropped < 2; ++dropped)
            for (int k = 0; k < 2; ++k) {
              ab[dropped] += b(o1, o2, k, u, v, dropped);
              ac[dropped] += b(o1, k, o2, u, dropped, v);
              bc[dropped] += b(k, o1, o2, dropped, u, v);
            }
          out.marginals.pab(o1, o2, u, v) = ab[0];
          out.marginals.pac(o1, o2, u, v) = ac[0];
          out.marginals.pbc(o1, o2, u, v) = bc[0];
          dev = std::max({dev, std::abs(ab[0] - ab[1]), std::abs(ac[0] - ac[1]), std::abs(bc[0] - bc[1])});
        }
  out.cross_input_deviation = dev;
  return out;
}

MarginalTriple marginals(const TripartiteBox& b, double tol) { return marginals_with_deviation(b, tol).marginals; }

CorrelatorTable marginal_correlators(const MarginalTriple& m) {
  CorrelatorTable t;
  t.has_triples = false;
  for (int u = 0; u < 2; ++u) {
    for (int o = 0; o < 2; ++o) {
      t.singles[0][u] += outcome_value(o) * m.pab.single_marginal(0, o, u, 0);
      t.singles[1][u] += outcome_value(o) * m.pab.single_marginal(1, o, u, 0);
      t.singles[2][u] += outcome_value(o) * m.pac.single_marginal(1, o, u, 0);
    }
    for (int v = 0; v < 2; ++v) {
      t.doubles[0][u][v] = m.pab.correlator(u, v);
      t.doubles[1][u][v] = m.pac.correlator(u, v);
      t.doubles[2][u][v] = m.pbc.correlator(u, v);
    }
  }
  return t;
}

BipartiteBox bipartite_from_correlators(const std::array<double, 2>& first, const std::array<double, 2>& second,
                                        const std::array<std::array<double, 2>, 2>& corr) {
  BipartiteBox box;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi) {
          const double a = outcome_value(ai), b = outcome_value(bi);
          box(ai, bi, x, y) = 0.25 * (1.0 + a * first[x] + b * second[y] + a * b * corr[x][y]);
        }
  return box;
}

MarginalTriple marginals_from_correlators(const CorrelatorTable& t) {
  return MarginalTriple{bipartite_from_correlators(t.singles[0], t.singles[1], t.doubles[0]),
                        bipartite_from_correlators(t.singles[0], t.singles[2], t.doubles[1]),
                        bipartite_from_correlators(t.singles[1], t.singles[2], t.doubles[2])};
}

TripartiteBox uniform_box() {
  std::array<double, 64> p;
  p.fill(1.0 / 8.0);
  return TripartiteBox(p);
}

BipartiteBox uniform_bipartite() {
  std::array<double, 16> p;
  p.fill(0.25);
  return BipartiteBox(p);
}

TripartiteBox deterministic_box(int fa, int fb, int fc) {
  if (fa < 0 || fa > 3 || fb < 0 || fb > 3 || fc < 0 || fc > 3)
    throw std::invalid_argument("deterministic_box: strategy codes are 0..3");
  TripartiteBox box;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) box((fa >> x) & 1, (fb >> y) & 1, (fc >> z) & 1, x, y, z) = 1.0;
  return box;
}

CorrelatorTable box29_correlators() {
  CorrelatorTable t;
  for (auto& party : t.singles) party = {1.0 / 3.0, 1.0 / 3.0};
  for (auto& pair : t.doubles)
    for (int u = 0; u < 2; ++u)
      for (int v = 0; v < 2; ++v) pair[u][v] = (u == 0 && v == 0) ? 1.0 : -1.0 / 3.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) t.triples[x][y][z] = (x + y + z <= 1) ? 1.0 / 3.0 : -1.0;
  t.has_triples = true;
  return t;
}

TripartiteBox box29() {
  // Every entry is a multiple of 1/24; snapping removes expansion roundoff.
  TripartiteBox b = box_from_correlators(box29_correlators()).box;
  for (double& v : b.data()) v = std::round(24.0 * v) / 24.0;
  return b;
}

TripartiteBox mix(const TripartiteBox& a, const TripartiteBox& b, double weight_a) {
  TripartiteBox out;
  for (std::size_t i = 0; i < 64; ++i) out.data()[i] = weight_a * a.data()[i] + (1.0 - weight_a) * b.data()[i];
  return out;
}

}  // namespace boxes
}  // namespace margcert

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "margcert/boxes.hpp"

namespace margcert {

bool CorrelatorTable::in_range(double tol) const {
  auto ok = [tol](double v) { return v >= -1.0 - tol && v <= 1.0 + tol; };
  for (const auto& p : singles)
    for (double v : p)
      if (!ok(v)) return false;
  for (const auto& p : doubles)
    for (const auto& r : p)
      for (double v : r)
        if (!ok(v)) return false;
  if (has_triples)
    for (const auto& s : triples)
      for (const auto& r : s)
        for (double v : r)
          if (!ok(v)) return false;
  return true;
}

bool InequalitySpec::uses_triples() const {
  for (const auto& s : coefficients.triples)
    for (const auto& r : s)
      for (double v : r)
        if (v != 0.0) return true;
  return false;
}

namespace boxes {

double evaluate_inequality(const InequalitySpec& spec, const CorrelatorTable& t) {
  if (spec.uses_triples() && !t.has_triples)
    throw std::invalid_argument("evaluate_inequality: '" + spec.name + "' needs three-party correlators");
  const CorrelatorTable& c = spec.coefficients;
  double value = spec.constant;
  for (int p = 0; p < 3; ++p)
    for (int u = 0; u < 2; ++u) {
      value += c.singles[p][u] * t.singles[p][u];
      for (int v = 0; v < 2; ++v) value += c.doubles[p][u][v] * t.doubles[p][u][v];
    }
  if (t.has_triples)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z) value += c.triples[x][y][z] * t.triples[x][y][z];
  return value;
}

bool violates(const InequalitySpec& spec, const CorrelatorTable& t, double tol) {
  return evaluate_inequality(spec, t) > spec.bound + tol;
}

InequalitySpec marginal_witness_inequality() {
  InequalitySpec s;
  s.name = "marginal-witness";
  s.bound = 4.0;
  CorrelatorTable& c = s.coefficients;
  c.has_triples = false;
  constexpr int A = 0, B = 1, C = 2;
  constexpr int AB = 0, AC = 1, BC = 2;
  c.singles[A][0] = c.singles[A][1] = -1.0;
  c.singles[B][0] = -1.0;
  c.singles[C][0] = -1.0;
  c.doubles[AB][0][0] = c.doubles[AB][0][1] = c.doubles[AC][0][0] = -1.0;
  c.doubles[AB][1][0] = c.doubles[AC][1][0] = c.doubles[AC][1][1] = -1.0;
  c.doubles[BC][0][0] = c.doubles[BC][1][1] = -1.0;
  return s;
}

InequalitySpec svetlichny_inequality() {
  InequalitySpec s;
  s.name = "svetlichny";
  s.bound = 4.0;
  auto& t = s.coefficients.triples;
  t[0][0][0] = t[0][0][1] = t[0][1][0] = t[1][0][0] = 1.0;
  t[0][1][1] = t[1][0][1] = t[1][1][0] = t[1][1][1] = -1.0;
  return s;
}

double svetlichny_max(const CorrelatorTable& t) {
  if (!t.has_triples) throw std::invalid_argument("svetlichny_max: needs three-party correlators");
  const InequalitySpec form = svetlichny_inequality();
  std::array<int, 3> perm{0, 1, 2};
  double best = 0.0;
  do {
    for (int swaps = 0; swaps < 8; ++swaps) {
      for (int flips = 0; flips < 64; ++flips) {
        CorrelatorTable r;
        for (int i0 = 0; i0 < 2; ++i0)
          for (int i1 = 0; i1 < 2; ++i1)
            for (int i2 = 0; i2 < 2; ++i2) {
              // New party k reads old party perm[k]; inputs optionally swapped.
              std::array<int, 3> in{i0, i1, i2};
              std::array<int, 3> old{};
              double sign = 1.0;
              for (int k = 0; k < 3; ++k) {
                const int input = in[k] ^ ((swaps >> k) & 1);
                old[perm[k]] = input;
                if ((flips >> (2 * k + input)) & 1) sign = -sign;
              }
              r.triples[i0][i1][i2] = sign * t.triples[old[0]][old[1]][old[2]];
            }
        best = std::max(best, std::abs(evaluate_inequality(form, r)));
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double gyni_value(const TripartiteBox& b) {
  return b(0, 0, 0, 0, 0, 0) + b(1, 1, 0, 0, 1, 1) + b(0, 1, 1, 1, 0, 1) + b(1, 0, 1, 1, 1, 0);
}

std::array<double, 8> chsh_values(const BipartiteBox& b) {
  std::array<double, 8> out{};
  double total = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) total += b.correlator(x, y);
  int k = 0;
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v) {
      const double form = total - 2.0 * b.correlator(u, v);
      out[k++] = form;
      out[k++] = -form;
    }
  return out;
}

double chsh_max(const BipartiteBox& b) {
  const auto values = chsh_values(b);
  return *std::max_element(values.begin(), values.end());
}

}  // namespace boxes
}  // namespace margcert

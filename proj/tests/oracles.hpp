#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's own expansion, sign or spectral code.

#include "tautsig/mult_seq.hpp"
#include "tautsig/rational.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

namespace oracle {

using tautsig::Rational;

// ------------------------------------------------------------ Bernoulli numbers

/// B_0 .. B_n by the Akiyama-Tanigawa algorithm (B_1 = +1/2 convention).
inline std::vector<Rational> bernoulli(int n) {
  std::vector<Rational> out;
  std::vector<Rational> a(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) {
    a[m] = Rational(1, m + 1);
    for (int j = m; j >= 1; --j) {
      a[j - 1] = j * (a[j - 1] - a[j]);
      a[j - 1].canonicalize();
    }
    out.push_back(a[0]);
  }
  return out;
}

inline Rational factorial(int n) {
  Rational f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Coefficients of (s x) / tanh(s x) up to x^order:
/// sum_j 2^{2j} B_{2j} s^{2j} x^{2j} / (2j)!.
inline std::vector<Rational> coth_series(int order, const Rational& s) {
  auto b = bernoulli(order);
  std::vector<Rational> out(static_cast<std::size_t>(order) + 1, Rational(0));
  Rational s2j = 1;
  for (int j = 0; 2 * j <= order; ++j) {
    Rational four_j = 1;
    for (int i = 0; i < j; ++i) four_j *= 4;
    out[2 * j] = four_j * b[2 * j] * s2j / factorial(2 * j);
    s2j *= s * s;
  }
  return out;
}

// ------------------------------------------------------------ symmetric polynomials

/// Polynomial in k variables: exponent vector -> coefficient.
using Poly = std::map<std::vector<int>, Rational>;

inline void add(Poly& p, const std::vector<int>& e, const Rational& c) {
  auto& slot = p[e];
  slot += c;
  if (sgn(slot) == 0) p.erase(e);
}

inline Poly mul(const Poly& a, const Poly& b, int max_degree) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      int d = 0;
      for (std::size_t i = 0; i < e.size(); ++i) d += (e[i] = ea[i] + eb[i]);
      if (d <= max_degree) add(out, e, ca * cb);
    }
  return out;
}

inline Poly elementary(int k, int j) {
  Poly out;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    if (static_cast<int>(__builtin_popcount(mask)) != j) continue;
    std::vector<int> e(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < k; ++i) e[i] = (mask >> i) & 1u;
    add(out, e, 1);
  }
  return out;
}

/// Rewrites a symmetric polynomial in k variables as a polynomial in the
/// elementary symmetric functions by removing leading monomials.
inline tautsig::mult::CharClassPolynomial to_elementary(Poly p, int k, tautsig::mult::ClassFamily family) {
  tautsig::mult::CharClassPolynomial out(family);
  int degree = 0;
  for (const auto& [e, c] : p) {
    int d = 0;
    for (int x : e) d += x;
    degree = std::max(degree, d);
  }
  while (!p.empty()) {
    auto lead = std::prev(p.end());  // lexicographically largest exponent
    const auto e = lead->first;
    const Rational c = lead->second;
    if (!std::is_sorted(e.rbegin(), e.rend())) throw std::logic_error("polynomial is not symmetric");
    tautsig::mult::CharClassPolynomial::Exponents ex(static_cast<std::size_t>(k), 0);
    Poly term;
    term[std::vector<int>(static_cast<std::size_t>(k), 0)] = c;
    for (int j = 1; j <= k; ++j) {
      int power = e[j - 1] - (j < k ? e[j] : 0);
      ex[j - 1] = power;
      for (int r = 0; r < power; ++r) term = mul(term, elementary(k, j), degree);
    }
    out.add_term(ex, c);
    for (const auto& [te, tc] : term) add(p, te, -tc);
  }
  return out;
}

/// Weight-k part of prod_{i=1}^k Q(y_i) with Q(y) = sum_j q_j y^j, written in
/// the elementary symmetric functions of the y_i.
inline tautsig::mult::CharClassPolynomial chern_root_genus(const std::vector<Rational>& q, int k) {
  if (k == 0) return tautsig::mult::CharClassPolynomial::constant(tautsig::mult::ClassFamily::Pontryagin, q[0]);
  Poly prod;
  prod[std::vector<int>(static_cast<std::size_t>(k), 0)] = 1;
  for (int i = 0; i < k; ++i) {
    Poly factor;
    for (int j = 0; j <= k && j < static_cast<int>(q.size()); ++j) {
      std::vector<int> e(static_cast<std::size_t>(k), 0);
      e[i] = j;
      add(factor, e, q[j]);
    }
    prod = mul(prod, factor, k);
  }
  Poly top;
  for (const auto& [e, c] : prod) {
    int d = 0;
    for (int x : e) d += x;
    if (d == k) top[e] = c;
  }
  return to_elementary(top, k, tautsig::mult::ClassFamily::Pontryagin);
}

/// Genus polynomial of the series (s x)/tanh(s x) in weight k.
inline tautsig::mult::CharClassPolynomial coth_genus(int k, const Rational& s) {
  auto f = coth_series(2 * k, s);
  std::vector<Rational> q;
  for (int j = 0; j <= k; ++j) q.push_back(f[2 * j]);
  return chern_root_genus(q, k);
}

/// Degree-2m Chern character sum_i x_i^m / m! in m roots, in c_1..c_m.
inline tautsig::mult::CharClassPolynomial chern_character(int m) {
  Poly p;
  for (int i = 0; i < m; ++i) {
    std::vector<int> e(static_cast<std::size_t>(m), 0);
    e[i] = m;
    add(p, e, Rational(1) / factorial(m));
  }
  return to_elementary(p, m, tautsig::mult::ClassFamily::Chern);
}

// ------------------------------------------------------------ exterior algebra on R^n

/// Wedge of basis forms e_S ^ e_T as (sign, mask); sign 0 when they overlap.
inline std::pair<int, unsigned> wedge(unsigned s, unsigned t) {
  if (s & t) return {0, 0};
  // Each generator of t must pass every larger generator of s.
  int swaps = 0;
  for (unsigned j = 0; j < 32; ++j)
    if (t >> j & 1u)
      for (unsigned i = j + 1; i < 32; ++i) swaps += (s >> i) & 1u;
  return {swaps % 2 ? -1 : 1, s | t};
}

/// Fibre integration on T^{b + f} -> T^b (fibre = the last f circles) of
/// e_S, with the rule: write the form as (base part) ^ (fibre part) and
/// multiply by (-1)^{f |base part|}. Returns (sign, base mask).
inline std::pair<int, unsigned> integrate_last(unsigned s, int b, int f) {
  const unsigned fibre = ((1u << f) - 1u) << b;
  if ((s & fibre) != fibre) return {0, 0};
  const unsigned base = s & ~fibre;
  auto [sign, mask] = wedge(base, fibre);
  (void)mask;
  int deg = __builtin_popcount(base);
  return {sign * ((f * deg) % 2 ? -1 : 1), base};
}

// ------------------------------------------------------------ flat line bundles on tori

/// Spectrum of d + d^* on Lambda^* R^n-valued Fourier modes k in [-N, N]^n of
/// a flat line with holonomies exp(2 pi i theta_j): +-2 pi |k + theta| with
/// multiplicity 2^{n-1} each.
inline std::vector<double> flat_line_spectrum(const std::vector<double>& theta, int cutoff) {
  const int n = static_cast<int>(theta.size());
  std::vector<double> out;
  std::vector<int> k(static_cast<std::size_t>(n), -cutoff);
  const int mult = 1 << (n - 1);
  for (;;) {
    double r2 = 0;
    for (int j = 0; j < n; ++j) r2 += (k[j] + theta[j]) * (k[j] + theta[j]);
    double lambda = 2 * std::numbers::pi * std::sqrt(r2);
    for (int m = 0; m < mult; ++m) {
      out.push_back(lambda);
      out.push_back(-lambda);
    }
    int j = 0;
    while (j < n && ++k[j] > cutoff) k[j++] = -cutoff;
    if (j == n) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle

#pragma once

// Exact Clifford and Hodge structures on exterior algebras Lambda^* R^n over
// Q(i). Basis vectors of Lambda^* R^n are indexed by bitmasks: bit j set means
// e_{j+1} is a factor, factors in increasing order.

#include "tautsig/exact_linalg.hpp"
#include "tautsig/sparse_matrix.hpp"

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tautsig::clifford {

class CliffordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxExteriorDimension = 8;
// Products of two odd exterior algebras of dimension <= 5 reach 10.
inline constexpr int kMaxProductDimension = 10;

using Matrix = ExactMatrix;
using Scalar = GaussRational;

/// Outcome of one exact matrix identity.
struct IdentityCheck {
  std::string name;
  std::string formula;
  int n = 0;
  int degree = -1;  // -1: all degrees at once
  bool holds = false;
  std::string detail;
};

inline IdentityCheck compare(std::string name, std::string formula, int n, int degree, const Matrix& lhs,
                             const Matrix& rhs) {
  IdentityCheck c{std::move(name), std::move(formula), n, degree, false, {}};
  auto mm = first_mismatch(lhs, rhs);
  c.holds = !mm.has_value();
  if (mm) c.detail = mm->describe();
  return c;
}

// ------------------------------------------------------------ exterior algebra

inline int form_degree(std::size_t mask) { return std::popcount(mask); }

inline std::size_t exterior_size(int n) {
  if (n < 0 || n > kMaxProductDimension) throw CliffordError("exterior dimension out of range [0, 10]");
  return std::size_t{1} << n;
}

/// Exterior multiplication by e_{j+1}.
inline Matrix ext(int n, int j) {
  const auto dim = exterior_size(n);
  Matrix m(dim, dim);
  const std::size_t bit = std::size_t{1} << j;
  for (std::size_t s = 0; s < dim; ++s) {
    if (s & bit) continue;
    int below = std::popcount(s & (bit - 1));
    m.set(s | bit, s, Scalar(minus_one_pow(below)));
  }
  return m;
}

/// Interior multiplication, the adjoint of ext.
inline Matrix interior(int n, int j) { return ext(n, j).adjoint(); }

/// Clifford action c(e_{j+1}) = ext - ext^*.
inline Matrix clifford_action(int n, int j) { return ext(n, j) - interior(n, j); }

/// Even/odd grading.
inline Matrix parity_grading(int n) {
  const auto dim = exterior_size(n);
  Matrix m(dim, dim);
  for (std::size_t s = 0; s < dim; ++s) m.set(s, s, Scalar(minus_one_pow(form_degree(s))));
  return m;
}

/// Projection onto p-forms.
inline Matrix degree_projection(int n, int p) {
  const auto dim = exterior_size(n);
  Matrix m(dim, dim);
  for (std::size_t s = 0; s < dim; ++s)
    if (form_degree(s) == p) m.set(s, s, Scalar(1));
  return m;
}

/// Sign of the shuffle (S, complement of S).
inline int shuffle_sign(int n, std::size_t s) {
  long inversions = 0;
  for (int a = 0; a < n; ++a) {
    if (!(s & (std::size_t{1} << a))) continue;
    for (int b = 0; b < a; ++b)
      if (!(s & (std::size_t{1} << b))) ++inversions;
  }
  return minus_one_pow(inversions);
}

/// Hodge star with alpha ^ *alpha = |alpha|^2 vol; orientation = +1 or -1.
inline Matrix hodge_star(int n, int orientation = 1) {
  const auto dim = exterior_size(n);
  const std::size_t full = dim - 1;
  Matrix m(dim, dim);
  for (std::size_t s = 0; s < dim; ++s) m.set(full ^ s, s, Scalar(orientation * shuffle_sign(n, s)));
  return m;
}

/// Exponent of i in tau on p-forms.
inline long tau_exponent(int n, int p) {
  return static_cast<long>(n) * (n + 1) / 2 + 2L * n * p + static_cast<long>(p) * (p - 1);
}

/// tau = i^{n(n+1)/2 + 2np + p(p-1)} * on p-forms.
inline Matrix tau(int n, int orientation = 1) {
  const auto dim = exterior_size(n);
  Matrix star = hodge_star(n, orientation);
  Matrix m(dim, dim);
  for (std::size_t s = 0; s < dim; ++s)
    for (const auto& [r, v] : star.row(s)) m.set(s, r, v * Scalar::i_pow(tau_exponent(n, form_degree(r))));
  return m;
}

/// c(e_1 ... e_n) for an oriented orthonormal basis.
inline Matrix volume_action(int n, int orientation = 1) {
  Matrix m = Matrix::identity(exterior_size(n));
  for (int j = 0; j < n; ++j) m = m * clifford_action(n, j);
  return orientation == 1 ? m : -m;
}

struct HodgeData {
  int n = 0;
  int orientation = 1;
  Matrix star;
  Matrix tau;
  Matrix iota;
  std::vector<Matrix> clifford;  // c(e_j)
  Matrix volume;                 // c(omega_T)
};

// ------------------------------------------------------------ modules

/// Z/2-graded module with anticommuting skew-adjoint generators of square -1
/// (a Cl^{k,0}-structure).
struct CliffordModule {
  std::size_t dim = 0;
  Matrix iota;
  std::vector<Matrix> generators;
  std::optional<Matrix> tau;

  std::size_t rank() const { return generators.size(); }

  std::vector<IdentityCheck> verify() const {
    std::vector<IdentityCheck> out;
    const auto id = Matrix::identity(dim);
    const auto zero = Matrix(dim, dim);
    out.push_back(compare("grading-involution", "iota^2 = 1", 0, -1, iota * iota, id));
    out.push_back(compare("grading-selfadjoint", "iota^* = iota", 0, -1, iota.adjoint(), iota));
    for (std::size_t j = 0; j < generators.size(); ++j) {
      const auto& a = generators[j];
      auto tag = std::to_string(j + 1);
      out.push_back(compare("generator-square-" + tag, "alpha_j^2 = -1", 0, -1, a * a, -id));
      out.push_back(compare("generator-skew-" + tag, "alpha_j^* = -alpha_j", 0, -1, a.adjoint(), -a));
      out.push_back(compare("generator-odd-" + tag, "alpha_j iota + iota alpha_j = 0", 0, -1,
                            anticommutator(a, iota), zero));
      for (std::size_t k = j + 1; k < generators.size(); ++k)
        out.push_back(compare("generators-anticommute-" + tag + "-" + std::to_string(k + 1),
                              "alpha_i alpha_j + alpha_j alpha_i = 0", 0, -1, anticommutator(a, generators[k]),
                              zero));
    }
    return out;
  }

  bool valid() const {
    for (const auto& c : verify())
      if (!c.holds) return false;
    return true;
  }
};

struct ExteriorModel {
  CliffordModule module;
  HodgeData hodge;
};

/// Lambda^* R^n as a Cl^{n,0}-module through c, with its Hodge data.
inline ExteriorModel build_exterior(int n, int orientation = 1) {
  if (n < 1 || n > kMaxExteriorDimension) throw CliffordError("exterior dimension must be in [1, 8]");
  if (orientation != 1 && orientation != -1) throw CliffordError("orientation must be +1 or -1");
  ExteriorModel out;
  auto& h = out.hodge;
  h.n = n;
  h.orientation = orientation;
  h.star = hodge_star(n, orientation);
  h.tau = tau(n, orientation);
  h.iota = parity_grading(n);
  for (int j = 0; j < n; ++j) h.clifford.push_back(clifford_action(n, j));
  h.volume = volume_action(n, orientation);
  out.module.dim = exterior_size(n);
  out.module.iota = h.iota;
  out.module.generators = h.clifford;
  out.module.tau = h.tau;
  return out;
}

/// The relations between *, tau, iota, c and the symbols of d and d^*, on
/// Lambda^* R^n. Symbols: sigma(d)(xi) = i ext_xi, sigma(d^*)(xi) = -i int_xi.
inline std::vector<IdentityCheck> verify_sign_lemmas(int n, int orientation = 1) {
  auto model = build_exterior(n, orientation);
  const auto& h = model.hodge;
  const auto dim = exterior_size(n);
  const auto id = Matrix::identity(dim);
  std::vector<IdentityCheck> out;
  const Scalar sn(minus_one_pow(n));

  for (int p = 0; p <= n; ++p) {
    auto proj = degree_projection(n, p);
    out.push_back(compare("star-square", "*^2 = (-1)^{p(n-p)} on p-forms", n, p, h.star * h.star * proj,
                          Scalar(minus_one_pow(static_cast<long>(p) * (n - p))) * proj));
    out.push_back(compare("volume-vs-star", "c(omega) = (-1)^{p(p-1)/2 + np} * on p-forms", n, p,
                          h.volume * proj,
                          Scalar(minus_one_pow(static_cast<long>(p) * (p - 1) / 2 + static_cast<long>(n) * p)) *
                              h.star * proj));
    for (int j = 0; j < n; ++j) {
      // d^* = (-1)^{np-n+1} * d * on p-forms, at symbol level.
      out.push_back(compare("codifferential-symbol-" + std::to_string(j + 1),
                            "int_j = (-1)^{np-n} * ext_j * on p-forms", n, p, interior(n, j) * proj,
                            Scalar(minus_one_pow(static_cast<long>(n) * p - n)) * h.star * ext(n, j) * h.star *
                                proj));
    }
  }
  out.push_back(compare("tau-involution", "tau^2 = 1", n, -1, h.tau * h.tau, id));
  out.push_back(compare("iota-tau", "iota tau = (-1)^n tau iota", n, -1, h.iota * h.tau, sn * h.tau * h.iota));
  for (int j = 0; j < n; ++j) {
    auto tag = std::to_string(j + 1);
    auto e = ext(n, j);
    auto in = interior(n, j);
    auto s = clifford_action(n, j);
    // d^* = (-1)^{n+1} tau d tau and its two companions, at symbol level.
    out.push_back(compare("adjoint-via-tau-" + tag, "int_j = (-1)^n tau ext_j tau", n, -1, in, sn * h.tau * e * h.tau));
    out.push_back(compare("ext-tau-" + tag, "ext_j tau = (-1)^n tau int_j", n, -1, e * h.tau, sn * h.tau * in));
    out.push_back(compare("tau-ext-" + tag, "tau ext_j = (-1)^n int_j tau", n, -1, h.tau * e, sn * in * h.tau));
    out.push_back(compare("symbol-odd-" + tag, "iota s + s iota = 0", n, -1, anticommutator(h.iota, s),
                          Matrix(dim, dim)));
    out.push_back(compare("symbol-tau-" + tag, "tau s = (-1)^{n+1} s tau", n, -1, h.tau * s, -sn * s * h.tau));
  }
  out.push_back(compare("volume-square", "omega^2 = (-1)^{n(n+1)/2}", n, -1, h.volume * h.volume,
                        Scalar(minus_one_pow(static_cast<long>(n) * (n + 1) / 2)) * id));
  out.push_back(compare("tau-vs-volume", "tau = i^{n(n+1)/2} c(omega)", n, -1, h.tau,
                        Scalar::i_pow(static_cast<long>(n) * (n + 1) / 2) * h.volume));
  auto module_checks = model.module.verify();
  for (auto& c : module_checks) c.n = n;
  out.insert(out.end(), module_checks.begin(), module_checks.end());
  return out;
}

/// iota_V tau_V = (-1)^n tau_V iota_V on Lambda^* R^n (x) C^r, with
/// iota_V = iota (x) 1 and tau_V = tau (x) sigma for an involution sigma.
inline std::vector<IdentityCheck> verify_twisted_gradings(int n, const Matrix& sigma) {
  if (!sigma.square()) throw CliffordError("sigma must be square");
  const auto r = sigma.rows();
  if (sigma * sigma != Matrix::identity(r)) throw CliffordError("sigma must be an involution");
  auto iota_v = kron(parity_grading(n), Matrix::identity(r));
  auto tau_v = kron(tau(n), sigma);
  const auto id = Matrix::identity(iota_v.rows());
  std::vector<IdentityCheck> out;
  out.push_back(compare("twisted-iota-involution", "iota_V^2 = 1", n, -1, iota_v * iota_v, id));
  out.push_back(compare("twisted-tau-involution", "tau_V^2 = 1", n, -1, tau_v * tau_v, id));
  out.push_back(compare("twisted-iota-tau", "iota_V tau_V = (-1)^n tau_V iota_V", n, -1, iota_v * tau_v,
                        Scalar(minus_one_pow(n)) * tau_v * iota_v));
  return out;
}

// ------------------------------------------------------------ graded tensor

/// A (x)^ B for B homogeneous of parity `b_parity`: (A iota_A^{|B|}) (x) B.
inline Matrix graded_kron(const Matrix& a, const Matrix& iota_a, const Matrix& b, int b_parity) {
  return kron(b_parity % 2 ? a * iota_a : a, b);
}

/// Cl^{k,0}-module (x)^ Cl^{l,0}-module -> Cl^{k+l,0}-module.
inline CliffordModule graded_tensor(const CliffordModule& a, const CliffordModule& b) {
  CliffordModule out;
  out.dim = a.dim * b.dim;
  out.iota = kron(a.iota, b.iota);
  const auto id_a = Matrix::identity(a.dim);
  const auto id_b = Matrix::identity(b.dim);
  for (const auto& g : a.generators) out.generators.push_back(kron(g, id_b));
  for (const auto& g : b.generators) out.generators.push_back(kron(a.iota, g));
  return out;
}

/// Permutation Lambda R^{n0} (x) V0 (x)^ Lambda R^{n1} (x) V1 -> Lambda R^{n0+n1} (x) V0 (x) V1,
/// e_S (x) v (x) e_T (x) w -> (e_S ^ e_T') (x) v (x) w.
inline Matrix exterior_product_isomorphism(int n0, int n1, std::size_t r0 = 1, std::size_t r1 = 1) {
  const auto d0 = exterior_size(n0);
  const auto d1 = exterior_size(n1);
  exterior_size(n0 + n1);
  const std::size_t total = d0 * r0 * d1 * r1;
  Matrix p(total, total);
  for (std::size_t s = 0; s < d0; ++s)
    for (std::size_t a = 0; a < r0; ++a)
      for (std::size_t t = 0; t < d1; ++t)
        for (std::size_t b = 0; b < r1; ++b) {
          std::size_t src = (s * r0 + a) * (d1 * r1) + (t * r1 + b);
          std::size_t mask = s | (t << n0);
          std::size_t dst = (mask * r0 + a) * r1 + b;
          p.set(dst, src, Scalar(1));
        }
  return p;
}

/// Conjugates by a permutation matrix: P A P^{-1}.
inline Matrix transport(const Matrix& p, const Matrix& a) { return p * a * p.transpose(); }

/// Identification of Lambda R^{n0} (x)^ Lambda R^{n1} with Lambda R^{n0+n1}:
/// gradings, Clifford generators, and c(omega_0) (x)^ c(omega_1) = c(omega).
inline std::vector<IdentityCheck> verify_exterior_product(int n0, int n1) {
  auto a = build_exterior(n0);
  auto b = build_exterior(n1);
  auto c = build_exterior(n0 + n1);
  auto t = graded_tensor(a.module, b.module);
  auto p = exterior_product_isomorphism(n0, n1);
  std::vector<IdentityCheck> out;
  const int n = n0 + n1;
  out.push_back(compare("product-grading", "iota_0 (x)^ iota_1 = iota", n, -1, transport(p, t.iota), c.hodge.iota));
  for (int j = 0; j < n; ++j)
    out.push_back(compare("product-generator-" + std::to_string(j + 1), "generator j of the product = c(e_j)", n,
                          -1, transport(p, t.generators[j]), c.hodge.clifford[j]));
  out.push_back(compare("product-volume", "c(omega_0) (x)^ c(omega_1) = c(omega)", n, -1,
                        transport(p, graded_kron(a.hodge.volume, a.hodge.iota, b.hodge.volume, n1)),
                        c.hodge.volume));
  return out;
}

// ------------------------------------------------------------ product sign chain

struct EpsilonCertificate {
  int m0 = 0;
  int m1 = 0;
  int sign = 0;                 // epsilon = sign * iota_V tau_V
  int expected_sign = 0;        // (-1)^{m0+m1}
  Scalar tau_product_factor;    // tau_0 (x)^ tau_1 = factor * tau
  Scalar expected_tau_factor;   // i (-1)^{m0+m1+1}
  std::vector<IdentityCheck> checks;

  bool holds() const {
    for (const auto& c : checks)
      if (!c.holds) return false;
    return sign == expected_sign && tau_product_factor == expected_tau_factor;
  }
};

namespace detail {

/// The scalar s with a = s b, if one exists.
inline std::optional<Scalar> proportionality(const Matrix& a, const Matrix& b) {
  for (std::size_t i = 0; i < b.rows(); ++i) {
    if (b.row(i).empty()) continue;
    const auto& [j, v] = *b.row(i).begin();
    Scalar s = a.at(i, j) / v;
    if (a == s * b) return s;
    return std::nullopt;
  }
  return a.is_zero() ? std::optional<Scalar>(Scalar(0)) : std::nullopt;
}

inline int as_sign(const std::optional<Scalar>& s) {
  if (s && *s == Scalar(1)) return 1;
  if (s && *s == Scalar(-1)) return -1;
  return 0;
}

}  // namespace detail

/// Builds epsilon = i (alpha_0 (x)^ 1)(1 (x)^ alpha_1), alpha_k = iota_{V_k} tau_{V_k},
/// on odd exterior algebras of dimensions n_k = 2 m_k + 1 tensored with
/// coefficient spaces carrying involutions sigma_k, and identifies it with a
/// multiple of iota_V tau_V on the product.
inline EpsilonCertificate epsilon_sign(int m0, int m1, const Matrix& sigma0 = Matrix::identity(1),
                                       const Matrix& sigma1 = Matrix::identity(1)) {
  if (m0 < 0 || m1 < 0 || m0 > 2 || m1 > 2) throw CliffordError("epsilon_sign needs 0 <= m_i <= 2");
  const int n0 = 2 * m0 + 1;
  const int n1 = 2 * m1 + 1;
  const int n = n0 + n1;
  const auto r0 = sigma0.rows();
  const auto r1 = sigma1.rows();
  const auto id_r0 = Matrix::identity(r0);
  const auto id_r1 = Matrix::identity(r1);

  // Factor k: iota_k, tau_k on Lambda (x) V_k; sigma_k acting on V_k.
  auto iota0 = kron(parity_grading(n0), id_r0);
  auto iota1 = kron(parity_grading(n1), id_r1);
  auto tau0 = kron(tau(n0), id_r0);
  auto tau1 = kron(tau(n1), id_r1);
  auto sig0 = kron(Matrix::identity(exterior_size(n0)), sigma0);
  auto sig1 = kron(Matrix::identity(exterior_size(n1)), sigma1);
  auto tau_v0 = tau0 * sig0;
  auto tau_v1 = tau1 * sig1;
  auto alpha0 = iota0 * tau_v0;
  auto alpha1 = iota1 * tau_v1;
  const auto id0 = Matrix::identity(iota0.rows());
  const auto id1 = Matrix::identity(iota1.rows());

  // alpha_0 (x)^ 1 = alpha_0 (x) 1 and 1 (x)^ alpha_1 = iota_0 (x) alpha_1 (alpha_1 odd).
  auto eps = Scalar::i() * kron(alpha0, id1) * graded_kron(id0, iota0, alpha1, 1);

  auto p = exterior_product_isomorphism(n0, n1, r0, r1);
  auto sigma = kron(sigma0, sigma1);
  auto iota_v = kron(parity_grading(n), Matrix::identity(r0 * r1));
  auto tau_plain = kron(tau(n), Matrix::identity(r0 * r1));
  auto tau_v = kron(tau(n), sigma);
  auto sigma_v = kron(Matrix::identity(exterior_size(n)), sigma);

  EpsilonCertificate cert;
  cert.m0 = m0;
  cert.m1 = m1;
  cert.expected_sign = minus_one_pow(m0 + m1);
  cert.expected_tau_factor = Scalar::i() * Scalar(minus_one_pow(m0 + m1 + 1));

  auto eps_t = transport(p, eps);
  // epsilon = i (iota_0 (x)^ iota_1)(tau_0 (x)^ tau_1)(sigma_0 (x)^ sigma_1).
  auto iota_prod = kron(iota0, iota1);
  auto tau_prod = graded_kron(tau0, iota0, tau1, 1);
  auto sigma_prod = kron(sig0, sig1);
  cert.checks.push_back(compare("epsilon-factorization",
                                "epsilon = i (iota_0 (x)^ iota_1)(tau_0 (x)^ tau_1)(sigma_0 (x)^ sigma_1)", n, -1,
                                eps, Scalar::i() * iota_prod * tau_prod * sigma_prod));
  cert.checks.push_back(compare("epsilon-grading-transport", "iota_0 (x)^ iota_1 = iota", n, -1,
                                transport(p, iota_prod), iota_v));
  cert.checks.push_back(compare("epsilon-sigma-transport", "sigma_0 (x)^ sigma_1 = sigma", n, -1,
                                transport(p, sigma_prod), sigma_v));
  // tau_0 (x)^ tau_1 = i^{...} c(omega_0) (x)^ c(omega_1).
  auto vol0 = kron(volume_action(n0), id_r0);
  auto vol1 = kron(volume_action(n1), id_r1);
  auto vol_prod = graded_kron(vol0, iota0, vol1, 1);
  long e2 = static_cast<long>(n0) * (n0 + 1) / 2 + static_cast<long>(n1) * (n1 + 1) / 2;
  cert.checks.push_back(compare("tau-product-volume", "tau_0 (x)^ tau_1 = i^{e} c(omega_0) (x)^ c(omega_1)", n, -1,
                                tau_prod, Scalar::i_pow(e2) * vol_prod));
  cert.checks.push_back(compare("volume-product-transport", "c(omega_0) (x)^ c(omega_1) = c(omega)", n, -1,
                                transport(p, vol_prod), kron(volume_action(n), Matrix::identity(r0 * r1))));
  auto tau_factor = detail::proportionality(transport(p, tau_prod), tau_plain);
  if (!tau_factor) throw CliffordError("tau_0 (x)^ tau_1 is not a multiple of tau");
  cert.tau_product_factor = *tau_factor;
  auto s = detail::proportionality(eps_t, iota_v * tau_v);
  cert.sign = detail::as_sign(s);
  cert.checks.push_back(compare("epsilon-involution", "epsilon^2 = 1", n, -1, eps * eps,
                                Matrix::identity(eps.rows())));
  std::ostringstream formula;
  formula << "epsilon = " << cert.sign << " iota_V tau_V";
  cert.checks.push_back(compare("epsilon-sign", formula.str(), n, -1, eps_t,
                                Scalar(cert.sign == 0 ? 1 : cert.sign) * iota_v * tau_v));
  return cert;
}

// ------------------------------------------------------------ Bott reduction

struct BottReduction {
  std::size_t module_dim = 0;
  std::size_t restricted_dim = 0;
  Matrix restricted_iota;
  Matrix restricted_operator;
  std::size_t kernel_plus = 0;
  std::size_t kernel_minus = 0;
  long index() const { return static_cast<long>(kernel_plus) - static_cast<long>(kernel_minus); }
};

/// Cl^{2,0}-structure on C^2 generating K^2(point).
inline CliffordModule bott_model() {
  CliffordModule m;
  m.dim = 2;
  m.iota = Matrix::diagonal({Scalar(1), Scalar(-1)});
  Matrix b1(2, 2);
  b1.set(0, 1, Scalar(-1));
  b1.set(1, 0, Scalar(1));
  Matrix b2(2, 2);
  b2.set(0, 1, Scalar::i());
  b2.set(1, 0, Scalar::i());
  m.generators = {b1, b2};
  return m;
}

inline CliffordModule direct_sum(const CliffordModule& a, const CliffordModule& b) {
  if (a.rank() != b.rank()) throw CliffordError("direct sum of modules over different Clifford algebras");
  auto block = [&](const Matrix& x, const Matrix& y) {
    Matrix out(a.dim + b.dim, a.dim + b.dim);
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (const auto& [j, v] : x.row(i)) out.set(i, j, v);
    for (std::size_t i = 0; i < y.rows(); ++i)
      for (const auto& [j, v] : y.row(i)) out.set(a.dim + i, a.dim + j, v);
    return out;
  };
  CliffordModule out;
  out.dim = a.dim + b.dim;
  out.iota = block(a.iota, b.iota);
  for (std::size_t j = 0; j < a.rank(); ++j) out.generators.push_back(block(a.generators[j], b.generators[j]));
  return out;
}

inline void require_anticommutes(const Matrix& d, const Matrix& x, const std::string& what) {
  auto ac = anticommutator(d, x);
  if (!ac.is_zero()) {
    auto mm = first_mismatch(ac, Matrix(ac.rows(), ac.cols()));
    throw CliffordError("operator does not anticommute with " + what + ": " + mm->describe());
  }
}

/// Restricts a Cl^{2,0}-graded operator to Eig(epsilon, +1), epsilon = i alpha(e_1 e_2),
/// and computes the graded index of the restriction.
inline BottReduction bott_reduce(const CliffordModule& m, const Matrix& d) {
  if (m.rank() != 2) throw CliffordError("bott_reduce needs a Cl^{2,0}-module");
  if (d.rows() != m.dim || d.cols() != m.dim) throw CliffordError("operator has wrong size");
  require_anticommutes(d, m.iota, "the grading");
  require_anticommutes(d, m.generators[0], "alpha(e_1)");
  require_anticommutes(d, m.generators[1], "alpha(e_2)");
  const auto id = Matrix::identity(m.dim);
  auto eps = Scalar::i() * m.generators[0] * m.generators[1];
  if (eps * eps != id) throw CliffordError("epsilon is not an involution");
  if (!commutator(eps, m.iota).is_zero() || !commutator(eps, d).is_zero())
    throw CliffordError("epsilon does not commute with the grading and the operator");

  BottReduction out;
  out.module_dim = m.dim;
  auto w_plus = linalg::nullspace(Matrix(eps - id));
  out.restricted_dim = w_plus.size();
  out.restricted_iota = linalg::restrict_operator(m.iota, w_plus);
  out.restricted_operator = linalg::restrict_operator(d, w_plus);
  const auto k = out.restricted_dim;
  const auto id_k = Matrix::identity(k);
  for (int sign : {1, -1}) {
    auto eig = linalg::nullspace(Matrix(out.restricted_iota - Scalar(sign) * id_k));
    std::size_t kernel = eig.size();
    if (!eig.empty()) kernel -= linalg::rank(Matrix(out.restricted_operator * linalg::columns(eig, k)));
    (sign == 1 ? out.kernel_plus : out.kernel_minus) = kernel;
  }
  return out;
}

}  // namespace tautsig::clifford

#pragma once

// Tautological classes kappa_{c,u}(E, f) = pi_!(c(T_v E) f^* u) for product
// bundle models E = X x F -> X, and the symbolic sides of the index formulas.

#include "tautsig/graded_ring.hpp"
#include "tautsig/mult_seq.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tautsig::kappa {

using ring::GradedClass;
using ring::SpacePtr;

class KappaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trivial fibre bundle total -> base, the fibre being the listed factors
/// of `total` in orientation order.
struct BundleModel {
  std::string name;
  SpacePtr total;
  std::vector<std::size_t> fiber_factors;
  mult::BundleData vertical_tangent;             // Pontryagin classes on total
  std::map<std::string, GradedClass> pullbacks;  // f^* u on total
  std::optional<GradedClass> sch;                // super Chern character of the coefficients
  bool fibrewise_flat = true;
  bool globally_flat = false;

  int fiber_dimension() const {
    int n = 0;
    for (auto f : fiber_factors) n += total->factor(f).top_degree();
    return n;
  }

  std::vector<std::size_t> base_factors() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < total->factor_count(); ++i)
      if (std::find(fiber_factors.begin(), fiber_factors.end(), i) == fiber_factors.end()) out.push_back(i);
    return out;
  }

  SpacePtr base() const {
    std::vector<ring::PresentationPtr> f;
    for (auto i : base_factors()) f.push_back(total->factors()[i]);
    return ring::make_space(std::move(f));
  }

  SpacePtr fiber() const {
    std::vector<ring::PresentationPtr> f;
    for (auto i : fiber_factors) f.push_back(total->factors()[i]);
    return ring::make_space(std::move(f));
  }

  void validate() const {
    if (!total) throw KappaError("bundle model without total space");
    std::vector<bool> seen(total->factor_count(), false);
    for (auto f : fiber_factors) {
      if (f >= total->factor_count() || seen[f]) throw KappaError("invalid fibre factor list");
      if (!total->factor(f).fundamental()) throw KappaError("fibre factor without fundamental class");
      seen[f] = true;
    }
    if (vertical_tangent.kind != mult::BundleKind::RealOriented)
      throw KappaError("vertical tangent data must be real oriented");
    if (!(*vertical_tangent.space == *total)) throw KappaError("vertical tangent classes must live on the total space");
    vertical_tangent.validate();
    for (const auto& [name, c] : pullbacks)
      if (!(*c.space() == *total)) throw KappaError("pullback class '" + name + "' must live on the total space");
    if (sch && !(*sch->space() == *total)) throw KappaError("sch class must live on the total space");
  }

  const GradedClass& pullback(const std::string& u) const {
    auto it = pullbacks.find(u);
    if (it == pullbacks.end()) throw KappaError("class '" + u + "' is not declared on bundle '" + name + "'");
    return it->second;
  }

  /// sch(V); for globally flat coefficients only the degree-0 part survives.
  GradedClass coefficient_sch() const {
    if (!sch) throw KappaError("bundle '" + name + "' declares no coefficient sch class");
    return globally_flat ? sch->component(0) : *sch;
  }
};

inline mult::BundleData trivial_tangent(const SpacePtr& total, int rank) {
  return mult::BundleData::trivial(mult::BundleKind::RealOriented, total, rank);
}

/// Largest k with 4k <= top degree of the total space.
inline int max_l_degree(const BundleModel& b) { return b.total->top_degree() / 4; }

/// The Atiyah-Singer class of T_v E, all components (or only `k`).
inline GradedClass l_class(const BundleModel& b, std::optional<int> k = std::nullopt) {
  const int kmax = std::min(max_l_degree(b), mult::kMaxGenusDegree);
  if (k) {
    if (*k < 0) throw KappaError("negative L-class degree");
    if (*k > kmax) return GradedClass::zero(b.total);
    auto f = mult::expand_series("L-atiyah-singer", 2 * *k);
    return mult::evaluate_polynomial(mult::genus_components(f, *k), b.vertical_tangent).value;
  }
  return mult::l_class(b.vertical_tangent, kmax).value;
}

inline void check_degree(const GradedClass& result, int expected) {
  for (int d : result.degrees())
    if (d != expected)
      throw KappaError("degree bookkeeping violated: expected degree " + std::to_string(expected) + ", found " +
                       std::to_string(d));
}

/// pi_!(c(T_v E) x) for an arbitrary class x on the total space.
inline GradedClass kappa_of_class(const BundleModel& b, const GradedClass& c_tv, const GradedClass& x) {
  b.validate();
  return ring::gysin(ring::mul(c_tv, x), b.fiber_factors);
}

/// kappa_{L_k, u}, or kappa_{L, u} summed over k; degrees are asserted per component.
inline GradedClass kappa_l(const BundleModel& b, const GradedClass& u, std::optional<int> k = std::nullopt) {
  b.validate();
  const int n = b.fiber_dimension();
  auto component = [&](int kk) {
    GradedClass out = kappa_of_class(b, l_class(b, kk), u);
    for (int du : u.degrees()) check_degree(kappa_of_class(b, l_class(b, kk), u.component(du)), 4 * kk + du - n);
    return out;
  };
  if (k) return component(*k);
  GradedClass out = GradedClass::zero(b.base());
  for (int kk = 0; kk <= max_l_degree(b); ++kk) out += component(kk);
  return out;
}

inline GradedClass kappa_l(const BundleModel& b, const std::string& u, std::optional<int> k = std::nullopt) {
  return kappa_l(b, b.pullback(u), k);
}

/// kappa_{c,u} for an arbitrary Pontryagin polynomial c.
inline GradedClass kappa(const BundleModel& b, const mult::CharClassPolynomial& c, const std::string& u) {
  if (c.family() != mult::ClassFamily::Pontryagin) throw KappaError("kappa needs a Pontryagin polynomial");
  b.validate();
  const auto& x = b.pullback(u);
  auto c_tv = mult::evaluate_polynomial(c, b.vertical_tangent).value;
  auto out = kappa_of_class(b, c_tv, x);
  const int n = b.fiber_dimension();
  for (int w = 0; w <= c.weight(); ++w) {
    auto cw = c.component(w);
    if (cw.is_zero()) continue;
    auto cw_tv = mult::evaluate_polynomial(cw, b.vertical_tangent).value;
    for (int du : x.degrees()) check_degree(kappa_of_class(b, cw_tv, x.component(du)), 4 * w + du - n);
  }
  return out;
}

// ------------------------------------------------------------ higher signatures

struct HigherSignatureInput {
  SpacePtr manifold;
  mult::BundleData tangent;
  GradedClass u;
  int k = 0;
};

/// <L_k(TM) u, [M]> with 4k + |u| = dim M.
inline Rational higher_signature(const HigherSignatureInput& in) {
  if (!in.manifold->has_fundamental_class()) throw KappaError("manifold model has no fundamental class");
  const int du = in.u.is_zero() ? 0 : in.u.homogeneous_degree();
  if (4 * in.k + du != in.manifold->top_degree())
    throw KappaError("degree mismatch: 4k + |u| must equal the dimension");
  auto f = mult::expand_series("L-atiyah-singer", 2 * in.k);
  auto lk = mult::evaluate_polynomial(mult::genus_components(f, in.k), in.tangent).value;
  return ring::evaluate(ring::mul(lk, in.u), in.manifold);
}

// ------------------------------------------------------------ products

/// E_0 x E_1 -> X_0 x X_1 with fibre F_0 x F_1 in product orientation.
inline BundleModel product_model(const BundleModel& b0, const BundleModel& b1) {
  b0.validate();
  b1.validate();
  BundleModel out;
  out.name = b0.name + " x " + b1.name;
  out.total = ring::product(b0.total, b1.total);
  const auto k0 = b0.total->factor_count();
  out.fiber_factors = b0.fiber_factors;
  for (auto f : b1.fiber_factors) out.fiber_factors.push_back(f + k0);
  out.vertical_tangent = mult::external_sum(b0.vertical_tangent, b1.vertical_tangent);
  out.vertical_tangent.space = out.total;
  for (auto& c : out.vertical_tangent.classes) c = ring::rebase(c, out.total);
  for (const auto& [n0, c0] : b0.pullbacks)
    for (const auto& [n1, c1] : b1.pullbacks) out.pullbacks.emplace(n0 + " x " + n1, ring::rebase(ring::cross(c0, c1), out.total));
  if (b0.sch && b1.sch) out.sch = ring::rebase(ring::cross(b0.coefficient_sch(), b1.coefficient_sch()), out.total);
  out.fibrewise_flat = b0.fibrewise_flat && b1.fibrewise_flat;
  out.globally_flat = b0.globally_flat && b1.globally_flat;
  return out;
}

struct ProductTerm {
  int k = 0;  // L-degree on the first factor
  int l = 0;  // L-degree on the second factor
  int u0_degree = 0;
  int sign = 1;
  GradedClass value;
};

struct KappaProductCertificate {
  GradedClass lhs;             // kappa on the product bundle, computed directly
  GradedClass rhs_proof;       // sum over degrees e of kappa_0: (-1)^{n_1 e} kappa_0,e x kappa_1
  GradedClass rhs_statement;   // (-1)^{n_1 |u_0|} kappa_0 x kappa_1, per homogeneous part of u_0
  bool proof_matches = false;
  bool statement_matches = false;
  bool signs_differ = false;   // the two sign rules disagree (n_0 n_1 odd)
  int n0 = 0;
  int n1 = 0;
  int u0_degree = -1;  // -1 when u_0 is not homogeneous
  std::vector<ProductTerm> expansion;  // kappa_{L_k,u_0} x kappa_{L_l,u_1}, by k + l
};

/// kappa_{L, u_0 x u_1}(E_0 x E_1) against the product of the factors.
inline KappaProductCertificate kappa_product(const BundleModel& b0, const BundleModel& b1, const std::string& u0,
                                             const std::string& u1) {
  const auto& x0 = b0.pullback(u0);
  const auto& x1 = b1.pullback(u1);
  if (x0.is_zero()) throw KappaError("u_0 must be nonzero");
  KappaProductCertificate cert;
  cert.n0 = b0.fiber_dimension();
  cert.n1 = b1.fiber_dimension();
  if (x0.degrees().size() == 1) cert.u0_degree = x0.homogeneous_degree();
  auto prod = product_model(b0, b1);
  cert.lhs = kappa_l(prod, ring::rebase(ring::cross(x0, x1), prod.total));

  auto k0 = kappa_l(b0, x0);
  auto k1 = kappa_l(b1, x1);
  const auto base = prod.base();
  cert.rhs_proof = GradedClass::zero(base);
  for (int e : k0.degrees())
    cert.rhs_proof += Rational(minus_one_pow(static_cast<long>(cert.n1) * e)) * ring::cross(k0.component(e), k1);
  cert.rhs_proof = ring::rebase(cert.rhs_proof, base);
  cert.rhs_statement = GradedClass::zero(base);
  for (int d : x0.degrees())
    cert.rhs_statement += ring::rebase(
        Rational(minus_one_pow(static_cast<long>(cert.n1) * d)) * ring::cross(kappa_l(b0, x0.component(d)), k1), base);
  cert.proof_matches = cert.lhs == cert.rhs_proof;
  cert.statement_matches = cert.lhs == cert.rhs_statement;
  cert.signs_differ = (cert.n0 * cert.n1) % 2 != 0;

  for (int d : x0.degrees())
    for (int k = 0; k <= max_l_degree(b0); ++k)
      for (int l = 0; l <= max_l_degree(b1); ++l) {
        auto a = kappa_l(b0, x0.component(d), k);
        auto b = kappa_l(b1, x1, l);
        if (a.is_zero() || b.is_zero()) continue;
        int e = 4 * k + d - cert.n0;
        int s = minus_one_pow(static_cast<long>(cert.n1) * e);
        cert.expansion.push_back({k, l, d, s, ring::rebase(Rational(s) * ring::cross(a, b), base)});
      }
  return cert;
}

struct CollapseCertificate {
  int m = 0;
  int l = 0;
  Rational signature;  // sign_{u_1}(N)
  GradedClass lhs;     // kappa_{L_m, u_0 x u_1}(E_0 x N)
  GradedClass rhs;     // (-1)^{n_1(|u_0| - n_0)} kappa_{L_{m-l}, u_0}(E_0) sign_{u_1}(N)
  bool holds = false;
};

/// Product with a closed manifold N over a point, 4l + |u_1| = dim N.
inline CollapseCertificate collapse_formula(const BundleModel& b0, const BundleModel& n_model, const std::string& u0,
                                            const std::string& u1, int m) {
  if (n_model.base()->factor_count() != 0) throw KappaError("collapse formula needs a bundle over a point");
  const auto& x0 = b0.pullback(u0);
  const auto& x1 = n_model.pullback(u1);
  const int n1 = n_model.fiber_dimension();
  const int n0 = b0.fiber_dimension();
  const int d1 = x1.is_zero() ? 0 : x1.homogeneous_degree();
  if ((n1 - d1) < 0 || (n1 - d1) % 4 != 0) throw KappaError("collapse formula needs 4l + |u_1| = dim N");
  CollapseCertificate cert;
  cert.m = m;
  cert.l = (n1 - d1) / 4;
  cert.signature =
      higher_signature({n_model.total, n_model.vertical_tangent, x1, cert.l});
  auto prod = product_model(b0, n_model);
  cert.lhs = kappa_l(prod, ring::rebase(ring::cross(x0, x1), prod.total), m);
  const auto base = prod.base();
  if (m < cert.l) {
    cert.rhs = GradedClass::zero(base);
  } else {
    cert.rhs = GradedClass::zero(base);
    for (int d : x0.degrees()) {
      int s = minus_one_pow(static_cast<long>(n1) * (d - n0));
      cert.rhs += ring::rebase(kappa_l(b0, x0.component(d), m - cert.l) * (cert.signature * s), base);
    }
  }
  cert.holds = cert.lhs == cert.rhs;
  return cert;
}

// ------------------------------------------------------------ index formulas

struct SymbolicIndex {
  GradedClass value;
  int prefactor = 1;             // the signed power of two applied
  bool sign_undetermined = false;  // value is determined only up to a global sign
};

inline GradedClass pushforward_l_sch(const BundleModel& b) {
  return kappa_of_class(b, l_class(b), b.coefficient_sch());
}

/// 2^m pi_!(L(T_v E) sch(V)) for odd fibres of dimension 2m + 1, up to a global sign.
inline SymbolicIndex odd_index_symbolic(const BundleModel& b) {
  const int n = b.fiber_dimension();
  if (n % 2 == 0) throw KappaError("even fibre dimension: use even_index_symbolic");
  const int m = (n - 1) / 2;
  SymbolicIndex out;
  out.prefactor = 1 << m;
  out.value = pushforward_l_sch(b) * Rational(out.prefactor);
  out.sign_undetermined = true;
  return out;
}

/// (-1)^m 2^m pi_!(L(T_v E) sch(V)) for even fibres of dimension 2m.
inline SymbolicIndex even_index_symbolic(const BundleModel& b) {
  const int n = b.fiber_dimension();
  if (n % 2 != 0) throw KappaError("odd fibre dimension: use odd_index_symbolic");
  const int m = n / 2;
  SymbolicIndex out;
  out.prefactor = minus_one_pow(m) * (1 << m);
  out.value = pushforward_l_sch(b) * Rational(out.prefactor);
  return out;
}

struct Midex {
  Rational plus;
  Rational minus;
};

/// midex_+ + midex_- = chi and midex_+ - midex_- = sign.
inline Midex midex_decomposition(const Rational& chi, const Rational& sign) {
  Midex out{(chi + sign) / 2, (chi - sign) / 2};
  if (out.plus + out.minus != chi || out.plus - out.minus != sign) throw KappaError("midex reconstruction failed");
  return out;
}

// ------------------------------------------------------------ shipped models

/// E = S^1 x S^1 -> S^1 (first factor the base) with Lusztig's line L, c_1(L) = u x u.
inline BundleModel lusztig_model() {
  BundleModel b;
  b.name = "lusztig";
  b.total = ring::torus(2);
  b.fiber_factors = {1};
  b.vertical_tangent = trivial_tangent(b.total, 1);
  auto uu = GradedClass::monomial(b.total, {1, 1});
  auto line = std::make_shared<mult::BundleData>(mult::BundleData{mult::BundleKind::Complex, b.total, 1, {uu}, nullptr, nullptr});
  auto none = std::make_shared<mult::BundleData>(mult::BundleData::trivial(mult::BundleKind::Complex, b.total, 0));
  mult::BundleData graded{mult::BundleKind::Complex, b.total, 1, {}, line, none};
  auto ch = mult::chern_character(*line, 1);
  b.pullbacks.emplace("ch(L)", ch);
  b.pullbacks.emplace("1", GradedClass::unit(b.total));
  b.sch = mult::super_chern_character(graded, 1);
  return b;
}

/// The exterior square of Lusztig's family over S^1 x S^1, fibre T^2.
inline BundleModel lusztig_squared_model() {
  auto l = lusztig_model();
  auto b = product_model(l, l);
  b.name = "lusztig-squared";
  return b;
}

/// M -> point with fibre the given closed model.
inline BundleModel closed_manifold_model(const std::string& name, const SpacePtr& manifold,
                                         std::map<std::string, GradedClass> classes = {},
                                         std::vector<GradedClass> pontryagin = {}) {
  if (!manifold->has_fundamental_class()) throw KappaError("closed manifold model needs a fundamental class");
  BundleModel b;
  b.name = name;
  b.total = manifold;
  b.fiber_factors.resize(manifold->factor_count());
  std::iota(b.fiber_factors.begin(), b.fiber_factors.end(), 0);
  b.vertical_tangent = trivial_tangent(manifold, manifold->top_degree());
  b.vertical_tangent.classes = std::move(pontryagin);
  b.pullbacks = std::move(classes);
  b.pullbacks.emplace("1", GradedClass::unit(manifold));
  return b;
}

/// X x point -> X.
inline BundleModel identity_model(const std::string& name, const SpacePtr& base,
                                  std::map<std::string, GradedClass> classes = {}) {
  BundleModel b;
  b.name = name;
  b.total = base;
  b.vertical_tangent = trivial_tangent(base, 0);
  b.pullbacks = std::move(classes);
  b.pullbacks.emplace("1", GradedClass::unit(base));
  return b;
}

/// Lusztig's model times a trivial T^2-bundle over a point: fibre S^1 x T^2.
inline BundleModel lusztig_times_torus_model() {
  auto t2 = closed_manifold_model("T2", ring::torus(2));
  t2.sch = GradedClass::unit(t2.total);
  auto b = product_model(lusztig_model(), t2);
  b.name = "lusztig x T2";
  return b;
}

/// Sigma_g over a point with the (1,1) coefficient bundle V = L + L^{-1}.
inline BundleModel surface_coefficient_model(int genus);

/// <sch_1(V), [Sigma_g]> for the flat U(1,1)-bundle of a surface group:
/// the lifted line bundle L has Chern number 1 - g and V_+ = L, V_- = L^{-1}.
inline Rational surface_flat_bundle_sch(int genus) {
  if (genus < 2) throw KappaError("surface_flat_bundle_sch needs genus >= 2");
  auto model = surface_coefficient_model(genus);
  return ring::evaluate(model.sch->component(2), model.total);
}

inline BundleModel surface_coefficient_model(int genus) {
  if (genus < 2) throw KappaError("surface models of flat U(1,1)-bundles need genus >= 2");
  auto sigma = ring::surface(genus);
  const Rational chern_number = 1 - genus;
  auto zeta = GradedClass::generator(sigma, 0, "zeta");
  auto line = std::make_shared<mult::BundleData>(
      mult::BundleData{mult::BundleKind::Complex, sigma, 1, {zeta * chern_number}, nullptr, nullptr});
  auto dual = std::make_shared<mult::BundleData>(
      mult::BundleData{mult::BundleKind::Complex, sigma, 1, {zeta * Rational(-chern_number)}, nullptr, nullptr});
  mult::BundleData v{mult::BundleKind::Complex, sigma, 2, {}, line, dual};
  auto b = closed_manifold_model("surface-" + std::to_string(genus), sigma);
  b.sch = mult::super_chern_character(v, 1);
  return b;
}

/// Sigma_g x S^1 -> Sigma_g with globally flat (1,1) coefficients.
inline BundleModel globally_flat_surface_model(int genus) {
  auto base = identity_model("surface-" + std::to_string(genus), ring::surface(genus));
  auto circle = closed_manifold_model("circle", ring::circle());
  auto b = product_model(base, circle);
  b.name = "globally-flat-surface-" + std::to_string(genus);
  auto flat = surface_coefficient_model(genus);
  b.sch = ring::rebase(ring::cross(*flat.sch, GradedClass::unit(circle.total)), b.total);
  b.globally_flat = true;
  return b;
}

// ------------------------------------------------------------ witnesses

struct Witness {
  std::string label;
  std::string description;
  std::string value;
  bool holds = false;
  bool in_scope = true;
};

inline std::vector<Witness> main_theorem_witnesses() {
  std::vector<Witness> out;
  auto lusztig = lusztig_model();
  auto point = identity_model("point", ring::point());
  auto cert = kappa_product(lusztig, point, "ch(L)", "1");
  auto k = kappa_l(lusztig, "ch(L)");
  out.push_back({"genus-one-witness", "Lusztig model times a point: kappa_{L, ch(L)} is nonzero", k.to_string(),
                 !k.is_zero() && cert.proof_matches && cert.lhs == ring::rebase(k, cert.lhs.space()), true});
  for (int g = 2; g <= 4; ++g) {
    auto model = globally_flat_surface_model(g);
    auto idx = odd_index_symbolic(model);
    out.push_back({"globally-flat-vanishing-g" + std::to_string(g),
                   "globally flat coefficients over the genus " + std::to_string(g) + " surface: kappa_{L, sch} = 0",
                   idx.value.to_string(), idx.value.is_zero(), true});
  }
  auto sigma2 = ring::surface(2);
  auto w = ring::mul(GradedClass::generator(sigma2, 0, "a1"), GradedClass::generator(sigma2, 0, "b1")) +
      ring::mul(GradedClass::generator(sigma2, 0, "a2"), GradedClass::generator(sigma2, 0, "b2"));
  auto n_model = closed_manifold_model("surface-2", sigma2, {{"w", w}});
  auto collapse = collapse_formula(lusztig, n_model, "ch(L)", "w", 0);
  std::ostringstream os;
  os << collapse.lhs.to_string() << " with sign_w(N) = " << collapse.signature;
  out.push_back({"scaled-witness", "product with a closed manifold N scales the witness by sign_w(N)", os.str(),
                 collapse.holds && collapse.signature == 2, true});
  out.push_back({"general-nontriviality",
                 "nontriviality for general surface groups and classes u needs cobordism and moduli-space input",
                 "not computed", true, false});
  return out;
}

// ------------------------------------------------------------ random models

namespace detail {

inline GradedClass random_class(std::mt19937& rng, const SpacePtr& space, int degree) {
  auto monos = ring::basis_monomials(space, degree);
  GradedClass out = GradedClass::zero(space);
  if (monos.empty()) return out;
  std::uniform_int_distribution<int> coeff(-3, 3);
  std::uniform_int_distribution<int> half(0, 3);
  for (const auto& m : monos) {
    int c = coeff(rng);
    if (c == 0) continue;
    out += GradedClass::monomial(space, m, half(rng) == 0 ? make_rational(c, 2) : Rational(c));
  }
  if (out.is_zero()) out = GradedClass::monomial(space, monos[rng() % monos.size()]);
  return out;
}

inline SpacePtr random_space(std::mt19937& rng, bool allow_point) {
  std::vector<std::string> choices{"circle", "torus(2)", "surface(2)", "torus(3)", "surface(3)"};
  if (allow_point) choices.push_back("point");
  return ring::preset(choices[rng() % choices.size()]);
}

}  // namespace detail

/// Random product model over circles, tori and surfaces, with random
/// Pontryagin classes and a random homogeneous class "u".
inline BundleModel random_bundle_model(std::mt19937& rng, const std::string& name) {
  auto base = detail::random_space(rng, true);
  auto fib = detail::random_space(rng, false);
  BundleModel b;
  b.name = name;
  b.total = ring::product(base, fib);
  for (std::size_t i = base->factor_count(); i < b.total->factor_count(); ++i) b.fiber_factors.push_back(i);
  b.vertical_tangent = trivial_tangent(b.total, fib->top_degree());
  for (int j = 1; 4 * j <= b.total->top_degree() && j <= 2; ++j)
    b.vertical_tangent.classes.push_back(detail::random_class(rng, b.total, 4 * j));
  while (!b.vertical_tangent.classes.empty() && b.vertical_tangent.classes.back().is_zero())
    b.vertical_tangent.classes.pop_back();
  int du = static_cast<int>(rng() % (b.total->top_degree() + 1));
  auto u = detail::random_class(rng, b.total, du);
  for (int tries = 0; u.is_zero() && tries < 8; ++tries)
    u = detail::random_class(rng, b.total, static_cast<int>(rng() % (b.total->top_degree() + 1)));
  b.pullbacks.emplace("u", u.is_zero() ? GradedClass::unit(b.total) : u);
  return b;
}

/// Random closed manifold over a point with a class "w" of degree dim - 4l.
inline BundleModel random_closed_model(std::mt19937& rng, const std::string& name) {
  std::vector<std::string> choices{"circle", "torus(2)", "surface(2)", "torus(3)", "torus(4)", "surface(3)"};
  auto m = ring::preset(choices[rng() % choices.size()]);
  std::vector<GradedClass> pont;
  if (m->top_degree() >= 4) pont.push_back(detail::random_class(rng, m, 4));
  const int n = m->top_degree();
  int l = (n >= 4 && rng() % 2 == 0) ? 1 : 0;
  auto w = detail::random_class(rng, m, n - 4 * l);
  return closed_manifold_model(name, m, {{"w", w}}, pont);
}

}  // namespace tautsig::kappa

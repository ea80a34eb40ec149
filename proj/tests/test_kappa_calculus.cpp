#include "oracles.hpp"

#include "tautsig/kappa_calculus.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tautsig;
using kappa::BundleModel;
using kappa::KappaError;
using ring::GradedClass;

namespace {

using Form = std::map<unsigned, Rational>;

ring::Monomial torus_monomial(unsigned mask, int n) {
  ring::Monomial m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m[i] = (mask >> i) & 1u;
  return m;
}

GradedClass to_class(const Form& f, const ring::SpacePtr& torus) {
  GradedClass out = GradedClass::zero(torus);
  const int n = torus->top_degree();
  for (const auto& [mask, c] : f) out += GradedClass::monomial(torus, torus_monomial(mask, n), c);
  return out;
}

Form wedge(const Form& a, const Form& b) {
  Form out;
  for (const auto& [s, x] : a)
    for (const auto& [t, y] : b) {
      auto [sign, mask] = oracle::wedge(s, t);
      if (sign != 0) out[mask] += x * y * sign;
    }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

Form random_form(std::mt19937& rng, int n, int degree, int terms) {
  std::vector<unsigned> masks;
  for (unsigned s = 0; s < (1u << n); ++s)
    if (__builtin_popcount(s) == degree) masks.push_back(s);
  Form out;
  if (masks.empty()) return out;
  std::uniform_int_distribution<int> coeff(-4, 4);
  for (int i = 0; i < terms; ++i) out[masks[rng() % masks.size()]] += make_rational(coeff(rng), 1 + rng() % 3);
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

// kappa_{L,u} on T^{b+f} -> T^b with only p_1 nonzero, computed on forms:
// L = sum_k c_k p_1^k with c_k read off the Chern-root oracle.
Form kappa_oracle(const Form& p1, const Form& u, int b, int f) {
  const int n = b + f;
  Form l{{0u, Rational(1)}};
  Form power{{0u, Rational(1)}};
  for (int k = 1; 4 * k <= n; ++k) {
    power = wedge(power, p1);
    const Rational c = oracle::coth_genus(k, make_rational(1, 2)).coefficient({k});
    for (const auto& [mask, v] : power) l[mask] += c * v;
  }
  Form out;
  for (const auto& [mask, v] : wedge(l, u)) {
    auto [sign, base] = oracle::integrate_last(mask, b, f);
    if (sign != 0) out[base] += v * sign;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

BundleModel torus_model(int b, int f, const GradedClass& p1, const GradedClass& u) {
  BundleModel m;
  m.name = "torus-model";
  m.total = ring::torus(b + f);
  for (int i = b; i < b + f; ++i) m.fiber_factors.push_back(static_cast<std::size_t>(i));
  m.vertical_tangent = kappa::trivial_tangent(m.total, 4);
  if (!p1.is_zero()) m.vertical_tangent.classes.push_back(p1);
  m.pullbacks.emplace("u", u);
  return m;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const KappaError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Kappa, LusztigGenerator) {
  auto model = kappa::lusztig_model();
  auto k = kappa::kappa_l(model, "ch(L)");
  auto u = GradedClass::generator(ring::circle(), 0, "u");
  EXPECT_EQ(k, -u);
  EXPECT_EQ(ring::evaluate(k, k.space()), -1);
  EXPECT_EQ(kappa::kappa_l(model, "ch(L)", 0), k);
  EXPECT_TRUE(kappa::kappa_l(model, "ch(L)", 1).is_zero());
  EXPECT_TRUE(kappa::kappa_l(model, "1").is_zero());
}

TEST(Kappa, ArbitraryPolynomialMatchesLClass) {
  auto model = kappa::lusztig_model();
  auto l = mult::genus_components(mult::expand_series("L-atiyah-singer", 0), 0);
  EXPECT_EQ(kappa::kappa(model, l, "ch(L)"), kappa::kappa_l(model, "ch(L)"));
  EXPECT_THROW(kappa::kappa(model, mult::CharClassPolynomial::constant(mult::ClassFamily::Chern, 1), "ch(L)"),
               KappaError);
}

TEST(Kappa, UndeclaredClass) {
  auto model = kappa::lusztig_model();
  EXPECT_NE(error_of([&] { kappa::kappa_l(model, "v"); }).find("not declared"), std::string::npos);
}

TEST(Kappa, DegreeBookkeeping) {
  auto t2 = ring::torus(2);
  EXPECT_NO_THROW(kappa::check_degree(GradedClass::monomial(t2, {1, 0}), 1));
  EXPECT_NE(error_of([&] { kappa::check_degree(GradedClass::monomial(t2, {1, 1}), 1); }).find("degree bookkeeping"),
            std::string::npos);
  EXPECT_THROW(kappa::higher_signature({t2, kappa::trivial_tangent(t2, 2), GradedClass::unit(t2), 0}), KappaError);
}

TEST(Kappa, ModelValidation) {
  auto bad = kappa::lusztig_model();
  bad.fiber_factors = {5};
  EXPECT_NE(error_of([&] { kappa::kappa_l(bad, "ch(L)"); }).find("fibre factor"), std::string::npos);
  auto foreign = kappa::lusztig_model();
  foreign.pullbacks["x"] = GradedClass::unit(ring::circle());
  EXPECT_THROW(kappa::kappa_l(foreign, "ch(L)"), KappaError);
}

// Independent route: exterior-algebra oracle on tori with fibre the last f circles.
TEST(KappaProperty, TorusModelsAgainstFormOracle) {
  std::mt19937 rng(2024);
  int nonzero = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int b = static_cast<int>(rng() % 4);
    const int f = 1 + static_cast<int>(rng() % 5);
    const int n = b + f;
    const Form p1 = n >= 4 ? random_form(rng, n, 4, 3) : Form{};
    const Form u = random_form(rng, n, static_cast<int>(rng() % (n + 1)), 4);
    auto t = ring::torus(n);
    auto model = torus_model(b, f, to_class(p1, t), to_class(u, t));
    auto got = kappa::kappa_l(model, "u");
    auto want = to_class(kappa_oracle(p1, u, b, f), ring::torus(b));
    EXPECT_EQ(ring::rebase(got, ring::torus(b)), want) << "b=" << b << " f=" << f;
    nonzero += !want.is_zero();
  }
  EXPECT_GT(nonzero, 5);
}

// Over a point, kappa_{L_l, w} is the higher signature computed by evaluation.
TEST(KappaProperty, ClosedModelsMatchHigherSignature) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    auto n = kappa::random_closed_model(rng, "N");
    const auto& w = n.pullback("w");
    const int l = (n.fiber_dimension() - w.homogeneous_degree()) / 4;
    auto k = kappa::kappa_l(n, "w", l);
    auto sig = kappa::higher_signature({n.total, n.vertical_tangent, w, l});
    EXPECT_EQ(k, GradedClass::scalar(k.space(), sig)) << n.total->name();
  }
}

TEST(KappaProduct, LusztigTimesPoint) {
  auto cert = kappa::kappa_product(kappa::lusztig_model(), kappa::identity_model("point", ring::point()), "ch(L)", "1");
  EXPECT_TRUE(cert.proof_matches);
  EXPECT_TRUE(cert.statement_matches);
  EXPECT_FALSE(cert.signs_differ);
  EXPECT_EQ(cert.n0, 1);
  EXPECT_EQ(cert.n1, 0);
  auto zero = kappa::lusztig_model();
  zero.pullbacks["0"] = GradedClass::zero(zero.total);
  EXPECT_THROW(kappa::kappa_product(zero, zero, "0", "1"), KappaError);
}

TEST(KappaProduct, LusztigSquaredShowsSignDifference) {
  auto l = kappa::lusztig_model();
  auto cert = kappa::kappa_product(l, l, "ch(L)", "ch(L)");
  EXPECT_TRUE(cert.proof_matches);
  EXPECT_TRUE(cert.signs_differ);
  EXPECT_FALSE(cert.statement_matches);
  EXPECT_EQ(cert.lhs, -cert.rhs_statement);
  GradedClass sum = GradedClass::zero(cert.lhs.space());
  for (const auto& term : cert.expansion) sum += term.value;
  EXPECT_EQ(sum, cert.lhs);
}

// Two routes for products: the product bundle directly, and the factors.
TEST(KappaProductProperty, RandomModels) {
  std::mt19937 rng(7);
  for (int i = 0; i < 24; ++i) {
    auto b0 = kappa::random_bundle_model(rng, "E0");
    auto b1 = kappa::random_bundle_model(rng, "E1");
    auto cert = kappa::kappa_product(b0, b1, "u", "u");
    EXPECT_TRUE(cert.proof_matches) << b0.total->name() << " x " << b1.total->name();
    if (!cert.signs_differ) {
      EXPECT_TRUE(cert.statement_matches) << i;
    }
    GradedClass sum = GradedClass::zero(cert.lhs.space());
    for (const auto& term : cert.expansion) sum += term.value;
    EXPECT_EQ(sum, cert.lhs) << i;
  }
}

TEST(CollapseProperty, RandomModels) {
  std::mt19937 rng(12);
  for (int i = 0; i < 24; ++i) {
    auto b0 = kappa::random_bundle_model(rng, "E0");
    auto n = kappa::random_closed_model(rng, "N");
    for (int m = 0; m <= 2; ++m) {
      auto cert = kappa::collapse_formula(b0, n, "u", "w", m);
      EXPECT_TRUE(cert.holds) << i << " m=" << m;
      if (m < cert.l) {
        EXPECT_TRUE(cert.lhs.is_zero());
      }
    }
  }
  auto l = kappa::lusztig_model();
  EXPECT_THROW(kappa::collapse_formula(l, l, "ch(L)", "1", 0), KappaError);
}

TEST(Index, OddIndexOfLusztigModel) {
  auto idx = kappa::odd_index_symbolic(kappa::lusztig_model());
  EXPECT_TRUE(idx.sign_undetermined);
  EXPECT_EQ(idx.prefactor, 1);
  EXPECT_EQ(abs(ring::evaluate(idx.value, idx.value.space())), 1);
  EXPECT_THROW(kappa::even_index_symbolic(kappa::lusztig_model()), KappaError);
}

TEST(Index, EvenIndexOfLusztigSquared) {
  auto idx = kappa::even_index_symbolic(kappa::lusztig_squared_model());
  EXPECT_EQ(idx.prefactor, -2);
  EXPECT_TRUE(idx.value.component(0).is_zero());
  auto d2 = idx.value.component(2);
  auto uu = GradedClass::monomial(d2.space(), {1, 1}, 2);
  EXPECT_TRUE(d2 == uu || d2 == -uu) << d2;
  EXPECT_FALSE(idx.sign_undetermined);
}

TEST(Index, ProductWithTorusVanishes) {
  EXPECT_TRUE(kappa::odd_index_symbolic(kappa::lusztig_times_torus_model()).value.is_zero());
}

TEST(Index, GloballyFlatVanishing) {
  for (int g = 2; g <= 5; ++g)
    EXPECT_TRUE(kappa::odd_index_symbolic(kappa::globally_flat_surface_model(g)).value.is_zero()) << g;
}

TEST(Midex, Decomposition) {
  auto m = kappa::midex_decomposition(0, 2);
  EXPECT_EQ(m.plus, 1);
  EXPECT_EQ(m.minus, -1);
  auto z = kappa::midex_decomposition(4, 0);
  EXPECT_EQ(z.plus, 2);
  EXPECT_EQ(z.minus, 2);
}

TEST(Surface, SchValuesAndEvenIndex) {
  for (int g = 2; g <= 10; ++g) EXPECT_EQ(kappa::surface_flat_bundle_sch(g), 2 - 2 * g) << g;
  auto idx = kappa::even_index_symbolic(kappa::surface_coefficient_model(3));
  EXPECT_EQ(idx.value, GradedClass::scalar(idx.value.space(), 8));
  EXPECT_THROW(kappa::surface_flat_bundle_sch(1), KappaError);
  EXPECT_THROW(kappa::surface_coefficient_model(0), KappaError);
}

TEST(Witnesses, InScopeWitnessesHold) {
  auto ws = kappa::main_theorem_witnesses();
  int out_of_scope = 0;
  for (const auto& w : ws) {
    if (!w.in_scope) {
      ++out_of_scope;
      continue;
    }
    EXPECT_TRUE(w.holds) << w.label << ": " << w.value;
  }
  EXPECT_EQ(out_of_scope, 1);
  EXPECT_GE(ws.size(), 5u);
}

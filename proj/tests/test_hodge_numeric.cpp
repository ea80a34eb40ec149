#include "oracles.hpp"

#include "tautsig/hodge_numeric.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace tautsig;
using hodge::FamilyConfig;
using hodge::HodgeError;
using hodge::MonodromyBundle;

namespace {

::testing::AssertionResult close(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  if (got.size() != want.size())
    return ::testing::AssertionFailure() << "size " << got.size() << " vs " << want.size();
  for (std::size_t i = 0; i < got.size(); ++i)
    if (std::abs(got[i] - want[i]) > tol)
      return ::testing::AssertionFailure() << "entry " << i << ": " << got[i] << " vs " << want[i];
  return ::testing::AssertionSuccess();
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const HodgeError& e) {
    return e.what();
  }
  return "";
}

MonodromyBundle constant_circle(const std::string& monodromy) {
  MonodromyBundle b;
  b.name = "constant-circle";
  b.n = 1;
  b.eta = hodge::expr_matrix({{"1"}});
  b.monodromies = {hodge::expr_matrix({{monodromy}})};
  b.loop = true;
  return b;
}

std::vector<long> lusztig_profile(std::size_t points, long ends, long interior) {
  std::vector<long> out(points, interior);
  out.front() = ends;
  out.back() = ends;
  return out;
}

}  // namespace

TEST(Spectrum, TrivialCircleLine) {
  auto op = hodge::assemble(hodge::trivial_circle_family(), Rational(0), 2);
  const double tp = 2 * std::numbers::pi;
  EXPECT_TRUE(close(hodge::spectrum(op), {-2 * tp, -2 * tp, -tp, -tp, 0, 0, tp, tp, 2 * tp, 2 * tp}, 1e-10));
  EXPECT_EQ(op.dim(), 10u);
}

TEST(Spectrum, LusztigFiberAgainstFlatLineOracle) {
  for (auto t : {make_rational(1, 3), make_rational(1, 7), make_rational(5, 6)}) {
    auto op = hodge::assemble(hodge::lusztig_family(), t, 6);
    EXPECT_TRUE(close(hodge::spectrum(op), oracle::flat_line_spectrum({t.get_d()}, 6), 1e-10)) << t;
  }
}

TEST(Spectrum, FlatPairIsUnionOfLineSpectra) {
  auto op = hodge::assemble(hodge::flat_pair_circle_family(), Rational(0), 5);
  auto want = oracle::flat_line_spectrum({1.0 / 3}, 5);
  auto other = oracle::flat_line_spectrum({-1.0 / 3}, 5);
  want.insert(want.end(), other.begin(), other.end());
  std::sort(want.begin(), want.end());
  EXPECT_TRUE(close(hodge::spectrum(op), want, 1e-10));
}

TEST(Spectrum, HyperbolicMonodromyWithNonstandardMetric) {
  // Monodromy exp(X) with X real symmetric: imaginary twist, so no kernel at all.
  auto op = hodge::assemble(hodge::hyperbolic_circle_family(), Rational(0), 3);
  EXPECT_EQ(hodge::kernel_dimension(op), 0u);
  auto spec = hodge::spectrum(op);
  for (std::size_t i = 0; i < spec.size(); ++i) EXPECT_NEAR(spec[i], -spec[spec.size() - 1 - i], 1e-9);
}

// Flat lines on T^n: eigenvalues +-2 pi |k + theta| with multiplicity 2^{n-1}.
TEST(SpectrumProperty, RandomFlatTorusLines) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<long> num(0, 11);
  for (int trial = 0; trial < 8; ++trial) {
    auto t1 = make_rational(num(rng), 12);
    auto t2 = make_rational(num(rng), 12);
    auto op = hodge::assemble(hodge::lusztig_squared_fiber(t1, t2), Rational(0), 3);
    EXPECT_TRUE(close(hodge::spectrum(op), oracle::flat_line_spectrum({t1.get_d(), t2.get_d()}, 3), 1e-9))
        << t1 << " " << t2;
  }
  auto op3 = hodge::assemble(hodge::trivial_torus_line(3), Rational(0), 2);
  EXPECT_TRUE(close(hodge::spectrum(op3), oracle::flat_line_spectrum({0, 0, 0}, 2), 1e-9));
}

TEST(Kernel, Examples) {
  EXPECT_EQ(hodge::kernel_dimension(hodge::assemble(hodge::trivial_circle_family(), Rational(0), 4)), 2u);
  EXPECT_EQ(hodge::kernel_dimension(hodge::assemble(hodge::lusztig_family(), make_rational(1, 3), 4)), 0u);
  EXPECT_EQ(hodge::kernel_dimension(hodge::assemble(hodge::lusztig_family(), Rational(0), 4)), 2u);
  EXPECT_EQ(hodge::kernel_by_degree(hodge::assemble(hodge::trivial_torus_line(2), Rational(0), 3)),
            (std::vector<std::size_t>{1, 2, 1}));
  EXPECT_EQ(hodge::kernel_by_degree(hodge::assemble(hodge::trivial_torus_line(4), Rational(0), 1)),
            (std::vector<std::size_t>{1, 4, 6, 4, 1}));
  EXPECT_EQ(hodge::kernel_dimension(hodge::assemble(hodge::flat_pair_torus(), Rational(0), 3)), 0u);
}

TEST(Index, EulerAndEvenSignature) {
  EXPECT_EQ(hodge::euler_index(hodge::assemble(hodge::trivial_circle_family(), Rational(0), 3)), 0);
  EXPECT_EQ(hodge::euler_index(hodge::assemble(hodge::trivial_torus_line(2), Rational(0), 3)), 0);
  for (const auto& b : {hodge::trivial_torus_line(2), hodge::flat_pair_torus(), hodge::trivial_torus_line(4)}) {
    auto sig = hodge::even_signature_index(hodge::assemble(b, Rational(0), b.n == 4 ? 1 : 3));
    EXPECT_EQ(sig.trace_route, 0) << b.name;
    EXPECT_TRUE(sig.agree()) << b.name;
  }
  EXPECT_THROW(hodge::even_signature_index(hodge::assemble(hodge::trivial_circle_family(), Rational(0), 2)),
               HodgeError);
}

TEST(Contracts, HoldForShippedBundles) {
  std::vector<std::pair<MonodromyBundle, Rational>> cases = {
      {hodge::lusztig_family(), make_rational(1, 3)},
      {hodge::hyperbolic_circle_family(), Rational(0)},
      {hodge::flat_pair_torus(), Rational(0)},
      {hodge::perturbed_lusztig_family(), make_rational(1, 5)},
      {hodge::trivial_torus_line(3), Rational(0)},
  };
  for (const auto& [b, t] : cases) {
    auto checks = hodge::verify_contracts(hodge::assemble(b, t, 2));
    EXPECT_EQ(checks.size(), 6u);
    for (const auto& c : checks) EXPECT_TRUE(c.holds) << b.name << ": " << c.name << " " << c.detail;
  }
  auto exact = hodge::verify_contracts(hodge::assemble(hodge::lusztig_family(), make_rational(1, 3), 2));
  EXPECT_TRUE(std::all_of(exact.begin(), exact.end(), [](const auto& c) { return c.exact; }));
}

TEST(Homotopy, InvertibleAtEnd) {
  auto op = hodge::assemble(hodge::lusztig_family(), Rational(0), 4);
  auto rep = hodge::homotopy_surrogate(op);
  EXPECT_NEAR(rep.min_abs_eigenvalue.front(), 0, 1e-9);
  EXPECT_TRUE(rep.invertible_at_end);
  EXPECT_LT(rep.square_residual, 1e-10);
  EXPECT_EQ(rep.s_values.back(), 1.0);
  EXPECT_THROW(hodge::homotopy_surrogate(hodge::assemble(hodge::trivial_torus_line(2), Rational(0), 2)), HodgeError);
}

TEST(SpectralFlow, LusztigFamily) {
  auto res = hodge::spectral_flow(hodge::lusztig_family());
  EXPECT_EQ(std::abs(res.flow), 1);
  EXPECT_EQ(res.flow_plus, res.flow_minus);
  EXPECT_TRUE(res.loop.verified);
  auto twice = hodge::spectral_flow(hodge::lusztig_family(2));
  EXPECT_EQ(twice.flow, 2 * res.flow);
  auto perturbed = hodge::spectral_flow(hodge::perturbed_lusztig_family());
  EXPECT_EQ(perturbed.flow, res.flow);
}

TEST(SpectralFlow, ConstantFamiliesVanish) {
  for (const auto& b : {hodge::trivial_circle_family(), hodge::flat_pair_circle_family(),
                        hodge::hyperbolic_circle_family()}) {
    auto res = hodge::spectral_flow(b);
    EXPECT_EQ(res.flow, 0) << b.name;
    EXPECT_EQ(res.evaluations, 1u) << b.name;
  }
}

TEST(SpectralFlow, InverseTwistCancels) {
  EXPECT_EQ(hodge::spectral_flow(hodge::lusztig_with_inverse_family(true)).flow, 0);
}

TEST(SpectralFlow, TruncationStability) {
  for (const auto& b : {hodge::lusztig_family(), hodge::lusztig_family(2)}) {
    FamilyConfig base;
    FamilyConfig wider = base;
    wider.cutoff = base.cutoff + 4;
    EXPECT_EQ(hodge::spectral_flow(b, base).flow, hodge::spectral_flow(b, wider).flow) << b.name;
  }
}

TEST(SpectralFlowErrors, EndpointEigenvalueAtPerturbationSize) {
  FamilyConfig cfg;
  cfg.tol = 1e-3;
  cfg.cutoff = 2;
  auto msg = error_of([&] { hodge::spectral_flow(constant_circle("exp(i/100)"), cfg); });
  EXPECT_NE(msg.find("perturb endpoints"), std::string::npos) << msg;
}

TEST(SpectralFlowErrors, StructuralFailures) {
  MonodromyBundle noncommuting;
  noncommuting.name = "noncommuting";
  noncommuting.n = 2;
  noncommuting.p = 2;
  noncommuting.eta = hodge::diagonal_expr({"1", "1"});
  noncommuting.monodromies = {hodge::diagonal_expr({"i", "1"}), hodge::expr_matrix({{"0", "1"}, {"1", "0"}})};
  EXPECT_NE(error_of([&] { hodge::fiber_data(noncommuting, Rational(0)); }).find("commute"), std::string::npos);

  MonodromyBundle swapped;
  swapped.name = "swapped";
  swapped.n = 1;
  swapped.p = 1;
  swapped.q = 1;
  swapped.eta = hodge::diagonal_expr({"1", "-1"});
  swapped.monodromies = {hodge::expr_matrix({{"0", "1"}, {"1", "0"}})};
  swapped.loop = true;
  EXPECT_NE(error_of([&] { hodge::spectral_flow(swapped); }).find("does not preserve eta"), std::string::npos);

  auto open = hodge::lusztig_family();
  open.loop = false;
  EXPECT_NE(error_of([&] { hodge::spectral_flow(open); }).find("needs a loop"), std::string::npos);

  auto half = constant_circle("exp(pi*i*t)");
  EXPECT_NE(error_of([&] { hodge::spectral_flow(half); }).find("loop verification failed"), std::string::npos);

  auto lying = hodge::lusztig_family();
  lying.globally_flat = true;
  EXPECT_THROW(hodge::spectral_flow(lying), HodgeError);

  auto wrong_signature = hodge::trivial_circle_family();
  wrong_signature.p = 0;
  wrong_signature.q = 1;
  EXPECT_NE(error_of([&] { hodge::fiber_data(wrong_signature, Rational(0)); }).find("signature"), std::string::npos);
}

TEST(KernelProfile, LusztigJumpsAtEndpoints) {
  FamilyConfig cfg;
  cfg.grid = 16;
  auto prof = hodge::kernel_constancy_report(hodge::lusztig_family(), cfg);
  EXPECT_EQ(prof.kernel, lusztig_profile(17, 2, 0));
  EXPECT_FALSE(prof.constant);
  EXPECT_EQ(prof.t.back(), Rational(1));
}

TEST(KernelProfile, InverseTwistDoublesEndpoints) {
  FamilyConfig cfg;
  cfg.grid = 16;
  for (bool definite : {false, true}) {
    auto prof = hodge::kernel_constancy_report(hodge::lusztig_with_inverse_family(definite), cfg);
    EXPECT_EQ(prof.kernel, lusztig_profile(17, 4, 0)) << definite;
  }
}

TEST(KernelProfile, GloballyFlatFamiliesAreConstant) {
  for (const auto& b : {hodge::trivial_circle_family(), hodge::flat_pair_circle_family(),
                        hodge::hyperbolic_circle_family(), hodge::flat_pair_torus()}) {
    auto prof = hodge::kernel_constancy_report(b);
    EXPECT_TRUE(prof.constant) << b.name;
    EXPECT_EQ(prof.kernel.size(), 65u);
  }
}

TEST(KernelProfileProperty, StableUnderTruncation) {
  FamilyConfig cfg;
  cfg.grid = 12;
  FamilyConfig wider = cfg;
  wider.cutoff += 4;
  for (const auto& b : {hodge::lusztig_family(), hodge::perturbed_lusztig_family(), hodge::lusztig_with_inverse_family()})
    EXPECT_EQ(hodge::kernel_constancy_report(b, cfg).kernel, hodge::kernel_constancy_report(b, wider).kernel) << b.name;
}

#include "oracles.hpp"

#include "tautsig/clifford.hpp"
#include "tautsig/compatible_pair.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tautsig;
using namespace tautsig::clifford;

namespace {

::testing::AssertionResult same(const Matrix& a, const Matrix& b) {
  auto mm = first_mismatch(a, b);
  if (!mm) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << mm->describe();
}

::testing::AssertionResult all_hold(const std::vector<IdentityCheck>& checks) {
  for (const auto& c : checks)
    if (!c.holds)
      return ::testing::AssertionFailure() << c.name << " (n=" << c.n << ", p=" << c.degree << "): " << c.detail;
  return ::testing::AssertionSuccess();
}

// Random operator of odd parity with small Gaussian-rational entries.
Matrix random_odd(std::mt19937& rng, const Matrix& iota) {
  std::uniform_int_distribution<int> c(-2, 2);
  Matrix m(iota.rows(), iota.cols());
  for (std::size_t i = 0; i < iota.rows(); ++i)
    for (std::size_t j = 0; j < iota.cols(); ++j)
      if (iota.at(i, i) != iota.at(j, j)) m.set(i, j, Scalar(Rational(c(rng)), Rational(c(rng))));
  return m;
}

CMatrix dense(const Matrix& m) {
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (const auto& [j, v] : m.row(i)) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v.to_complex();
  return out;
}

CMatrix dense_kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix random_hermitian(std::mt19937& rng, int r) {
  std::normal_distribution<double> g;
  CMatrix a(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = {g(rng), g(rng)};
  return a + a.adjoint();
}

CMatrix random_positive(std::mt19937& rng, int r) {
  std::normal_distribution<double> g;
  CMatrix a(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = {g(rng), g(rng)};
  return a * a.adjoint() + CMatrix::Identity(r, r);
}

// Hermitian form of signature (p, q).
CMatrix random_indefinite(std::mt19937& rng, int p, int q) {
  std::normal_distribution<double> g;
  const int r = p + q;
  CMatrix a(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) a(i, j) = {g(rng), g(rng)};
  a += 3.0 * CMatrix::Identity(r, r);
  Eigen::VectorXcd d(r);
  for (int i = 0; i < r; ++i) d(i) = i < p ? 1.0 + std::abs(g(rng)) : -1.0 - std::abs(g(rng));
  return a * d.asDiagonal() * a.adjoint();
}

}  // namespace

TEST(Exterior, StarInDimensionOne) {
  auto h = build_exterior(1).hodge;
  EXPECT_EQ(h.star.at(1, 0), Scalar(1));  // *1 = e_1
  EXPECT_EQ(h.star.at(0, 1), Scalar(1));  // *e_1 = 1
}

TEST(Exterior, StarSquareInDimensionTwo) {
  auto h = build_exterior(2).hodge;
  auto p1 = degree_projection(2, 1);
  EXPECT_TRUE(same(h.star * h.star * p1, -p1));
}

TEST(Exterior, VolumeElementAgainstStarInDimensionFour) {
  auto h = build_exterior(4).hodge;
  for (int p = 0; p <= 4; ++p) {
    auto proj = degree_projection(4, p);
    long e = static_cast<long>(p) * (p - 1) / 2 + 4L * p;
    EXPECT_TRUE(same(h.volume * proj, Scalar(e % 2 ? -1 : 1) * h.star * proj)) << p;
  }
}

TEST(Exterior, VolumeSquares) {
  auto h1 = build_exterior(1).hodge;
  EXPECT_TRUE(same(h1.volume * h1.volume, -Matrix::identity(2)));
  auto h4 = build_exterior(4).hodge;
  EXPECT_TRUE(same(h4.volume * h4.volume, Matrix::identity(16)));
}

TEST(Exterior, TauInDimensionThree) {
  auto h = build_exterior(3).hodge;
  EXPECT_TRUE(same(h.tau, -h.volume));
}

TEST(Exterior, RangeChecks) {
  EXPECT_THROW(build_exterior(0), CliffordError);
  EXPECT_THROW(build_exterior(9), CliffordError);
  EXPECT_THROW(build_exterior(2, 0), CliffordError);
  EXPECT_NO_THROW(build_exterior(8));
}

// Independent check of the star: alpha ^ *beta = <alpha, beta> vol on basis forms.
TEST(Exterior, StarAgainstWedgeOracle) {
  for (int n = 1; n <= 6; ++n)
    for (int orientation : {1, -1}) {
      auto star_t = hodge_star(n, orientation).transpose();
      const unsigned full = (1u << n) - 1u;
      for (unsigned s = 0; s <= full; ++s)
        for (unsigned t = 0; t <= full; ++t) {
          if (std::popcount(s) != std::popcount(t)) continue;
          Scalar acc(0);
          for (const auto& [r, v] : star_t.row(t)) {
            auto [sign, mask] = oracle::wedge(s, static_cast<unsigned>(r));
            if (sign != 0 && mask == full) acc += Scalar(sign) * v;
          }
          EXPECT_EQ(acc, Scalar(s == t ? orientation : 0)) << "n=" << n << " s=" << s << " t=" << t;
        }
    }
}

TEST(SignLemmas, AllIdentitiesUpToDimensionSix) {
  for (int n = 1; n <= 6; ++n)
    for (int orientation : {1, -1}) EXPECT_TRUE(all_hold(verify_sign_lemmas(n, orientation))) << n;
}

TEST(SignLemmas, ModuleInvariants) {
  for (int n = 1; n <= 6; ++n) EXPECT_TRUE(build_exterior(n).module.valid());
}

TEST(GradedTensor, OneDimensionalGeneratorsAnticommute) {
  auto a = build_exterior(1).module;
  auto t = graded_tensor(a, a);
  ASSERT_EQ(t.rank(), 2u);
  EXPECT_TRUE(anticommutator(t.generators[0], t.generators[1]).is_zero());
  EXPECT_TRUE(t.valid());
}

TEST(GradedTensor, ExteriorProductIsomorphism) {
  for (auto [n0, n1] : std::vector<std::pair<int, int>>{{1, 1}, {1, 3}, {3, 3}, {2, 3}, {1, 2}})
    EXPECT_TRUE(all_hold(verify_exterior_product(n0, n1))) << n0 << "," << n1;
}

TEST(GradedTensor, Associativity) {
  auto a = build_exterior(1).module;
  auto b = bott_model();
  auto c = build_exterior(2).module;
  auto left = graded_tensor(graded_tensor(a, b), c);
  auto right = graded_tensor(a, graded_tensor(b, c));
  ASSERT_EQ(left.rank(), right.rank());
  EXPECT_TRUE(same(left.iota, right.iota));
  for (std::size_t j = 0; j < left.rank(); ++j) EXPECT_TRUE(same(left.generators[j], right.generators[j])) << j;
  EXPECT_TRUE(left.valid());
}

// (D (x)^ 1 + 1 (x)^ B)^2 = D^2 (x)^ 1 + 1 (x)^ B^2 for odd D and B.
TEST(GradedTensorProperty, OperatorSumRule) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = build_exterior(1 + trial % 3).module;
    auto b = build_exterior(1 + (trial / 3) % 2).module;
    auto d = random_odd(rng, a.iota);
    auto e = random_odd(rng, b.iota);
    auto id_a = Matrix::identity(a.dim);
    auto id_b = Matrix::identity(b.dim);
    auto sum = kron(d, id_b) + graded_kron(id_a, a.iota, e, 1);
    EXPECT_TRUE(same(sum * sum, kron(d * d, id_b) + kron(id_a, e * e)));
  }
}

TEST(Epsilon, SignsForAllPairs) {
  for (int m0 = 0; m0 <= 2; ++m0)
    for (int m1 = 0; m1 <= 2; ++m1) {
      auto cert = epsilon_sign(m0, m1);
      EXPECT_TRUE(cert.holds()) << m0 << "," << m1;
      EXPECT_EQ(cert.sign, (m0 + m1) % 2 ? -1 : 1);
      EXPECT_EQ(cert.tau_product_factor, Scalar::i() * Scalar((m0 + m1) % 2 ? 1 : -1));
    }
  EXPECT_EQ(epsilon_sign(0, 0).sign, 1);
  EXPECT_EQ(epsilon_sign(0, 1).sign, -1);
  EXPECT_EQ(epsilon_sign(1, 1).sign, 1);
  EXPECT_THROW(epsilon_sign(3, 0), CliffordError);
}

TEST(Epsilon, TwistedCoefficients) {
  auto s = Matrix::diagonal({Scalar(1), Scalar(-1)});
  for (auto [m0, m1] : std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {1, 0}}) {
    auto cert = epsilon_sign(m0, m1, s, s);
    EXPECT_TRUE(cert.holds()) << m0 << "," << m1;
    EXPECT_EQ(cert.sign, (m0 + m1) % 2 ? -1 : 1);
  }
}

TEST(TwistedGradings, ExactInvolutions) {
  std::vector<Matrix> sigmas{Matrix::identity(1), Matrix::diagonal({Scalar(1), Scalar(-1)}),
                             Matrix::diagonal({Scalar(1), Scalar(1), Scalar(-1)})};
  Matrix swap(2, 2);
  swap.set(0, 1, Scalar(1));
  swap.set(1, 0, Scalar(1));
  sigmas.push_back(swap);
  for (int n = 1; n <= 5; ++n)
    for (const auto& s : sigmas) EXPECT_TRUE(all_hold(verify_twisted_gradings(n, s))) << n;
  EXPECT_THROW(verify_twisted_gradings(2, Matrix::diagonal({Scalar(2), Scalar(1)})), CliffordError);
}

// iota_V tau_V = (-1)^n tau_V iota_V with sigma from a numerically computed compatible pair.
TEST(TwistedGradingsProperty, NumericCompatiblePairs) {
  std::mt19937 rng(3);
  for (int n = 1; n <= 5; ++n) {
    auto eta = random_indefinite(rng, 1, 1);
    auto pair = compatible_pair(eta, random_positive(rng, 2));
    auto iota_v = dense_kron(dense(parity_grading(n)), CMatrix::Identity(2, 2));
    auto tau_v = dense_kron(dense(tau(n)), pair.sigma);
    double sign = n % 2 ? -1.0 : 1.0;
    EXPECT_LT((iota_v * tau_v - sign * tau_v * iota_v).norm(), 1e-10) << n;
    EXPECT_LT((tau_v * tau_v - CMatrix::Identity(tau_v.rows(), tau_v.cols())).norm(), 1e-10) << n;
  }
}

TEST(Bott, ModelHasIndexOne) {
  auto m = bott_model();
  ASSERT_TRUE(m.valid());
  auto r = bott_reduce(m, Matrix(2, 2));
  EXPECT_EQ(r.restricted_dim, 1u);
  EXPECT_EQ(r.index(), 1);
}

TEST(Bott, DirectSumHasIndexTwo) {
  auto m = direct_sum(bott_model(), bott_model());
  auto r = bott_reduce(m, Matrix(4, 4));
  EXPECT_EQ(r.restricted_dim, 2u);
  EXPECT_EQ(r.index(), 2);
}

TEST(Bott, InvertibleOperatorHasIndexZero) {
  // The model plus its oppositely graded copy, joined by A = beta_1 beta_2.
  auto m = bott_model();
  auto op = m;
  op.iota = -m.iota;
  auto sum = direct_sum(m, op);
  auto a = m.generators[0] * m.generators[1];
  Matrix d(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      d.set(i, 2 + j, a.at(i, j));
      d.set(2 + i, j, a.adjoint().at(i, j));
    }
  ASSERT_TRUE(same(d * d, Matrix::identity(4)));
  auto r = bott_reduce(sum, d);
  EXPECT_EQ(r.kernel_plus, 0u);
  EXPECT_EQ(r.kernel_minus, 0u);
  EXPECT_EQ(r.index(), 0);
}

TEST(Bott, ContractViolationNamesEntry) {
  auto m = bott_model();
  Matrix d = Matrix::identity(2);
  try {
    bott_reduce(m, d);
    FAIL() << "expected an error";
  } catch (const CliffordError& e) {
    EXPECT_NE(std::string(e.what()).find("entry ("), std::string::npos) << e.what();
  }
  EXPECT_THROW(bott_reduce(build_exterior(1).module, Matrix(2, 2)), CliffordError);
}

TEST(CompatiblePair, DefiniteFormGivesIdentity) {
  std::mt19937 rng(1);
  auto eta = random_positive(rng, 3);
  auto pair = compatible_pair(eta, eta);
  EXPECT_LT((pair.sigma - CMatrix::Identity(3, 3)).norm(), 1e-12);
  EXPECT_LT((pair.h - eta).norm(), 1e-12 * eta.norm());
}

TEST(CompatiblePair, DiagonalForm) {
  CMatrix eta = CMatrix::Zero(2, 2);
  eta(0, 0) = 1;
  eta(1, 1) = -1;
  auto pair = compatible_pair(eta, CMatrix::Identity(2, 2));
  EXPECT_LT((pair.sigma - eta).norm(), 1e-14);
  EXPECT_LT((pair.h - CMatrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(CompatiblePair, Errors) {
  CMatrix singular = CMatrix::Zero(2, 2);
  singular(0, 0) = 1;
  EXPECT_THROW(compatible_pair(singular, CMatrix::Identity(2, 2)), CompatiblePairError);
  CMatrix not_positive = -CMatrix::Identity(2, 2);
  EXPECT_THROW(compatible_pair(CMatrix::Identity(2, 2), not_positive), CompatiblePairError);
}

// Postconditions on random forms of signature (1,1), (2,1) and (2,2).
TEST(CompatiblePairProperty, RandomIndefiniteForms) {
  std::mt19937 rng(42);
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}})
    for (int trial = 0; trial < 20; ++trial) {
      auto eta = random_indefinite(rng, p, q);
      auto h0 = random_positive(rng, p + q);
      auto pair = compatible_pair(eta, h0);
      auto rep = check_compatible_pair(eta, pair);
      EXPECT_TRUE(rep.ok()) << "involution " << rep.involution_residual << " form " << rep.form_residual
                            << " isometry " << rep.isometry_residual << " min eig " << rep.min_eigenvalue;
      const CMatrix form = pair.h * pair.sigma;
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (form + form.adjoint()));
      int positive = 0;
      for (int i = 0; i < p + q; ++i) positive += eig.eigenvalues()(i) > 0;
      EXPECT_EQ(positive, p);  // h sigma = eta has the signature of eta
    }
}

TEST(CompatiblePairProperty, ContinuousInMetric) {
  std::mt19937 rng(9);
  auto eta = random_indefinite(rng, 1, 1);
  auto h0 = random_positive(rng, 2);
  std::vector<CMatrix> dirs;
  for (int k = 0; k < 6; ++k) dirs.push_back(random_hermitian(rng, 2));
  double coarse = continuity_ratio(eta, h0, dirs, 1e-4);
  double fine = continuity_ratio(eta, h0, dirs, 1e-6);
  EXPECT_LT(coarse, 1e3);
  EXPECT_LT(fine, 1e3);
  EXPECT_NEAR(coarse, fine, 0.05 * std::max(1.0, coarse));
}

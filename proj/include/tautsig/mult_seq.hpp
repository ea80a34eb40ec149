#pragma once

// Multiplicative characteristic classes from generating power series.
//
// A genus with even series f(x) = Q(x^2), Q(0) = 1, is expanded in the
// Pontryagin classes p_j = e_j(x_1^2, ..., x_k^2): log Q is expanded, power
// sums of the x_i^2 are rewritten through Newton's identities, and the result
// is exponentiated in the weighted polynomial ring Q[p_1, ..., p_k].

#include "tautsig/graded_ring.hpp"
#include "tautsig/rational.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tautsig::mult {

class SeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultSeriesCap = 20;
inline constexpr int kMaxGenusDegree = 5;

/// Truncated power series sum_{n <= order} c_n x^n over Q.
class FormalSeries {
 public:
  FormalSeries() : coeffs_(1, Rational(0)) {}
  explicit FormalSeries(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0);
  }

  static FormalSeries constant(const Rational& c, int order) {
    std::vector<Rational> v(static_cast<std::size_t>(order) + 1, Rational(0));
    v[0] = c;
    return FormalSeries(std::move(v));
  }

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Rational>& coefficients() const { return coeffs_; }
  const Rational& operator[](std::size_t n) const { return coeffs_.at(n); }

  bool is_even() const {
    for (std::size_t n = 1; n < coeffs_.size(); n += 2)
      if (sgn(coeffs_[n]) != 0) return false;
    return true;
  }

  FormalSeries truncate(int order) const {
    std::vector<Rational> v(static_cast<std::size_t>(order) + 1, Rational(0));
    for (std::size_t n = 0; n < v.size() && n < coeffs_.size(); ++n) v[n] = coeffs_[n];
    return FormalSeries(std::move(v));
  }

  friend FormalSeries operator*(const FormalSeries& a, const FormalSeries& b) {
    int order = std::min(a.order(), b.order());
    std::vector<Rational> v(static_cast<std::size_t>(order) + 1, Rational(0));
    for (int i = 0; i <= order; ++i)
      for (int j = 0; i + j <= order; ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return FormalSeries(std::move(v));
  }

  friend FormalSeries operator/(const FormalSeries& a, const FormalSeries& b) {
    if (sgn(b.coeffs_[0]) == 0) throw SeriesError("series division by a non-unit");
    int order = std::min(a.order(), b.order());
    std::vector<Rational> q(static_cast<std::size_t>(order) + 1, Rational(0));
    for (int n = 0; n <= order; ++n) {
      Rational acc = a.coeffs_[n];
      for (int j = 1; j <= n; ++j) acc -= b.coeffs_[j] * q[n - j];
      q[n] = acc / b.coeffs_[0];
    }
    return FormalSeries(std::move(q));
  }

  /// f(s x).
  FormalSeries scaled(const Rational& s) const {
    auto v = coeffs_;
    Rational p = 1;
    for (auto& c : v) {
      c *= p;
      p *= s;
    }
    return FormalSeries(std::move(v));
  }

  friend bool operator==(const FormalSeries& a, const FormalSeries& b) { return a.coeffs_ == b.coeffs_; }
  friend std::ostream& operator<<(std::ostream& os, const FormalSeries& f) { return os << f.to_string(); }

  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t n = 0; n < coeffs_.size(); ++n) {
      if (sgn(coeffs_[n]) == 0) continue;
      os << (first ? "" : " + ") << coeffs_[n];
      if (n > 0) os << "*x^" << n;
      first = false;
    }
    return first ? "0" : os.str();
  }

 private:
  std::vector<Rational> coeffs_;
};

/// Names accepted by expand_series.
inline const std::vector<std::string>& series_names() {
  static const std::vector<std::string> names{"L-hirzebruch", "L-atiyah-singer", "exp"};
  return names;
}

inline FormalSeries expand_series(const std::string& name, int order, int cap = kDefaultSeriesCap) {
  if (order < 0) throw SeriesError("negative series order");
  if (order > cap) throw SeriesError("order " + std::to_string(order) + " beyond cap " + std::to_string(cap));
  // One extra term so the division below is exact to `order`.
  std::vector<Rational> exp_c(static_cast<std::size_t>(order) + 2);
  Rational fact = 1;
  for (int n = 0; n <= order + 1; ++n) {
    if (n > 0) fact *= n;
    exp_c[n] = Rational(1) / fact;
  }
  if (name == "exp") return FormalSeries(std::vector<Rational>(exp_c.begin(), exp_c.begin() + order + 1));
  if (name == "L-hirzebruch" || name == "L-atiyah-singer") {
    // x / tanh(x) = cosh(x) / (sinh(x) / x).
    std::vector<Rational> cosh_c(static_cast<std::size_t>(order) + 1, Rational(0));
    std::vector<Rational> sinhc_c(static_cast<std::size_t>(order) + 1, Rational(0));
    for (int n = 0; n <= order; n += 2) {
      cosh_c[n] = exp_c[n];
      sinhc_c[n] = exp_c[n + 1];
    }
    auto l = FormalSeries(cosh_c) / FormalSeries(sinhc_c);
    return name == "L-hirzebruch" ? l : l.scaled(Rational(1, 2));
  }
  throw SeriesError("unknown series '" + name + "'");
}

// ------------------------------------------------------------ polynomials

enum class ClassFamily { Pontryagin, Chern };

/// Polynomial in p_1, p_2, ... (or c_1, c_2, ...) with weights p_j -> j.
class CharClassPolynomial {
 public:
  using Exponents = std::vector<int>;  // exponent of the (j+1)-th class at index j

  explicit CharClassPolynomial(ClassFamily family = ClassFamily::Pontryagin) : family_(family) {}

  static CharClassPolynomial constant(ClassFamily family, const Rational& c) {
    CharClassPolynomial p(family);
    p.add_term({}, c);
    return p;
  }

  /// The single variable p_j (or c_j), j >= 1.
  static CharClassPolynomial variable(ClassFamily family, int j) {
    CharClassPolynomial p(family);
    Exponents e(static_cast<std::size_t>(j), 0);
    e[j - 1] = 1;
    p.add_term(e, 1);
    return p;
  }

  ClassFamily family() const { return family_; }
  const std::map<Exponents, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  static int weight_of(const Exponents& e) {
    int w = 0;
    for (std::size_t j = 0; j < e.size(); ++j) w += static_cast<int>(j + 1) * e[j];
    return w;
  }

  /// Weight of a homogeneous polynomial (0 for the zero polynomial).
  int weight() const {
    std::optional<int> w;
    for (const auto& [e, c] : terms_) {
      int we = weight_of(e);
      if (w && *w != we) throw SeriesError("polynomial is not weighted-homogeneous");
      w = we;
    }
    return w.value_or(0);
  }

  void add_term(Exponents e, const Rational& c) {
    while (!e.empty() && e.back() == 0) e.pop_back();
    if (sgn(c) == 0) return;
    auto [it, inserted] = terms_.emplace(std::move(e), c);
    if (!inserted) {
      it->second += c;
      if (sgn(it->second) == 0) terms_.erase(it);
    }
  }

  Rational coefficient(Exponents e) const {
    while (!e.empty() && e.back() == 0) e.pop_back();
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  CharClassPolynomial component(int w) const {
    CharClassPolynomial out(family_);
    for (const auto& [e, c] : terms_)
      if (weight_of(e) == w) out.terms_.emplace(e, c);
    return out;
  }

  CharClassPolynomial truncated(int max_weight) const {
    CharClassPolynomial out(family_);
    for (const auto& [e, c] : terms_)
      if (weight_of(e) <= max_weight) out.terms_.emplace(e, c);
    return out;
  }

  CharClassPolynomial& operator+=(const CharClassPolynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  CharClassPolynomial& operator*=(const Rational& s) {
    if (sgn(s) == 0) terms_.clear();
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }
  friend CharClassPolynomial operator+(CharClassPolynomial a, const CharClassPolynomial& b) { return a += b; }
  friend CharClassPolynomial operator-(CharClassPolynomial a, CharClassPolynomial b) { return a += (b *= -1); }
  friend CharClassPolynomial operator*(CharClassPolynomial a, const Rational& s) { return a *= s; }
  friend CharClassPolynomial operator*(const Rational& s, CharClassPolynomial a) { return a *= s; }

  /// Product truncated at `max_weight` (no truncation when negative).
  static CharClassPolynomial multiply(const CharClassPolynomial& a, const CharClassPolynomial& b,
                                      int max_weight = -1) {
    CharClassPolynomial out(a.family_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(std::max(ea.size(), eb.size()), 0);
        for (std::size_t j = 0; j < ea.size(); ++j) e[j] += ea[j];
        for (std::size_t j = 0; j < eb.size(); ++j) e[j] += eb[j];
        if (max_weight >= 0 && weight_of(e) > max_weight) continue;
        out.add_term(std::move(e), ca * cb);
      }
    return out;
  }

  friend CharClassPolynomial operator*(const CharClassPolynomial& a, const CharClassPolynomial& b) {
    return multiply(a, b);
  }

  friend bool operator==(const CharClassPolynomial& a, const CharClassPolynomial& b) {
    return a.family_ == b.family_ && a.terms_ == b.terms_;
  }
  friend std::ostream& operator<<(std::ostream& os, const CharClassPolynomial& p) { return os << p.to_string(); }

  char letter() const { return family_ == ClassFamily::Pontryagin ? 'p' : 'c'; }

  static std::string monomial_string(char letter, const Exponents& e) {
    std::string out;
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] == 0) continue;
      if (!out.empty()) out += "*";
      out += letter + std::to_string(j + 1);
      if (e[j] > 1) out += "^" + std::to_string(e[j]);
    }
    return out.empty() ? "1" : out;
  }

  /// Parses "1", "p1^2", "p1*p2" style monomials.
  static Exponents parse_monomial(const std::string& text, char letter) {
    Exponents e;
    if (text == "1") return e;
    std::size_t pos = 0;
    while (pos < text.size()) {
      auto star = text.find('*', pos);
      std::string tok = text.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
      if (tok.size() < 2 || tok[0] != letter) throw SeriesError("bad class monomial '" + text + "'");
      int power = 1;
      if (auto caret = tok.find('^'); caret != std::string::npos) {
        power = std::stoi(tok.substr(caret + 1));
        tok = tok.substr(0, caret);
      }
      int j = std::stoi(tok.substr(1));
      if (j < 1) throw SeriesError("class index must be >= 1");
      if (static_cast<int>(e.size()) < j) e.resize(static_cast<std::size_t>(j), 0);
      e[j - 1] += power;
      if (star == std::string::npos) break;
      pos = star + 1;
    }
    return e;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) os << (sgn(c) < 0 ? " - " : " + ");
      else if (sgn(c) < 0) os << "-";
      first = false;
      Rational a = abs(c);
      auto mono = monomial_string(letter(), e);
      if (mono == "1") os << a;
      else if (a == 1) os << mono;
      else os << a << "*" << mono;
    }
    return os.str();
  }

 private:
  ClassFamily family_;
  std::map<Exponents, Rational> terms_;
};

/// Power sum s_m of the roots as a polynomial in the elementary symmetric
/// functions, via Newton's identities. Returns s_1 .. s_max (index 0 = s_1).
inline std::vector<CharClassPolynomial> power_sums(ClassFamily family, int max) {
  std::vector<CharClassPolynomial> s;
  for (int m = 1; m <= max; ++m) {
    CharClassPolynomial acc(family);
    for (int i = 1; i < m; ++i) {
      auto term = CharClassPolynomial::variable(family, i) * s[m - i - 1];
      acc += term * Rational(minus_one_pow(i - 1));
    }
    acc += CharClassPolynomial::variable(family, m) * Rational(minus_one_pow(m - 1) * m);
    s.push_back(std::move(acc));
  }
  return s;
}

/// Weight-k part of the multiplicative sequence of the even series f.
inline CharClassPolynomial genus_components(const FormalSeries& f, int k) {
  if (f[0] != 1) throw SeriesError("not a genus: f(0) != 1");
  if (!f.is_even()) throw SeriesError("not a genus: series is not even");
  if (k < 0) throw SeriesError("negative genus degree");
  if (k > kMaxGenusDegree) throw SeriesError("genus degree beyond cap " + std::to_string(kMaxGenusDegree));
  if (f.order() < 2 * k) throw SeriesError("series truncated below order 2k");
  const auto family = ClassFamily::Pontryagin;
  if (k == 0) return CharClassPolynomial::constant(family, 1);
  // Q(z) with z = x^2, then log Q(z) = sum_m a_m z^m.
  std::vector<Rational> q(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) q[j] = f[2 * j];
  std::vector<Rational> log_q(static_cast<std::size_t>(k) + 1, Rational(0));
  // (log Q)' = Q'/Q  =>  m a_m = m q_m - sum_{j=1}^{m-1} j a_j q_{m-j}.
  for (int m = 1; m <= k; ++m) {
    Rational acc = m * q[m];
    for (int j = 1; j < m; ++j) acc -= j * log_q[j] * q[m - j];
    log_q[m] = acc / m;
  }
  auto s = power_sums(family, k);
  CharClassPolynomial log_k(family);
  for (int m = 1; m <= k; ++m) log_k += s[m - 1] * log_q[m];
  // exp(log_k) truncated at weight k.
  CharClassPolynomial result = CharClassPolynomial::constant(family, 1);
  CharClassPolynomial term = CharClassPolynomial::constant(family, 1);
  for (int n = 1; n <= k; ++n) {
    term = CharClassPolynomial::multiply(term, log_k, k) * Rational(1, n);
    result += term;
  }
  return result.component(k);
}

/// Degree-2m Chern character polynomial s_m(c) / m!.
inline CharClassPolynomial chern_character_component(int m) {
  if (m < 0) throw SeriesError("negative Chern character degree");
  if (m == 0) throw SeriesError("degree-0 Chern character is the rank");
  auto s = power_sums(ClassFamily::Chern, m);
  Rational fact = 1;
  for (int i = 2; i <= m; ++i) fact *= i;
  return s[m - 1] * (Rational(1) / fact);
}

// ------------------------------------------------------------ bundle data

enum class BundleKind { Complex, RealOriented };

/// Characteristic data of a vector bundle over a model space. `classes[i]` is
/// c_{i+1} (degree 2i+2) for complex bundles, p_{i+1} (degree 4i+4) for real.
struct BundleData {
  BundleKind kind = BundleKind::Complex;
  ring::SpacePtr space;
  int rank = 0;
  std::vector<ring::GradedClass> classes;
  std::shared_ptr<const BundleData> positive;  // V_+ of a splitting
  std::shared_ptr<const BundleData> negative;  // V_-

  int class_degree(std::size_t index) const {
    int j = static_cast<int>(index) + 1;
    return kind == BundleKind::Complex ? 2 * j : 4 * j;
  }

  void validate() const {
    if (!space) throw SeriesError("bundle data without a space");
    for (std::size_t i = 0; i < classes.size(); ++i) {
      classes[i].require_same_space(ring::GradedClass::zero(space));
      if (!classes[i].is_zero() && classes[i].degrees() != std::vector<int>{class_degree(i)})
        throw SeriesError("characteristic class " + std::to_string(i + 1) + " has wrong degree");
    }
    if ((positive == nullptr) != (negative == nullptr)) throw SeriesError("splitting needs both V+ and V-");
  }

  bool has_splitting() const { return positive && negative; }

  static BundleData trivial(BundleKind kind, const ring::SpacePtr& space, int rank) {
    return BundleData{kind, space, rank, {}, nullptr, nullptr};
  }
};

/// Evaluated class together with a flag for classes that were absent from the
/// bundle data and defaulted to zero.
struct EvaluatedClass {
  ring::GradedClass value;
  bool missing_defaulted = false;
};

/// Substitutes the bundle's classes into a polynomial.
inline EvaluatedClass evaluate_polynomial(const CharClassPolynomial& poly, const BundleData& bundle) {
  bundle.validate();
  EvaluatedClass out{ring::GradedClass::zero(bundle.space), false};
  for (const auto& [e, c] : poly.terms()) {
    auto term = ring::GradedClass::scalar(bundle.space, c);
    bool vanished = false;
    for (std::size_t j = 0; j < e.size() && !vanished; ++j) {
      if (e[j] == 0) continue;
      if (j >= bundle.classes.size()) {
        if (bundle.class_degree(j) <= bundle.space->top_degree()) out.missing_defaulted = true;
        vanished = true;
        break;
      }
      term = ring::mul(term, ring::power(bundle.classes[j], static_cast<unsigned>(e[j])));
    }
    if (!vanished) out.value += term;
  }
  return out;
}

/// sum_{k <= max_k} K_k(p) for the genus of `series_name`.
inline EvaluatedClass genus_class(const BundleData& bundle, int max_k, const std::string& series_name) {
  if (bundle.kind != BundleKind::RealOriented) throw SeriesError("genus needs real oriented bundle data");
  auto f = expand_series(series_name, 2 * max_k);
  EvaluatedClass out{ring::GradedClass::zero(bundle.space), false};
  for (int k = 0; k <= max_k; ++k) {
    auto part = evaluate_polynomial(genus_components(f, k), bundle);
    out.value += part.value;
    out.missing_defaulted = out.missing_defaulted || part.missing_defaulted;
  }
  return out;
}

/// Atiyah-Singer L-class, series (x/2)/tanh(x/2).
inline EvaluatedClass l_class(const BundleData& bundle, int max_k) {
  return genus_class(bundle, max_k, "L-atiyah-singer");
}

/// Hirzebruch L-class, series x/tanh(x).
inline EvaluatedClass hirzebruch_l_class(const BundleData& bundle, int max_k) {
  return genus_class(bundle, max_k, "L-hirzebruch");
}

inline ring::GradedClass chern_character(const BundleData& bundle, int max_m) {
  if (bundle.kind != BundleKind::Complex) throw SeriesError("Chern character needs complex bundle data");
  auto out = ring::GradedClass::scalar(bundle.space, bundle.rank);
  for (int m = 1; m <= max_m; ++m) out += evaluate_polynomial(chern_character_component(m), bundle).value;
  return out;
}

/// ch(V+) - ch(V-).
inline ring::GradedClass super_chern_character(const BundleData& bundle, int max_m) {
  if (!bundle.has_splitting()) throw SeriesError("super Chern character needs a splitting (V+, V-)");
  return chern_character(*bundle.positive, max_m) - chern_character(*bundle.negative, max_m);
}

/// Total class of a Whitney sum: c(a + b) = c(a) c(b).
inline BundleData whitney_sum(const BundleData& a, const BundleData& b) {
  if (a.kind != b.kind) throw SeriesError("Whitney sum of bundles of different kinds");
  a.validate();
  b.validate();
  ring::GradedClass::zero(a.space).require_same_space(ring::GradedClass::zero(b.space));
  const std::size_t n = a.classes.size() + b.classes.size();
  BundleData out{a.kind, a.space, a.rank + b.rank, {}, nullptr, nullptr};
  auto cls = [](const BundleData& d, std::size_t j) {
    if (j == 0) return ring::GradedClass::unit(d.space);
    return j <= d.classes.size() ? d.classes[j - 1] : ring::GradedClass::zero(d.space);
  };
  for (std::size_t k = 1; k <= n; ++k) {
    auto acc = ring::GradedClass::zero(a.space);
    for (std::size_t i = 0; i <= k; ++i) acc += ring::mul(cls(a, i), ring::rebase(cls(b, k - i), a.space));
    out.classes.push_back(std::move(acc));
  }
  while (!out.classes.empty() && out.classes.back().is_zero()) out.classes.pop_back();
  return out;
}

/// Tensor product of complex line bundles: c_1 adds.
inline BundleData tensor_line_bundles(const BundleData& a, const BundleData& b) {
  if (a.kind != BundleKind::Complex || b.kind != BundleKind::Complex || a.rank != 1 || b.rank != 1)
    throw SeriesError("tensor_line_bundles needs two complex line bundles");
  auto c1 = [](const BundleData& d) {
    return d.classes.empty() ? ring::GradedClass::zero(d.space) : d.classes[0];
  };
  return BundleData{BundleKind::Complex, a.space, 1, {c1(a) + ring::rebase(c1(b), a.space)}, nullptr, nullptr};
}

/// External product bundle data: pullbacks of a (first factors) and b.
inline BundleData external_sum(const BundleData& a, const BundleData& b) {
  auto space = ring::product(a.space, b.space);
  auto lift = [&](const BundleData& d, bool left) {
    BundleData out{d.kind, space, d.rank, {}, nullptr, nullptr};
    for (const auto& c : d.classes) {
      out.classes.push_back(left ? ring::cross(c, ring::GradedClass::unit(b.space))
                                 : ring::cross(ring::GradedClass::unit(a.space), c));
    }
    return out;
  };
  return whitney_sum(lift(a, true), lift(b, false));
}

}  // namespace tautsig::mult

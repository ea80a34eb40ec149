#pragma once

// Exact scalars: arbitrary precision rationals and Gaussian rationals Q(i).

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tautsig {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Parses "7/45", "-3", "0.25" (finite decimals only) or "1e-3".
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  while (!s.empty() && s.back() == ' ') s.pop_back();
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (s.find_first_of(".eE") != std::string::npos) {
    // Decimal literal: split mantissa and exponent, keep it exact.
    std::string mant = s;
    long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
      mant = s.substr(0, e);
      exp10 = std::stol(s.substr(e + 1));
    }
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
      neg = mant[0] == '-';
      mant.erase(mant.begin());
    }
    std::string digits;
    for (char c : mant) {
      if (c == '.') {
        continue;
      }
      if (c < '0' || c > '9') throw std::invalid_argument("bad rational literal: " + s);
      digits.push_back(c);
    }
    if (auto dot = mant.find('.'); dot != std::string::npos) {
      exp10 -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty()) throw std::invalid_argument("bad rational literal: " + s);
    mpz_class num(digits, 10);
    mpz_class scale = 1;
    for (long i = 0; i < (exp10 < 0 ? -exp10 : exp10); ++i) scale *= 10;
    Rational r = exp10 >= 0 ? Rational(num * scale) : Rational(num, scale);
    r.canonicalize();
    return neg ? Rational(-r) : r;
  }
  Rational r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational pow_rational(const Rational& base, unsigned exponent) {
  Rational out = 1;
  for (unsigned i = 0; i < exponent; ++i) out *= base;
  return out;
}

/// (-1)^k for any integer k.
constexpr int minus_one_pow(long k) { return (k % 2 == 0) ? 1 : -1; }

/// Element a + b i of Q(i).
class GaussRational {
 public:
  GaussRational() = default;
  GaussRational(long re) : re_(re) {}  // NOLINT(google-explicit-constructor)
  GaussRational(Rational re) : re_(std::move(re)) {}  // NOLINT
  GaussRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static GaussRational i() { return {Rational(0), Rational(1)}; }

  /// i^k for any integer k.
  static GaussRational i_pow(long k) {
    switch (((k % 4) + 4) % 4) {
      case 0: return {Rational(1), Rational(0)};
      case 1: return {Rational(0), Rational(1)};
      case 2: return {Rational(-1), Rational(0)};
      default: return {Rational(0), Rational(-1)};
    }
  }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }

  GaussRational conj() const { return {re_, Rational(-im_)}; }
  Rational norm() const { return re_ * re_ + im_ * im_; }

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  GaussRational& operator+=(const GaussRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussRational& operator-=(const GaussRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussRational& operator*=(const GaussRational& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    Rational i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  GaussRational& operator/=(const GaussRational& o) {
    Rational n = o.norm();
    if (sgn(n) == 0) throw std::domain_error("division by zero in Q(i)");
    *this *= o.conj();
    re_ /= n;
    im_ /= n;
    return *this;
  }

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend GaussRational operator-(const GaussRational& a) { return {Rational(-a.re_), Rational(-a.im_)}; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const GaussRational& z) {
    if (sgn(z.im_) == 0) return os << z.re_;
    if (sgn(z.re_) == 0) return os << z.im_ << "i";
    return os << "(" << z.re_ << (sgn(z.im_) > 0 ? "+" : "") << z.im_ << "i)";
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

inline std::string to_string(const GaussRational& z) {
  std::ostringstream os;
  os << z;
  return os.str();
}

// Scalar traits shared by the exact and floating matrix code.
inline GaussRational conj_scalar(const GaussRational& z) { return z.conj(); }
inline std::complex<double> conj_scalar(const std::complex<double>& z) { return std::conj(z); }
inline bool is_zero_scalar(const GaussRational& z) { return z.is_zero(); }
inline bool is_zero_scalar(const std::complex<double>& z) { return z == std::complex<double>(0.0, 0.0); }

}  // namespace tautsig

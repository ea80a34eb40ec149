#pragma once

// Rational cohomology rings of model spaces (point, circle, tori, closed
// surfaces and finite products of these), presented by explicit
// multiplication tables on a finite additive basis.
//
// Sign conventions:
//  * products of factors use the Koszul rule on tensor monomials;
//  * the fundamental class of a product is the ordered product of the factor
//    fundamental classes;
//  * fibre integration along a block of factors F satisfies the projection
//    formula p_!(x * p^*y) = p_!(x) * y with the pullback on the right, which
//    forces p_!(a x b) = (-1)^{|a| dim F} <b,[F]> a for X x F -> X.

#include "tautsig/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tautsig::ring {

class RingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Generator {
  std::string symbol;
  int degree = 1;
};

/// Linear combination of basis indices of a single presentation.
using BasisCombination = std::vector<std::pair<int, Rational>>;

/// A relation as it appears in a descriptor: ordered product of basis symbols
/// equal to a combination of basis symbols ("1" denotes the unit).
struct Relation {
  std::vector<std::string> lhs;
  std::vector<std::pair<std::string, Rational>> rhs;
};

/// One finitely presented graded-commutative Q-algebra. Basis element 0 is the
/// unit; the remaining basis elements are the generators in declaration order.
class Presentation {
 public:
  Presentation(std::string name, std::vector<Generator> generators, const std::vector<Relation>& relations,
               int top_degree, std::optional<std::string> fundamental_class)
      : name_(std::move(name)), top_degree_(top_degree) {
    if (top_degree < 0) throw RingError("top_degree must be non-negative");
    symbols_.push_back("1");
    degrees_.push_back(0);
    for (auto& g : generators) {
      if (g.degree < 1) throw RingError("generator '" + g.symbol + "' must have degree >= 1");
      if (g.symbol == "1" || index_of(g.symbol)) throw RingError("duplicate generator '" + g.symbol + "'");
      symbols_.push_back(std::move(g.symbol));
      degrees_.push_back(g.degree);
    }
    std::vector<const Relation*> longer;
    for (const auto& rel : relations) {
      if (rel.lhs.size() < 2) throw RingError("relation lhs needs at least two factors");
      if (rel.lhs.size() > 2) {
        longer.push_back(&rel);
        continue;
      }
      int a = require_index(rel.lhs[0]);
      int b = require_index(rel.lhs[1]);
      auto rhs = to_combination(rel.rhs, degrees_[a] + degrees_[b]);
      auto key = std::make_pair(a, b);
      if (table_.count(key) && table_.at(key) != rhs)
        throw RingError("conflicting relations for " + rel.lhs[0] + "*" + rel.lhs[1]);
      table_[key] = std::move(rhs);
    }
    complete_by_commutativity();
    if (fundamental_class) {
      int f = require_index(*fundamental_class);
      if (degrees_[f] != top_degree_)
        throw RingError("fundamental class '" + *fundamental_class + "' must have degree top_degree");
      fundamental_ = f;
    }
    for (int d : degrees_)
      if (d > top_degree_) throw RingError("basis element above top_degree in '" + name_ + "'");
    check_associative();
    for (const auto* rel : longer) check_long_relation(*rel);
  }

  const std::string& name() const { return name_; }
  int top_degree() const { return top_degree_; }
  std::size_t basis_size() const { return symbols_.size(); }
  const std::string& symbol(int i) const { return symbols_.at(i); }
  int degree(int i) const { return degrees_.at(i); }
  std::optional<int> fundamental() const { return fundamental_; }

  std::optional<int> index_of(const std::string& sym) const {
    for (std::size_t i = 0; i < symbols_.size(); ++i)
      if (symbols_[i] == sym) return static_cast<int>(i);
    return std::nullopt;
  }

  /// Product of two basis elements in normal form.
  BasisCombination product(int a, int b) const {
    if (a == 0) return {{b, Rational(1)}};
    if (b == 0) return {{a, Rational(1)}};
    if (degrees_[a] + degrees_[b] > top_degree_) return {};
    auto it = table_.find({a, b});
    return it == table_.end() ? BasisCombination{} : it->second;
  }

  /// Sum over degrees of (-1)^d times the number of basis elements of degree d.
  long euler_characteristic() const {
    long chi = 0;
    for (int d : degrees_) chi += minus_one_pow(d);
    return chi;
  }

  friend bool operator==(const Presentation& a, const Presentation& b) {
    return a.name_ == b.name_ && a.symbols_ == b.symbols_ && a.degrees_ == b.degrees_ &&
           a.top_degree_ == b.top_degree_ && a.fundamental_ == b.fundamental_ && a.table_ == b.table_;
  }

  /// Relations in descriptor form (both orders of every nonzero product).
  std::vector<Relation> relations() const {
    std::vector<Relation> out;
    for (const auto& [key, comb] : table_) {
      Relation r;
      r.lhs = {symbols_[key.first], symbols_[key.second]};
      for (const auto& [idx, c] : comb) r.rhs.emplace_back(symbols_[idx], c);
      out.push_back(std::move(r));
    }
    return out;
  }

 private:
  int require_index(const std::string& sym) const {
    auto i = index_of(sym);
    if (!i) throw RingError("unknown symbol '" + sym + "' in '" + name_ + "'");
    return *i;
  }

  BasisCombination to_combination(const std::vector<std::pair<std::string, Rational>>& rhs, int degree) const {
    std::map<int, Rational> acc;
    for (const auto& [sym, c] : rhs) {
      int idx = require_index(sym);
      if (degrees_[idx] != degree)
        throw RingError("relation does not respect grading: '" + sym + "' has degree " +
                        std::to_string(degrees_[idx]) + ", expected " + std::to_string(degree));
      acc[idx] += c;
    }
    BasisCombination out;
    for (auto& [idx, c] : acc)
      if (sgn(c) != 0) out.emplace_back(idx, c);
    return out;
  }

  void complete_by_commutativity() {
    auto entries = table_;
    for (const auto& [key, comb] : entries) {
      auto rev = std::make_pair(key.second, key.first);
      BasisCombination expect = comb;
      int s = minus_one_pow(static_cast<long>(degrees_[key.first]) * degrees_[key.second]);
      for (auto& [idx, c] : expect) c *= s;
      auto it = table_.find(rev);
      if (it == table_.end()) {
        table_[rev] = expect;
      } else if (it->second != expect) {
        throw RingError("multiplication table in '" + name_ + "' is not graded-commutative for " +
                        symbols_[key.first] + "," + symbols_[key.second]);
      }
    }
    for (auto it = table_.begin(); it != table_.end();) {
      it = it->second.empty() ? table_.erase(it) : std::next(it);
    }
  }

  std::map<int, Rational> times(const std::map<int, Rational>& x, int b) const {
    std::map<int, Rational> out;
    for (const auto& [a, c] : x)
      for (const auto& [idx, d] : product(a, b)) out[idx] += c * d;
    for (auto it = out.begin(); it != out.end();) it = sgn(it->second) == 0 ? out.erase(it) : std::next(it);
    return out;
  }

  void check_associative() const {
    const int n = static_cast<int>(symbols_.size());
    for (int a = 1; a < n; ++a)
      for (int b = 1; b < n; ++b)
        for (int c = 1; c < n; ++c) {
          auto left = times(times({{a, Rational(1)}}, b), c);
          std::map<int, Rational> right;
          for (const auto& [idx, coeff] : product(b, c))
            for (const auto& [idx2, coeff2] : product(a, idx)) right[idx2] += coeff * coeff2;
          for (auto it = right.begin(); it != right.end();)
            it = sgn(it->second) == 0 ? right.erase(it) : std::next(it);
          if (left != right)
            throw RingError("multiplication table in '" + name_ + "' is not associative on " + symbols_[a] +
                            "," + symbols_[b] + "," + symbols_[c]);
        }
  }

  void check_long_relation(const Relation& rel) const {
    std::map<int, Rational> acc{{require_index(rel.lhs[0]), Rational(1)}};
    int degree = degrees_[require_index(rel.lhs[0])];
    for (std::size_t i = 1; i < rel.lhs.size(); ++i) {
      int b = require_index(rel.lhs[i]);
      degree += degrees_[b];
      acc = times(acc, b);
    }
    auto expect = to_combination(rel.rhs, degree);
    std::map<int, Rational> want(expect.begin(), expect.end());
    if (degree > top_degree_ && !want.empty()) throw RingError("relation rhs above top_degree");
    if (acc != want) throw RingError("relation not implied by the multiplication table");
  }

  std::string name_;
  std::vector<std::string> symbols_;
  std::vector<int> degrees_;
  int top_degree_ = 0;
  std::optional<int> fundamental_;
  std::map<std::pair<int, int>, BasisCombination> table_;
};

using PresentationPtr = std::shared_ptr<const Presentation>;

/// Finite ordered product of presentations; an atomic model is a product with
/// one factor.
class Space {
 public:
  explicit Space(std::vector<PresentationPtr> factors) : factors_(std::move(factors)) {}

  const std::vector<PresentationPtr>& factors() const { return factors_; }
  std::size_t factor_count() const { return factors_.size(); }
  const Presentation& factor(std::size_t i) const { return *factors_.at(i); }

  std::string name() const {
    if (factors_.empty()) return "point";
    std::string out;
    for (std::size_t i = 0; i < factors_.size(); ++i) out += (i ? " x " : "") + factors_[i]->name();
    return out;
  }

  int top_degree() const {
    int d = 0;
    for (const auto& f : factors_) d += f->top_degree();
    return d;
  }

  bool has_fundamental_class() const {
    return std::all_of(factors_.begin(), factors_.end(), [](const auto& f) { return f->fundamental().has_value(); });
  }

  long euler_characteristic() const {
    long chi = 1;
    for (const auto& f : factors_) chi *= f->euler_characteristic();
    return chi;
  }

  friend bool operator==(const Space& a, const Space& b) {
    if (a.factors_.size() != b.factors_.size()) return false;
    for (std::size_t i = 0; i < a.factors_.size(); ++i)
      if (a.factors_[i] != b.factors_[i] && !(*a.factors_[i] == *b.factors_[i])) return false;
    return true;
  }

 private:
  std::vector<PresentationPtr> factors_;
};

using SpacePtr = std::shared_ptr<const Space>;

inline SpacePtr make_space(std::vector<PresentationPtr> factors) {
  return std::make_shared<const Space>(std::move(factors));
}

/// Ordered product X x Y.
inline SpacePtr product(const SpacePtr& x, const SpacePtr& y) {
  auto f = x->factors();
  f.insert(f.end(), y->factors().begin(), y->factors().end());
  return make_space(std::move(f));
}

// ---------------------------------------------------------------- presets

inline PresentationPtr point_presentation() {
  static const auto p = std::make_shared<const Presentation>("point", std::vector<Generator>{},
                                                             std::vector<Relation>{}, 0, "1");
  return p;
}

inline PresentationPtr circle_presentation() {
  static const auto p = std::make_shared<const Presentation>("circle", std::vector<Generator>{{"u", 1}},
                                                             std::vector<Relation>{}, 1, "u");
  return p;
}

/// H*(Sigma_g): a_i, b_i in degree 1, zeta in degree 2, a_i b_j = delta_ij zeta.
inline PresentationPtr surface_presentation(int genus) {
  if (genus < 0) throw RingError("genus must be non-negative");
  std::vector<Generator> gens;
  for (int i = 1; i <= genus; ++i) gens.push_back({"a" + std::to_string(i), 1});
  for (int i = 1; i <= genus; ++i) gens.push_back({"b" + std::to_string(i), 1});
  gens.push_back({"zeta", 2});
  std::vector<Relation> rels;
  for (int i = 1; i <= genus; ++i)
    rels.push_back({{"a" + std::to_string(i), "b" + std::to_string(i)}, {{"zeta", Rational(1)}}});
  return std::make_shared<const Presentation>("surface(" + std::to_string(genus) + ")", std::move(gens), rels, 2,
                                              "zeta");
}

inline SpacePtr point() { return make_space({}); }
inline SpacePtr circle() { return make_space({circle_presentation()}); }
inline SpacePtr surface(int genus) { return make_space({surface_presentation(genus)}); }
inline SpacePtr torus(int n) {
  if (n < 0) throw RingError("torus dimension must be non-negative");
  return make_space(std::vector<PresentationPtr>(static_cast<std::size_t>(n), circle_presentation()));
}

/// Resolves "point", "circle", "torus(n)" and "surface(g)".
inline SpacePtr preset(const std::string& spec) {
  if (spec == "point") return point();
  if (spec == "circle") return circle();
  auto arg = [&](const std::string& head) -> std::optional<int> {
    if (spec.rfind(head + "(", 0) != 0 || spec.back() != ')') return std::nullopt;
    return std::stoi(spec.substr(head.size() + 1, spec.size() - head.size() - 2));
  };
  if (auto n = arg("torus")) return torus(*n);
  if (auto g = arg("surface")) return surface(*g);
  throw RingError("unknown model space preset '" + spec + "'");
}

// ---------------------------------------------------------------- classes

/// Per-factor basis indices.
using Monomial = std::vector<int>;

class GradedClass {
 public:
  using Terms = std::map<Monomial, Rational>;

  /// The zero class on the point.
  GradedClass() : space_(point()) {}
  explicit GradedClass(SpacePtr space) : space_(std::move(space)) {}

  static GradedClass zero(const SpacePtr& space) { return GradedClass(space); }

  static GradedClass unit(const SpacePtr& space) {
    GradedClass c(space);
    c.terms_[Monomial(space->factor_count(), 0)] = 1;
    return c;
  }

  static GradedClass scalar(const SpacePtr& space, const Rational& value) { return unit(space) * value; }

  static GradedClass monomial(const SpacePtr& space, Monomial m, const Rational& coeff = 1) {
    if (m.size() != space->factor_count()) throw RingError("monomial length does not match space");
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] < 0 || m[i] >= static_cast<int>(space->factor(i).basis_size()))
        throw RingError("monomial index out of range");
    GradedClass c(space);
    if (sgn(coeff) != 0) c.terms_[std::move(m)] = coeff;
    return c;
  }

  /// The generator `symbol` of factor `factor`, pulled back to the product.
  static GradedClass generator(const SpacePtr& space, std::size_t factor, const std::string& symbol) {
    auto idx = space->factor(factor).index_of(symbol);
    if (!idx) throw RingError("unknown generator '" + symbol + "'");
    Monomial m(space->factor_count(), 0);
    m[factor] = *idx;
    return monomial(space, m);
  }

  static GradedClass fundamental_class(const SpacePtr& space) {
    Monomial m;
    for (const auto& f : space->factors()) {
      if (!f->fundamental()) throw RingError("space '" + space->name() + "' has no fundamental class");
      m.push_back(*f->fundamental());
    }
    return monomial(space, m);
  }

  const SpacePtr& space() const { return space_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree_of(const Monomial& m) const {
    int d = 0;
    for (std::size_t i = 0; i < m.size(); ++i) d += space_->factor(i).degree(m[i]);
    return d;
  }

  std::vector<int> degrees() const {
    std::vector<int> out;
    for (const auto& [m, c] : terms_) out.push_back(degree_of(m));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  GradedClass component(int degree) const {
    GradedClass out(space_);
    for (const auto& [m, c] : terms_)
      if (degree_of(m) == degree) out.terms_.emplace(m, c);
    return out;
  }

  /// Degree of a nonzero homogeneous class; throws otherwise.
  int homogeneous_degree() const {
    auto d = degrees();
    if (d.size() != 1) throw RingError("class is not homogeneous");
    return d.front();
  }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  GradedClass& operator+=(const GradedClass& o) {
    require_same_space(o);
    for (const auto& [m, c] : o.terms_) accumulate(terms_, m, c);
    return *this;
  }
  GradedClass& operator-=(const GradedClass& o) {
    require_same_space(o);
    for (const auto& [m, c] : o.terms_) accumulate(terms_, m, Rational(-c));
    return *this;
  }
  GradedClass& operator*=(const Rational& s) {
    if (sgn(s) == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend GradedClass operator+(GradedClass a, const GradedClass& b) { return a += b; }
  friend GradedClass operator-(GradedClass a, const GradedClass& b) { return a -= b; }
  friend GradedClass operator-(GradedClass a) { return a *= Rational(-1); }
  friend GradedClass operator*(GradedClass a, const Rational& s) { return a *= s; }
  friend GradedClass operator*(const Rational& s, GradedClass a) { return a *= s; }

  friend bool operator==(const GradedClass& a, const GradedClass& b) {
    return (a.space_ == b.space_ || *a.space_ == *b.space_) && a.terms_ == b.terms_;
  }
  friend bool operator!=(const GradedClass& a, const GradedClass& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const GradedClass& c) { return os << c.to_string(); }

  std::string monomial_string(const Monomial& m) const {
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (!out.empty()) out += "*";
      out += space_->factor(i).symbol(m[i]);
      if (space_->factor_count() > 1) out += "[" + std::to_string(i) + "]";
    }
    return out.empty() ? "1" : out;
  }

  /// Parses "1", "zeta", "u[0]*u[1]" (bracketed factor index required when the
  /// space has several factors, except for unambiguous symbols).
  Monomial parse_monomial(const std::string& text) const {
    Monomial m(space_->factor_count(), 0);
    if (text == "1") return m;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto star = text.find('*', pos);
      std::string tok = text.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
      std::optional<std::size_t> factor;
      if (auto lb = tok.find('['); lb != std::string::npos) {
        if (tok.back() != ']') throw RingError("bad monomial token '" + tok + "'");
        factor = static_cast<std::size_t>(std::stoul(tok.substr(lb + 1, tok.size() - lb - 2)));
        tok = tok.substr(0, lb);
      }
      if (!factor) {
        for (std::size_t i = 0; i < space_->factor_count(); ++i) {
          if (space_->factor(i).index_of(tok)) {
            if (factor) throw RingError("ambiguous symbol '" + tok + "'; qualify with [factor]");
            factor = i;
          }
        }
        if (!factor) throw RingError("unknown symbol '" + tok + "'");
      }
      if (*factor >= m.size()) throw RingError("factor index out of range in '" + text + "'");
      auto idx = space_->factor(*factor).index_of(tok);
      if (!idx) throw RingError("unknown symbol '" + tok + "'");
      if (m[*factor] != 0) throw RingError("repeated factor in monomial '" + text + "'; use a product");
      m[*factor] = *idx;
      if (star == std::string::npos) break;
      pos = star + 1;
    }
    return m;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << (sgn(c) < 0 ? " - " : " + ");
      else if (sgn(c) < 0) os << "-";
      first = false;
      Rational a = abs(c);
      std::string mono = monomial_string(m);
      if (mono == "1") os << a;
      else if (a == 1) os << mono;
      else os << a << "*" << mono;
    }
    return os.str();
  }

  static void accumulate(Terms& t, const Monomial& m, const Rational& c) {
    if (sgn(c) == 0) return;
    Rational v = c;
    v.canonicalize();
    auto [it, inserted] = t.emplace(m, v);
    if (!inserted) {
      it->second += v;
      if (sgn(it->second) == 0) t.erase(it);
    }
  }

  void require_same_space(const GradedClass& o) const {
    if (space_ != o.space_ && !(*space_ == *o.space_)) throw RingError("space mismatch");
  }

 private:
  SpacePtr space_;
  Terms terms_;
};

namespace detail {

/// Sign of reordering graded elements with the given degrees into `order`.
inline int koszul_permutation_sign(const std::vector<int>& degrees, const std::vector<std::size_t>& order) {
  long parity = 0;
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t b = a + 1; b < order.size(); ++b)
      if (order[a] > order[b]) parity += static_cast<long>(degrees[order[a]]) * degrees[order[b]];
  return minus_one_pow(parity);
}

}  // namespace detail

/// Cup product.
inline GradedClass mul(const GradedClass& a, const GradedClass& b) {
  a.require_same_space(b);
  const auto& space = a.space();
  const std::size_t k = space->factor_count();
  GradedClass::Terms out;
  for (const auto& [x, cx] : a.terms()) {
    for (const auto& [y, cy] : b.terms()) {
      // Koszul sign from moving y_j past x_i for i > j.
      long parity = 0;
      int later = 0;
      for (std::size_t i = k; i-- > 0;) {
        parity += static_cast<long>(later) * space->factor(i).degree(y[i]);
        later += space->factor(i).degree(x[i]);
      }
      // Expand the per-factor products.
      std::vector<std::pair<Monomial, Rational>> partial{{Monomial{}, Rational(minus_one_pow(parity)) * cx * cy}};
      for (std::size_t i = 0; i < k && !partial.empty(); ++i) {
        auto prod = space->factor(i).product(x[i], y[i]);
        std::vector<std::pair<Monomial, Rational>> next;
        for (const auto& [m, c] : partial)
          for (const auto& [idx, d] : prod) {
            Monomial mm = m;
            mm.push_back(idx);
            next.emplace_back(std::move(mm), c * d);
          }
        partial = std::move(next);
      }
      for (const auto& [m, c] : partial) GradedClass::accumulate(out, m, c);
    }
  }
  GradedClass result(space);
  for (const auto& [m, c] : out) result += GradedClass::monomial(space, m, c);
  return result;
}

inline GradedClass power(const GradedClass& a, unsigned k) {
  GradedClass out = GradedClass::unit(a.space());
  for (unsigned i = 0; i < k; ++i) out = mul(out, a);
  return out;
}

/// Cross product a x b on X x Y.
inline GradedClass cross(const GradedClass& a, const GradedClass& b) {
  auto space = product(a.space(), b.space());
  GradedClass out(space);
  for (const auto& [x, cx] : a.terms())
    for (const auto& [y, cy] : b.terms()) {
      Monomial m = x;
      m.insert(m.end(), y.begin(), y.end());
      out += GradedClass::monomial(space, m, cx * cy);
    }
  return out;
}

/// Rewrites a class on a space equal to `target` onto `target` itself.
inline GradedClass rebase(const GradedClass& a, const SpacePtr& target) {
  if (!(*a.space() == *target)) throw RingError("space mismatch");
  GradedClass out(target);
  for (const auto& [m, c] : a.terms()) out += GradedClass::monomial(target, m, c);
  return out;
}

/// Pullback of y along the projection onto the listed factors of `total`.
/// `factors[j]` is the position in `total` of the j-th factor of y's space.
inline GradedClass pullback(const GradedClass& y, const SpacePtr& total, const std::vector<std::size_t>& factors) {
  if (factors.size() != y.space()->factor_count()) throw RingError("pullback factor map has wrong length");
  for (std::size_t j = 0; j < factors.size(); ++j) {
    if (factors[j] >= total->factor_count() ||
        !(total->factor(factors[j]) == y.space()->factor(j)))
      throw RingError("pullback factor map does not match spaces");
  }
  GradedClass out(total);
  for (const auto& [m, c] : y.terms()) {
    Monomial mm(total->factor_count(), 0);
    for (std::size_t j = 0; j < factors.size(); ++j) mm[factors[j]] = m[j];
    // Placing factors out of order costs the Koszul sign of the reordering.
    std::vector<int> degs;
    std::vector<std::size_t> order(factors.size());
    for (std::size_t j = 0; j < factors.size(); ++j) degs.push_back(y.space()->factor(j).degree(m[j]));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return factors[a] < factors[b]; });
    out += GradedClass::monomial(total, mm, c * detail::koszul_permutation_sign(degs, order));
  }
  return out;
}

/// Pullback along X x F -> X (X the leading factors of `total`).
inline GradedClass pullback_leading(const GradedClass& y, const SpacePtr& total) {
  std::vector<std::size_t> f(y.space()->factor_count());
  std::iota(f.begin(), f.end(), 0);
  return pullback(y, total, f);
}

/// Fibre integration along the factors `fiber` (listed in orientation order).
/// The result lives on the remaining factors, in their original order.
inline GradedClass gysin(const GradedClass& x, const std::vector<std::size_t>& fiber) {
  const auto& space = x.space();
  const std::size_t k = space->factor_count();
  std::vector<bool> in_fiber(k, false);
  int fiber_dim = 0;
  for (auto f : fiber) {
    if (f >= k || in_fiber[f]) throw RingError("invalid fibre factor list");
    if (!space->factor(f).fundamental()) throw RingError("fibre factor '" + space->factor(f).name() +
                                                         "' has no fundamental class");
    in_fiber[f] = true;
    fiber_dim += space->factor(f).top_degree();
  }
  std::vector<std::size_t> base_idx;
  std::vector<PresentationPtr> base_factors;
  for (std::size_t i = 0; i < k; ++i)
    if (!in_fiber[i]) {
      base_idx.push_back(i);
      base_factors.push_back(space->factors()[i]);
    }
  auto base = make_space(std::move(base_factors));
  GradedClass out(base);
  std::vector<std::size_t> order = base_idx;
  order.insert(order.end(), fiber.begin(), fiber.end());
  for (const auto& [m, c] : x.terms()) {
    bool top = std::all_of(fiber.begin(), fiber.end(),
                           [&](auto f) { return m[f] == *space->factor(f).fundamental(); });
    if (!top) continue;
    std::vector<int> degs(k);
    int base_deg = 0;
    for (std::size_t i = 0; i < k; ++i) degs[i] = space->factor(i).degree(m[i]);
    for (auto i : base_idx) base_deg += degs[i];
    int s = detail::koszul_permutation_sign(degs, order) * minus_one_pow(static_cast<long>(fiber_dim) * base_deg);
    Monomial bm;
    for (auto i : base_idx) bm.push_back(m[i]);
    out += GradedClass::monomial(base, bm, c * s);
  }
  return out;
}

/// Fibre integration along X x F -> X, F the trailing `fiber_factors` factors.
inline GradedClass gysin_project(const GradedClass& x, std::size_t fiber_factors) {
  const std::size_t k = x.space()->factor_count();
  if (fiber_factors > k) throw RingError("fibre has more factors than the space");
  std::vector<std::size_t> fiber;
  for (std::size_t i = k - fiber_factors; i < k; ++i) fiber.push_back(i);
  return gysin(x, fiber);
}

/// <x, [M]>: coefficient of the fundamental class.
inline Rational evaluate(const GradedClass& x) {
  if (!x.space()->has_fundamental_class())
    throw RingError("space '" + x.space()->name() + "' has no fundamental class");
  auto fc = GradedClass::fundamental_class(x.space());
  return x.coefficient(fc.terms().begin()->first);
}

inline Rational evaluate(const GradedClass& x, const SpacePtr& manifold) {
  x.require_same_space(GradedClass::zero(manifold));
  return evaluate(x);
}

/// All basis monomials of the given degree (empty degree filter = all).
inline std::vector<Monomial> basis_monomials(const SpacePtr& space, std::optional<int> degree = std::nullopt) {
  std::vector<Monomial> out{{}};
  for (std::size_t i = 0; i < space->factor_count(); ++i) {
    std::vector<Monomial> next;
    for (const auto& m : out)
      for (int b = 0; b < static_cast<int>(space->factor(i).basis_size()); ++b) {
        Monomial mm = m;
        mm.push_back(b);
        next.push_back(std::move(mm));
      }
    out = std::move(next);
  }
  if (degree) {
    auto probe = GradedClass::zero(space);
    std::erase_if(out, [&](const Monomial& m) { return probe.degree_of(m) != *degree; });
  }
  return out;
}

}  // namespace tautsig::ring

#pragma once

// JSON descriptors for model spaces, monodromy bundles and bundle models.
//
// Model space:
//   {"kind": "model_space", "name": "...", "generators": [{"symbol": "a", "degree": 1}],
//    "relations": [{"lhs": ["a", "b"], "rhs": {"zeta": "1"}}], "top_degree": 2,
//    "fundamental_class": "zeta"}
// Monodromy bundle:
//   {"kind": "monodromy_bundle", "name": "...", "n": 1, "p": 1, "q": 0, "eta": [[1]],
//    "monodromies": [[["exp(2*pi*i*t)"]]], "family": {"loop": true}}
// Bundle model:
//   {"kind": "bundle_model", "name": "...", "total": ["circle", "circle"], "fiber_factors": [1],
//    "vertical_tangent": {"rank": 1, "pontryagin": []}, "pullbacks": {"1": {"1": "1"}},
//    "sch": {"1": "1", "u[0]*u[1]": "1"}, "fibrewise_flat": true, "globally_flat": false}
// "base" and "fiber" may replace "total" and "fiber_factors"; the fibre factors then come last.

#include "tautsig/graded_ring.hpp"
#include "tautsig/hodge_numeric.hpp"
#include "tautsig/kappa_calculus.hpp"
#include "tautsig/mult_seq.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

namespace tautsig::io {

using Json = nlohmann::ordered_json;

class DescriptorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw DescriptorError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline Rational rational_of(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw DescriptorError("coefficient must be an integer or a string such as \"7/45\"");
}

inline std::string string_of(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

inline std::string entry_of(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long>());
  if (j.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << j.get<double>();
    return os.str();
  }
  throw DescriptorError("matrix entry must be a number or an expression string");
}

}  // namespace detail

// ------------------------------------------------------------ model spaces

inline ring::PresentationPtr presentation_from_json(const Json& j) {
  std::vector<ring::Generator> gens;
  for (const auto& g : detail::field(j, "generators"))
    gens.push_back({detail::field(g, "symbol").get<std::string>(), detail::field(g, "degree").get<int>()});
  std::vector<ring::Relation> rels;
  if (j.contains("relations")) {
    for (const auto& r : j.at("relations")) {
      ring::Relation rel;
      rel.lhs = detail::field(r, "lhs").get<std::vector<std::string>>();
      for (const auto& [sym, c] : detail::field(r, "rhs").items()) rel.rhs.emplace_back(sym, detail::rational_of(c));
      rels.push_back(std::move(rel));
    }
  }
  std::optional<std::string> fundamental;
  if (j.contains("fundamental_class") && !j.at("fundamental_class").is_null())
    fundamental = j.at("fundamental_class").get<std::string>();
  return std::make_shared<const ring::Presentation>(detail::field(j, "name").get<std::string>(), std::move(gens),
                                                    rels, detail::field(j, "top_degree").get<int>(), fundamental);
}

inline Json presentation_to_json(const ring::Presentation& p) {
  Json j;
  j["kind"] = "model_space";
  j["name"] = p.name();
  j["generators"] = Json::array();
  for (std::size_t i = 1; i < p.basis_size(); ++i)
    j["generators"].push_back({{"symbol", p.symbol(static_cast<int>(i))}, {"degree", p.degree(static_cast<int>(i))}});
  j["relations"] = Json::array();
  for (const auto& rel : p.relations()) {
    Json rhs = Json::object();
    for (const auto& [sym, c] : rel.rhs) rhs[sym] = detail::string_of(c);
    j["relations"].push_back({{"lhs", rel.lhs}, {"rhs", rhs}});
  }
  j["top_degree"] = p.top_degree();
  j["fundamental_class"] = p.fundamental() ? Json(p.symbol(*p.fundamental())) : Json(nullptr);
  return j;
}

/// A preset name ("torus(2)") or an inline presentation object; a list of
/// either gives the ordered product.
inline ring::SpacePtr space_from_json(const Json& j) {
  if (j.is_string()) return ring::preset(j.get<std::string>());
  if (j.is_object()) return ring::make_space({presentation_from_json(j)});
  if (j.is_array()) {
    auto out = ring::point();
    for (const auto& f : j) out = ring::product(out, space_from_json(f));
    return out;
  }
  throw DescriptorError("space must be a preset name, a presentation or a list of these");
}

inline ring::GradedClass class_from_json(const Json& j, const ring::SpacePtr& space) {
  if (!j.is_object()) throw DescriptorError("class must be an object {monomial: coefficient}");
  auto out = ring::GradedClass::zero(space);
  for (const auto& [mono, c] : j.items()) {
    auto probe = ring::GradedClass::zero(space);
    out += ring::GradedClass::monomial(space, probe.parse_monomial(mono), detail::rational_of(c));
  }
  return out;
}

inline Json class_to_json(const ring::GradedClass& c) {
  Json j = Json::object();
  for (const auto& [m, coeff] : c.terms()) j[c.monomial_string(m)] = detail::string_of(coeff);
  return j;
}

// ------------------------------------------------------------ polynomials

inline Json polynomial_to_json(const mult::CharClassPolynomial& p) {
  Json j = Json::array();
  for (const auto& [e, c] : p.terms())
    j.push_back({{"monomial", mult::CharClassPolynomial::monomial_string(p.letter(), e)},
                 {"coeff", detail::string_of(c)}});
  return j;
}

inline mult::CharClassPolynomial polynomial_from_json(const Json& j, mult::ClassFamily family) {
  mult::CharClassPolynomial out(family);
  if (!j.is_array()) throw DescriptorError("polynomial must be a list of {monomial, coeff}");
  for (const auto& t : j)
    out.add_term(mult::CharClassPolynomial::parse_monomial(detail::field(t, "monomial").get<std::string>(),
                                                           out.letter()),
                 detail::rational_of(detail::field(t, "coeff")));
  return out;
}

// ------------------------------------------------------------ monodromy bundles

inline hodge::ExprMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw DescriptorError("matrix must be a list of rows");
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : j) {
    if (!row.is_array()) throw DescriptorError("matrix row must be a list");
    std::vector<std::string> r;
    for (const auto& e : row) r.push_back(detail::entry_of(e));
    rows.push_back(std::move(r));
  }
  try {
    return hodge::expr_matrix(rows);
  } catch (const expr::ParseError& e) {
    throw DescriptorError(e.what());
  }
}

inline Json matrix_to_json(const hodge::ExprMatrix& m) {
  Json j = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (const auto& e : row) r.push_back(e.source());
    j.push_back(r);
  }
  return j;
}

inline hodge::MonodromyBundle bundle_from_json(const Json& j) {
  hodge::MonodromyBundle b;
  b.name = j.value("name", std::string("descriptor"));
  b.n = detail::field(j, "n").get<int>();
  b.p = detail::field(j, "p").get<int>();
  b.q = detail::field(j, "q").get<int>();
  b.eta = matrix_from_json(detail::field(j, "eta"));
  if (j.contains("h0")) b.h0 = matrix_from_json(j.at("h0"));
  if (j.contains("monodromies"))
    for (const auto& m : j.at("monodromies")) b.monodromies.push_back(matrix_from_json(m));
  if (j.contains("family")) {
    const auto& f = j.at("family");
    if (f.contains("monodromies")) {
      b.monodromies.clear();
      for (const auto& m : f.at("monodromies")) b.monodromies.push_back(matrix_from_json(m));
    }
    b.loop = f.value("loop", b.parameterized());
  }
  b.fibrewise_flat = j.value("fibrewise_flat", true);
  b.globally_flat = j.value("globally_flat", !b.parameterized());
  if (static_cast<int>(b.monodromies.size()) != b.n)
    throw DescriptorError("expected one monodromy matrix per circle factor");
  return b;
}

inline Json bundle_to_json(const hodge::MonodromyBundle& b) {
  Json j;
  j["kind"] = "monodromy_bundle";
  j["name"] = b.name;
  j["n"] = b.n;
  j["p"] = b.p;
  j["q"] = b.q;
  j["eta"] = matrix_to_json(b.eta);
  if (b.h0) j["h0"] = matrix_to_json(*b.h0);
  j["monodromies"] = Json::array();
  for (const auto& m : b.monodromies) j["monodromies"].push_back(matrix_to_json(m));
  j["family"] = {{"loop", b.loop}};
  j["fibrewise_flat"] = b.fibrewise_flat;
  j["globally_flat"] = b.globally_flat;
  return j;
}

// ------------------------------------------------------------ bundle models

inline kappa::BundleModel bundle_model_from_json(const Json& j) {
  kappa::BundleModel b;
  b.name = j.value("name", std::string("descriptor"));
  if (j.contains("base") || j.contains("fiber")) {
    auto base = space_from_json(detail::field(j, "base"));
    auto fib = space_from_json(detail::field(j, "fiber"));
    b.total = ring::product(base, fib);
    for (std::size_t i = base->factor_count(); i < b.total->factor_count(); ++i) b.fiber_factors.push_back(i);
  } else {
    b.total = space_from_json(detail::field(j, "total"));
    b.fiber_factors = detail::field(j, "fiber_factors").get<std::vector<std::size_t>>();
  }
  for (auto f : b.fiber_factors)
    if (f >= b.total->factor_count()) throw DescriptorError("invalid fibre factor " + std::to_string(f));
  int rank = b.fiber_dimension();
  std::vector<ring::GradedClass> pontryagin;
  if (j.contains("vertical_tangent")) {
    const auto& vt = j.at("vertical_tangent");
    rank = vt.value("rank", rank);
    if (vt.contains("pontryagin"))
      for (const auto& c : vt.at("pontryagin")) pontryagin.push_back(class_from_json(c, b.total));
  }
  b.vertical_tangent = kappa::trivial_tangent(b.total, rank);
  b.vertical_tangent.classes = std::move(pontryagin);
  if (j.contains("pullbacks"))
    for (const auto& [name, c] : j.at("pullbacks").items()) b.pullbacks.emplace(name, class_from_json(c, b.total));
  if (!b.pullbacks.count("1")) b.pullbacks.emplace("1", ring::GradedClass::unit(b.total));
  if (j.contains("sch")) b.sch = class_from_json(j.at("sch"), b.total);
  b.fibrewise_flat = j.value("fibrewise_flat", true);
  b.globally_flat = j.value("globally_flat", false);
  b.validate();
  return b;
}

inline Json bundle_model_to_json(const kappa::BundleModel& b) {
  Json j;
  j["kind"] = "bundle_model";
  j["name"] = b.name;
  Json total = Json::array();
  for (const auto& f : b.total->factors()) total.push_back(presentation_to_json(*f));
  j["total"] = total;
  j["fiber_factors"] = b.fiber_factors;
  Json pont = Json::array();
  for (const auto& c : b.vertical_tangent.classes) pont.push_back(class_to_json(c));
  j["vertical_tangent"] = {{"rank", b.vertical_tangent.rank}, {"pontryagin", pont}};
  Json pb = Json::object();
  for (const auto& [name, c] : b.pullbacks) pb[name] = class_to_json(c);
  j["pullbacks"] = pb;
  if (b.sch) j["sch"] = class_to_json(*b.sch);
  j["fibrewise_flat"] = b.fibrewise_flat;
  j["globally_flat"] = b.globally_flat;
  return j;
}

// ------------------------------------------------------------ files

using Descriptor = std::variant<ring::PresentationPtr, hodge::MonodromyBundle, kappa::BundleModel>;

inline Descriptor descriptor_from_json(const Json& j) {
  const auto kind = detail::field(j, "kind").get<std::string>();
  try {
    if (kind == "model_space") return presentation_from_json(j);
    if (kind == "monodromy_bundle") return bundle_from_json(j);
    if (kind == "bundle_model") return bundle_model_from_json(j);
  } catch (const DescriptorError&) {
    throw;
  } catch (const Json::exception& e) {
    throw DescriptorError(e.what());
  } catch (const std::exception& e) {
    throw DescriptorError(kind + ": " + e.what());
  }
  throw DescriptorError("unknown descriptor kind '" + kind + "'");
}

inline Descriptor load_descriptor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DescriptorError("cannot open descriptor '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DescriptorError(path + ": " + e.what());
  }
  try {
    return descriptor_from_json(j);
  } catch (const DescriptorError& e) {
    throw DescriptorError(path + ": " + e.what());
  }
}

}  // namespace tautsig::io

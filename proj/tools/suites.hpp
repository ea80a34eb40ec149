#pragma once

// Named verification suites run by the tautsig command line tool.

#include "series_cache.hpp"

#include "tautsig/clifford.hpp"
#include "tautsig/compatible_pair.hpp"
#include "tautsig/descriptor.hpp"
#include "tautsig/graded_ring.hpp"
#include "tautsig/hodge_numeric.hpp"
#include "tautsig/kappa_calculus.hpp"
#include "tautsig/mult_seq.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tautsig::cli {

using Json = io::Json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCutoffStep = 4;
inline constexpr int kMaxEscalations = 4;
inline constexpr unsigned kProductSeed = 1729;
inline constexpr int kProductModels = 24;

struct SuiteConfig {
  std::vector<std::string> suites;
  int order = 4;
  int cutoff = hodge::kDefaultCutoff;
  double tol = hodge::kDefaultTolerance;
  int grid = hodge::kDefaultGrid;
  std::string out;
  std::string format = "text";
  std::optional<std::string> descriptor;

  void validate() const {
    if (cutoff < 1) throw ConfigError("cutoff must be >= 1");
    if (!(tol > 0 && tol <= 1e-4)) throw ConfigError("tolerance must lie in (0, 1e-4]");
    if (grid < 1) throw ConfigError("grid must be >= 1");
    if (order < 1 || order > mult::kMaxGenusDegree)
      throw ConfigError("order must lie in [1, " + std::to_string(mult::kMaxGenusDegree) + "]");
    if (format != "json" && format != "csv" && format != "text") throw ConfigError("format must be json, csv or text");
  }

  hodge::FamilyConfig family(int n, int g) const { return {n, tol, g, hodge::kDefaultRefinementDepth}; }

  Json to_json() const {
    Json j;
    j["suites"] = suites;
    j["order"] = order;
    j["cutoff"] = cutoff;
    j["tol"] = tol;
    j["grid"] = grid;
    j["descriptor"] = descriptor ? Json(*descriptor) : Json(nullptr);
    return j;
  }
};

struct Assertion {
  std::string anchor;
  std::string identity;
  Json inputs = Json::object();
  Json outcome = Json::object();
  bool passed = false;

  Json to_json() const {
    Json j;
    j["anchor"] = anchor;
    j["identity"] = identity;
    j["inputs"] = inputs;
    j["outcome"] = outcome;
    j["passed"] = passed;
    return j;
  }
};

struct SuiteResult {
  explicit SuiteResult(std::string n) : name(std::move(n)) {}

  std::string name;
  Json info = Json::object();
  std::vector<Assertion> assertions;

  bool passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
  }

  /// Runs `body`, which fills in the outcome and returns whether the
  /// assertion holds; exceptions become failed assertions.
  void check(std::string anchor, std::string identity, Json inputs, const std::function<bool(Json&)>& body) {
    Assertion a{std::move(anchor), std::move(identity), std::move(inputs), Json::object(), false};
    try {
      a.passed = body(a.outcome);
    } catch (const std::exception& e) {
      a.outcome["error"] = e.what();
      a.passed = false;
    }
    assertions.push_back(std::move(a));
  }
};

struct SuiteInfo {
  std::string name;
  std::string summary;
  std::vector<std::string> anchors;
  std::function<SuiteResult(const SuiteConfig&)> run;
};

namespace detail {

inline std::string str(const Rational& r) { return r.get_str(); }

inline std::string str(const GaussRational& z) { return to_string(z); }

/// "codifferential-symbol-3" -> "codifferential-symbol".
inline std::string anchor_of(const std::string& check_name) {
  std::string s = check_name;
  for (;;) {
    auto dash = s.rfind('-');
    if (dash == std::string::npos || dash + 1 == s.size()) return s;
    bool digits = std::all_of(s.begin() + static_cast<long>(dash) + 1, s.end(),
                              [](unsigned char c) { return std::isdigit(c) != 0; });
    if (!digits) return s;
    s.erase(dash);
  }
}

inline void add_identity(SuiteResult& r, const clifford::IdentityCheck& c, Json inputs) {
  inputs["n"] = c.n;
  if (c.degree >= 0) inputs["degree"] = c.degree;
  inputs["check"] = c.name;
  r.check(anchor_of(c.name), c.formula, std::move(inputs), [&](Json& out) {
    out["exact"] = true;
    if (!c.holds) out["mismatch"] = c.detail;
    return c.holds;
  });
}

inline Json profile_json(const hodge::KernelProfile& p) { return Json(p.kernel); }

// ------------------------------------------------------------ stability policy

/// Spectral flow at N and N + 4; the cutoff is raised by 4 until the two agree.
struct StableFlow {
  hodge::SpectralFlowResult result;
  int requested_cutoff = 0;
  int final_cutoff = 0;
  int escalations = 0;
  std::vector<long> trail;  // flow at each cutoff tried
  bool stable = false;
};

inline StableFlow stable_flow(const hodge::MonodromyBundle& b, const SuiteConfig& cfg, int grid) {
  StableFlow out;
  out.requested_cutoff = cfg.cutoff;
  int n = cfg.cutoff;
  auto current = hodge::spectral_flow(b, cfg.family(n, grid));
  out.trail.push_back(current.flow);
  for (int step = 0; step <= kMaxEscalations; ++step) {
    auto next = hodge::spectral_flow(b, cfg.family(n + kCutoffStep, grid));
    out.trail.push_back(next.flow);
    if (next.flow == current.flow) {
      out.result = current;
      out.final_cutoff = n;
      out.stable = true;
      return out;
    }
    ++out.escalations;
    n += kCutoffStep;
    current = next;
  }
  out.result = current;
  out.final_cutoff = n;
  return out;
}

struct StableProfile {
  hodge::KernelProfile profile;
  int final_cutoff = 0;
  int escalations = 0;
  bool stable = false;
};

inline StableProfile stable_profile(const hodge::MonodromyBundle& b, const SuiteConfig& cfg, int grid) {
  StableProfile out;
  int n = cfg.cutoff;
  auto current = hodge::kernel_constancy_report(b, cfg.family(n, grid));
  for (int step = 0; step <= kMaxEscalations; ++step) {
    auto next = hodge::kernel_constancy_report(b, cfg.family(n + kCutoffStep, grid));
    if (next.kernel == current.kernel) {
      out.profile = current;
      out.final_cutoff = n;
      out.stable = true;
      return out;
    }
    ++out.escalations;
    n += kCutoffStep;
    current = next;
  }
  out.profile = current;
  out.final_cutoff = n;
  return out;
}

inline Json flow_json(const StableFlow& s) {
  Json j;
  j["flow"] = s.result.flow;
  j["requested_cutoff"] = s.requested_cutoff;
  j["final_cutoff"] = s.final_cutoff;
  j["escalations"] = s.escalations;
  j["flow_by_cutoff"] = s.trail;
  j["stable"] = s.stable;
  j["refinement_depth"] = s.result.depth_used;
  Json steps = Json::array();
  for (const auto& st : s.result.steps)
    steps.push_back({{"t0", str(st.t0)}, {"t1", str(st.t1)}, {"crossings", st.crossings_plus}});
  j["crossing_steps"] = steps;
  return j;
}

inline bool endpoint_profile(const std::vector<long>& k, long ends) {
  if (k.size() < 3 || k.front() != ends || k.back() != ends) return false;
  return std::all_of(k.begin() + 1, k.end() - 1, [](long v) { return v == 0; });
}

inline void note_cutoff(SuiteResult& r, int final_cutoff) {
  int prev = r.info.contains("final_cutoff") ? r.info["final_cutoff"].get<int>() : 0;
  r.info["final_cutoff"] = std::max(prev, final_cutoff);
}

}  // namespace detail

// ------------------------------------------------------------ clifford-signs

inline SuiteResult run_clifford_signs(const SuiteConfig&) {
  SuiteResult r{"clifford-signs"};
  for (int orientation : {1, -1})
    for (int n = 1; n <= 6; ++n)
      for (const auto& c : clifford::verify_sign_lemmas(n, orientation))
        detail::add_identity(r, c, {{"orientation", orientation}});
  const auto sigma = clifford::Matrix::diagonal({clifford::Scalar(1), clifford::Scalar(-1)});
  for (int n = 1; n <= 6; ++n)
    for (const auto& c : clifford::verify_twisted_gradings(n, sigma)) detail::add_identity(r, c, {{"sigma", "diag(1,-1)"}});

  clifford::CMatrix eta(2, 2);
  eta << 1, 0, 0, -1;
  clifford::CMatrix h0(2, 2);
  h0 << 2, 0.5, 0.5, 1;
  r.check("compatible-pair", "h = eta(., sigma .) positive, sigma^2 = 1, sigma h-isometric",
          {{"eta", "diag(1,-1)"}, {"h0", "[[2,1/2],[1/2,1]]"}}, [&](Json& out) {
            auto rep = clifford::check_compatible_pair(eta, clifford::compatible_pair(eta, h0));
            out["involution_residual"] = rep.involution_residual;
            out["form_residual"] = rep.form_residual;
            out["isometry_residual"] = rep.isometry_residual;
            out["min_eigenvalue"] = rep.min_eigenvalue;
            return rep.ok();
          });
  r.check("bott-reduction", "index of the restriction to Eig(i alpha(e_1 e_2), +1)", {{"module", "bott"}},
          [&](Json& out) {
            auto m = clifford::bott_model();
            auto red = clifford::bott_reduce(m, clifford::Matrix(m.dim, m.dim));
            auto sum = clifford::direct_sum(m, m);
            auto red2 = clifford::bott_reduce(sum, clifford::Matrix(sum.dim, sum.dim));
            out["index"] = red.index();
            out["index_of_sum"] = red2.index();
            return std::abs(red.index()) == 1 && red2.index() == 2 * red.index();
          });
  return r;
}

// ------------------------------------------------------------ epsilon-chain

inline SuiteResult run_epsilon_chain(const SuiteConfig&) {
  SuiteResult r{"epsilon-chain"};
  for (int m0 = 0; m0 <= 2; ++m0)
    for (int m1 = 0; m1 <= 2; ++m1) {
      auto cert = clifford::epsilon_sign(m0, m1);
      Json inputs{{"m0", m0}, {"m1", m1}};
      for (const auto& c : cert.checks) detail::add_identity(r, c, inputs);
      r.check("product-tau-factor", "tau_0 (x)^ tau_1 = i (-1)^{m0+m1+1} tau", inputs, [&](Json& out) {
        out["factor"] = detail::str(cert.tau_product_factor);
        out["expected"] = detail::str(cert.expected_tau_factor);
        return cert.tau_product_factor == cert.expected_tau_factor;
      });
      r.check("product-epsilon-sign", "epsilon = (-1)^{m0+m1} iota_V tau_V", inputs, [&](Json& out) {
        out["sign"] = cert.sign;
        out["expected"] = cert.expected_sign;
        return cert.sign == cert.expected_sign && cert.holds();
      });
    }
  const auto sigma = clifford::Matrix::diagonal({clifford::Scalar(1), clifford::Scalar(-1)});
  for (auto [m0, m1] : {std::pair{0, 0}, std::pair{0, 1}, std::pair{1, 0}}) {
    Json inputs{{"m0", m0}, {"m1", m1}, {"sigma0", "diag(1,-1)"}, {"sigma1", "diag(1,-1)"}};
    r.check("product-epsilon-sign-twisted", "epsilon = (-1)^{m0+m1} iota_V tau_V with coefficient involutions",
            inputs, [&](Json& out) {
              auto cert = clifford::epsilon_sign(m0, m1, sigma, sigma);
              out["sign"] = cert.sign;
              out["expected"] = cert.expected_sign;
              return cert.holds();
            });
  }
  for (auto [n0, n1] : {std::pair{1, 1}, std::pair{1, 3}, std::pair{3, 3}, std::pair{2, 3}})
    for (const auto& c : clifford::verify_exterior_product(n0, n1))
      detail::add_identity(r, c, {{"n0", n0}, {"n1", n1}});
  return r;
}

// ------------------------------------------------------------ genus

inline SuiteResult run_genus(const SuiteConfig& cfg) {
  SuiteResult r{"genus"};
  const auto hirz = cached_series("L-hirzebruch", 2 * cfg.order);
  const auto as = cached_series("L-atiyah-singer", 2 * cfg.order);
  const auto p = mult::ClassFamily::Pontryagin;
  r.check("hirzebruch-L1", "L_1 = p_1 / 3", {{"k", 1}}, [&](Json& out) {
    auto l1 = mult::genus_components(hirz, 1);
    out["value"] = io::polynomial_to_json(l1);
    return l1 == mult::CharClassPolynomial::variable(p, 1) * Rational(1, 3);
  });
  r.check("atiyah-singer-L1", "script L_1 = p_1 / 12", {{"k", 1}}, [&](Json& out) {
    auto l1 = mult::genus_components(as, 1);
    out["value"] = io::polynomial_to_json(l1);
    return l1 == mult::CharClassPolynomial::variable(p, 1) * Rational(1, 12);
  });
  if (cfg.order >= 2)
    r.check("hirzebruch-L2", "L_2 = (7 p_2 - p_1^2) / 45", {{"k", 2}}, [&](Json& out) {
      auto l2 = mult::genus_components(hirz, 2);
      out["value"] = io::polynomial_to_json(l2);
      auto expected = (mult::CharClassPolynomial::variable(p, 2) * Rational(7) -
                       mult::CharClassPolynomial::variable(p, 1) * mult::CharClassPolynomial::variable(p, 1)) *
                      Rational(1, 45);
      return l2 == expected;
    });
  for (int k = 1; k <= cfg.order; ++k)
    r.check("genus-rescaling", "L_k = 2^{2k} script L_k", {{"k", k}}, [&](Json& out) {
      auto a = mult::genus_components(hirz, k);
      auto b = mult::genus_components(as, k);
      out["L"] = io::polynomial_to_json(a);
      out["script_L"] = io::polynomial_to_json(b);
      return a == b * Rational(mpz_class(1) << (2 * k));
    });
  r.info["series_cache_hits"] = cache_stats().hits;
  return r;
}

// ------------------------------------------------------------ lusztig

inline SuiteResult run_lusztig(const SuiteConfig& cfg) {
  SuiteResult r{"lusztig"};
  const auto fam = hodge::lusztig_family();
  std::optional<detail::StableFlow> base;
  Json inputs{{"family", fam.name}, {"cutoff", cfg.cutoff}, {"grid", cfg.grid}, {"tol", cfg.tol}};
  r.check("spectral-flow-generator", "sf(D_t, t in [0,1]) = +-1, stable under N -> N+4", inputs, [&](Json& out) {
    base = detail::stable_flow(fam, cfg, cfg.grid);
    out = detail::flow_json(*base);
    detail::note_cutoff(r, base->final_cutoff);
    return base->stable && std::abs(base->result.flow) == 1;
  });
  r.check("spectral-flow-grid", "flow unchanged when the grid is doubled", inputs, [&](Json& out) {
    if (!base) throw std::runtime_error("no base flow");
    auto fine = hodge::spectral_flow(fam, cfg.family(base->final_cutoff, 2 * cfg.grid));
    out["flow"] = fine.flow;
    out["grid"] = 2 * cfg.grid;
    return fine.flow == base->result.flow;
  });
  r.check("spectral-flow-loop", "D_1 is conjugate to D_0 by a frequency shift", inputs, [&](Json& out) {
    if (!base) throw std::runtime_error("no base flow");
    const auto& loop = base->result.loop;
    out["verified"] = loop.verified;
    out["shifts"] = loop.shifts;
    out["compared_modes"] = loop.compared_modes;
    return loop.verified;
  });
  r.check("spectral-flow-winding", "winding number w gives flow w sf", {{"family", "lusztig"}, {"winding", 2}},
          [&](Json& out) {
            if (!base) throw std::runtime_error("no base flow");
            auto s = detail::stable_flow(hodge::lusztig_family(2), cfg, cfg.grid);
            out = detail::flow_json(s);
            detail::note_cutoff(r, s.final_cutoff);
            return s.stable && s.result.flow == 2 * base->result.flow;
          });
  r.check("kernel-profile-endpoints", "dim ker D_t = 2 at t = 0, 1 and 0 in between", inputs, [&](Json& out) {
    auto s = detail::stable_profile(fam, cfg, cfg.grid);
    out["profile"] = detail::profile_json(s.profile);
    out["final_cutoff"] = s.final_cutoff;
    detail::note_cutoff(r, s.final_cutoff);
    return s.stable && detail::endpoint_profile(s.profile.kernel, 2);
  });
  auto model = kappa::lusztig_model();
  r.check("gysin-generator", "(proj_1)_!(1 + u x u) = +-u", {{"space", "torus(2)"}}, [&](Json& out) {
    auto x = ring::GradedClass::unit(model.total) + ring::GradedClass::monomial(model.total, {1, 1});
    auto y = ring::gysin_project(x, 1);
    auto u = ring::GradedClass::generator(ring::circle(), 0, "u");
    out["value"] = y.to_string();
    return y == u || y == -u;
  });
  r.check("kappa-generator", "kappa_{L, ch(L)} = +-u with <., [S^1]> = +-1", {{"model", model.name}},
          [&](Json& out) {
            auto k = kappa::kappa_l(model, "ch(L)");
            auto u = ring::GradedClass::generator(ring::circle(), 0, "u");
            auto ev = ring::evaluate(k, k.space());
            out["value"] = k.to_string();
            out["evaluation"] = detail::str(ev);
            return (k == u || k == -u) && abs(ev) == 1;
          });
  r.check("index-equals-flow", "|<odd index, [S^1]>| = |sf|", {{"model", model.name}}, [&](Json& out) {
    if (!base) throw std::runtime_error("no base flow");
    auto idx = kappa::odd_index_symbolic(model);
    auto ev = ring::evaluate(idx.value, idx.value.space());
    out["symbolic"] = idx.value.to_string();
    out["sign_undetermined"] = idx.sign_undetermined;
    out["flow"] = base->result.flow;
    return abs(ev) == std::abs(base->result.flow);
  });
  return r;
}

// ------------------------------------------------------------ vanishing

inline std::vector<hodge::MonodromyBundle> globally_flat_families() {
  std::vector<hodge::MonodromyBundle> out{hodge::trivial_circle_family(), hodge::flat_pair_circle_family(),
                                          hodge::hyperbolic_circle_family(), hodge::trivial_torus_line(1),
                                          hodge::trivial_torus_line(2), hodge::trivial_torus_line(3),
                                          hodge::flat_pair_torus()};
  for (auto& b : out) b.loop = true;
  return out;
}

inline SuiteResult run_vanishing(const SuiteConfig& cfg) {
  SuiteResult r{"vanishing"};
  for (const auto& fam : globally_flat_families()) {
    Json inputs{{"family", fam.name}, {"n", fam.n}, {"cutoff", cfg.cutoff}, {"grid", cfg.grid}};
    r.check("globally-flat-kernel-constant", "dim ker D_t is constant for globally flat coefficients", inputs,
            [&](Json& out) {
              auto s = detail::stable_profile(fam, cfg, cfg.grid);
              out["kernel"] = s.profile.kernel.front();
              out["constant"] = s.profile.constant;
              out["final_cutoff"] = s.final_cutoff;
              detail::note_cutoff(r, s.final_cutoff);
              return s.stable && s.profile.constant;
            });
    if (fam.n % 2 == 1)
      r.check("globally-flat-flow-zero", "sf = 0 for globally flat coefficients", inputs, [&](Json& out) {
        auto s = detail::stable_flow(fam, cfg, cfg.grid);
        out = detail::flow_json(s);
        detail::note_cutoff(r, s.final_cutoff);
        return s.stable && s.result.flow == 0;
      });
  }
  {
    const auto fam = hodge::perturbed_lusztig_family();
    Json inputs{{"family", fam.name}, {"cutoff", cfg.cutoff}, {"grid", cfg.grid}};
    r.check("fibrewise-flat-profile", "kernel profile (2, 0, ..., 0, 2) for fibrewise flat coefficients", inputs,
            [&](Json& out) {
              auto s = detail::stable_profile(fam, cfg, cfg.grid);
              out["profile"] = detail::profile_json(s.profile);
              out["final_cutoff"] = s.final_cutoff;
              detail::note_cutoff(r, s.final_cutoff);
              return s.stable && !s.profile.constant && detail::endpoint_profile(s.profile.kernel, 2);
            });
    r.check("fibrewise-flat-flow", "sf != 0 for fibrewise flat coefficients", inputs, [&](Json& out) {
      auto s = detail::stable_flow(fam, cfg, cfg.grid);
      out = detail::flow_json(s);
      detail::note_cutoff(r, s.final_cutoff);
      return s.stable && s.result.flow != 0;
    });
  }
  r.check("indefinite-form-flow", "L + L^{-1}: sf = 2 sf(L) for eta = diag(1,-1), 0 for eta = 1",
          {{"cutoff", cfg.cutoff}, {"grid", cfg.grid}}, [&](Json& out) {
            auto single = detail::stable_flow(hodge::lusztig_family(), cfg, cfg.grid);
            auto indef = detail::stable_flow(hodge::lusztig_with_inverse_family(false), cfg, cfg.grid);
            auto def = detail::stable_flow(hodge::lusztig_with_inverse_family(true), cfg, cfg.grid);
            out["lusztig"] = single.result.flow;
            out["indefinite"] = indef.result.flow;
            out["definite"] = def.result.flow;
            detail::note_cutoff(r, std::max(indef.final_cutoff, def.final_cutoff));
            return single.stable && indef.stable && def.stable && indef.result.flow == 2 * single.result.flow &&
                   def.result.flow == 0;
          });
  for (int g = 2; g <= 4; ++g)
    r.check("globally-flat-kappa-vanishing", "kappa_{L, sch} = 0 for globally flat (1,1) coefficients",
            {{"genus", g}}, [&](Json& out) {
              auto idx = kappa::odd_index_symbolic(kappa::globally_flat_surface_model(g));
              out["value"] = idx.value.to_string();
              return idx.value.is_zero();
            });
  return r;
}

// ------------------------------------------------------------ even-index

inline SuiteResult run_even_index(const SuiteConfig& cfg) {
  SuiteResult r{"even-index"};
  auto model = kappa::lusztig_squared_model();
  std::optional<kappa::SymbolicIndex> idx;
  r.check("even-index-degree-0", "degree-0 part of (-1)^m 2^m pi_!(L sch) vanishes", {{"model", model.name}},
          [&](Json& out) {
            idx = kappa::even_index_symbolic(model);
            out["value"] = idx->value.to_string();
            out["prefactor"] = idx->prefactor;
            return idx->value.component(0).is_zero();
          });
  r.check("even-index-degree-2", "degree-2 part of (-1)^m 2^m pi_!(L sch) = +-2 u x u", {{"model", model.name}},
          [&](Json& out) {
            if (!idx) throw std::runtime_error("no symbolic index");
            auto d2 = idx->value.component(2);
            auto uu = ring::GradedClass::monomial(d2.space(), {1, 1}, 2);
            out["value"] = d2.to_string();
            return d2 == uu || d2 == -uu;
          });
  auto fibre_inputs = [&](const Rational& t1, const Rational& t2) {
    return Json{{"t1", detail::str(t1)}, {"t2", detail::str(t2)}, {"cutoff", cfg.cutoff}};
  };
  r.check("fibre-index-trivial-point", "at a trivial fibre: dim ker = 4, chi = 0, sign = 0 by both routes",
          fibre_inputs(0, 0), [&](Json& out) {
            auto op = hodge::assemble(hodge::lusztig_squared_fiber(0, 0), Rational(0), cfg.cutoff);
            auto ker = hodge::kernel_dimension(op, cfg.tol);
            auto chi = hodge::euler_index(op, cfg.tol);
            auto sig = hodge::even_signature_index(op, cfg.tol);
            auto mid = kappa::midex_decomposition(chi, sig.trace_route);
            out["kernel"] = ker;
            out["euler"] = chi;
            out["signature_trace"] = sig.trace_route;
            out["signature_form"] = sig.form_route;
            out["midex"] = {detail::str(mid.plus), detail::str(mid.minus)};
            return ker == 4 && chi == 0 && sig.agree() && sig.trace_route == 0;
          });
  r.check("fibre-index-generic-point", "at a nontrivial fibre: dim ker = 0", fibre_inputs(Rational(1, 2), Rational(1, 3)),
          [&](Json& out) {
            auto op = hodge::assemble(hodge::lusztig_squared_fiber(Rational(1, 2), Rational(1, 3)), Rational(0),
                                      cfg.cutoff);
            auto ker = hodge::kernel_dimension(op, cfg.tol);
            out["kernel"] = ker;
            return ker == 0;
          });
  return r;
}

// ------------------------------------------------------------ surface

inline SuiteResult run_surface(const SuiteConfig&) {
  SuiteResult r{"surface"};
  for (int g = 2; g <= 10; ++g)
    r.check("surface-sch-value", "<sch_1(V), [Sigma_g]> = 2 - 2g from c_1(L) = (1 - g) zeta", {{"genus", g}},
            [&](Json& out) {
              auto v = kappa::surface_flat_bundle_sch(g);
              out["value"] = detail::str(v);
              return v == Rational(2 - 2 * g);
            });
  for (int g = 2; g <= 4; ++g)
    r.check("surface-even-index", "(-1)^1 2 <sch_1(V), [Sigma_g]> = 4g - 4", {{"genus", g}}, [&](Json& out) {
      auto idx = kappa::even_index_symbolic(kappa::surface_coefficient_model(g));
      out["value"] = idx.value.to_string();
      return idx.value == ring::GradedClass::scalar(idx.value.space(), Rational(4 * g - 4));
    });
  r.check("surface-small-genus", "genus < 2 is rejected", {{"genus", 1}}, [&](Json& out) {
    try {
      kappa::surface_flat_bundle_sch(1);
    } catch (const kappa::KappaError& e) {
      out["error"] = e.what();
      return true;
    }
    return false;
  });
  return r;
}

// ------------------------------------------------------------ kappa-products

inline SuiteResult run_kappa_products(const SuiteConfig&) {
  SuiteResult r{"kappa-products"};
  std::mt19937 rng(kProductSeed);
  int statement_agrees = 0;
  for (int i = 0; i < kProductModels; ++i) {
    auto b0 = kappa::random_bundle_model(rng, "E0-" + std::to_string(i));
    auto b1 = kappa::random_bundle_model(rng, "E1-" + std::to_string(i));
    auto n = kappa::random_closed_model(rng, "N-" + std::to_string(i));
    Json inputs{{"seed", kProductSeed}, {"index", i},  {"E0", b0.total->name()}, {"n0", b0.fiber_dimension()},
                {"E1", b1.total->name()}, {"n1", b1.fiber_dimension()}};
    r.check("kappa-product", "kappa_{L, u0 x u1}(E0 x E1) = sum_e (-1)^{n1 e} kappa_{L,u0}(E0)_e x kappa_{L,u1}(E1)",
            inputs, [&](Json& out) {
              auto cert = kappa::kappa_product(b0, b1, "u", "u");
              out["lhs"] = cert.lhs.to_string();
              out["rhs"] = cert.rhs_proof.to_string();
              out["signs_differ"] = cert.signs_differ;
              out["statement_sign_matches"] = cert.statement_matches;
              statement_agrees += cert.statement_matches;
              return cert.proof_matches;
            });
    for (int m = 0; m <= 2; ++m) {
      Json cin{{"seed", kProductSeed}, {"index", i}, {"E0", b0.total->name()}, {"N", n.total->name()}, {"m", m}};
      r.check("kappa-collapse", "kappa_{L_m, u0 x w}(E0 x N) = (-1)^{n1(|u0| - n0)} kappa_{L_{m-l}, u0} sign_w(N)",
              cin, [&](Json& out) {
                auto cert = kappa::collapse_formula(b0, n, "u", "w", m);
                out["lhs"] = cert.lhs.to_string();
                out["rhs"] = cert.rhs.to_string();
                out["l"] = cert.l;
                out["signature"] = detail::str(cert.signature);
                return cert.holds;
              });
    }
  }
  r.info["statement_sign_agreements"] = statement_agrees;
  r.check("product-odd-index", "odd index of Lusztig x T^2 vanishes", {{"model", "lusztig x T2"}}, [&](Json& out) {
    auto idx = kappa::odd_index_symbolic(kappa::lusztig_times_torus_model());
    out["value"] = idx.value.to_string();
    return idx.value.is_zero();
  });
  Json out_of_scope = Json::array();
  for (const auto& w : kappa::main_theorem_witnesses()) {
    if (!w.in_scope) {
      out_of_scope.push_back({{"label", w.label}, {"description", w.description}});
      continue;
    }
    r.check("witness", w.description, {{"label", w.label}}, [&](Json& out) {
      out["value"] = w.value;
      return w.holds;
    });
  }
  r.info["out_of_scope"] = out_of_scope;
  return r;
}

// ------------------------------------------------------------ descriptors

inline SuiteResult run_descriptor(const SuiteConfig& cfg) {
  SuiteResult r{"descriptor"};
  const std::string path = *cfg.descriptor;
  auto desc = io::load_descriptor(path);
  r.info["path"] = path;
  if (auto* pres = std::get_if<ring::PresentationPtr>(&desc)) {
    auto space = ring::make_space({*pres});
    Json inputs{{"space", (*pres)->name()}};
    r.check("descriptor-graded-commutative", "a b = (-1)^{|a||b|} b a on basis elements", inputs, [&](Json& out) {
      auto basis = ring::basis_monomials(space);
      std::size_t pairs = 0;
      for (const auto& a : basis)
        for (const auto& b : basis) {
          auto x = ring::GradedClass::monomial(space, a);
          auto y = ring::GradedClass::monomial(space, b);
          int da = x.homogeneous_degree();
          int db = y.homogeneous_degree();
          if (ring::mul(x, y) != ring::mul(y, x) * Rational(minus_one_pow(static_cast<long>(da) * db))) return false;
          ++pairs;
        }
      out["pairs"] = pairs;
      return true;
    });
    r.check("descriptor-fundamental-class", "<[M], [M]> = 1 when a fundamental class is declared", inputs,
            [&](Json& out) {
              out["euler_characteristic"] = space->euler_characteristic();
              if (!space->has_fundamental_class()) {
                out["fundamental_class"] = nullptr;
                return true;
              }
              auto f = ring::GradedClass::fundamental_class(space);
              out["fundamental_class"] = f.to_string();
              return ring::evaluate(f, space) == 1;
            });
    r.check("descriptor-round-trip", "JSON round trip reproduces the presentation", inputs, [&](Json&) {
      return *io::presentation_from_json(io::presentation_to_json(**pres)) == **pres;
    });
  } else if (auto* bundle = std::get_if<hodge::MonodromyBundle>(&desc)) {
    Json inputs{{"bundle", bundle->name}, {"n", bundle->n}, {"cutoff", cfg.cutoff}};
    r.check("descriptor-operator-contracts", "grading, self-adjointness and tau relations of D_V", inputs,
            [&](Json& out) {
              auto op = hodge::assemble(*bundle, Rational(0), cfg.cutoff);
              bool ok = true;
              Json checks = Json::array();
              for (const auto& c : hodge::verify_contracts(op)) {
                checks.push_back({{"name", c.name}, {"exact", c.exact}, {"holds", c.holds}, {"residual", c.residual}});
                ok = ok && c.holds;
              }
              out["checks"] = checks;
              out["kernel_by_degree"] = hodge::kernel_by_degree(op, cfg.tol);
              return ok;
            });
    r.check("descriptor-kernel-profile", "kernel profile along the family", inputs, [&](Json& out) {
      auto s = detail::stable_profile(*bundle, cfg, cfg.grid);
      out["profile"] = detail::profile_json(s.profile);
      out["constant"] = s.profile.constant;
      out["final_cutoff"] = s.final_cutoff;
      detail::note_cutoff(r, s.final_cutoff);
      return s.stable && (!bundle->globally_flat || s.profile.constant);
    });
    if (bundle->loop && bundle->n % 2 == 1)
      r.check("descriptor-spectral-flow", "spectral flow of the loop", inputs, [&](Json& out) {
        auto s = detail::stable_flow(*bundle, cfg, cfg.grid);
        out = detail::flow_json(s);
        detail::note_cutoff(r, s.final_cutoff);
        return s.stable && (!bundle->globally_flat || s.result.flow == 0);
      });
    if (bundle->n % 2 == 0)
      r.check("descriptor-even-signature", "Tr(tau_V on ker) equals the middle-degree form signature", inputs,
              [&](Json& out) {
                auto op = hodge::assemble(*bundle, Rational(0), cfg.cutoff);
                auto sig = hodge::even_signature_index(op, cfg.tol);
                out["euler"] = hodge::euler_index(op, cfg.tol);
                out["signature_trace"] = sig.trace_route;
                out["signature_form"] = sig.form_route;
                return sig.agree();
              });
  } else {
    const auto& model = std::get<kappa::BundleModel>(desc);
    Json inputs{{"model", model.name}, {"fiber_dimension", model.fiber_dimension()}};
    for (const auto& [name, u] : model.pullbacks)
      r.check("descriptor-kappa", "kappa_{L, u} = pi_!(L(T_v E) f^* u)", {{"model", model.name}, {"u", name}},
              [&](Json& out) {
                auto k = kappa::kappa_l(model, u);
                out["value"] = k.to_string();
                return true;
              });
    if (model.sch)
      r.check("descriptor-index", "2^m pi_!(L sch) with the parity sign", inputs, [&](Json& out) {
        auto idx = model.fiber_dimension() % 2 ? kappa::odd_index_symbolic(model) : kappa::even_index_symbolic(model);
        out["value"] = idx.value.to_string();
        out["prefactor"] = idx.prefactor;
        out["sign_undetermined"] = idx.sign_undetermined;
        return true;
      });
    r.check("descriptor-round-trip", "JSON round trip reproduces the model", inputs, [&](Json&) {
      auto again = io::bundle_model_from_json(io::bundle_model_to_json(model));
      return *again.total == *model.total && again.fiber_factors == model.fiber_factors &&
             again.pullbacks == model.pullbacks && again.sch == model.sch;
    });
  }
  return r;
}

// ------------------------------------------------------------ registry

inline const std::vector<SuiteInfo>& registry() {
  static const std::vector<SuiteInfo> suites{
      {"clifford-signs",
       "Exact sign identities for the Hodge star, tau, the Clifford volume element and the symbols of d and d^* "
       "on Lambda^* R^n, n <= 6, both orientations; twisted gradings; compatible pairs; Bott reduction.",
       {"star-square", "volume-vs-star", "codifferential-symbol", "tau-involution", "iota-tau", "adjoint-via-tau",
        "ext-tau", "tau-ext", "symbol-odd", "symbol-tau", "volume-square", "tau-vs-volume", "twisted-iota-tau",
        "compatible-pair", "bott-reduction"},
       run_clifford_signs},
      {"epsilon-chain",
       "The product sign chain for odd signature operators: epsilon = (-1)^{m0+m1} iota_V tau_V and the tau "
       "factor i (-1)^{m0+m1+1}, for (m0, m1) in {0,1,2}^2; product identification of exterior algebras.",
       {"epsilon-factorization", "tau-product-volume", "volume-product-transport", "product-tau-factor",
        "product-epsilon-sign", "product-grading", "product-volume"},
       run_epsilon_chain},
      {"genus",
       "Multiplicative sequences of x/tanh(x) and (x/2)/tanh(x/2): L_1, script L_1, L_2 and L_k = 4^k script L_k "
       "up to the truncation order.",
       {"hirzebruch-L1", "atiyah-singer-L1", "hirzebruch-L2", "genus-rescaling"},
       run_genus},
      {"lusztig",
       "Lusztig's family of flat lines on S^1: spectral flow +-1 with cutoff escalation, grid stability, loop "
       "certificate, kernel profile, and the symbolic side (proj_1)_!(L ch(L)) = +-u.",
       {"spectral-flow-generator", "spectral-flow-grid", "spectral-flow-loop", "spectral-flow-winding",
        "kernel-profile-endpoints", "gysin-generator", "kappa-generator", "index-equals-flow"},
       run_lusztig},
      {"vanishing",
       "Globally flat torus families have constant kernel profile and zero flow; fibrewise flat families need "
       "not; globally flat surface coefficients give vanishing kappa.",
       {"globally-flat-kernel-constant", "globally-flat-flow-zero", "fibrewise-flat-profile", "fibrewise-flat-flow",
        "indefinite-form-flow", "globally-flat-kappa-vanishing"},
       run_vanishing},
      {"even-index",
       "Even-dimensional fibres: the symbolic index of L (x) L has degree-0 part 0 and degree-2 part +-2 u x u; "
       "numerical fibre kernels, Euler and signature indices.",
       {"even-index-degree-0", "even-index-degree-2", "fibre-index-trivial-point", "fibre-index-generic-point"},
       run_even_index},
      {"surface",
       "Flat U(1,1)-bundles over closed surfaces: <sch_1, [Sigma_g]> = 2 - 2g for g = 2..10.",
       {"surface-sch-value", "surface-even-index", "surface-small-genus"},
       run_surface},
      {"kappa-products",
       "Product formulas for kappa classes on randomized product models, the collapse formula with a closed "
       "manifold factor, and the shipped witnesses.",
       {"kappa-product", "kappa-collapse", "product-odd-index", "witness"},
       run_kappa_products},
  };
  return suites;
}

inline const SuiteInfo* find_suite(const std::string& name) {
  for (const auto& s : registry())
    if (s.name == name) return &s;
  return nullptr;
}

/// Expands "all" and checks names.
inline std::vector<const SuiteInfo*> resolve_suites(const std::vector<std::string>& names) {
  std::vector<const SuiteInfo*> out;
  for (const auto& n : names) {
    if (n == "all") {
      for (const auto& s : registry())
        if (std::find(out.begin(), out.end(), &s) == out.end()) out.push_back(&s);
      continue;
    }
    const auto* s = find_suite(n);
    if (!s) throw ConfigError("unknown suite '" + n + "'");
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

}  // namespace tautsig::cli

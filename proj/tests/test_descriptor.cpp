#include "tautsig/descriptor.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace tautsig;
using io::DescriptorError;
using io::Json;
using ring::GradedClass;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("tautsig-descriptor-" + name);
  std::ofstream(path) << text;
  return path;
}

std::string error_of(const Json& j) {
  try {
    io::descriptor_from_json(j);
  } catch (const DescriptorError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Presentation, RoundTripOfPresets) {
  for (const auto* name : {"circle", "surface(2)", "surface(3)"}) {
    auto space = ring::preset(name);
    const auto& p = space->factors().front();
    auto again = io::presentation_from_json(io::presentation_to_json(*p));
    EXPECT_TRUE(*again == *p) << name;
  }
}

TEST(Presentation, InlineSpace) {
  Json j = Json::parse(R"j({"kind": "model_space", "name": "S2",
    "generators": [{"symbol": "x", "degree": 2}], "relations": [], "top_degree": 2, "fundamental_class": "x"})j");
  auto desc = io::descriptor_from_json(j);
  auto p = std::get<ring::PresentationPtr>(desc);
  auto s = ring::make_space({p});
  EXPECT_EQ(ring::evaluate(GradedClass::fundamental_class(s), s), 1);
  EXPECT_EQ(s->euler_characteristic(), 2);
}

TEST(Space, PresetsListsAndErrors) {
  EXPECT_EQ(*io::space_from_json(Json("torus(2)")), *ring::torus(2));
  EXPECT_EQ(*io::space_from_json(Json::parse(R"j(["circle", "circle"])j")), *ring::torus(2));
  EXPECT_THROW(io::space_from_json(Json(3)), DescriptorError);
}

TEST(Class, RoundTrip) {
  auto t3 = ring::torus(3);
  auto c = GradedClass::monomial(t3, {1, 1, 0}, make_rational(-7, 45)) + GradedClass::scalar(t3, 2);
  EXPECT_EQ(io::class_from_json(io::class_to_json(c), t3), c);
  EXPECT_THROW(io::class_from_json(Json::array(), t3), DescriptorError);
  EXPECT_THROW(io::class_from_json(Json::parse(R"j({"1": 1.5})j"), t3), DescriptorError);
}

TEST(Polynomial, RoundTrip) {
  auto l2 = mult::genus_components(mult::expand_series("L-hirzebruch", 4), 2);
  auto j = io::polynomial_to_json(l2);
  EXPECT_EQ(io::polynomial_from_json(j, mult::ClassFamily::Pontryagin), l2);
  EXPECT_EQ(j.size(), 2u);
  EXPECT_THROW(io::polynomial_from_json(Json::object(), mult::ClassFamily::Pontryagin), DescriptorError);
}

TEST(Bundle, RoundTripOfShippedFamilies) {
  for (const auto& b : {hodge::lusztig_family(), hodge::hyperbolic_circle_family(), hodge::flat_pair_torus(),
                        hodge::perturbed_lusztig_family()}) {
    auto j = io::bundle_to_json(b);
    auto again = std::get<hodge::MonodromyBundle>(io::descriptor_from_json(j));
    EXPECT_EQ(io::bundle_to_json(again), j) << b.name;
    EXPECT_EQ(again.parameterized(), b.parameterized());
    EXPECT_EQ(again.globally_flat, b.globally_flat);
  }
}

TEST(Bundle, DefaultsFollowParameterDependence) {
  Json j = Json::parse(R"j({"kind": "monodromy_bundle", "n": 1, "p": 1, "q": 0, "eta": [[1]],
    "family": {"monodromies": [[["exp(2*pi*i*t)"]]]}})j");
  auto b = std::get<hodge::MonodromyBundle>(io::descriptor_from_json(j));
  EXPECT_TRUE(b.loop);
  EXPECT_FALSE(b.globally_flat);
  Json c = Json::parse(R"j({"kind": "monodromy_bundle", "n": 1, "p": 1, "q": 0, "eta": [[1]], "monodromies": [[[1]]]})j");
  auto k = std::get<hodge::MonodromyBundle>(io::descriptor_from_json(c));
  EXPECT_TRUE(k.globally_flat);
}

TEST(BundleModel, RoundTripOfShippedModels) {
  for (const auto& m : {kappa::lusztig_model(), kappa::surface_coefficient_model(2), kappa::lusztig_squared_model()}) {
    auto again = io::bundle_model_from_json(io::bundle_model_to_json(m));
    EXPECT_TRUE(*again.total == *m.total) << m.name;
    EXPECT_EQ(again.fiber_factors, m.fiber_factors);
    for (const auto& [name, c] : m.pullbacks) EXPECT_EQ(again.pullback(name), c) << name;
    EXPECT_TRUE(again.pullbacks.count("1"));
    EXPECT_EQ(again.sch, m.sch);
  }
}

TEST(BundleModel, BaseAndFiberForm) {
  Json j = Json::parse(R"j({"kind": "bundle_model", "name": "lusztig", "base": "circle", "fiber": "circle",
    "pullbacks": {"ch(L)": {"1": "1", "u[0]*u[1]": "1"}}, "sch": {"u[0]*u[1]": 1}})j");
  auto m = std::get<kappa::BundleModel>(io::descriptor_from_json(j));
  auto ref = kappa::lusztig_model();
  EXPECT_TRUE(*m.total == *ref.total);
  EXPECT_EQ(m.fiber_factors, ref.fiber_factors);
  EXPECT_EQ(kappa::kappa_l(m, "ch(L)"), kappa::kappa_l(ref, "ch(L)"));
  EXPECT_EQ(m.vertical_tangent.rank, 1);
  EXPECT_TRUE(m.pullbacks.count("1"));
}

TEST(Errors, MessagesNameTheProblem) {
  EXPECT_NE(error_of(Json::parse(R"j({"name": "x"})j")).find("missing field 'kind'"), std::string::npos);
  EXPECT_NE(error_of(Json::parse(R"j({"kind": "sphere"})j")).find("unknown descriptor kind"), std::string::npos);
  EXPECT_NE(error_of(Json::parse(R"j({"kind": "monodromy_bundle", "n": 2, "p": 1, "q": 0, "eta": [[1]],
    "monodromies": [[[1]]]})j"))
                .find("one monodromy matrix per circle factor"),
            std::string::npos);
  EXPECT_NE(error_of(Json::parse(R"j({"kind": "monodromy_bundle", "n": 1, "p": 1, "q": 0, "eta": [[true]],
    "monodromies": [[[1]]]})j"))
                .find("matrix entry"),
            std::string::npos);
  EXPECT_FALSE(error_of(Json::parse(R"j({"kind": "monodromy_bundle", "n": 1, "p": 1, "q": 0, "eta": [[1]],
    "monodromies": [[["exp(2*pi*"]]]})j"))
                   .empty());
  EXPECT_NE(error_of(Json::parse(R"j({"kind": "bundle_model", "total": "torus(2)", "fiber_factors": [4]})j"))
                .find("fibre factor"),
            std::string::npos);
  EXPECT_NE(error_of(Json::parse(R"j({"kind": "bundle_model", "base": "circle"})j")).find("missing field 'fiber'"),
            std::string::npos);
}

TEST(Files, LoadAndFailures) {
  auto good = write_temp("good.json", io::bundle_to_json(hodge::trivial_circle_family()).dump());
  EXPECT_EQ(std::get<hodge::MonodromyBundle>(io::load_descriptor(good.string())).name, "trivial-circle");
  auto bad = write_temp("bad.json", "{ \"kind\": ");
  try {
    io::load_descriptor(bad.string());
    FAIL() << "expected a parse error";
  } catch (const DescriptorError& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
  }
  EXPECT_THROW(io::load_descriptor("/nonexistent/descriptor.json"), DescriptorError);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

#include <gtest/gtest.h>

#include <cmath>

#include "evi/error.hpp"
#include "evi/model.hpp"
#include "test_support.hpp"

namespace evi {
namespace {

TEST(Distribution, ClosedFormMoments) {
  const auto n = Distribution::normal(2.5, 0.5);
  EXPECT_EQ(n.mean(), 2.5);
  EXPECT_EQ(n.variance(), 0.25);

  const auto u = Distribution::uniform(-1.0, 3.0);
  EXPECT_EQ(u.mean(), 1.0);
  EXPECT_DOUBLE_EQ(u.variance(), 16.0 / 12.0);

  const auto l = Distribution::lognormal(2.0, std::exp(0.5));
  EXPECT_DOUBLE_EQ(l.mean(), 2.0 * std::exp(0.125));
  EXPECT_DOUBLE_EQ(l.variance(), 4.0 * std::exp(0.25) * (std::exp(0.25) - 1.0));
}

TEST(Distribution, QuantilesAreMonotoneAndCentered) {
  const auto n = Distribution::normal(1.0, 2.0);
  EXPECT_NEAR(n.quantile(0.5), 1.0, 1e-15);
  EXPECT_NEAR(n.quantile(0.975), 1.0 + 2.0 * 1.959963984540054, 1e-12);
  const auto l = Distribution::lognormal(3.0, 2.0);
  EXPECT_NEAR(l.quantile(0.5), 3.0, 1e-12);
  const auto u = Distribution::uniform(2.0, 4.0);
  EXPECT_EQ(u.quantile(0.25), 2.5);
  double prev = -INFINITY;
  for (double p = 1e-9; p < 1.0; p += 0.01) {
    const double q = n.quantile(p);
    EXPECT_GT(q, prev);
    prev = q;
  }
}

TEST(Distribution, RejectsIllegalParameters) {
  EXPECT_THROW(Distribution::normal(5.0, 0.0), ModelError);
  EXPECT_THROW(Distribution::normal(5.0, -1.0), ModelError);
  EXPECT_THROW(Distribution::uniform(1.0, 1.0), ModelError);
  EXPECT_THROW(Distribution::lognormal(0.0, 2.0), ModelError);
  EXPECT_THROW(Distribution::lognormal(1.0, 1.0), ModelError);
}

TEST(ParseModel, MinimalModel) {
  const auto m = parse_model(R"({"title":"t","value_units":"u",
    "variables":[{"name":"x","dist":{"kind":"normal","mean":0,"sd":1}}],
    "decisions":[{"name":"a","value":"x"},{"name":"b","value":"0"}]})");
  EXPECT_EQ(m.variable_count(), 1u);
  EXPECT_EQ(m.decision_count(), 2u);
  EXPECT_TRUE(m.decisions[0].value.is_bound());
}

std::string error_path(const std::string& doc) {
  try {
    parse_model(doc);
  } catch (const ModelError& e) {
    return e.path();
  }
  return "<no error>";
}

TEST(ParseModel, ErrorsNameTheField) {
  const std::string head = R"({"title":"t","value_units":"u","variables":[)";
  const std::string x = R"({"name":"x","dist":{"kind":"normal","mean":0,"sd":1}})";
  const std::string two = R"("decisions":[{"name":"a","value":"x"},{"name":"b","value":"0"}]})";

  try {
    parse_model(head + x + "," + x + "]," + two);
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.path(), "variables[1].name");
    EXPECT_NE(std::string(e.what()).find("duplicate variable name 'x'"), std::string::npos);
  }
  EXPECT_EQ(error_path(head + x + R"(],"decisions":[{"name":"a","value":"y"},{"name":"b","value":"0"}]})"),
            "decisions[0].value");
  EXPECT_EQ(error_path(head + x + R"(],"decisions":[{"name":"a","value":"x"}]})"), "decisions");
  EXPECT_EQ(error_path(head + x + R"(],"decisions":[{"name":"a","value":"x"},{"name":"a","value":"0"}]})"),
            "decisions[1].name");
  EXPECT_EQ(error_path(head + R"({"name":"x","dist":{"kind":"normal","mean":0,"sd":0}}],)" + two),
            "variables[0].dist.sd");
  EXPECT_EQ(error_path(head + R"({"name":"x","dist":{"kind":"gamma"}}],)" + two), "variables[0].dist.kind");
  EXPECT_EQ(error_path(head + R"({"name":"x","dist":{"kind":"uniform","lo":1}}],)" + two),
            "variables[0].dist.hi");
  EXPECT_EQ(error_path(head + R"({"name":"1x","dist":{"kind":"normal","mean":0,"sd":1}}],)" + two),
            "variables[0].name");
  EXPECT_EQ(error_path(head + x + R"(],"decisions":[{"name":"a","value":"x +"},{"name":"b","value":"0"}]})"),
            "decisions[0].value");
  EXPECT_EQ(error_path(R"({"value_units":"u","variables":[],"decisions":[]})"), ".title");
  EXPECT_EQ(error_path("{not json"), "");
}

TEST(ParseModel, DemoModelShape) {
  const auto m = load_model(testing::models_dir() + "/demo_evacuation.json");
  EXPECT_EQ(m.variable_count(), 9u);
  EXPECT_EQ(m.decision_count(), 4u);
  EXPECT_EQ(m.value_units, "lives");
  EXPECT_TRUE(validate_model(m).empty());
}

TEST(LoadModel, MissingFileIsIoError) {
  EXPECT_THROW(load_model("/nonexistent/model.json"), IoError);
}

TEST(ValidateModel, AllNormalIsClean) { EXPECT_TRUE(validate_model(testing::toy_model()).empty()); }

TEST(ValidateModel, NonNormalPriorWarns) {
  auto m = testing::toy_model();
  m.variables[0].prior = Distribution::uniform(0.0, 1.0);
  const auto diags = validate_model(m);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].severity, Diagnostic::Severity::Warning);
  EXPECT_NE(diags[0].message.find("normal-z"), std::string::npos);
}

TEST(ValidateModel, SingleDecisionIsAnError) {
  auto m = testing::toy_model();
  m.decisions.pop_back();
  const auto diags = validate_model(m);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_TRUE(diags[0].is_error());
  EXPECT_EQ(diags[0].message, "need ≥2 decision alternatives");
}

TEST(ValidateModel, IdentifierRules) {
  EXPECT_TRUE(is_identifier("_a1"));
  EXPECT_TRUE(is_identifier("Rate"));
  EXPECT_FALSE(is_identifier("1a"));
  EXPECT_FALSE(is_identifier("a-b"));
  EXPECT_FALSE(is_identifier(""));
}

}  // namespace
}  // namespace evi

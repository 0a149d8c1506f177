#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "evi/error.hpp"
#include "evi/sampling.hpp"
#include "test_support.hpp"

namespace evi {
namespace {

using testing::normal_model;
using testing::toy_model;

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd ac = a.array() - a.mean();
  const Eigen::VectorXd bc = b.array() - b.mean();
  return ac.dot(bc) / (ac.norm() * bc.norm());
}

TEST(Substream, UniformsAreInOpenUnitInterval) {
  const Substream s(3, "x");
  for (std::uint64_t k = 0; k < 10000; ++k) {
    const double u = s.uniform(k);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  EXPECT_NE(Substream(3, "x").bits(0), Substream(3, "y").bits(0));
  EXPECT_NE(Substream(3, "x").bits(0), Substream(4, "x").bits(0));
  EXPECT_EQ(Substream(3, "x").bits(17), Substream(3, "x").bits(17));
}

TEST(DrawScenarios, VanishingVarianceCollapsesToMean) {
  const auto m = normal_model({{"x", {5.0, 1e-12}}}, {{"a", "x"}, {"b", "0"}});
  for (std::uint64_t seed : {0ULL, 1ULL, 123456789ULL}) {
    const auto s = draw_scenarios(m, {1000, seed});
    EXPECT_LE((s.values.array() - 5.0).abs().maxCoeff(), 1e-9);
  }
}

TEST(DrawScenarios, DeterministicForSameInputs) {
  const auto m = load_model(testing::models_dir() + "/demo_evacuation.json");
  const auto a = draw_scenarios(m, {1000, 42});
  const auto b = draw_scenarios(m, {1000, 42});
  EXPECT_TRUE(a.values == b.values);
  const auto c = draw_scenarios(m, {1000, 43});
  EXPECT_FALSE(a.values == c.values);
  EXPECT_TRUE(a.values.allFinite());
}

TEST(DrawScenarios, StandardNormalMoments) {
  const auto m = normal_model({{"x", {0.0, 1.0}}}, {{"a", "x"}, {"b", "0"}});
  const std::size_t n = 100000;
  const auto s = draw_scenarios(m, {n, 2024});
  const Eigen::VectorXd x = s.values.col(0);
  const double mean = x.mean();
  const double var = (x.array() - mean).square().sum() / (n - 1);
  EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_LT(std::abs(var - 1.0), 0.05);
}

TEST(DrawScenarios, SubstreamsSurviveAddingVariables) {
  const auto small = normal_model({{"a", {0, 1}}, {"b", {2, 3}}}, {{"d1", "a"}, {"d2", "b"}});
  const auto large =
      normal_model({{"c", {1, 1}}, {"a", {0, 1}}, {"b", {2, 3}}}, {{"d1", "a"}, {"d2", "b + c"}});
  const auto s1 = draw_scenarios(small, {500, 9});
  const auto s2 = draw_scenarios(large, {500, 9});
  EXPECT_TRUE(s1.values.col(0) == s2.values.col(1));
  EXPECT_TRUE(s1.values.col(1) == s2.values.col(2));
}

TEST(DrawScenarios, ColumnsAreIndependent) {
  const auto m = normal_model({{"a", {0, 1}}, {"b", {0, 1}}, {"c", {10, 2}}}, {{"d1", "a"}, {"d2", "b"}});
  const auto s = draw_scenarios(m, {100000, 5});
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) EXPECT_LT(std::abs(correlation(s.values.col(i), s.values.col(j))), 0.02);
  }
}

TEST(DrawScenarios, RejectsTooSmallSamples) {
  const auto m = normal_model({{"a", {0, 1}}, {"b", {0, 1}}}, {{"d1", "a"}, {"d2", "b"}});
  EXPECT_THROW(draw_scenarios(m, {3, 0}), ModelError);
  EXPECT_NO_THROW(draw_scenarios(m, {4, 0}));
}

TEST(DrawScenarios, NonNormalPriorsStayInSupport) {
  auto m = toy_model();
  m.variables[0].prior = Distribution::uniform(2.0, 3.0);
  auto s = draw_scenarios(m, {20000, 1});
  EXPECT_GE(s.values.minCoeff(), 2.0);
  EXPECT_LE(s.values.maxCoeff(), 3.0);
  EXPECT_NEAR(s.values.mean(), 2.5, 0.01);
  m.variables[0].prior = Distribution::lognormal(2.0, 1.5);
  s = draw_scenarios(m, {20000, 1});
  EXPECT_GT(s.values.minCoeff(), 0.0);
}

TEST(ValueTable, ConstantAndIdentityColumns) {
  const auto m = toy_model();
  const auto s = draw_scenarios(m, {1000, 11});
  const auto t = evaluate_value_table(m, s);
  EXPECT_TRUE(t.values.col(1).isConstant(0.5));
  EXPECT_EQ(t.means(1), 0.5);
  EXPECT_TRUE(t.values.col(0) == s.values.col(0));
  EXPECT_EQ(t.means(0), s.values.col(0).mean());
}

TEST(ValueTable, ToyMeanWithinStandardError) {
  const auto m = toy_model();
  const auto t = evaluate_value_table(m, draw_scenarios(m, {100000, 77}));
  EXPECT_NEAR(t.means(0), 0.6, 0.013);
}

TEST(ValueTable, CellsMatchNamedEvaluation) {
  const auto m = load_model(testing::models_dir() + "/demo_evacuation.json");
  const auto s = draw_scenarios(m, {50, 3});
  const auto t = evaluate_value_table(m, s);
  const auto names = m.variable_names();
  for (Eigen::Index r = 0; r < 50; r += 7) {
    std::map<std::string, double, std::less<>> assignment;
    for (std::size_t i = 0; i < names.size(); ++i) assignment[names[i]] = s.values(r, static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < m.decision_count(); ++j) {
      EXPECT_EQ(t.values(r, static_cast<Eigen::Index>(j)), m.decisions[j].value.evaluate(assignment));
    }
  }
}

TEST(ValueTable, EvaluationErrorsNameScenarioAndDecision) {
  const auto m = normal_model({{"x", {0, 1}}}, {{"safe", "x"}, {"risky", "ln(x)"}});
  const auto s = draw_scenarios(m, {100, 1});
  try {
    evaluate_value_table(m, s);
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_EQ(e.kind(), EvalErrorKind::LogDomain);
    EXPECT_NE(std::string(e.what()).find("decision 'risky'"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("scenario "), std::string::npos);
  }
}

TEST(RankDecisions, ArgmaxAndRunnerUp) {
  const double means[] = {1.0, 2.0, 0.5};
  const auto r = rank_decisions(means);
  EXPECT_EQ(r.star, 1u);
  EXPECT_EQ(r.plus, 0u);
  EXPECT_EQ(r.order, (std::vector<std::size_t>{1, 0, 2}));
}

TEST(RankDecisions, TiesGoToLowestIndex) {
  const double means[] = {2.0, 2.0};
  const auto r = rank_decisions(means);
  EXPECT_EQ(r.star, 0u);
  EXPECT_EQ(r.plus, 1u);
  const double single[] = {1.0};
  EXPECT_THROW(rank_decisions(single), ModelError);
}

TEST(RankDecisions, DemoMatchesSecondPassMeans) {
  const auto m = load_model(testing::models_dir() + "/demo_evacuation.json");
  const auto t = evaluate_value_table(m, draw_scenarios(m, {10000, 7}));
  // Spreadsheet-style recomputation: plain running sums, row by row.
  std::vector<double> sums(m.decision_count(), 0.0);
  for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
    for (std::size_t j = 0; j < sums.size(); ++j) sums[j] += t.values(r, static_cast<Eigen::Index>(j));
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < sums.size(); ++j) if (sums[j] > sums[best]) best = j;
  std::size_t second = best == 0 ? 1 : 0;
  for (std::size_t j = 0; j < sums.size(); ++j) if (j != best && sums[j] > sums[second]) second = j;

  const auto r = rank_decisions(t);
  EXPECT_EQ(r.star, best);
  EXPECT_EQ(r.plus, second);
  for (std::size_t k = 0; k + 1 < r.sorted_means.size(); ++k) EXPECT_GE(r.sorted_means[k], r.sorted_means[k + 1]);
}

TEST(ScenarioCsv, HeaderAndFullPrecision) {
  const auto m = toy_model();
  const auto s = draw_scenarios(m, {3, 1});
  const auto t = evaluate_value_table(m, s);
  std::ostringstream out;
  write_scenario_csv(out, s, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "scenario,x1,d1,d2");
  std::getline(in, line);
  const auto comma = line.find(',');
  EXPECT_EQ(line.substr(0, comma), "0");
  const double parsed = std::stod(line.substr(comma + 1));
  EXPECT_EQ(parsed, s.values(0, 0));
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

}  // namespace
}  // namespace evi

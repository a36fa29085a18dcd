#include <filesystem>

#include <gtest/gtest.h>

#include "llpt/scenario.hpp"

using namespace llpt;

namespace {

const std::string kMinimal = R"({
  "schema_version": 1,
  "bounds": {"lower": [0, 0], "upper": [1, 1]},
  "start": [0.1, 0.1],
  "goal": [0.9, 0.9]
})";

std::string scenario_path(const std::string& name) {
  return std::string(LLPT_SOURCE_DIR) + "/scenarios/" + name;
}

std::string error_field(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.field();
  }
  return "<none>";
}

}  // namespace

TEST(LoadScenario, MinimalFileGetsDefaults) {
  const Scenario s = parse_scenario(kMinimal);
  EXPECT_EQ(s.planner.alpha, 100u);
  EXPECT_EQ(s.planner.resolution, 0.01);
  EXPECT_EQ(s.planner.gamma_s, 1.0);
  EXPECT_DOUBLE_EQ(s.planner.delta, 0.1);
  EXPECT_EQ(s.mode, ScenarioMode::kStatic);
  EXPECT_TRUE(s.obstacles.empty());
  EXPECT_EQ(s.bounds.dim(), 2u);
}

TEST(LoadScenario, StartInsideObstacleNamesStart) {
  const std::string text = R"({
    "schema_version": 1,
    "bounds": {"lower": [0, 0], "upper": [1, 1]},
    "start": [0.5, 0.5], "goal": [0.9, 0.9],
    "obstacles": [{"id": "rock", "sphere": {"center": [0.5, 0.5], "radius": 0.1}}]
  })";
  EXPECT_EQ(error_field(text), "start");
}

TEST(LoadScenario, FieldPathsInErrors) {
  EXPECT_EQ(error_field("{"), "<document>");
  EXPECT_EQ(error_field(R"({"bounds": {"lower": [0], "upper": [1]}})"), "schema_version");
  EXPECT_EQ(error_field(R"({"schema_version": 2})"), "schema_version");
  EXPECT_EQ(error_field(R"({"schema_version": 1, "bounds": {"lower": [0, 0], "upper": [1, 0]}})"), "bounds");
  EXPECT_EQ(error_field(R"({"schema_version": 1, "bounds": {"lower": [0, 0], "upper": [1, 1]},
    "start": [0.1], "goal": [0.9, 0.9]})"), "start");
  EXPECT_EQ(error_field(R"({"schema_version": 1, "bounds": {"lower": [0, 0], "upper": [1, 1]},
    "start": [0.1, 0.1], "goal": [0.9, 0.9], "planner": {"alpha": 0}})"), "planner.alpha");
  EXPECT_EQ(error_field(R"({"schema_version": 1, "bounds": {"lower": [0, 0], "upper": [1, 1]},
    "start": [0.1, 0.1], "goal": [0.9, 0.9], "planner": {"delta": -1}})"), "planner.delta");
  EXPECT_EQ(error_field(R"({"schema_version": 1, "bounds": {"lower": [0, 0], "upper": [1, 1]},
    "start": [0.1, 0.1], "goal": [0.9, 0.9],
    "obstacles": [{"id": "a", "sphere": {"center": [0.5, 0.5], "radius": 0}}]})"), "obstacles[0].sphere.radius");
  EXPECT_EQ(error_field(R"({"schema_version": 1, "bounds": {"lower": [0, 0], "upper": [1, 1]},
    "start": [0.1, 0.1], "goal": [0.9, 0.9],
    "epochs": [{"time": 1, "remove": "a"}, {"time": 1, "remove": "b"}]})"), "epochs[1].time");
  EXPECT_EQ(error_field(R"({"schema_version": 1, "bounds": {"lower": [0, 0], "upper": [1, 1]},
    "start": [0.1, 0.1], "goal": [1.5, 0.9]})"), "goal");
  EXPECT_EQ(error_field(R"({"schema_version": 1, "bounds": {"lower": [0, 0], "upper": [1, 1]},
    "start": [0.1, 0.1], "goal": [0.9, 0.9], "robot": {"speed": 0}})"), "robot.speed");
}

TEST(LoadScenario, AlphaInfinity) {
  std::string text = kMinimal;
  text.insert(text.rfind('}'), R"(, "planner": {"alpha": "inf"})");
  EXPECT_EQ(parse_scenario(text).planner.alpha, kAlphaUnbounded);
}

TEST(LoadScenario, MissingFile) { EXPECT_THROW(load_scenario("/nonexistent/x.json"), ScenarioError); }

TEST(SerializeScenario, RoundTripsBundledScenarios) {
  for (const auto& entry : std::filesystem::directory_iterator(std::string(LLPT_SOURCE_DIR) + "/scenarios")) {
    if (entry.path().extension() != ".json") continue;
    const Scenario s = load_scenario(entry.path().string());
    const std::string canonical = serialize_scenario(s);
    const Scenario again = parse_scenario(canonical);
    EXPECT_EQ(again, s) << entry.path();
    EXPECT_EQ(serialize_scenario(again), canonical) << entry.path();
  }
}

TEST(SerializeScenario, PreservesEveryField) {
  const Scenario s = load_scenario(scenario_path("moving_obstacle.json"));
  EXPECT_EQ(s.mode, ScenarioMode::kDynamic);
  ASSERT_EQ(s.obstacles.size(), 2u);
  ASSERT_TRUE(s.obstacles[0].motion);
  EXPECT_EQ(s.obstacles[0].motion->t_end, 2.0);
  ASSERT_EQ(s.epochs.size(), 2u);
  EXPECT_EQ(s.epochs[0].kind, EpochEvent::Kind::kTranslate);
  EXPECT_EQ(s.epochs[1].kind, EpochEvent::Kind::kRemove);
  const Scenario again = parse_scenario(serialize_scenario(s));
  EXPECT_EQ(again.obstacles, s.obstacles);
  EXPECT_EQ(again.epochs, s.epochs);
  EXPECT_EQ(again.robot, s.robot);
  EXPECT_EQ(again.budget, s.budget);
}

TEST(Scenario, FailureCostIsTenDiameters) {
  const Scenario s = parse_scenario(kMinimal);
  EXPECT_DOUBLE_EQ(s.failure_cost(), 10.0 * std::sqrt(2.0));
}

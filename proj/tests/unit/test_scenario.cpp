#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ecodrive/scenario.hpp"

using namespace ecodrive;
using nlohmann::json;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

ScenarioError::Kind kind_of(const json& doc, std::string* where = nullptr) {
  try {
    parse_scenario(doc.dump());
  } catch (const ScenarioError& e) {
    if (where) *where = e.where();
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << doc.dump();
  return ScenarioError::Kind::io;
}

json route1_doc() { return scenario_to_json(*builtin_scenario("route1")); }

}  // namespace

TEST(Scenario, BuiltinsValidateAndRoundTrip) {
  ASSERT_EQ(builtin_scenario_names().size(), 10u);
  for (const Scenario& sc : builtin_scenarios()) {
    SCOPED_TRACE(sc.name);
    EXPECT_NO_THROW(validate_scenario(sc));
    const auto path = temp_file("ecodrive_" + sc.name + ".json");
    save_scenario(sc, path);
    const Scenario back = load_scenario(path);
    EXPECT_EQ(back, sc);
    EXPECT_EQ(scenario_hash(back), scenario_hash(sc));
    std::filesystem::remove(path);
  }
}

TEST(Scenario, PresetContents) {
  const Scenario r1 = *builtin_scenario("route1-robust-moderate");
  ASSERT_EQ(r1.route.signals.size(), 4u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(r1.route.signals[i].kind, SignalKind::signal);
    EXPECT_EQ(r1.route.signals[i].delay, DelayDistribution::moderate_traffic());
  }
  EXPECT_EQ(r1.route.signals[3].kind, SignalKind::stop);
  EXPECT_EQ(r1.solver.eta, 0.9);
  const Scenario r2 = *builtin_scenario("route2-robust-moderate");
  EXPECT_EQ(r2.route.deadline, 250.0);
  EXPECT_EQ(builtin_scenario("route2")->route.deadline, 235.0);
  EXPECT_EQ(r2.route.length, 1600.0);
  EXPECT_EQ(builtin_scenario("route1")->route.deadline, 115.0);
  EXPECT_FALSE(builtin_scenario("route3").has_value());
}

TEST(Scenario, HashChangesWithContent) {
  Scenario a = *builtin_scenario("route1");
  Scenario b = a;
  b.route.signals[0].clock_offset += 1.0;
  EXPECT_NE(scenario_hash(a), scenario_hash(b));
  EXPECT_EQ(scenario_hash(a).size(), 16u);
}

TEST(Scenario, SyntaxErrorCarriesLineAndColumn) {
  try {
    parse_scenario("{\n  \"name\": \"x\",\n  oops\n}");
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.kind(), ScenarioError::Kind::parse);
    EXPECT_EQ(e.where().substr(0, 2), "3:");
  }
}

TEST(Scenario, UnknownKeyIsSchemaError) {
  json doc = route1_doc();
  doc["route"]["lenght"] = 5;
  std::string where;
  EXPECT_EQ(kind_of(doc, &where), ScenarioError::Kind::schema);
  EXPECT_EQ(where, "/route/lenght");
}

TEST(Scenario, WrongTypeIsSchemaError) {
  json doc = route1_doc();
  doc["signals"][1]["cycle_period"] = "sixty";
  std::string where;
  EXPECT_EQ(kind_of(doc, &where), ScenarioError::Kind::schema);
  EXPECT_EQ(where, "/signals/1/cycle_period");
}

TEST(Scenario, MissingNameIsSchemaError) {
  json doc = route1_doc();
  doc.erase("name");
  EXPECT_EQ(kind_of(doc), ScenarioError::Kind::schema);
}

TEST(Scenario, BrokenInvariantsAreReported) {
  json red = route1_doc();
  red["signals"][0]["base_red"] = 70.0;
  EXPECT_EQ(kind_of(red), ScenarioError::Kind::invariant);

  json order = route1_doc();
  order["signals"][1]["position"] = 100.0;
  EXPECT_EQ(kind_of(order), ScenarioError::Kind::invariant);

  json misaligned = route1_doc();
  misaligned["signals"][0]["position"] = 203.0;
  EXPECT_EQ(kind_of(misaligned), ScenarioError::Kind::invariant);

  json support = route1_doc();
  support["signals"][0]["delay"]["hi"] = 45.0;
  EXPECT_EQ(kind_of(support), ScenarioError::Kind::invariant);

  json eta = route1_doc();
  eta["solver"]["eta"] = 1.5;
  EXPECT_EQ(kind_of(eta), ScenarioError::Kind::invariant);
}

TEST(Scenario, MissingFilesAreIoErrors) {
  try {
    load_scenario("/nonexistent/scenario.json");
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.kind(), ScenarioError::Kind::io);
  }
  json doc = route1_doc();
  doc["vehicle"]["fuel_map"] = {{"csv", "missing_map.csv"}};
  EXPECT_EQ(kind_of(doc), ScenarioError::Kind::io);
}

TEST(Scenario, SpeedLimitShorthandAndDelayPresets) {
  json doc = route1_doc();
  doc["route"]["speed_limits"] = {{"min", 0.0}, {"max", 14.0}};
  doc["signals"][0]["delay"] = {{"preset", "heavy"}};
  const Scenario sc = parse_scenario(doc.dump());
  EXPECT_EQ(sc.route.speed_max.max_value(), 14.0);
  EXPECT_EQ(sc.route.signals[0].delay, DelayDistribution::heavy_traffic());
}

TEST(Scenario, TabulatedCsvResolvesAgainstScenarioDirectory) {
  const auto dir = temp_file("ecodrive_scenario_dir");
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "law.csv");
    out << "delay_s,cdf\n0,0\n10,0.7\n30,1\n";
  }
  json doc = route1_doc();
  doc["signals"][0]["delay"] = {{"family", "tabulated"}, {"csv", "law.csv"}};
  {
    std::ofstream out(dir / "s.json");
    out << doc.dump(2);
  }
  const Scenario sc = load_scenario(dir / "s.json");
  EXPECT_NEAR(sc.route.signals[0].delay->cdf(5.0), 0.35, 1e-12);
  std::filesystem::remove_all(dir);
}

TEST(Scenario, ResolveAcceptsNamesAndPaths) {
  EXPECT_EQ(resolve_scenario("route2").name, "route2");
  EXPECT_THROW(resolve_scenario("no-such-scenario"), ScenarioError);
}

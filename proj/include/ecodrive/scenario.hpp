#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ecodrive/dp_solver.hpp"
#include "ecodrive/idm.hpp"
#include "ecodrive/route.hpp"

namespace ecodrive {

// Where the engine map comes from; kept so a saved scenario reloads the same
// way.
struct FuelMapSource {
  std::optional<SyntheticMapParams> synthetic;   // set unless loaded from CSV
  std::filesystem::path csv;                     // absolute when loaded from CSV

  bool operator==(const FuelMapSource&) const = default;
};

struct ScenarioSolver {
  Objective objective = Objective::fuel;
  std::optional<double> eta;   // absent: deterministic
  unsigned threads = 1;

  bool operator==(const ScenarioSolver&) const = default;
};

struct Scenario {
  std::string name;
  std::string description;
  Vehicle vehicle;
  FuelMapSource fuel_map_source;
  Route route;
  IdmParams idm;
  GridSpec grid;
  ScenarioSolver solver;
  // Absolute CSV paths of tabulated delay laws, by signal index.
  std::vector<std::filesystem::path> delay_csv;

  bool operator==(const Scenario&) const = default;
};

// Every load failure carries the JSON pointer of the offending field (or the
// line/column for syntax errors).
class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { parse, schema, invariant, io };
  ScenarioError(Kind kind, std::string where, const std::string& message);
  Kind kind() const { return kind_; }
  const std::string& where() const { return where_; }

 private:
  Kind kind_;
  std::string where_;
};

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

// Checks every cross-field invariant (route, vehicle, grid alignment, delay
// support). Throws ScenarioError(invariant).
void validate_scenario(const Scenario& scenario);

// 16 hex digits, FNV-1a over the canonical JSON form.
std::string scenario_hash(const Scenario& scenario);

std::vector<std::string> builtin_scenario_names();
std::optional<Scenario> builtin_scenario(const std::string& name);
std::vector<Scenario> builtin_scenarios();

// A builtin name or a path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

}  // namespace ecodrive

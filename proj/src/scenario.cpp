#include "ecodrive/scenario.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dp_internal.hpp"
#include "ecodrive/error.hpp"

namespace ecodrive {

using nlohmann::json;

ScenarioError::ScenarioError(Kind kind, std::string where, const std::string& message)
    : std::runtime_error(where.empty() ? message : where + ": " + message),
      kind_(kind),
      where_(std::move(where)) {}

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& message) {
  throw ScenarioError(ScenarioError::Kind::schema, where.empty() ? "/" : where, message);
}

[[noreturn]] void invariant_error(const std::string& where, const std::string& message) {
  throw ScenarioError(ScenarioError::Kind::invariant, where.empty() ? "/" : where, message);
}

// Typed, path-aware view of one JSON object; every key must be consumed.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) schema_error(where(), "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string where() const { return path_.empty() ? "/" : path_; }
  std::string child(const std::string& key) const { return path_ + "/" + key; }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end()) schema_error(child(key), "missing required field");
    return *it;
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) schema_error(child(key), "expected a number");
    return v.get<double>();
  }

  void number(const std::string& key, double& out) {
    if (has(key)) out = number(key);
  }

  int integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) schema_error(child(key), "expected an integer");
    return v.get<int>();
  }

  void integer(const std::string& key, int& out) {
    if (has(key)) out = integer(key);
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) schema_error(child(key), "expected a string");
    return v.get<std::string>();
  }

  void string(const std::string& key, std::string& out) {
    if (has(key)) out = string(key);
  }

  Section object(const std::string& key) { return Section(raw(key), child(key)); }

  // Rejects keys nobody asked for.
  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) schema_error(child(it.key()), "unknown field");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::filesystem::path resolve_path(const std::string& text, const std::filesystem::path& base_dir) {
  std::filesystem::path p(text);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p.lexically_normal();
}

PiecewiseConstant read_profile(const json& node, const std::string& path, double length) {
  if (node.is_number()) return PiecewiseConstant::constant(length, node.get<double>());
  if (!node.is_array()) schema_error(path, "expected a number or an array of segments");
  std::vector<PiecewiseConstant::Segment> segments;
  for (std::size_t i = 0; i < node.size(); ++i) {
    Section seg(node[i], path + "/" + std::to_string(i));
    PiecewiseConstant::Segment s{seg.number("start"), seg.number("end"), seg.number("value")};
    seg.finish();
    segments.push_back(s);
  }
  return PiecewiseConstant(std::move(segments));
}

json write_profile(const PiecewiseConstant& profile) {
  json out = json::array();
  for (const auto& s : profile.segments()) out.push_back({{"start", s.start}, {"end", s.end}, {"value", s.value}});
  return out;
}

DelayDistribution read_delay(Section d, const std::filesystem::path& base_dir, std::filesystem::path& csv) {
  if (d.has("preset")) {
    const std::string preset = d.string("preset");
    d.finish();
    if (preset == "light") return DelayDistribution::light_traffic();
    if (preset == "moderate") return DelayDistribution::moderate_traffic();
    if (preset == "heavy") return DelayDistribution::heavy_traffic();
    schema_error(d.child("preset"), "expected one of light, moderate, heavy");
  }
  const std::string family = d.string("family");
  try {
    if (family == "truncated_gaussian") {
      const double mean = d.number("mean");
      const double variance = d.number("variance");
      const double lo = d.number("lo");
      const double hi = d.number("hi");
      d.finish();
      return DelayDistribution::truncated_gaussian(mean, variance, lo, hi);
    }
    if (family == "tabulated") {
      if (d.has("csv")) {
        csv = resolve_path(d.string("csv"), base_dir);
        d.finish();
        return DelayDistribution::load_tabulated_csv(csv);
      }
      const json& pts = d.raw("points");
      d.finish();
      if (!pts.is_array()) schema_error(d.child("points"), "expected an array of [delay, probability] pairs");
      std::vector<std::pair<double, double>> points;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const json& p = pts[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          schema_error(d.child("points") + "/" + std::to_string(i), "expected [delay, probability]");
        }
        points.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      return DelayDistribution::tabulated(std::move(points));
    }
  } catch (const ConfigError& e) {
    invariant_error(d.where(), e.what());
  }
  schema_error(d.child("family"), "expected truncated_gaussian or tabulated");
}

json write_delay(const DelayDistribution& dist, const std::filesystem::path& csv) {
  if (dist.family() == DelayDistribution::Family::truncated_gaussian) {
    return {{"family", "truncated_gaussian"},
            {"mean", dist.mean_parameter()},
            {"variance", dist.variance_parameter()},
            {"lo", dist.lo()},
            {"hi", dist.hi()}};
  }
  if (!csv.empty()) return {{"family", "tabulated"}, {"csv", csv.string()}};
  json points = json::array();
  for (const auto& [x, p] : dist.points()) points.push_back({x, p});
  return {{"family", "tabulated"}, {"points", points}};
}

void read_vehicle(Section v, Scenario& s, const std::filesystem::path& base_dir) {
  VehicleParams& p = s.vehicle.params;
  v.number("mass", p.mass);
  v.number("wheel_radius", p.wheel_radius);
  v.number("frontal_area", p.frontal_area);
  v.number("air_density", p.air_density);
  v.number("drag_coeff", p.drag_coeff);
  v.number("rolling_c1", p.rolling_c1);
  v.number("rolling_c2", p.rolling_c2);
  v.number("gravity", p.gravity);
  v.number("final_drive", p.final_drive);
  if (v.has("gearbox_ratios")) {
    const json& r = v.raw("gearbox_ratios");
    if (!r.is_array() || r.size() != static_cast<std::size_t>(kGearCount)) {
      schema_error(v.child("gearbox_ratios"), "expected " + std::to_string(kGearCount) + " numbers");
    }
    for (int g = 0; g < kGearCount; ++g) {
      if (!r[g].is_number()) schema_error(v.child("gearbox_ratios") + "/" + std::to_string(g), "expected a number");
      p.gearbox_ratios[g] = r[g].get<double>();
    }
  }
  v.number("engine_torque_min", p.engine_torque_min);
  v.number("engine_torque_max", p.engine_torque_max);
  v.number("engine_speed_max", p.engine_speed_max);
  v.number("brake_torque_max", p.brake_torque_max);
  v.number("accel_min", p.accel_min);
  v.number("accel_max", p.accel_max);

  OverrunFuel overrun = OverrunFuel::zero_torque_column;
  s.fuel_map_source = {SyntheticMapParams{}, {}};
  if (v.has("fuel_map")) {
    Section fm = v.object("fuel_map");
    if (fm.has("negative_torque")) {
      const std::string mode = fm.string("negative_torque");
      if (mode == "cut") overrun = OverrunFuel::cut;
      else if (mode != "zero_torque_column") {
        schema_error(fm.child("negative_torque"), "expected zero_torque_column or cut");
      }
    }
    if (fm.has("csv") == fm.has("synthetic")) schema_error(fm.where(), "give exactly one of synthetic, csv");
    if (fm.has("csv")) {
      s.fuel_map_source = {std::nullopt, resolve_path(fm.string("csv"), base_dir)};
    } else {
      Section syn = fm.object("synthetic");
      SyntheticMapParams mp;
      syn.number("idle_rate", mp.idle_rate);
      syn.number("friction_rate", mp.friction_rate);
      syn.number("peak_efficiency", mp.peak_efficiency);
      syn.number("bowl_torque", mp.bowl_torque);
      syn.number("bowl_speed", mp.bowl_speed);
      syn.number("torque_curvature", mp.torque_curvature);
      syn.number("speed_curvature", mp.speed_curvature);
      syn.number("efficiency_floor", mp.efficiency_floor);
      syn.number("heating_value", mp.heating_value);
      syn.number("torque_max", mp.torque_max);
      syn.number("speed_max", mp.speed_max);
      syn.integer("torque_points", mp.torque_points);
      syn.integer("speed_points", mp.speed_points);
      syn.finish();
      s.fuel_map_source = {mp, {}};
    }
    fm.finish();
  }
  v.finish();

  try {
    s.vehicle.fuel_map = s.fuel_map_source.synthetic ? FuelMap::synthetic(*s.fuel_map_source.synthetic)
                                                     : FuelMap::load_csv(s.fuel_map_source.csv);
  } catch (const ConfigError& e) {
    throw ScenarioError(s.fuel_map_source.synthetic ? ScenarioError::Kind::invariant : ScenarioError::Kind::io,
                        v.child("fuel_map"), e.what());
  }
  s.vehicle.fuel_map.set_overrun(overrun);
}

json write_vehicle(const Scenario& s) {
  const VehicleParams& p = s.vehicle.params;
  json fm;
  if (s.fuel_map_source.synthetic) {
    const SyntheticMapParams& mp = *s.fuel_map_source.synthetic;
    fm["synthetic"] = {{"idle_rate", mp.idle_rate},
                       {"friction_rate", mp.friction_rate},
                       {"peak_efficiency", mp.peak_efficiency},
                       {"bowl_torque", mp.bowl_torque},
                       {"bowl_speed", mp.bowl_speed},
                       {"torque_curvature", mp.torque_curvature},
                       {"speed_curvature", mp.speed_curvature},
                       {"efficiency_floor", mp.efficiency_floor},
                       {"heating_value", mp.heating_value},
                       {"torque_max", mp.torque_max},
                       {"speed_max", mp.speed_max},
                       {"torque_points", mp.torque_points},
                       {"speed_points", mp.speed_points}};
  } else {
    fm["csv"] = s.fuel_map_source.csv.string();
  }
  fm["negative_torque"] = s.vehicle.fuel_map.overrun() == OverrunFuel::cut ? "cut" : "zero_torque_column";
  return {{"mass", p.mass},
          {"wheel_radius", p.wheel_radius},
          {"frontal_area", p.frontal_area},
          {"air_density", p.air_density},
          {"drag_coeff", p.drag_coeff},
          {"rolling_c1", p.rolling_c1},
          {"rolling_c2", p.rolling_c2},
          {"gravity", p.gravity},
          {"final_drive", p.final_drive},
          {"gearbox_ratios", p.gearbox_ratios},
          {"engine_torque_min", p.engine_torque_min},
          {"engine_torque_max", p.engine_torque_max},
          {"engine_speed_max", p.engine_speed_max},
          {"brake_torque_max", p.brake_torque_max},
          {"accel_min", p.accel_min},
          {"accel_max", p.accel_max},
          {"fuel_map", fm}};
}

void read_route(Section r, Scenario& s) {
  Route& route = s.route;
  route.length = r.number("length");
  route.deadline = r.number("deadline");
  if (!(route.length > 0.0)) invariant_error(r.child("length"), "must be positive");
  route.speed_min = PiecewiseConstant::constant(route.length, 0.0);
  route.speed_max = PiecewiseConstant::constant(route.length, 16.0);
  route.grade = PiecewiseConstant::constant(route.length, 0.0);
  if (r.has("speed_limits")) {
    Section lim = r.object("speed_limits");
    if (lim.has("min")) route.speed_min = read_profile(lim.raw("min"), lim.child("min"), route.length);
    if (lim.has("max")) route.speed_max = read_profile(lim.raw("max"), lim.child("max"), route.length);
    lim.finish();
  }
  if (r.has("grade")) route.grade = read_profile(r.raw("grade"), r.child("grade"), route.length);
  r.finish();
}

void read_signals(const json& node, const std::string& path, Scenario& s, const std::filesystem::path& base_dir) {
  if (!node.is_array()) schema_error(path, "expected an array");
  s.route.signals.clear();
  s.delay_csv.assign(node.size(), {});
  for (std::size_t i = 0; i < node.size(); ++i) {
    Section sig(node[i], path + "/" + std::to_string(i));
    SignalSpec spec;
    spec.position = sig.number("position");
    const std::string kind = sig.has("kind") ? sig.string("kind") : std::string("signal");
    if (kind == "stop") {
      spec.kind = SignalKind::stop;
    } else if (kind == "signal") {
      spec.kind = SignalKind::signal;
      sig.number("cycle_period", spec.cycle_period);
      sig.number("base_red", spec.base_red);
      sig.number("clock_offset", spec.clock_offset);
      if (sig.has("delay")) spec.delay = read_delay(sig.object("delay"), base_dir, s.delay_csv[i]);
    } else {
      schema_error(sig.child("kind"), "expected signal or stop");
    }
    sig.finish();
    s.route.signals.push_back(std::move(spec));
  }
  // Kept empty unless some law was read from a CSV file.
  if (std::all_of(s.delay_csv.begin(), s.delay_csv.end(), [](const auto& p) { return p.empty(); })) {
    s.delay_csv.clear();
  }
}

json write_signals(const Scenario& s) {
  json out = json::array();
  for (std::size_t i = 0; i < s.route.signals.size(); ++i) {
    const SignalSpec& sig = s.route.signals[i];
    if (sig.kind == SignalKind::stop) {
      out.push_back({{"position", sig.position}, {"kind", "stop"}});
      continue;
    }
    json j = {{"position", sig.position},
              {"kind", "signal"},
              {"cycle_period", sig.cycle_period},
              {"base_red", sig.base_red},
              {"clock_offset", sig.clock_offset}};
    if (sig.delay) {
      const std::filesystem::path csv = i < s.delay_csv.size() ? s.delay_csv[i] : std::filesystem::path{};
      j["delay"] = write_delay(*sig.delay, csv);
    }
    out.push_back(j);
  }
  return out;
}

void read_idm(Section d, IdmParams& p) {
  d.number("min_gap", p.min_gap);
  d.number("headway", p.headway);
  d.number("comfort_decel", p.comfort_decel);
  d.number("max_accel", p.max_accel);
  d.number("desired_speed", p.desired_speed);
  d.number("vision_distance", p.vision_distance);
  d.number("timestep", p.timestep);
  d.number("horizon_factor", p.horizon_factor);
  if (d.has("gap_form")) {
    const std::string form = d.string("gap_form");
    if (form == "preview") p.gap_form = GapForm::preview;
    else if (form == "standard") p.gap_form = GapForm::standard;
    else schema_error(d.child("gap_form"), "expected preview or standard");
  }
  d.finish();
}

void read_grid(Section d, GridSpec& g) {
  d.number("distance_step", g.distance_step);
  d.number("velocity_step", g.velocity_step);
  d.number("time_step", g.time_step);
  d.integer("engine_torque_levels", g.engine_torque_levels);
  d.integer("brake_torque_levels", g.brake_torque_levels);
  d.integer("substeps", g.substeps);
  if (d.has("gears")) {
    const json& gears = d.raw("gears");
    if (!gears.is_array()) schema_error(d.child("gears"), "expected an array of integers");
    g.gears.clear();
    for (std::size_t i = 0; i < gears.size(); ++i) {
      if (!gears[i].is_number_integer()) schema_error(d.child("gears") + "/" + std::to_string(i), "expected an integer");
      g.gears.push_back(gears[i].get<int>());
    }
  }
  d.finish();
}

void read_solver(Section d, ScenarioSolver& s) {
  if (d.has("objective")) {
    const std::string name = d.string("objective");
    const auto obj = parse_objective(name);
    if (!obj) schema_error(d.child("objective"), "expected fuel or time");
    s.objective = *obj;
  }
  if (d.has("eta")) {
    const json& eta = d.raw("eta");
    if (eta.is_null()) {
      s.eta.reset();
    } else if (eta.is_number()) {
      s.eta = eta.get<double>();
    } else {
      schema_error(d.child("eta"), "expected a number or null");
    }
  }
  if (d.has("threads")) {
    const int threads = d.integer("threads");
    if (threads < 1) invariant_error(d.child("threads"), "must be >= 1");
    s.threads = static_cast<unsigned>(threads);
  }
  d.finish();
}

// Maps "route.signals[3]: ..." style messages from the model validators to a
// JSON pointer.
std::string pointer_for(const std::string& message) {
  auto index_after = [&](const std::string& prefix) -> std::string {
    if (message.rfind(prefix, 0) != 0) return {};
    const auto close = message.find(']', prefix.size());
    if (close == std::string::npos) return {};
    return message.substr(prefix.size(), close - prefix.size());
  };
  if (auto i = index_after("route.signals["); !i.empty()) return "/signals/" + i;
  if (auto i = index_after("route.speed_limits.min["); !i.empty()) return "/route/speed_limits/min/" + i;
  if (auto i = index_after("route.speed_limits.max["); !i.empty()) return "/route/speed_limits/max/" + i;
  if (auto i = index_after("route.grade["); !i.empty()) return "/route/grade/" + i;
  if (message.rfind("route.speed_limits.min", 0) == 0) return "/route/speed_limits/min";
  if (message.rfind("route.speed_limits.max", 0) == 0) return "/route/speed_limits/max";
  if (message.rfind("route.grade", 0) == 0) return "/route/grade";
  if (message.rfind("route.length", 0) == 0) return "/route/length";
  if (message.rfind("route.deadline", 0) == 0) return "/route/deadline";
  if (message.rfind("route", 0) == 0) return "/route";
  if (message.rfind("vehicle", 0) == 0) return "/vehicle";
  if (message.rfind("idm", 0) == 0) return "/idm";
  if (message.rfind("grid", 0) == 0) return "/grid";
  if (message.find("position of route.signals[") != std::string::npos) {
    const auto open = message.find("route.signals[") + 14;
    return "/signals/" + message.substr(open, message.find(']', open) - open);
  }
  if (message.find("deadline") != std::string::npos) return "/route/deadline";
  if (message.find("route length") != std::string::npos) return "/route/length";
  if (message.find("speed limit") != std::string::npos) return "/grid/velocity_step";
  return "/";
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Route preset_route(const std::vector<double>& offsets, double deadline, const DelayDistribution& delay) {
  Route r;
  r.length = 200.0 * static_cast<double>(offsets.size() + 1);
  r.deadline = deadline;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    SignalSpec s;
    s.position = 200.0 * static_cast<double>(i + 1);
    s.cycle_period = 60.0;
    s.base_red = 30.0;
    s.clock_offset = offsets[i];
    s.delay = delay;
    r.signals.push_back(s);
  }
  SignalSpec stop;
  stop.position = r.length;
  stop.kind = SignalKind::stop;
  r.signals.push_back(stop);
  r.speed_min = PiecewiseConstant::constant(r.length, 0.0);
  r.speed_max = PiecewiseConstant::constant(r.length, 16.0);
  r.grade = PiecewiseConstant::constant(r.length, 0.0);
  return r;
}

struct PresetSpec {
  const char* name;
  int route;
  const char* traffic;  // nullptr: deterministic
  double eta;
  double deadline;      // s
};

constexpr PresetSpec kPresets[] = {
    {"route1", 1, nullptr, 0.0, 115.0},
    {"route1-deterministic", 1, nullptr, 0.0, 115.0},
    {"route1-robust-light", 1, "light", 0.9, 130.0},
    {"route1-robust-moderate", 1, "moderate", 0.9, 130.0},
    {"route1-robust-heavy", 1, "heavy", 0.9, 150.0},
    {"route2", 2, nullptr, 0.0, 235.0},
    {"route2-deterministic", 2, nullptr, 0.0, 235.0},
    {"route2-robust-light", 2, "light", 0.9, 250.0},
    {"route2-robust-moderate", 2, "moderate", 0.9, 250.0},
    {"route2-robust-heavy", 2, "heavy", 0.9, 270.0},
};

Scenario make_preset(const PresetSpec& p) {
  Scenario s;
  s.name = p.name;
  s.fuel_map_source = {SyntheticMapParams{}, {}};
  const std::string traffic = p.traffic ? p.traffic : "moderate";
  const DelayDistribution delay = traffic == "light"   ? DelayDistribution::light_traffic()
                                  : traffic == "heavy" ? DelayDistribution::heavy_traffic()
                                                       : DelayDistribution::moderate_traffic();
  std::ostringstream desc;
  if (p.route == 1) {
    s.route = preset_route({10.0, 30.0, 0.0}, p.deadline, delay);
    desc << "800 m, signals at 200/400/600 m (c0 = 10/30/0 s, c_f = 60 s, c_r = 30 s), stop sign at 800 m. ";
  } else {
    s.route = preset_route({0.0, 20.0, 0.0, 20.0, 0.0, 25.0, 10.0}, p.deadline, delay);
    desc << "1600 m, signals every 200 m (c0 = 0/20/0/20/0/25/10 s, c_f = 60 s, c_r = 30 s), stop sign at "
            "1600 m. ";
  }
  desc << "Deadline " << p.deadline << " s";
  if (p.traffic) desc << ", loose enough for the eta = " << p.eta << " plan";
  desc << '.';
  if (p.traffic) {
    s.solver.eta = p.eta;
    desc << " Chance-constrained with eta = " << p.eta << " under " << traffic << " traffic delays.";
  } else {
    desc << " Deterministic signal timing; moderate-traffic delay laws attached for Monte-Carlo evaluation.";
  }
  s.description = desc.str();
  return s;
}

}  // namespace

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  Section root(doc, "");
  Scenario s;
  s.name = root.string("name");
  root.string("description", s.description);
  if (root.has("vehicle")) {
    read_vehicle(root.object("vehicle"), s, base_dir);
  } else {
    s.fuel_map_source = {SyntheticMapParams{}, {}};
  }
  read_route(root.object("route"), s);
  read_signals(root.raw("signals"), "/signals", s, base_dir);
  if (root.has("idm")) read_idm(root.object("idm"), s.idm);
  if (root.has("grid")) read_grid(root.object("grid"), s.grid);
  if (root.has("solver")) read_solver(root.object("solver"), s.solver);
  root.finish();
  validate_scenario(s);
  return s;
}

json scenario_to_json(const Scenario& s) {
  const GridSpec& g = s.grid;
  const IdmParams& p = s.idm;
  json doc;
  doc["name"] = s.name;
  doc["description"] = s.description;
  doc["vehicle"] = write_vehicle(s);
  json limits = {{"min", write_profile(s.route.speed_min)}, {"max", write_profile(s.route.speed_max)}};
  doc["route"] = {{"length", s.route.length},
                  {"deadline", s.route.deadline},
                  {"speed_limits", limits},
                  {"grade", write_profile(s.route.grade)}};
  doc["signals"] = write_signals(s);
  doc["idm"] = {{"min_gap", p.min_gap},
                {"headway", p.headway},
                {"comfort_decel", p.comfort_decel},
                {"max_accel", p.max_accel},
                {"desired_speed", p.desired_speed},
                {"vision_distance", p.vision_distance},
                {"timestep", p.timestep},
                {"horizon_factor", p.horizon_factor},
                {"gap_form", p.gap_form == GapForm::preview ? "preview" : "standard"}};
  doc["grid"] = {{"distance_step", g.distance_step},
                 {"velocity_step", g.velocity_step},
                 {"time_step", g.time_step},
                 {"engine_torque_levels", g.engine_torque_levels},
                 {"brake_torque_levels", g.brake_torque_levels},
                 {"gears", g.gears},
                 {"substeps", g.substeps}};
  doc["solver"] = {{"objective", std::string(objective_name(s.solver.objective))},
                   {"eta", s.solver.eta ? json(*s.solver.eta) : json(nullptr)},
                   {"threads", s.solver.threads}};
  return doc;
}

void validate_scenario(const Scenario& s) {
  if (s.name.empty()) invariant_error("/name", "must not be empty");
  const Route& r = s.route;
  for (std::size_t i = 0; i < r.signals.size(); ++i) {
    const double pos = r.signals[i].position;
    if (!(pos > 0.0) || pos > r.length) {
      invariant_error("/signals/" + std::to_string(i),
                      "signal " + std::to_string(i) + " at " + std::to_string(pos) +
                          " m lies outside the route (0, " + std::to_string(r.length) + "] m");
    }
  }
  if (s.solver.eta) {
    const double eta = *s.solver.eta;
    if (!(eta >= 0.0 && eta <= 1.0)) invariant_error("/solver/eta", "must lie in [0, 1]");
    if (eta > 0.0) {
      for (std::size_t i = 0; i < r.signals.size(); ++i) {
        if (r.signals[i].kind == SignalKind::signal && !r.signals[i].delay) {
          invariant_error("/signals/" + std::to_string(i), "a chance-constrained solve needs a delay law");
        }
      }
    }
  }
  try {
    r.validate();
    s.vehicle.params.validate();
    s.idm.validate();
    s.grid.validate();
    // Signals, the velocity axis and the deadline must sit on the grid.
    detail::build_layout(r, s.grid, 0.0);
  } catch (const ConfigError& e) {
    invariant_error(pointer_for(e.what()), e.what());
  }
}

std::string scenario_hash(const Scenario& s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(scenario_to_json(s).dump())));
  return buf;
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Position is a byte offset; convert it to line:column.
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    const std::string what = e.what();
    const auto colon = what.find("parse error");
    throw ScenarioError(ScenarioError::Kind::parse, std::to_string(line) + ":" + std::to_string(col),
                        colon == std::string::npos ? what : what.substr(colon));
  }
  return scenario_from_json(doc, base_dir);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(ScenarioError::Kind::io, path.string(), "cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str(), path.parent_path());
  } catch (const ScenarioError& e) {
    if (e.kind() == ScenarioError::Kind::parse) {
      throw ScenarioError(e.kind(), path.string() + ":" + e.where(),
                          std::string(e.what()).substr(e.where().size() + 2));
    }
    throw;
  }
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError(ScenarioError::Kind::io, path.string(), "cannot write scenario file");
  out << scenario_to_json(s).dump(2) << '\n';
}

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  for (const auto& p : kPresets) names.emplace_back(p.name);
  return names;
}

std::optional<Scenario> builtin_scenario(const std::string& name) {
  for (const auto& p : kPresets) {
    if (name == p.name) return make_preset(p);
  }
  return std::nullopt;
}

std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  for (const auto& p : kPresets) out.push_back(make_preset(p));
  return out;
}

Scenario resolve_scenario(const std::string& name_or_path) {
  if (auto s = builtin_scenario(name_or_path)) return *s;
  if (!std::filesystem::exists(name_or_path)) {
    throw ScenarioError(ScenarioError::Kind::io, name_or_path,
                        "neither a builtin scenario nor an existing file");
  }
  return load_scenario(name_or_path);
}

}  // namespace ecodrive

#include "ecodrive/trajectory.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "ecodrive/error.hpp"

namespace ecodrive {

namespace {

constexpr const char* kColumns =
    "distance_m,time_s,velocity_mps,gear,engine_torque_nm,brake_torque_nm,engine_speed_radps,fuel_g";

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("trajectory csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

}  // namespace

double Trajectory::total_fuel() const {
  double sum = 0.0;
  for (const auto& s : steps) sum += s.fuel;
  return sum;
}

void Trajectory::check_invariants() const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const TrajectoryStep& s = steps[i];
    if (!(s.fuel >= 0.0)) throw ConsistencyError("negative fuel increment at row " + std::to_string(i));
    if (!(s.velocity >= 0.0)) throw ConsistencyError("negative velocity at row " + std::to_string(i));
    if (i == 0) continue;
    if (!(s.distance > steps[i - 1].distance)) {
      throw ConsistencyError("distance not increasing at row " + std::to_string(i));
    }
    if (!(s.time >= steps[i - 1].time)) throw ConsistencyError("time decreasing at row " + std::to_string(i));
  }
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << std::setprecision(17);
  out << "# scenario_hash=" << traj.scenario_hash << '\n';
  out << "# method=" << traj.method << '\n';
  out << "# eta=" << traj.eta << '\n';
  out << "# grid=" << traj.grid << '\n';
  for (const auto& p : traj.passings) {
    out << "#signal," << p.position << ',' << p.passing_time << ',' << p.clock_time << ',' << p.threshold << '\n';
  }
  out << kColumns << '\n';
  for (const auto& s : traj.steps) {
    out << s.distance << ',' << s.time << ',' << s.velocity << ',' << s.gear << ',' << s.engine_torque << ','
        << s.brake_torque << ',' << s.engine_speed << ',' << s.fuel << '\n';
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_trajectory_csv(traj, out);
  if (!out) throw ConfigError("write failed: " + path.string());
}

Trajectory read_trajectory_csv(std::istream& in) {
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#signal,", 0) == 0) {
      const auto f = split(line.substr(8), ',');
      if (f.size() != 4) throw ConfigError("trajectory csv line " + std::to_string(line_no) + ": bad signal record");
      traj.passings.push_back({to_double(f[0], line_no), to_double(f[1], line_no), to_double(f[2], line_no),
                               to_double(f[3], line_no)});
      continue;
    }
    if (line[0] == '#') {
      const std::string body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq);
      const std::string value = body.substr(eq + 1);
      if (key == "scenario_hash") traj.scenario_hash = value;
      else if (key == "method") traj.method = value;
      else if (key == "eta") traj.eta = to_double(value, line_no);
      else if (key == "grid") traj.grid = value;
      continue;
    }
    if (!header_seen) {
      if (line != kColumns) throw ConfigError("trajectory csv: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 8) throw ConfigError("trajectory csv line " + std::to_string(line_no) + ": expected 8 fields");
    TrajectoryStep s;
    s.distance = to_double(f[0], line_no);
    s.time = to_double(f[1], line_no);
    s.velocity = to_double(f[2], line_no);
    s.gear = static_cast<int>(to_double(f[3], line_no));
    s.engine_torque = to_double(f[4], line_no);
    s.brake_torque = to_double(f[5], line_no);
    s.engine_speed = to_double(f[6], line_no);
    s.fuel = to_double(f[7], line_no);
    traj.steps.push_back(s);
  }
  if (!header_seen) throw ConfigError("trajectory csv: missing header");
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_trajectory_csv(in);
}

}  // namespace ecodrive

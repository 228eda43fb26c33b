#include <gtest/gtest.h>

#include <sstream>

#include "ecodrive/error.hpp"
#include "ecodrive/scenario.hpp"
#include "ecodrive/trajectory.hpp"

using namespace ecodrive;

TEST(Trajectory, CsvRoundTripIsExact) {
  const Scenario sc = *builtin_scenario("route1");
  Trajectory t = simulate_idm(sc.route, sc.vehicle, sc.idm);
  t.scenario_hash = scenario_hash(sc);
  std::stringstream ss;
  write_trajectory_csv(t, ss);
  const Trajectory back = read_trajectory_csv(ss);
  EXPECT_EQ(back.steps, t.steps);
  EXPECT_EQ(back.passings, t.passings);
  EXPECT_EQ(back.scenario_hash, t.scenario_hash);
  EXPECT_EQ(back.method, t.method);
  EXPECT_EQ(back.eta, t.eta);
}

TEST(Trajectory, CsvHeaderOrder) {
  Trajectory t;
  t.steps.push_back({});
  std::stringstream ss;
  write_trajectory_csv(t, ss);
  EXPECT_NE(ss.str().find("distance_m,time_s,velocity_mps,gear,engine_torque_nm,brake_torque_nm,"
                          "engine_speed_radps,fuel_g"),
            std::string::npos);
}

TEST(Trajectory, InvariantsDetectBrokenRecords) {
  Trajectory t;
  t.steps = {{0.0, 0.0, 0.0, 1, 0, 0, 0, 0}, {5.0, 1.0, 3.0, 1, 100, 0, 140, 0.1}};
  EXPECT_NO_THROW(t.check_invariants());
  t.steps[1].distance = 0.0;
  EXPECT_THROW(t.check_invariants(), ConsistencyError);
  t.steps[1].distance = 5.0;
  t.steps[1].fuel = -0.1;
  EXPECT_THROW(t.check_invariants(), ConsistencyError);
  t.steps[1].fuel = 0.1;
  t.steps[1].time = -1.0;
  EXPECT_THROW(t.check_invariants(), ConsistencyError);
}

TEST(Trajectory, MalformedCsvRaises) {
  std::stringstream ss("# scenario_hash=x\ndistance_m,time_s\n1,2\n");
  EXPECT_ANY_THROW(read_trajectory_csv(ss));
}

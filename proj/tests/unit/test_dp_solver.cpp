#include <gtest/gtest.h>

#include <cmath>

#include "dp_bruteforce.hpp"
#include "ecodrive/dp_solver.hpp"
#include "ecodrive/error.hpp"
#include "ecodrive/scenario.hpp"

using namespace ecodrive;

TEST(DpOracle, MatchesExhaustiveEnumerationOnTinyInstances) {
  const oracle::OracleSweep sweep = oracle::run_oracle_sweep(20, 3, 5000, kernels::Isa::scalar);
  EXPECT_GE(sweep.feasible, 20u);
  EXPECT_GE(sweep.with_signal, 3u);
  EXPECT_GE(sweep.with_wait, 1u);
  EXPECT_EQ(sweep.mismatched_infinity, 0u);
  EXPECT_LE(sweep.max_abs_diff, 1e-9);
  EXPECT_GT(sweep.finite_nodes, 500u);
}

TEST(DpOracle, BestKernelAgreesWithEnumeration) {
  const oracle::OracleSweep sweep = oracle::run_oracle_sweep(20, 0, 200, kernels::best_isa());
  EXPECT_EQ(sweep.mismatched_infinity, 0u);
  EXPECT_LE(sweep.max_abs_diff, 1e-9);
}

TEST(DpSolver, ThreadCountDoesNotChangeCosts) {
  const Scenario sc = *builtin_scenario("route1");
  SolverOptions one;
  one.objective = Objective::fuel;
  SolverOptions three = one;
  three.threads = 3;
  const DPSolution a = solve(sc.route, sc.vehicle, sc.grid, one);
  const DPSolution b = solve(sc.route, sc.vehicle, sc.grid, three);
  for (std::size_t k = 0; k < a.stage_count(); k += 7) {
    for (std::size_t iv = 0; iv < a.velocity_count(); ++iv) {
      for (std::size_t it = 0; it < a.time_count(); ++it) {
        const double x = a.cost_to_go(k, iv, it);
        const double y = b.cost_to_go(k, iv, it);
        ASSERT_TRUE(x == y || (std::isinf(x) && std::isinf(y)));
      }
    }
  }
}

TEST(DpSolver, EveryPresetSolvesAtItsOwnEta) {
  for (const Scenario& sc : builtin_scenarios()) {
    for (Objective objective : {Objective::fuel, Objective::time}) {
      SolverOptions opts;
      opts.objective = objective;
      opts.eta = sc.solver.eta.value_or(0.0);
      EXPECT_TRUE(solve(sc.route, sc.vehicle, sc.grid, opts).feasible()) << sc.name << ' ' << method_name(objective);
    }
  }
}

TEST(DpSolver, RejectsEtaOutsideUnitInterval) {
  const Scenario sc = *builtin_scenario("route1");
  SolverOptions opts;
  opts.eta = 1.5;
  EXPECT_THROW(solve(sc.route, sc.vehicle, sc.grid, opts), ConfigError);
}

TEST(DpSolver, RejectsMisalignedSignal) {
  Scenario sc = *builtin_scenario("route1");
  sc.route.signals[0].position = 202.0;
  EXPECT_THROW(solve(sc.route, sc.vehicle, sc.grid, {}), ConfigError);
}

TEST(DpSolver, ReportsInfeasibleDeadline) {
  Scenario sc = *builtin_scenario("route1");
  sc.route.deadline = 40.0;
  const DPSolution sol = solve(sc.route, sc.vehicle, sc.grid, {});
  EXPECT_FALSE(sol.feasible());
  EXPECT_TRUE(sol.first_infeasible_stage().has_value());
}

TEST(DpSolver, ControlsOrderedAndBrakeOnlyWithoutDrive) {
  GridSpec g;
  const auto controls = build_controls(VehicleParams{}, g);
  for (std::size_t i = 1; i < controls.size(); ++i) {
    const auto& a = controls[i - 1];
    const auto& b = controls[i];
    EXPECT_TRUE(a.gear < b.gear || (a.gear == b.gear && (a.engine_torque < b.engine_torque ||
                                                         (a.engine_torque == b.engine_torque &&
                                                          a.brake_torque < b.brake_torque))));
  }
  for (const auto& c : controls) EXPECT_FALSE(c.brake_torque > 0.0 && c.engine_torque > 0.0);
}

TEST(DpSolver, StepDynamicsStopsOnRestCapableLine) {
  Vehicle veh;
  StepContext ctx;
  ctx.admits_rest = true;
  const StepOutcome st = step_dynamics(veh, 3.0, {-40.0, 2000.0, 1}, ctx);
  ASSERT_TRUE(st.feasible);
  EXPECT_TRUE(st.stopped);
  EXPECT_EQ(st.velocity, 0.0);
  EXPECT_NEAR(st.elapsed, 2.0 * 5.0 / 3.0, 1e-12);
  ctx.admits_rest = false;
  EXPECT_FALSE(step_dynamics(veh, 3.0, {-40.0, 2000.0, 1}, ctx).feasible);
}

TEST(DpSolver, ReplayMatchesPredictedCostWithinInterpolationBound) {
  const Scenario sc = *builtin_scenario("route1");
  for (Objective o : {Objective::fuel, Objective::time}) {
    SolverOptions opts;
    opts.objective = o;
    const DPSolution sol = solve(sc.route, sc.vehicle, sc.grid, opts);
    ASSERT_TRUE(sol.feasible());
    const Trajectory t = extract_trajectory(sol, sc.route, sc.vehicle);
    t.check_invariants();
    EXPECT_LE(std::abs(t.objective_value - t.predicted_cost), 2.0 * t.interpolation_bound + 1e-9);
    EXPECT_EQ(t.steps.back().velocity, 0.0);
    EXPECT_LE(t.arrival_time(), sc.route.deadline);
    EXPECT_EQ(t.passings.size(), 3u);
  }
}

#ifndef REACHFILTER_SIM_HPP
#define REACHFILTER_SIM_HPP

#include <map>
#include <string>
#include <vector>

#include "reachfilter/filters.hpp"
#include "reachfilter/nominal.hpp"

namespace reachfilter {

struct DisturbancePolicy {
  enum class Kind { None, WorstCase, ConstantVector, SeededRandom };

  Kind kind = Kind::None;
  DisturbanceVec constant;
  std::uint64_t seed = 0;
};

/// Which controller drives the closed loop: the raw nominal MPC, the pure
/// default reachability controller, or the filtered nominal.
enum class ControllerPolicy { Nominal, DefaultOptimal, Filtered };

struct Scenario {
  std::string model_name;
  std::map<std::string, double> model_params;
  TargetFunction target;
  GridDef grid;
  ReachMode mode = ReachMode::Safety;
  SolverConfig solver;
  ControllerPolicy policy = ControllerPolicy::Filtered;
  FilterSpec filter;
  MpcConfig nominal;
  StateVec x0;
  double sim_dt = 0.01;
  double duration = 1.0;
  DisturbancePolicy disturbance;
};

enum class Termination { HorizonEnd, ReachedTarget, LeftGrid };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::HorizonEnd: return "horizon_end";
    case Termination::ReachedTarget: return "reached_target";
    case Termination::LeftGrid: return "left_grid";
  }
  return "?";
}

/// One sample of the closed loop. The final sample of a trajectory carries
/// the terminal state with zero control and disturbance.
struct TrajectoryStep {
  double t = 0.0;
  StateVec x;
  ControlVec u;
  DisturbanceVec d;
  double value = 0.0;
  FilterBranch branch = FilterBranch::Nominal;
  bool active = false;
  std::int64_t step_ns = 0;
};

struct TrajectoryRecord {
  std::vector<TrajectoryStep> steps;  // applied steps plus a final sample
  Termination termination = Termination::HorizonEnd;
  int applied_steps = 0;
};

struct MetricsReport {
  std::string label;
  std::string termination;
  int num_steps = 0;
  double min_signed_distance = 0.0;
  double final_signed_distance = 0.0;
  double total_cost = 0.0;
  double control_energy = 0.0;
  double jerk_energy = 0.0;
  double mean_step_compute_ns = 0.0;
  std::int64_t max_step_compute_ns = 0;
  int qp_fallback_count = 0;
  int active_steps = 0;
};

struct SimulationOutput {
  TrajectoryRecord trajectory;
  MetricsReport metrics;
};

/// Closed-loop forward-Euler rollout of the scenario's controller against
/// its disturbance policy, with per-step records and the five comparison
/// metrics. Liveness runs stop early once l(x) <= 0.
SimulationOutput simulate(const Scenario& scenario, const ValueFunction& vf);

struct SweepRow {
  double gamma = 0.0;
  double total_cost = 0.0;
  double normalized_cost = 0.0;  // relative to the default-controller run
};

/// Runs the smooth blending filter for each gamma; costs are normalized by
/// the cost of the pure default-optimal-controller run.
std::vector<SweepRow> gamma_sweep(const Scenario& scenario,
                                  const ValueFunction& vf,
                                  const std::vector<double>& gammas);

struct PolicyChoice {
  std::string label;
  ControllerPolicy policy = ControllerPolicy::Filtered;
  FilterSpec filter;
};

std::vector<MetricsReport> compare_filters(
    const Scenario& scenario, const ValueFunction& vf,
    const std::vector<PolicyChoice>& choices);

}  // namespace reachfilter

#endif  // REACHFILTER_SIM_HPP

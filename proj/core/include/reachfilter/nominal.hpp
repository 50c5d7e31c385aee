#ifndef REACHFILTER_NOMINAL_HPP
#define REACHFILTER_NOMINAL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "reachfilter/models.hpp"

namespace reachfilter {

/// Stage cost for the sampling MPC; summed over the rollout without a dt
/// factor, evaluated at the pre-update state of each step.
struct CostSpec {
  enum class Kind { RocketLanding, GoalDistance };

  Kind kind = Kind::GoalDistance;
  // GoalDistance: ||x[dims] - goal_center|| + energy_weight * ||u||^2.
  Eigen::VectorXd goal_center;
  std::vector<int> dims;
  double energy_weight = 0.0;

  double stage(const StateVec& x, const ControlVec& u) const;
};

struct MpcConfig {
  enum class Prior { UniformBox, GaussianAroundPrevious };

  int horizon_steps = 50;
  double dt = 0.01;
  int num_samples = 1024;
  Prior prior = Prior::UniformBox;
  /// Gaussian prior stddev per axis, as a fraction of the half-range.
  double prior_sigma = 0.25;
  CostSpec cost;
  std::uint64_t rng_seed = 0;
};

/// Counter-based stream state: every step draws from a fresh generator
/// keyed on (seed, counter, sample), so results do not depend on sample
/// evaluation order or thread count.
struct MpcState {
  std::uint64_t counter = 0;
  ControlVec prev_u;
  bool has_prev = false;
};

/// Forward-Euler rollout cost of a fixed control sequence. Returns +inf if
/// the state goes non-finite (the sequence is rejected).
double rollout_cost(const DynamicsModel& model, const StateVec& x0,
                    const std::vector<ControlVec>& u_sequence,
                    const MpcConfig& config);

struct MpcStepResult {
  ControlVec u;
  bool all_rejected = false;
  double best_cost = 0.0;  // rollout cost of the selected sequence
};

/// One receding-horizon step: sample control sequences from the prior,
/// clamp to bounds, return the first control of the cheapest rollout.
std::pair<MpcStepResult, MpcState> mpc_step(const DynamicsModel& model,
                                            const StateVec& x, double t,
                                            const MpcConfig& config,
                                            MpcState state);

}  // namespace reachfilter

#endif  // REACHFILTER_NOMINAL_HPP

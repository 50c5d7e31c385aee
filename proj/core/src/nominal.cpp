#include "reachfilter/nominal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace reachfilter {

namespace {

// splitmix64; drives all sampling so draws are identical across platforms.
struct Splitmix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double normal() {
    // Box-Muller; guards the log away from zero.
    const double u1 = std::max(uniform01(), 0x1.0p-53);
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  Splitmix64 s{a ^ (b * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL)};
  return s.next();
}

}  // namespace

double CostSpec::stage(const StateVec& x, const ControlVec& u) const {
  switch (kind) {
    case Kind::RocketLanding: {
      const double dy = std::abs(x[0]) - 20.0;
      const double dz = std::abs(x[1]) - 20.0;
      return u.norm() + std::sqrt(dy * dy + dz * dz);
    }
    case Kind::GoalDistance: {
      double sq = 0.0;
      for (size_t i = 0; i < dims.size(); ++i) {
        const double delta = x[dims[i]] - goal_center[static_cast<int>(i)];
        sq += delta * delta;
      }
      return std::sqrt(sq) + energy_weight * u.squaredNorm();
    }
  }
  throw ContractError("unknown cost kind");
}

double rollout_cost(const DynamicsModel& model, const StateVec& x0,
                    const std::vector<ControlVec>& u_sequence,
                    const MpcConfig& config) {
  if (static_cast<int>(u_sequence.size()) != config.horizon_steps) {
    throw ContractError("rollout_cost: sequence length != horizon_steps");
  }
  const DisturbanceVec d(model.disturbance_dim());
  StateVec x = x0;
  double cost = 0.0;
  for (const ControlVec& u : u_sequence) {
    cost += config.cost.stage(x, u);
    x += config.dt * model.derivative(x, u, d);
    bool finite = std::isfinite(cost);
    for (int i = 0; finite && i < x.size(); ++i) finite = std::isfinite(x[i]);
    if (!finite) return std::numeric_limits<double>::infinity();
  }
  return cost;
}

std::pair<MpcStepResult, MpcState> mpc_step(const DynamicsModel& model,
                                            const StateVec& x, double /*t*/,
                                            const MpcConfig& config,
                                            MpcState state) {
  if (config.horizon_steps < 1) {
    throw ContractError("mpc_step: horizon_steps must be >= 1");
  }
  if (config.num_samples < 1) {
    throw ContractError("mpc_step: num_samples must be >= 1");
  }
  const ControlBounds& bounds = model.control_bounds();
  const int m = model.control_dim();

  ControlVec center(m);
  if (config.prior == MpcConfig::Prior::GaussianAroundPrevious &&
      state.has_prev) {
    center = state.prev_u;
  } else {
    center.setZero();
    center = bounds.clamp(center);
  }

  const std::uint64_t step_key = mix(config.rng_seed, state.counter);
  std::vector<double> costs(static_cast<size_t>(config.num_samples));
  std::vector<ControlVec> first_controls(
      static_cast<size_t>(config.num_samples));

#pragma omp parallel for schedule(static)
  for (int s = 0; s < config.num_samples; ++s) {
    Splitmix64 rng{mix(step_key, static_cast<std::uint64_t>(s))};
    std::vector<ControlVec> seq(static_cast<size_t>(config.horizon_steps));
    for (int k = 0; k < config.horizon_steps; ++k) {
      ControlVec u(m);
      for (int i = 0; i < m; ++i) {
        if (config.prior == MpcConfig::Prior::UniformBox) {
          u[i] = bounds.lo[i] + rng.uniform01() * (bounds.hi[i] - bounds.lo[i]);
        } else {
          const double sigma =
              config.prior_sigma * 0.5 * (bounds.hi[i] - bounds.lo[i]);
          u[i] = std::clamp(center[i] + sigma * rng.normal(), bounds.lo[i],
                            bounds.hi[i]);
        }
      }
      seq[static_cast<size_t>(k)] = u;
    }
    costs[static_cast<size_t>(s)] = rollout_cost(model, x, seq, config);
    first_controls[static_cast<size_t>(s)] = seq[0];
  }

  int best = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int s = 0; s < config.num_samples; ++s) {
    if (costs[static_cast<size_t>(s)] < best_cost) {
      best_cost = costs[static_cast<size_t>(s)];
      best = s;
    }
  }

  MpcStepResult result;
  if (best < 0) {
    result.u = bounds.clamp(ControlVec::Zero(m));
    result.all_rejected = true;
    result.best_cost = std::numeric_limits<double>::infinity();
  } else {
    result.u = first_controls[static_cast<size_t>(best)];
    result.best_cost = best_cost;
  }
  state.counter += 1;
  state.prev_u = result.u;
  state.has_prev = true;
  return {result, std::move(state)};
}

}  // namespace reachfilter

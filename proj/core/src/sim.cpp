#include "reachfilter/sim.hpp"

#include <chrono>
#include <cmath>

namespace reachfilter {

namespace {

std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

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
    const double u1 = std::max(uniform01(), 0x1.0p-53);
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
};

DisturbanceVec draw_disturbance(const DisturbancePolicy& policy,
                                const DynamicsModel& model,
                                const ValueFunction& vf,
                                const FilterSpec& filter, const StateVec& x,
                                double t, std::uint64_t step_index) {
  const int k = model.disturbance_dim();
  DisturbanceVec d(k);
  d.setZero();
  if (k == 0) return d;
  switch (policy.kind) {
    case DisturbancePolicy::Kind::None:
      return d;
    case DisturbancePolicy::Kind::WorstCase: {
      // Recomputed each step from the same gradients the filter sees,
      // held constant across the step.
      const ValueRateLinearization lin =
          linearize_value_rate(vf, model, x, t, filter.gradient_mode);
      return lin.d_star;
    }
    case DisturbancePolicy::Kind::ConstantVector:
      if (static_cast<int>(policy.constant.size()) != k) {
        throw ContractError("constant disturbance dimension mismatch");
      }
      return policy.constant;
    case DisturbancePolicy::Kind::SeededRandom: {
      Splitmix64 rng{policy.seed * 0x9e3779b97f4a7c15ULL + step_index + 1};
      const DisturbanceBounds& b = model.disturbance_bounds();
      if (b.kind == DisturbanceBounds::Kind::Box) {
        for (int i = 0; i < k; ++i) {
          d[i] = b.lo[i] + rng.uniform01() * (b.hi[i] - b.lo[i]);
        }
      } else if (b.kind == DisturbanceBounds::Kind::Ball) {
        // Uniform over the ball: gaussian direction, radius ~ r u^(1/k).
        double norm_sq = 0.0;
        for (int i = 0; i < k; ++i) {
          d[i] = rng.normal();
          norm_sq += d[i] * d[i];
        }
        if (norm_sq > 0.0) {
          const double r =
              b.radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(k));
          d *= r / std::sqrt(norm_sq);
        }
      }
      return d;
    }
  }
  return d;
}

}  // namespace

SimulationOutput simulate(const Scenario& scenario, const ValueFunction& vf) {
  const auto model = make_model(scenario.model_name, scenario.model_params);
  const GridDef& grid = vf.grid();
  if (grid.num_dims() != model->state_dim()) {
    throw ContractError("simulate: value function grid does not match model");
  }
  if (!(scenario.sim_dt > 0.0)) {
    throw ContractError("simulate: sim_dt must be positive");
  }
  if (!grid.contains(scenario.x0)) {
    throw ContractError("simulate: x0 outside the grid domain");
  }
  if (vf.mode() == ReachMode::Liveness &&
      scenario.duration > vf.horizon() + 1e-9) {
    throw ContractError(
        "simulate: liveness runs cannot exceed the value function horizon");
  }
  if (scenario.policy == ControllerPolicy::Filtered &&
      scenario.filter.problem != vf.mode()) {
    throw ContractError("simulate: filter problem does not match value function mode");
  }

  const double dt = scenario.sim_dt;
  const int m = model->control_dim();
  const int k = model->disturbance_dim();

  SimulationOutput out;
  TrajectoryRecord& rec = out.trajectory;
  MetricsReport& metrics = out.metrics;

  StateVec x = grid.wrap(scenario.x0);
  double t = 0.0;
  MpcState mpc_state;
  mpc_state.counter = 0;

  const std::int64_t max_steps =
      static_cast<std::int64_t>(std::floor(scenario.duration / dt + 0.5));

  metrics.min_signed_distance = std::numeric_limits<double>::infinity();
  bool terminated = false;
  std::int64_t step_index = 0;
  while (true) {
    const double l_here = scenario.target.value(x);
    metrics.min_signed_distance =
        std::min(metrics.min_signed_distance, l_here);

    if (!grid.contains(x)) {
      rec.termination = Termination::LeftGrid;
      terminated = true;
    } else if (vf.mode() == ReachMode::Liveness && l_here <= 0.0) {
      rec.termination = Termination::ReachedTarget;
      terminated = true;
    } else if (step_index >= max_steps) {
      rec.termination = Termination::HorizonEnd;
      terminated = true;
    }
    if (terminated) {
      TrajectoryStep final_step;
      final_step.t = t;
      final_step.x = x;
      final_step.u = ControlVec::Zero(m);
      final_step.d = DisturbanceVec::Zero(k);
      final_step.value = grid.contains(x)
                             ? vf.value(x, std::min(t, vf.horizon()))
                             : std::numeric_limits<double>::quiet_NaN();
      rec.steps.push_back(std::move(final_step));
      metrics.final_signed_distance = l_here;
      break;
    }

    // Controller, timed around the filter (or standalone controller) call.
    FilterResult fr;
    if (scenario.policy == ControllerPolicy::Nominal) {
      const std::int64_t start = now_ns();
      auto [step, next_state] = mpc_step(*model, x, t, scenario.nominal, mpc_state);
      mpc_state = std::move(next_state);
      fr.u = step.u;
      fr.branch = FilterBranch::Nominal;
      fr.active = false;
      fr.value = vf.value(x, std::min(t, vf.horizon()));
      fr.compute_ns = now_ns() - start;
    } else if (scenario.policy == ControllerPolicy::DefaultOptimal) {
      const std::int64_t start = now_ns();
      fr.u = default_optimal_control(vf, *model, x, std::min(t, vf.horizon()),
                                     vf.mode(), scenario.filter.gradient_mode);
      fr.branch = FilterBranch::DefaultOptimal;
      fr.active = true;
      fr.value = vf.value(x, std::min(t, vf.horizon()));
      fr.compute_ns = now_ns() - start;
    } else {
      auto [step, next_state] = mpc_step(*model, x, t, scenario.nominal, mpc_state);
      mpc_state = std::move(next_state);
      fr = apply_filter(vf, *model, scenario.filter, step.u, x,
                        std::min(t, vf.horizon()));
    }

    const DisturbanceVec d = draw_disturbance(
        scenario.disturbance, *model, vf, scenario.filter, x,
        std::min(t, vf.horizon()), static_cast<std::uint64_t>(step_index));

    TrajectoryStep row;
    row.t = t;
    row.x = x;
    row.u = fr.u;
    row.d = d;
    row.value = fr.value;
    row.branch = fr.branch;
    row.active = fr.active;
    row.step_ns = fr.compute_ns;
    rec.steps.push_back(row);

    metrics.total_cost += scenario.nominal.cost.stage(x, fr.u);
    metrics.control_energy += fr.u.squaredNorm() * dt;
    metrics.max_step_compute_ns =
        std::max(metrics.max_step_compute_ns, fr.compute_ns);
    metrics.mean_step_compute_ns += static_cast<double>(fr.compute_ns);
    if (fr.fallback) ++metrics.qp_fallback_count;
    if (fr.active) ++metrics.active_steps;

    x = grid.wrap(x + dt * model->derivative(x, fr.u, d));
    t += dt;
    ++step_index;
    ++rec.applied_steps;
  }

  metrics.label = "run";
  metrics.termination = to_string(rec.termination);
  metrics.num_steps = rec.applied_steps;
  if (rec.applied_steps > 0) {
    metrics.mean_step_compute_ns /= static_cast<double>(rec.applied_steps);
  }
  for (int i = 0; i + 2 < static_cast<int>(rec.steps.size()); ++i) {
    const ControlVec du = rec.steps[i + 1].u - rec.steps[i].u;
    metrics.jerk_energy += (du / dt).squaredNorm() * dt;
  }
  return out;
}

std::vector<SweepRow> gamma_sweep(const Scenario& scenario,
                                  const ValueFunction& vf,
                                  const std::vector<double>& gammas) {
  Scenario base = scenario;
  base.policy = ControllerPolicy::DefaultOptimal;
  const double normalizer = simulate(base, vf).metrics.total_cost;

  std::vector<SweepRow> rows;
  rows.reserve(gammas.size());
  for (double gamma : gammas) {
    Scenario run = scenario;
    run.policy = ControllerPolicy::Filtered;
    run.filter.kind = FilterKind::SmoothBlending;
    run.filter.gamma = gamma;
    const double cost = simulate(run, vf).metrics.total_cost;
    SweepRow row;
    row.gamma = gamma;
    row.total_cost = cost;
    row.normalized_cost = normalizer != 0.0 ? cost / normalizer : cost;
    rows.push_back(row);
  }
  return rows;
}

std::vector<MetricsReport> compare_filters(
    const Scenario& scenario, const ValueFunction& vf,
    const std::vector<PolicyChoice>& choices) {
  std::vector<MetricsReport> reports;
  reports.reserve(choices.size());
  for (const PolicyChoice& choice : choices) {
    Scenario run = scenario;
    run.policy = choice.policy;
    if (choice.policy == ControllerPolicy::Filtered) run.filter = choice.filter;
    MetricsReport report = simulate(run, vf).metrics;
    report.label = choice.label;
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace reachfilter

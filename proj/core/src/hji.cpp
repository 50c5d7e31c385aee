#include "reachfilter/hji.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace reachfilter {

ControlVec extremal_control(const ControlBounds& bounds, const ControlVec& beta,
                            ReachMode mode) {
  const int m = bounds.dim();
  ControlVec u(m);
  for (int i = 0; i < m; ++i) {
    double b = beta[i];
    if (mode == ReachMode::Safety) b = -b;  // maximize instead of minimize
    if (b > 0.0) {
      u[i] = bounds.lo[i];
    } else if (b < 0.0) {
      u[i] = bounds.hi[i];
    } else {
      u[i] = std::clamp(0.0, bounds.lo[i], bounds.hi[i]);
    }
  }
  return u;
}

DisturbanceVec extremal_disturbance(const DisturbanceBounds& bounds,
                                    const DisturbanceVec& gamma,
                                    ReachMode mode) {
  DisturbanceVec d(bounds.dim);
  if (bounds.dim == 0) return d;
  const double sign = (mode == ReachMode::Liveness) ? 1.0 : -1.0;  // max vs min
  switch (bounds.kind) {
    case DisturbanceBounds::Kind::None:
      d.setZero();
      return d;
    case DisturbanceBounds::Kind::Box:
      for (int i = 0; i < bounds.dim; ++i) {
        const double g = sign * gamma[i];
        if (g > 0.0) {
          d[i] = bounds.hi[i];
        } else if (g < 0.0) {
          d[i] = bounds.lo[i];
        } else {
          d[i] = std::clamp(0.0, bounds.lo[i], bounds.hi[i]);
        }
      }
      return d;
    case DisturbanceBounds::Kind::Ball: {
      const double norm = gamma.norm();
      if (norm == 0.0) {
        d.setZero();
      } else {
        d = (sign * bounds.radius / norm) * gamma;
      }
      return d;
    }
  }
  return d;
}

HamiltonianResult hamiltonian(const DynamicsModel& model, const StateVec& x,
                              const StateVec& p, ReachMode mode) {
  const AffineParts parts = model.affine_parts(x);
  HamiltonianResult r;
  const ControlVec beta = parts.f2.transpose() * p;
  r.u_opt = extremal_control(model.control_bounds(), beta, mode);
  if (model.disturbance_dim() > 0) {
    const DisturbanceVec gamma = parts.f3.transpose() * p;
    r.d_opt = extremal_disturbance(model.disturbance_bounds(), gamma, mode);
    r.value = p.dot(parts.f1) + beta.dot(r.u_opt) + gamma.dot(r.d_opt);
  } else {
    r.d_opt.resize(0);
    r.value = p.dot(parts.f1) + beta.dot(r.u_opt);
  }
  return r;
}

ValueFunction::ValueFunction(GridDef grid, std::vector<double> times,
                             std::vector<ScalarField> slices, ReachMode mode,
                             bool converged, double horizon)
    : grid_(std::move(grid)),
      times_(std::move(times)),
      slices_(std::move(slices)),
      mode_(mode),
      converged_(converged),
      horizon_(horizon) {
  if (times_.empty() || times_.size() != slices_.size()) {
    throw ContractError("value function needs matching times and slices");
  }
  for (size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k] > times_[k - 1])) {
      throw ContractError("value function times must be strictly ascending");
    }
  }
}

std::pair<int, double> ValueFunction::locate(double t) const {
  const int n = static_cast<int>(times_.size());
  if (n == 1) return {0, 0.0};
  if (t <= times_.front()) return {0, 0.0};
  if (t >= times_.back()) return {n - 2, 1.0};
  int lo = 0;
  int hi = n - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (times_[mid] <= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double w = (t - times_[lo]) / (times_[lo + 1] - times_[lo]);
  return {lo, w};
}

double ValueFunction::value(const StateVec& x, double t) const {
  if (mode_ == ReachMode::Safety || times_.size() == 1) {
    return interpolate(slices_.back(), x);
  }
  const auto [k, w] = locate(t);
  const double v0 = interpolate(slices_[k], x);
  if (w == 0.0) return v0;
  const double v1 = interpolate(slices_[k + 1], x);
  return (1.0 - w) * v0 + w * v1;
}

double ValueFunction::time_derivative(const StateVec& x, double t) const {
  if (mode_ == ReachMode::Safety || times_.size() == 1) return 0.0;
  auto [k, w] = locate(t);
  (void)w;
  const double dt = times_[k + 1] - times_[k];
  return (interpolate(slices_[k + 1], x) - interpolate(slices_[k], x)) / dt;
}

GradientSample ValueFunction::space_gradient(const StateVec& x, double t,
                                             GradientMode mode) const {
  if (mode_ == ReachMode::Safety || times_.size() == 1) {
    return gradient(slices_.back(), x, mode);
  }
  const auto [k, w] = locate(t);
  GradientSample g0 = gradient(slices_[k], x, mode);
  if (w == 0.0) return g0;
  const GradientSample g1 = gradient(slices_[k + 1], x, mode);
  g0.grad = (1.0 - w) * g0.grad + w * g1.grad;
  g0.boundary_fallback = g0.boundary_fallback || g1.boundary_fallback;
  return g0;
}

namespace {

/// Scratch arrays for the Lax-Friedrichs sweep.
struct SolverWorkspace {
  const GridDef* grid;
  const DynamicsModel* model;
  ReachMode mode;
  std::vector<double> alpha;  // per-dim dissipation bound max |dH/dp_d|
};

/// One-sided differences along every dimension at a node, with periodic
/// wrapping or linear-extrapolation ghost values at non-periodic edges.
inline void one_sided_differences(const std::vector<double>& w,
                                  const GridDef& grid, std::int64_t flat,
                                  const int* multi, double* d_minus,
                                  double* d_plus) {
  for (int d = 0; d < grid.num_dims(); ++d) {
    const GridDim& g = grid.dim(d);
    const double h = grid.spacing(d);
    const std::int64_t stride = grid.stride(d);
    const int i = multi[d];
    const double center = w[static_cast<size_t>(flat)];
    double left;
    double right;
    if (g.periodic) {
      const std::int64_t il = (i == 0) ? flat + stride * (g.count - 1) : flat - stride;
      const std::int64_t ir = (i == g.count - 1) ? flat - stride * (g.count - 1) : flat + stride;
      left = w[static_cast<size_t>(il)];
      right = w[static_cast<size_t>(ir)];
    } else {
      if (i == 0) {
        right = w[static_cast<size_t>(flat + stride)];
        left = 2.0 * center - right;  // ghost by linear extrapolation
      } else if (i == g.count - 1) {
        left = w[static_cast<size_t>(flat - stride)];
        right = 2.0 * center - left;
      } else {
        left = w[static_cast<size_t>(flat - stride)];
        right = w[static_cast<size_t>(flat + stride)];
      }
    }
    d_minus[d] = (center - left) / h;
    d_plus[d] = (right - center) / h;
  }
}

/// Spatial operator L(w) such that w_tau = L(w) marches the value function
/// backward in time-to-go: central Hamiltonian plus LF dissipation.
void apply_operator(const SolverWorkspace& ws, const std::vector<double>& w,
                    std::vector<double>& out) {
  const GridDef& grid = *ws.grid;
  const std::int64_t n = grid.num_points();
  const int nd = grid.num_dims();
#pragma omp parallel for schedule(static)
  for (std::int64_t flat = 0; flat < n; ++flat) {
    int multi[kMaxStateDim];
    std::int64_t rem = flat;
    for (int d = 0; d < nd; ++d) {
      multi[d] = static_cast<int>(rem / grid.stride(d));
      rem -= static_cast<std::int64_t>(multi[d]) * grid.stride(d);
    }
    double d_minus[kMaxStateDim];
    double d_plus[kMaxStateDim];
    one_sided_differences(w, grid, flat, multi, d_minus, d_plus);

    StateVec x(nd);
    StateVec p(nd);
    double dissipation = 0.0;
    for (int d = 0; d < nd; ++d) {
      x[d] = grid.dim(d).lo + multi[d] * grid.spacing(d);
      p[d] = 0.5 * (d_minus[d] + d_plus[d]);
      dissipation += 0.5 * ws.alpha[d] * (d_plus[d] - d_minus[d]);
    }
    const HamiltonianResult h = hamiltonian(*ws.model, x, p, ws.mode);
    out[static_cast<size_t>(flat)] = h.value + dissipation;
  }
}

std::vector<double> dissipation_bounds(const DynamicsModel& model,
                                       const GridDef& grid) {
  const int nd = grid.num_dims();
  std::vector<double> alpha(nd, 0.0);
  const ControlBounds& ub = model.control_bounds();
  const DisturbanceBounds& db = model.disturbance_bounds();
  for (std::int64_t flat = 0; flat < grid.num_points(); ++flat) {
    const AffineParts parts = model.affine_parts(grid.node(flat));
    for (int d = 0; d < nd; ++d) {
      double bound = std::abs(parts.f1[d]);
      for (int j = 0; j < model.control_dim(); ++j) {
        bound += std::abs(parts.f2(d, j)) * ub.max_abs(j);
      }
      for (int k = 0; k < model.disturbance_dim(); ++k) {
        bound += std::abs(parts.f3(d, k)) * db.max_abs(k);
      }
      alpha[d] = std::max(alpha[d], bound);
    }
  }
  return alpha;
}

}  // namespace

ValueFunction solve(const DynamicsModel& model, const TargetFunction& target,
                    const GridDef& grid, ReachMode mode,
                    const SolverConfig& config) {
  if (grid.num_dims() != model.state_dim()) {
    throw ContractError("solve: grid dimension does not match model");
  }
  if (!(config.cfl > 0.0) || config.cfl > 0.9) {
    throw ContractError("solve: cfl must be in (0, 0.9]");
  }
  if (!(config.max_horizon >= 0.0)) {
    throw ContractError("solve: max_horizon must be non-negative");
  }
  if (config.store_every < 1) {
    throw ContractError("solve: store_every must be at least 1");
  }

  const ScalarField l_field =
      sample_function(grid, [&](const StateVec& x) { return target.value(x); });
  const std::vector<double>& l = l_field.data;
  const size_t n = l.size();

  SolverWorkspace ws;
  ws.grid = &grid;
  ws.model = &model;
  ws.mode = mode;
  ws.alpha = dissipation_bounds(model, grid);

  double rate = 0.0;
  for (int d = 0; d < grid.num_dims(); ++d) {
    rate += ws.alpha[d] / grid.spacing(d);
  }
  const double dt_cfl = rate > 0.0 ? config.cfl / rate
                                   : std::max(config.max_horizon, 1e-3);

  std::vector<double> w = l;
  std::vector<double> stage1(n);
  std::vector<double> lw1(n);
  std::vector<double> lw2(n);

  // Recorded as (time-to-go, slice); remapped to ascending t afterwards.
  std::vector<std::pair<double, std::vector<double>>> records;
  records.emplace_back(0.0, w);

  double tau = 0.0;
  bool converged = false;
  int step = 0;
  while (tau < config.max_horizon - 1e-12) {
    const double dt = std::min(dt_cfl, config.max_horizon - tau);
    apply_operator(ws, w, lw1);
    for (size_t i = 0; i < n; ++i) stage1[i] = w[i] + dt * lw1[i];
    apply_operator(ws, stage1, lw2);

    double change = 0.0;
    bool finite = true;
#pragma omp parallel for schedule(static) reduction(max : change) reduction(&& : finite)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      double v = 0.5 * (w[i] + stage1[i] + dt * lw2[i]);
      if (v > l[i]) v = l[i];      // freeze at the target function
      if (v > w[i]) v = w[i];      // keep the tube monotone in horizon
      finite = finite && std::isfinite(v);
      change = std::max(change, std::abs(v - w[i]));
      stage1[i] = v;  // reuse as the next-slice buffer
    }
    w.swap(stage1);
    tau += dt;
    ++step;
    if (!finite) {
      std::ostringstream oss;
      oss << "solve diverged (non-finite value) at step " << step
          << ", time-to-go " << tau;
      throw NumericalError(oss.str());
    }

    if (mode == ReachMode::Safety) {
      if (change < config.convergence_tol) {
        converged = true;
        break;
      }
    } else if (step % config.store_every == 0 &&
               tau < config.max_horizon - 1e-12) {
      records.emplace_back(tau, w);
    }
  }

  const double horizon = tau;
  std::vector<double> times;
  std::vector<ScalarField> slices;
  if (mode == ReachMode::Safety) {
    times.push_back(0.0);
    ScalarField f;
    f.grid = grid;
    f.data = std::move(w);
    slices.push_back(std::move(f));
  } else {
    if (records.back().first < horizon - 1e-12) {
      records.emplace_back(horizon, w);
    } else if (horizon > 0.0) {
      records.back() = {horizon, w};
    }
    // Map time-to-go tau onto t = T - tau, ascending.
    for (auto it = records.rbegin(); it != records.rend(); ++it) {
      times.push_back(horizon - it->first);
      ScalarField f;
      f.grid = grid;
      f.data = std::move(it->second);
      slices.push_back(std::move(f));
    }
    if (times.size() == 1) times[0] = 0.0;
  }
  return ValueFunction(grid, std::move(times), std::move(slices), mode,
                       converged, horizon);
}

double hji_residual(const ValueFunction& vf, const DynamicsModel& model,
                    const TargetFunction& target, const StateVec& x, double t) {
  const double dt_v = vf.time_derivative(x, t);
  const GradientSample g = vf.space_gradient(x, t, GradientMode::Central);
  const HamiltonianResult h = hamiltonian(model, x, g.grad, vf.mode());
  const double pde_term = dt_v + h.value;
  const double freeze_term = target.value(x) - vf.value(x, t);
  return std::min(pde_term, freeze_term);
}

bool brt_contains(const ValueFunction& vf, const StateVec& x, double t) {
  return vf.value(x, t) <= 0.0;
}

}  // namespace reachfilter

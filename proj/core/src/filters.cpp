#include "reachfilter/filters.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace reachfilter {

namespace {

std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool beta_degenerate(const ControlVec& beta) {
  return beta.size() == 0 || beta.cwiseAbs().maxCoeff() < 1e-14;
}

}  // namespace

ValueRateLinearization linearize_value_rate(const ValueFunction& vf,
                                            const DynamicsModel& model,
                                            const StateVec& x, double t,
                                            GradientMode gradient_mode) {
  ValueRateLinearization lin;
  lin.value = vf.value(x, t);
  lin.time_derivative = vf.time_derivative(x, t);
  GradientSample g = vf.space_gradient(x, t, gradient_mode);
  lin.grad = std::move(g.grad);
  lin.boundary_fallback = g.boundary_fallback;

  const AffineParts parts = model.affine_parts(x);
  lin.beta = parts.f2.transpose() * lin.grad;
  if (model.disturbance_dim() > 0) {
    const DisturbanceVec gamma = parts.f3.transpose() * lin.grad;
    lin.d_star =
        extremal_disturbance(model.disturbance_bounds(), gamma, vf.mode());
    lin.alpha = lin.time_derivative + lin.grad.dot(parts.f1) +
                gamma.dot(lin.d_star);
  } else {
    lin.d_star.resize(0);
    lin.alpha = lin.time_derivative + lin.grad.dot(parts.f1);
  }
  return lin;
}

ControlSet classify_controls(const ValueFunction& vf,
                             const DynamicsModel& model, const StateVec& x,
                             double t, GradientMode gradient_mode,
                             double boundary_band) {
  ControlSet cs;
  if (!vf.grid().contains(x)) {
    cs.kind = ControlSet::Kind::Empty;
    cs.outside_domain = true;
    return cs;
  }
  cs.lin = linearize_value_rate(vf, model, x, t, gradient_mode);
  cs.value = cs.lin.value;
  // Signed distance from the permitted region: negative values are
  // permitted for liveness, positive for safety.
  const double v =
      vf.mode() == ReachMode::Liveness ? cs.lin.value : -cs.lin.value;
  if (v < -boundary_band) {
    cs.kind = ControlSet::Kind::All;
  } else if (v > boundary_band) {
    cs.kind = ControlSet::Kind::Empty;
  } else {
    cs.kind = ControlSet::Kind::Hyperplane;
    cs.alpha = cs.lin.alpha;
    cs.beta = cs.lin.beta;
    cs.sense = ControlSet::Sense::Equality;
    cs.degenerate = beta_degenerate(cs.beta);
  }
  return cs;
}

ControlVec default_optimal_control(const ValueFunction& vf,
                                   const DynamicsModel& model,
                                   const StateVec& x, double t,
                                   ReachMode problem,
                                   GradientMode gradient_mode) {
  const GradientSample g = vf.space_gradient(x, t, gradient_mode);
  const AffineParts parts = model.affine_parts(x);
  const ControlVec beta = parts.f2.transpose() * g.grad;
  return extremal_control(model.control_bounds(), beta, problem);
}

namespace {

struct QpScratch {
  double best_cost = std::numeric_limits<double>::infinity();
  ControlVec best_u;
  bool found = false;
};

void consider(QpScratch& s, const ControlVec& u, const ControlVec& u_nom) {
  const double cost = (u - u_nom).squaredNorm();
  if (!s.found || cost < s.best_cost) {
    s.found = true;
    s.best_cost = cost;
    s.best_u = u;
  }
}

}  // namespace

QpResult qp_project(const ControlVec& u_nom, double alpha,
                    const ControlVec& beta, ControlSet::Sense sense,
                    const ControlBounds& bounds) {
  const int m = bounds.dim();
  if (static_cast<int>(u_nom.size()) != m ||
      static_cast<int>(beta.size()) != m) {
    throw ContractError("qp_project: dimension mismatch");
  }
  QpResult result;

  // Tolerances scaled to the constraint's magnitude over the box.
  double scale = std::abs(alpha);
  for (int i = 0; i < m; ++i) scale += std::abs(beta[i]) * bounds.max_abs(i);
  const double feas_tol = 1e-9 * std::max(1.0, scale);

  const ControlVec u_box = bounds.clamp(u_nom);
  if (sense == ControlSet::Sense::AtMostZero) {
    result.iterations = 1;
    if (alpha + beta.dot(u_box) <= feas_tol) {
      result.status = QpStatus::Ok;
      result.u = u_box;
      return result;
    }
    // The halfspace constraint is active at the optimum; fall through to
    // the equality problem on its bounding hyperplane.
  }

  const double beta_sq = beta.squaredNorm();
  if (beta_sq == 0.0) {
    ++result.iterations;
    if (std::abs(alpha) <= feas_tol) {
      result.status = QpStatus::Ok;
      result.u = u_box;  // vacuous constraint
    }
    return result;
  }

  QpScratch scratch;

  // Unconstrained projection onto the hyperplane.
  ++result.iterations;
  {
    const ControlVec u_p =
        u_nom - ((beta.dot(u_nom) + alpha) / beta_sq) * beta;
    if (bounds.contains(u_p, 1e-12 * std::max(1.0, scale))) {
      consider(scratch, bounds.clamp(u_p), u_nom);
    }
  }

  // Active-set enumeration: each axis free, at lo, or at hi. Patterns are
  // encoded base-3; the all-free pattern was handled above.
  const int patterns = [](int dim) {
    int p = 1;
    for (int i = 0; i < dim; ++i) p *= 3;
    return p;
  }(m);
  ControlVec u(m);
  for (int code = 1; code < patterns; ++code) {
    int rem = code;
    double fixed_dot = 0.0;
    double free_sq = 0.0;
    double free_dot_nom = 0.0;
    bool any_free = false;
    for (int i = 0; i < m; ++i) {
      const int state = rem % 3;  // 0 free, 1 lo, 2 hi
      rem /= 3;
      if (state == 0) {
        any_free = true;
        free_sq += beta[i] * beta[i];
        free_dot_nom += beta[i] * u_nom[i];
        u[i] = u_nom[i];  // placeholder, projected below
      } else {
        u[i] = (state == 1) ? bounds.lo[i] : bounds.hi[i];
        fixed_dot += beta[i] * u[i];
      }
    }
    ++result.iterations;
    const double c = -alpha - fixed_dot;  // beta_free . u_free must equal c
    if (!any_free) {
      if (std::abs(beta.dot(u) + alpha) <= feas_tol) consider(scratch, u, u_nom);
      continue;
    }
    if (free_sq == 0.0) {
      if (std::abs(c) > feas_tol) continue;
      int rem2 = code;
      for (int i = 0; i < m; ++i) {
        const int state = rem2 % 3;
        rem2 /= 3;
        if (state == 0) u[i] = std::clamp(u_nom[i], bounds.lo[i], bounds.hi[i]);
      }
      consider(scratch, u, u_nom);
      continue;
    }
    const double lambda = (free_dot_nom - c) / free_sq;
    bool ok = true;
    int rem2 = code;
    for (int i = 0; i < m; ++i) {
      const int state = rem2 % 3;
      rem2 /= 3;
      if (state != 0) continue;
      u[i] = u_nom[i] - lambda * beta[i];
      if (u[i] < bounds.lo[i] - 1e-12 * std::max(1.0, scale) ||
          u[i] > bounds.hi[i] + 1e-12 * std::max(1.0, scale)) {
        ok = false;
        break;
      }
      u[i] = std::clamp(u[i], bounds.lo[i], bounds.hi[i]);
    }
    if (ok) consider(scratch, u, u_nom);
  }

  if (scratch.found) {
    result.status = QpStatus::Ok;
    result.u = scratch.best_u;
  }
  return result;
}

namespace {

FilterResult make_nominal(const DynamicsModel& model, const ControlVec& u_nom,
                          double value) {
  FilterResult r;
  r.u = model.control_bounds().clamp(u_nom);
  r.active = false;
  r.branch = FilterBranch::Nominal;
  r.value = value;
  return r;
}

FilterResult make_default(const ValueFunction& vf, const DynamicsModel& model,
                          const FilterSpec& spec, const StateVec& x, double t,
                          double value, bool fallback) {
  FilterResult r;
  r.u = default_optimal_control(vf, model, x, t, spec.problem,
                                spec.gradient_mode);
  r.active = true;
  r.branch = FilterBranch::DefaultOptimal;
  r.value = value;
  r.fallback = fallback;
  return r;
}

/// Margin test: true when the state is strictly inside the permitted
/// region by more than epsilon (liveness: V < -eps; safety: V > eps).
bool strictly_permitted(ReachMode problem, double value, double epsilon) {
  return problem == ReachMode::Liveness ? value < -epsilon : value > epsilon;
}

FilterResult handle_outside_domain(const DynamicsModel& model,
                                   const ControlVec& u_nom) {
  FilterResult r;
  r.u = model.control_bounds().clamp(u_nom);
  r.active = false;
  r.branch = FilterBranch::Nominal;
  r.fallback = true;
  r.value = std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace

FilterResult filter_lr(const ValueFunction& vf, const DynamicsModel& model,
                       const FilterSpec& spec, const ControlVec& u_nom,
                       const StateVec& x, double t) {
  const std::int64_t start = now_ns();
  FilterResult r;
  if (!vf.grid().contains(x)) {
    r = handle_outside_domain(model, u_nom);
  } else {
    const double v = vf.value(x, t);
    if (strictly_permitted(spec.problem, v, spec.epsilon)) {
      r = make_nominal(model, u_nom, v);
    } else {
      r = make_default(vf, model, spec, x, t, v, false);
    }
  }
  r.compute_ns = now_ns() - start;
  return r;
}

FilterResult filter_smooth_lr(const ValueFunction& vf,
                              const DynamicsModel& model,
                              const FilterSpec& spec, const ControlVec& u_nom,
                              const StateVec& x, double t) {
  const std::int64_t start = now_ns();
  FilterResult r;
  if (!vf.grid().contains(x)) {
    r = handle_outside_domain(model, u_nom);
  } else {
    const ValueRateLinearization lin =
        linearize_value_rate(vf, model, x, t, spec.gradient_mode);
    if (strictly_permitted(spec.problem, lin.value, spec.epsilon)) {
      r = make_nominal(model, u_nom, lin.value);
    } else if (beta_degenerate(lin.beta)) {
      r = make_default(vf, model, spec, x, t, lin.value, true);
    } else {
      const QpResult qp =
          qp_project(model.control_bounds().clamp(u_nom), lin.alpha, lin.beta,
                     ControlSet::Sense::Equality, model.control_bounds());
      if (qp.status == QpStatus::Ok) {
        r.u = qp.u;
        r.active = true;
        r.branch = FilterBranch::QpProjection;
        r.qp_iterations = qp.iterations;
        r.value = lin.value;
      } else {
        r = make_default(vf, model, spec, x, t, lin.value, true);
        r.qp_iterations = qp.iterations;
      }
    }
  }
  r.compute_ns = now_ns() - start;
  return r;
}

FilterResult filter_smooth_blending(const ValueFunction& vf,
                                    const DynamicsModel& model,
                                    const FilterSpec& spec,
                                    const ControlVec& u_nom, const StateVec& x,
                                    double t) {
  const std::int64_t start = now_ns();
  FilterResult r;
  if (!vf.grid().contains(x)) {
    r = handle_outside_domain(model, u_nom);
  } else {
    const ValueRateLinearization lin =
        linearize_value_rate(vf, model, x, t, spec.gradient_mode);
    if (beta_degenerate(lin.beta)) {
      r = make_default(vf, model, spec, x, t, lin.value, true);
    } else {
      // Liveness wants  alpha + beta.u <= -gamma V; safety wants
      // alpha' + beta.u >= -gamma V, negated into <= form below.
      double qp_alpha;
      ControlVec qp_beta;
      if (spec.problem == ReachMode::Liveness) {
        qp_alpha = lin.alpha + spec.gamma * lin.value;
        qp_beta = lin.beta;
      } else {
        qp_alpha = -(lin.alpha + spec.gamma * lin.value);
        qp_beta = -lin.beta;
      }
      // Inside the permitted region the constraint is feasible in exact
      // arithmetic (the default optimal control satisfies it); cap the
      // demanded rate at the best achievable one so grid error cannot
      // manufacture infeasibility.
      const bool permitted = spec.problem == ReachMode::Liveness
                                 ? lin.value <= 0.0
                                 : lin.value >= 0.0;
      if (permitted) {
        const ControlVec u_star =
            extremal_control(model.control_bounds(), lin.beta, spec.problem);
        // qp_alpha + qp_beta.u <= 0 must admit u_star.
        qp_alpha = std::min(qp_alpha, -qp_beta.dot(u_star));
      }
      const ControlVec u0 = model.control_bounds().clamp(u_nom);
      const QpResult qp = qp_project(u0, qp_alpha, qp_beta,
                                     ControlSet::Sense::AtMostZero,
                                     model.control_bounds());
      if (qp.status == QpStatus::Ok) {
        r.u = qp.u;
        r.branch = FilterBranch::QpProjection;
        r.qp_iterations = qp.iterations;
        r.active = (r.u - u0).cwiseAbs().maxCoeff() > 1e-12;
        r.value = lin.value;
      } else {
        r = make_default(vf, model, spec, x, t, lin.value, true);
        r.qp_iterations = qp.iterations;
      }
    }
  }
  r.compute_ns = now_ns() - start;
  return r;
}

FilterResult apply_filter(const ValueFunction& vf, const DynamicsModel& model,
                          const FilterSpec& spec, const ControlVec& u_nom,
                          const StateVec& x, double t) {
  switch (spec.kind) {
    case FilterKind::LeastRestrictive:
      return filter_lr(vf, model, spec, u_nom, x, t);
    case FilterKind::SmoothLeastRestrictive:
      return filter_smooth_lr(vf, model, spec, u_nom, x, t);
    case FilterKind::SmoothBlending:
      return filter_smooth_blending(vf, model, spec, u_nom, x, t);
  }
  throw ContractError("unknown filter kind");
}

}  // namespace reachfilter

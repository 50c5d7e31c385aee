#ifndef REACHFILTER_FILTERS_HPP
#define REACHFILTER_FILTERS_HPP

#include <cstdint>

#include "reachfilter/hji.hpp"

namespace reachfilter {

/// Width of the |V| band treated as "on the tube boundary" when
/// classifying control sets. Exact V = 0 is measure-zero on trajectories.
inline constexpr double kDefaultBoundaryBand = 1e-3;

/// First-order expansion of the value rate at (x, t):
///   d/dt V = alpha + beta . u,  under the worst-case disturbance d*.
/// alpha carries D_t V (liveness only) plus grad V . (f1 + f3 d*).
struct ValueRateLinearization {
  double value = 0.0;
  double alpha = 0.0;
  ControlVec beta;
  DisturbanceVec d_star;
  StateVec grad;
  double time_derivative = 0.0;
  bool boundary_fallback = false;
};

ValueRateLinearization linearize_value_rate(const ValueFunction& vf,
                                            const DynamicsModel& model,
                                            const StateVec& x, double t,
                                            GradientMode gradient_mode);

/// Classification of the live (or safe) control set at a state.
struct ControlSet {
  enum class Kind { All, Hyperplane, Empty };
  enum class Sense { Equality, AtMostZero };

  Kind kind = Kind::Empty;
  // Hyperplane alpha + beta . u (= 0 or <= 0 by sense).
  double alpha = 0.0;
  ControlVec beta;
  Sense sense = Sense::Equality;
  bool degenerate = false;      // beta vanished on the boundary
  bool outside_domain = false;  // x left the grid; kind is Empty

  double value = 0.0;  // V(x, t) used for the classification
  ValueRateLinearization lin;
};

/// Live controls (liveness) or safe controls (safety) at (x, t):
/// all of U strictly on the permitted side of the boundary band, a
/// hyperplane within it, empty beyond it.
ControlSet classify_controls(const ValueFunction& vf,
                             const DynamicsModel& model, const StateVec& x,
                             double t, GradientMode gradient_mode,
                             double boundary_band = kDefaultBoundaryBand);

/// Bang-bang reachability controller: the control extremizing the value
/// rate for the problem's player direction.
ControlVec default_optimal_control(const ValueFunction& vf,
                                   const DynamicsModel& model,
                                   const StateVec& x, double t,
                                   ReachMode problem,
                                   GradientMode gradient_mode);

enum class QpStatus { Ok, Infeasible };

struct QpResult {
  QpStatus status = QpStatus::Infeasible;
  ControlVec u;
  int iterations = 0;  // KKT candidate systems examined
};

/// Exact minimizer of ||u - u_nom||^2 subject to the box bounds and the
/// constraint alpha + beta . u (= 0 | <= 0). Solved by projecting onto the
/// hyperplane and, if that leaves the box, enumerating active box faces
/// (at most 3^m candidate systems; control dims here are <= 2).
QpResult qp_project(const ControlVec& u_nom, double alpha,
                    const ControlVec& beta, ControlSet::Sense sense,
                    const ControlBounds& bounds);

enum class FilterKind { LeastRestrictive, SmoothLeastRestrictive, SmoothBlending };

struct FilterSpec {
  FilterKind kind = FilterKind::LeastRestrictive;
  ReachMode problem = ReachMode::Safety;
  double gamma = 0.0;    // smooth blending rate bound
  double epsilon = 0.0;  // activation margin on |V|, value units
  GradientMode gradient_mode = GradientMode::Central;
};

enum class FilterBranch { Nominal, DefaultOptimal, QpProjection };

inline const char* to_string(FilterBranch b) {
  switch (b) {
    case FilterBranch::Nominal: return "nominal";
    case FilterBranch::DefaultOptimal: return "default";
    case FilterBranch::QpProjection: return "qp";
  }
  return "?";
}

struct FilterResult {
  ControlVec u;
  bool active = false;
  FilterBranch branch = FilterBranch::Nominal;
  int qp_iterations = 0;
  std::int64_t compute_ns = 0;
  /// Degenerate or infeasible boundary handling kicked in and the default
  /// optimal control was substituted.
  bool fallback = false;
  double value = 0.0;
};

/// Least restrictive filter: nominal strictly inside the permitted region,
/// default optimal control within the epsilon margin of the boundary.
FilterResult filter_lr(const ValueFunction& vf, const DynamicsModel& model,
                       const FilterSpec& spec, const ControlVec& u_nom,
                       const StateVec& x, double t);

/// Smooth least restrictive filter: nominal inside, otherwise the QP
/// projection of the nominal control onto the boundary hyperplane.
FilterResult filter_smooth_lr(const ValueFunction& vf,
                              const DynamicsModel& model,
                              const FilterSpec& spec, const ControlVec& u_nom,
                              const StateVec& x, double t);

/// Smooth blending filter: at every step the QP projection under the
/// rate constraint  d/dt V <= -gamma V  (liveness; >= for safety).
FilterResult filter_smooth_blending(const ValueFunction& vf,
                                    const DynamicsModel& model,
                                    const FilterSpec& spec,
                                    const ControlVec& u_nom, const StateVec& x,
                                    double t);

/// Dispatch on spec.kind.
FilterResult apply_filter(const ValueFunction& vf, const DynamicsModel& model,
                          const FilterSpec& spec, const ControlVec& u_nom,
                          const StateVec& x, double t);

}  // namespace reachfilter

#endif  // REACHFILTER_FILTERS_HPP

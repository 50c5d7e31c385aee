#ifndef REACHFILTER_HJI_HPP
#define REACHFILTER_HJI_HPP

#include <vector>

#include "reachfilter/grid.hpp"
#include "reachfilter/models.hpp"
#include "reachfilter/types.hpp"

namespace reachfilter {

struct HamiltonianResult {
  double value = 0.0;
  ControlVec u_opt;
  DisturbanceVec d_opt;
};

/// Closed-form Hamiltonian for costate p:
///   Liveness: min over u, max over d of p . f(x,u,d)
///   Safety:   max over u, min over d of p . f(x,u,d)
/// Box inputs resolve per axis by the sign of p^T f2 (resp. p^T f3); ball
/// disturbances align with +/- the costate image. Zero components tie-break
/// to the in-bounds value closest to zero.
HamiltonianResult hamiltonian(const DynamicsModel& model, const StateVec& x,
                              const StateVec& p, ReachMode mode);

/// The extremizing control for costate image beta = f2^T p under the mode's
/// player direction (liveness minimizes, safety maximizes).
ControlVec extremal_control(const ControlBounds& bounds, const ControlVec& beta,
                            ReachMode mode);

/// The extremizing disturbance for gamma = f3^T p (liveness maximizes,
/// safety minimizes).
DisturbanceVec extremal_disturbance(const DisturbanceBounds& bounds,
                                    const DisturbanceVec& gamma,
                                    ReachMode mode);

struct SolverConfig {
  enum class Dissipation { GlobalLaxFriedrichs };

  double cfl = 0.5;  // rejected above 0.9
  Dissipation dissipation = Dissipation::GlobalLaxFriedrichs;
  double convergence_tol = 1e-3;  // sup-norm change between slices (safety)
  double max_horizon = 1.0;       // seconds
  int store_every = 1;            // slice thinning stride (liveness)
};

/// Grid solution of the final-value variational inequality
///   min { D_t V + H(x, grad V), l(x) - V } = 0,  V(x, T) = l(x).
///
/// Liveness mode stores time-stamped slices with times ascending over
/// [0, T]; the slice at t = T is the sampled target function. Safety mode
/// stores the single converged slice and is time-invariant.
class ValueFunction {
 public:
  ValueFunction() = default;
  ValueFunction(GridDef grid, std::vector<double> times,
                std::vector<ScalarField> slices, ReachMode mode,
                bool converged, double horizon);

  const GridDef& grid() const { return grid_; }
  const std::vector<double>& times() const { return times_; }
  int num_slices() const { return static_cast<int>(slices_.size()); }
  const ScalarField& slice(int k) const { return slices_[k]; }
  ReachMode mode() const { return mode_; }
  bool converged() const { return converged_; }
  /// Horizon the solver actually integrated (time of convergence for
  /// safety, max_horizon for liveness).
  double horizon() const { return horizon_; }

  double value(const StateVec& x, double t) const;
  /// Finite difference across the stored slice interval containing t;
  /// identically zero for a converged safety solution.
  double time_derivative(const StateVec& x, double t) const;
  GradientSample space_gradient(const StateVec& x, double t,
                                GradientMode mode) const;

 private:
  /// Index k with times[k] <= t <= times[k+1] and the weight of slice k+1.
  std::pair<int, double> locate(double t) const;

  GridDef grid_;
  std::vector<double> times_;
  std::vector<ScalarField> slices_;
  ReachMode mode_ = ReachMode::Liveness;
  bool converged_ = false;
  double horizon_ = 0.0;
};

/// Backward solve on the grid with a global Lax-Friedrichs numerical
/// Hamiltonian and TVD-RK2 time stepping. Each step applies the freeze
/// operator V <- min(V, l) and keeps V non-increasing in solve time so the
/// tube is monotone in the remaining horizon.
ValueFunction solve(const DynamicsModel& model, const TargetFunction& target,
                    const GridDef& grid, ReachMode mode,
                    const SolverConfig& config);

/// min { D_t V + H(x, grad V), l(x) - V(x,t) } evaluated from the stored
/// slices; a direct check of solver quality (zero for the exact solution).
double hji_residual(const ValueFunction& vf, const DynamicsModel& model,
                    const TargetFunction& target, const StateVec& x, double t);

/// Sub-zero-level membership test: V(x, t) <= 0.
bool brt_contains(const ValueFunction& vf, const StateVec& x, double t);

}  // namespace reachfilter

#endif  // REACHFILTER_HJI_HPP

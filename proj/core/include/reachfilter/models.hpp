#ifndef REACHFILTER_MODELS_HPP
#define REACHFILTER_MODELS_HPP

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "reachfilter/types.hpp"

namespace reachfilter {

/// Per-axis interval box on the control input.
struct ControlBounds {
  ControlVec lo;
  ControlVec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const ControlVec& u, double tol = 0.0) const;
  ControlVec clamp(const ControlVec& u) const;
  /// Largest absolute value reachable on axis i.
  double max_abs(int i) const { return std::max(std::abs(lo[i]), std::abs(hi[i])); }
};

/// Disturbance set: none, a per-axis box, or a Euclidean ball.
struct DisturbanceBounds {
  enum class Kind { None, Box, Ball };
  Kind kind = Kind::None;
  DisturbanceVec lo;  // Box
  DisturbanceVec hi;  // Box
  double radius = 0.0;  // Ball
  int dim = 0;

  static DisturbanceBounds none() { return {}; }
  static DisturbanceBounds box(DisturbanceVec lo, DisturbanceVec hi);
  static DisturbanceBounds ball(int dim, double radius);
  /// Largest absolute value a single component can take.
  double max_abs(int i) const;
};

/// Control-affine decomposition f(x,u,d) = f1(x) + f2(x) u + f3(x) d.
struct AffineParts {
  StateVec f1;
  ControlJacobian f2;
  DisturbanceJacobian f3;

  StateVec recombine(const ControlVec& u, const DisturbanceVec& d) const;
};

/// A control-affine dynamical system with bounded inputs. Immutable after
/// construction; all evaluation methods are pure.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  const std::string& name() const { return name_; }
  int state_dim() const { return state_dim_; }
  int control_dim() const { return control_dim_; }
  int disturbance_dim() const { return disturbance_.dim; }
  const ControlBounds& control_bounds() const { return control_bounds_; }
  const DisturbanceBounds& disturbance_bounds() const { return disturbance_; }
  /// State indices that wrap with period 2*pi.
  const std::vector<int>& periodic_dims() const { return periodic_dims_; }
  const std::map<std::string, double>& params() const { return params_; }

  /// Continuous-time state derivative, written out exactly as the model
  /// equations read. Inputs are not clamped to their bounds.
  virtual StateVec derivative(const StateVec& x, const ControlVec& u,
                              const DisturbanceVec& d) const = 0;

  /// The (f1, f2, f3) blocks at x. Recombining them must reproduce
  /// derivative() to machine precision.
  virtual AffineParts affine_parts(const StateVec& x) const = 0;

 protected:
  DynamicsModel(std::string name, int state_dim, int control_dim,
                ControlBounds control_bounds, DisturbanceBounds disturbance,
                std::vector<int> periodic_dims,
                std::map<std::string, double> params);

  void check_state(const StateVec& x) const;
  void check_inputs(const ControlVec& u, const DisturbanceVec& d) const;

 private:
  std::string name_;
  int state_dim_;
  int control_dim_;
  ControlBounds control_bounds_;
  DisturbanceBounds disturbance_;
  std::vector<int> periodic_dims_;
  std::map<std::string, double> params_;
};

/// derivative() with dimension checks on every argument.
StateVec eval_dynamics(const DynamicsModel& model, const StateVec& x,
                       const ControlVec& u, const DisturbanceVec& d);

/// affine_parts() with dimension checks.
AffineParts affine_parts(const DynamicsModel& model, const StateVec& x);

struct Sphere {
  Eigen::VectorXd center;
  double radius = 0.0;
};

/// Lipschitz target function l whose sub-zero level set is the target
/// (goal region for liveness, obstacle set for safety).
class TargetFunction {
 public:
  enum class Kind { RectangleBand, SphereUnion, GoalSphere, Custom };

  /// max(|x[abs_dim]| - half_width, x[band_dim] - band_hi, band_lo - x[band_dim]);
  /// an approximate signed distance to the rectangle
  /// {|x[abs_dim]| <= half_width, band_lo <= x[band_dim] <= band_hi}.
  static TargetFunction rectangle_band(int abs_dim, double half_width,
                                       int band_dim, double band_lo,
                                       double band_hi);
  /// Signed distance to the closest sphere, measured over the listed
  /// position dims: min_i ||x[dims] - c_i|| - R_i.
  static TargetFunction sphere_union(std::vector<int> dims,
                                     std::vector<Sphere> spheres);
  static TargetFunction goal_sphere(std::vector<int> dims,
                                    Eigen::VectorXd center, double radius);
  static TargetFunction custom(std::function<double(const StateVec&)> fn,
                               std::string label = "custom");

  Kind kind() const { return kind_; }
  double value(const StateVec& x) const;

  // Geometry accessors (valid for the matching kind only).
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<Sphere>& spheres() const { return spheres_; }

 private:
  TargetFunction() = default;

  Kind kind_ = Kind::Custom;
  int abs_dim_ = 0;
  double half_width_ = 0.0;
  int band_dim_ = 0;
  double band_lo_ = 0.0;
  double band_hi_ = 0.0;
  std::vector<int> dims_;
  std::vector<Sphere> spheres_;
  std::function<double(const StateVec&)> fn_;
};

/// l(x) with a state-dimension check against the model.
double target_value(const TargetFunction& tf, const StateVec& x);

/// Instantiate a registered model by name: dubins3, blimp4, rocket6,
/// vrocket2. Any parameter may be overridden; unknown keys are rejected.
std::unique_ptr<DynamicsModel> make_model(
    const std::string& name,
    const std::map<std::string, double>& overrides = {});

std::vector<std::string> registered_models();

}  // namespace reachfilter

#endif  // REACHFILTER_MODELS_HPP

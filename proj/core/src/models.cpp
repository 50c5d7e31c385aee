#include "reachfilter/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace reachfilter {

namespace {

double fetch(const std::map<std::string, double>& params,
             const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) {
    throw ContractError("model parameter missing: " + key);
  }
  return it->second;
}

std::map<std::string, double> merge_params(
    std::map<std::string, double> defaults,
    const std::map<std::string, double>& overrides,
    const std::string& model_name) {
  for (const auto& [key, value] : overrides) {
    auto it = defaults.find(key);
    if (it == defaults.end()) {
      throw ContractError("unknown parameter '" + key + "' for model " +
                          model_name);
    }
    it->second = value;
  }
  return defaults;
}

}  // namespace

bool ControlBounds::contains(const ControlVec& u, double tol) const {
  for (int i = 0; i < dim(); ++i) {
    if (u[i] < lo[i] - tol || u[i] > hi[i] + tol) return false;
  }
  return true;
}

ControlVec ControlBounds::clamp(const ControlVec& u) const {
  ControlVec out = u;
  for (int i = 0; i < dim(); ++i) {
    out[i] = std::clamp(out[i], lo[i], hi[i]);
  }
  return out;
}

DisturbanceBounds DisturbanceBounds::box(DisturbanceVec lo, DisturbanceVec hi) {
  DisturbanceBounds b;
  b.kind = Kind::Box;
  b.dim = static_cast<int>(lo.size());
  b.lo = std::move(lo);
  b.hi = std::move(hi);
  return b;
}

DisturbanceBounds DisturbanceBounds::ball(int dim, double radius) {
  DisturbanceBounds b;
  b.kind = Kind::Ball;
  b.dim = dim;
  b.radius = radius;
  return b;
}

double DisturbanceBounds::max_abs(int i) const {
  switch (kind) {
    case Kind::None:
      return 0.0;
    case Kind::Box:
      return std::max(std::abs(lo[i]), std::abs(hi[i]));
    case Kind::Ball:
      return radius;
  }
  return 0.0;
}

StateVec AffineParts::recombine(const ControlVec& u,
                                const DisturbanceVec& d) const {
  StateVec dx = f1;
  if (u.size() > 0) dx += f2 * u;
  if (d.size() > 0) dx += f3 * d;
  return dx;
}

DynamicsModel::DynamicsModel(std::string name, int state_dim, int control_dim,
                             ControlBounds control_bounds,
                             DisturbanceBounds disturbance,
                             std::vector<int> periodic_dims,
                             std::map<std::string, double> params)
    : name_(std::move(name)),
      state_dim_(state_dim),
      control_dim_(control_dim),
      control_bounds_(std::move(control_bounds)),
      disturbance_(std::move(disturbance)),
      periodic_dims_(std::move(periodic_dims)),
      params_(std::move(params)) {
  if (control_bounds_.dim() != control_dim_) {
    throw ContractError("control bounds dimension mismatch for " + name_);
  }
  for (int i = 0; i < control_dim_; ++i) {
    if (!(control_bounds_.lo[i] < control_bounds_.hi[i])) {
      throw ContractError("control bounds need nonempty interior on axis " +
                          std::to_string(i) + " of " + name_);
    }
  }
}

void DynamicsModel::check_state(const StateVec& x) const {
  if (static_cast<int>(x.size()) != state_dim_) {
    std::ostringstream oss;
    oss << name_ << ": state has dim " << x.size() << ", expected "
        << state_dim_;
    throw ContractError(oss.str());
  }
}

void DynamicsModel::check_inputs(const ControlVec& u,
                                 const DisturbanceVec& d) const {
  if (static_cast<int>(u.size()) != control_dim_) {
    std::ostringstream oss;
    oss << name_ << ": control has dim " << u.size() << ", expected "
        << control_dim_;
    throw ContractError(oss.str());
  }
  if (static_cast<int>(d.size()) != disturbance_.dim) {
    std::ostringstream oss;
    oss << name_ << ": disturbance has dim " << d.size() << ", expected "
        << disturbance_.dim;
    throw ContractError(oss.str());
  }
}

StateVec eval_dynamics(const DynamicsModel& model, const StateVec& x,
                       const ControlVec& u, const DisturbanceVec& d) {
  return model.derivative(x, u, d);
}

AffineParts affine_parts(const DynamicsModel& model, const StateVec& x) {
  return model.affine_parts(x);
}

namespace {

/// Dubins car: x' = V sin(phi), y' = V cos(phi), phi' = u. No disturbance.
class DubinsCar final : public DynamicsModel {
 public:
  explicit DubinsCar(const std::map<std::string, double>& overrides)
      : DubinsCar(merge_params({{"speed", 0.3}, {"turn_bound", 0.75}},
                               overrides, "dubins3")) {}

  StateVec derivative(const StateVec& x, const ControlVec& u,
                      const DisturbanceVec& d) const override {
    check_state(x);
    check_inputs(u, d);
    StateVec dx(3);
    dx[0] = speed_ * std::sin(x[2]);
    dx[1] = speed_ * std::cos(x[2]);
    dx[2] = u[0];
    return dx;
  }

  AffineParts affine_parts(const StateVec& x) const override {
    check_state(x);
    AffineParts p;
    p.f1.resize(3);
    p.f1 << speed_ * std::sin(x[2]), speed_ * std::cos(x[2]), 0.0;
    p.f2.setZero(3, 1);
    p.f2(2, 0) = 1.0;
    p.f3.resize(3, 0);
    return p;
  }

 private:
  explicit DubinsCar(std::map<std::string, double> params)
      : DynamicsModel("dubins3", 3, 1,
                      ControlBounds{ControlVec::Constant(1, -fetch(params, "turn_bound")),
                                    ControlVec::Constant(1, fetch(params, "turn_bound"))},
                      DisturbanceBounds::none(), {2}, params),
        speed_(fetch(params, "speed")) {}

  double speed_;
};

/// Blimp: x' = v cos(th) + d1, y' = v sin(th) + d2, z' = u1, th' = u2,
/// with ||(d1,d2)||_2 bounded.
class Blimp final : public DynamicsModel {
 public:
  explicit Blimp(const std::map<std::string, double>& overrides)
      : Blimp(merge_params({{"speed", 2.0},
                            {"climb_bound", 1.0},
                            {"yaw_bound", M_PI},
                            {"disturbance_radius", 0.5}},
                           overrides, "blimp4")) {}

  StateVec derivative(const StateVec& x, const ControlVec& u,
                      const DisturbanceVec& d) const override {
    check_state(x);
    check_inputs(u, d);
    StateVec dx(4);
    dx[0] = speed_ * std::cos(x[3]) + d[0];
    dx[1] = speed_ * std::sin(x[3]) + d[1];
    dx[2] = u[0];
    dx[3] = u[1];
    return dx;
  }

  AffineParts affine_parts(const StateVec& x) const override {
    check_state(x);
    AffineParts p;
    p.f1.resize(4);
    p.f1 << speed_ * std::cos(x[3]), speed_ * std::sin(x[3]), 0.0, 0.0;
    p.f2.setZero(4, 2);
    p.f2(2, 0) = 1.0;
    p.f2(3, 1) = 1.0;
    p.f3.setZero(4, 2);
    p.f3(0, 0) = 1.0;
    p.f3(1, 1) = 1.0;
    return p;
  }

 private:
  explicit Blimp(std::map<std::string, double> params)
      : DynamicsModel(
            "blimp4", 4, 2,
            ControlBounds{
                (ControlVec(2) << -fetch(params, "climb_bound"),
                 -fetch(params, "yaw_bound")).finished(),
                (ControlVec(2) << fetch(params, "climb_bound"),
                 fetch(params, "yaw_bound")).finished()},
            DisturbanceBounds::ball(2, fetch(params, "disturbance_radius")),
            {3}, params),
        speed_(fetch(params, "speed")) {}

  double speed_;
};

/// Planar rocket, state (y, z, th, y', z', th'), thrust controls (u_y, u_z):
///   y'' = cos(th) u_y - sin(th) u_z
///   z'' = sin(th) u_y + cos(th) u_z - g
///   th'' = alpha u_y
class PlanarRocket final : public DynamicsModel {
 public:
  explicit PlanarRocket(const std::map<std::string, double>& overrides)
      : PlanarRocket(merge_params(
            {{"g", 9.81}, {"alpha", 0.3}, {"thrust_bound", 250.0}}, overrides,
            "rocket6")) {}

  StateVec derivative(const StateVec& x, const ControlVec& u,
                      const DisturbanceVec& d) const override {
    check_state(x);
    check_inputs(u, d);
    const double c = std::cos(x[2]);
    const double s = std::sin(x[2]);
    StateVec dx(6);
    dx[0] = x[3];
    dx[1] = x[4];
    dx[2] = x[5];
    dx[3] = c * u[0] - s * u[1];
    dx[4] = s * u[0] + c * u[1] - g_;
    dx[5] = alpha_ * u[0];
    return dx;
  }

  AffineParts affine_parts(const StateVec& x) const override {
    check_state(x);
    const double c = std::cos(x[2]);
    const double s = std::sin(x[2]);
    AffineParts p;
    p.f1.resize(6);
    p.f1 << x[3], x[4], x[5], 0.0, -g_, 0.0;
    p.f2.setZero(6, 2);
    p.f2(3, 0) = c;
    p.f2(3, 1) = -s;
    p.f2(4, 0) = s;
    p.f2(4, 1) = c;
    p.f2(5, 0) = alpha_;
    p.f3.resize(6, 0);
    return p;
  }

 private:
  explicit PlanarRocket(std::map<std::string, double> params)
      : DynamicsModel(
            "rocket6", 6, 2,
            ControlBounds{ControlVec::Constant(2, -fetch(params, "thrust_bound")),
                          ControlVec::Constant(2, fetch(params, "thrust_bound"))},
            DisturbanceBounds::none(), {2}, params),
        g_(fetch(params, "g")),
        alpha_(fetch(params, "alpha")) {}

  double g_;
  double alpha_;
};

/// Vertical rocket, state (z, v): z' = v, v' = u - g. Two states make its
/// reachable sets cheap to brute-force, so it doubles as a verification
/// system in the tests.
class VerticalRocket final : public DynamicsModel {
 public:
  explicit VerticalRocket(const std::map<std::string, double>& overrides)
      : VerticalRocket(merge_params({{"g", 9.81}, {"thrust_bound", 250.0}},
                                    overrides, "vrocket2")) {}

  StateVec derivative(const StateVec& x, const ControlVec& u,
                      const DisturbanceVec& d) const override {
    check_state(x);
    check_inputs(u, d);
    StateVec dx(2);
    dx[0] = x[1];
    dx[1] = u[0] - g_;
    return dx;
  }

  AffineParts affine_parts(const StateVec& x) const override {
    check_state(x);
    AffineParts p;
    p.f1.resize(2);
    p.f1 << x[1], -g_;
    p.f2.setZero(2, 1);
    p.f2(1, 0) = 1.0;
    p.f3.resize(2, 0);
    return p;
  }

 private:
  explicit VerticalRocket(std::map<std::string, double> params)
      : DynamicsModel(
            "vrocket2", 2, 1,
            ControlBounds{ControlVec::Constant(1, -fetch(params, "thrust_bound")),
                          ControlVec::Constant(1, fetch(params, "thrust_bound"))},
            DisturbanceBounds::none(), {}, params),
        g_(fetch(params, "g")) {}

  double g_;
};

}  // namespace

TargetFunction TargetFunction::rectangle_band(int abs_dim, double half_width,
                                              int band_dim, double band_lo,
                                              double band_hi) {
  TargetFunction tf;
  tf.kind_ = Kind::RectangleBand;
  tf.abs_dim_ = abs_dim;
  tf.half_width_ = half_width;
  tf.band_dim_ = band_dim;
  tf.band_lo_ = band_lo;
  tf.band_hi_ = band_hi;
  return tf;
}

TargetFunction TargetFunction::sphere_union(std::vector<int> dims,
                                            std::vector<Sphere> spheres) {
  if (spheres.empty()) {
    throw ContractError("sphere_union target needs at least one sphere");
  }
  for (const auto& s : spheres) {
    if (static_cast<size_t>(s.center.size()) != dims.size()) {
      throw ContractError("sphere center dimension does not match dims list");
    }
  }
  TargetFunction tf;
  tf.kind_ = Kind::SphereUnion;
  tf.dims_ = std::move(dims);
  tf.spheres_ = std::move(spheres);
  return tf;
}

TargetFunction TargetFunction::goal_sphere(std::vector<int> dims,
                                           Eigen::VectorXd center,
                                           double radius) {
  TargetFunction tf =
      sphere_union(std::move(dims), {Sphere{std::move(center), radius}});
  tf.kind_ = Kind::GoalSphere;
  return tf;
}

TargetFunction TargetFunction::custom(
    std::function<double(const StateVec&)> fn, std::string /*label*/) {
  TargetFunction tf;
  tf.kind_ = Kind::Custom;
  tf.fn_ = std::move(fn);
  return tf;
}

double TargetFunction::value(const StateVec& x) const {
  switch (kind_) {
    case Kind::RectangleBand:
      return std::max({std::abs(x[abs_dim_]) - half_width_,
                       x[band_dim_] - band_hi_, band_lo_ - x[band_dim_]});
    case Kind::SphereUnion:
    case Kind::GoalSphere: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& s : spheres_) {
        double sq = 0.0;
        for (size_t i = 0; i < dims_.size(); ++i) {
          const double delta = x[dims_[i]] - s.center[static_cast<int>(i)];
          sq += delta * delta;
        }
        best = std::min(best, std::sqrt(sq) - s.radius);
      }
      return best;
    }
    case Kind::Custom:
      return fn_(x);
  }
  throw ContractError("unreachable target kind");
}

double target_value(const TargetFunction& tf, const StateVec& x) {
  return tf.value(x);
}

std::unique_ptr<DynamicsModel> make_model(
    const std::string& name, const std::map<std::string, double>& overrides) {
  if (name == "dubins3") return std::make_unique<DubinsCar>(overrides);
  if (name == "blimp4") return std::make_unique<Blimp>(overrides);
  if (name == "rocket6") return std::make_unique<PlanarRocket>(overrides);
  if (name == "vrocket2") return std::make_unique<VerticalRocket>(overrides);
  throw ContractError("unknown model name: " + name);
}

std::vector<std::string> registered_models() {
  return {"dubins3", "blimp4", "rocket6", "vrocket2"};
}

}  // namespace reachfilter

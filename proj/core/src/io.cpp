#include "reachfilter/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace reachfilter {

namespace {

using json = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little,
              "archive writer assumes a little-endian host");

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed,
                const std::set<std::string>& required) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) fail(path + "." + item.key(), "unknown key");
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  }
}

double get_double(const json& obj, const std::string& path,
                  const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double get_double_or(const json& obj, const std::string& path,
                     const std::string& key, double fallback) {
  return obj.contains(key) ? get_double(obj, path, key) : fallback;
}

std::int64_t get_int(const json& obj, const std::string& path,
                     const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t get_int_or(const json& obj, const std::string& path,
                        const std::string& key, std::int64_t fallback) {
  return obj.contains(key) ? get_int(obj, path, key) : fallback;
}

std::uint64_t get_u64_or(const json& obj, const std::string& path,
                         const std::string& key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& path,
                       const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_double_array(const json& obj, const std::string& path,
                                     const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_array()) fail(path + "." + key, "expected an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(path + "." + key, "expected numeric entries");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<int> get_int_array(const json& obj, const std::string& path,
                               const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_array()) fail(path + "." + key, "expected an array");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) fail(path + "." + key, "expected integer entries");
    out.push_back(e.get<int>());
  }
  return out;
}

TargetFunction parse_target(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  if (!obj.contains("kind")) fail(path + ".kind", "missing required key");
  const std::string kind = get_string(obj, path, "kind");
  if (kind == "rectangle_band") {
    check_keys(obj, path,
               {"kind", "abs_dim", "half_width", "band_dim", "band_lo", "band_hi"},
               {"abs_dim", "half_width", "band_dim", "band_lo", "band_hi"});
    return TargetFunction::rectangle_band(
        static_cast<int>(get_int(obj, path, "abs_dim")),
        get_double(obj, path, "half_width"),
        static_cast<int>(get_int(obj, path, "band_dim")),
        get_double(obj, path, "band_lo"), get_double(obj, path, "band_hi"));
  }
  if (kind == "sphere_union" || kind == "goal_sphere") {
    if (kind == "goal_sphere") {
      check_keys(obj, path, {"kind", "dims", "center", "radius"},
                 {"dims", "center", "radius"});
      const auto center = get_double_array(obj, path, "center");
      return TargetFunction::goal_sphere(
          get_int_array(obj, path, "dims"),
          Eigen::Map<const Eigen::VectorXd>(center.data(),
                                            static_cast<int>(center.size())),
          get_double(obj, path, "radius"));
    }
    check_keys(obj, path, {"kind", "dims", "spheres"}, {"dims", "spheres"});
    const auto& spheres_json = obj.at("spheres");
    if (!spheres_json.is_array() || spheres_json.empty()) {
      fail(path + ".spheres", "expected a non-empty array");
    }
    std::vector<Sphere> spheres;
    int idx = 0;
    for (const auto& s : spheres_json) {
      const std::string spath = path + ".spheres[" + std::to_string(idx++) + "]";
      check_keys(s, spath, {"center", "radius"}, {"center", "radius"});
      const auto center = get_double_array(s, spath, "center");
      Sphere sphere;
      sphere.center = Eigen::Map<const Eigen::VectorXd>(
          center.data(), static_cast<int>(center.size()));
      sphere.radius = get_double(s, spath, "radius");
      spheres.push_back(std::move(sphere));
    }
    return TargetFunction::sphere_union(get_int_array(obj, path, "dims"),
                                        std::move(spheres));
  }
  fail(path + ".kind", "unknown target kind '" + kind + "'");
}

GridDef parse_grid(const json& obj, const std::string& path) {
  check_keys(obj, path, {"counts", "lo", "hi", "periodic"},
             {"counts", "lo", "hi"});
  const auto counts = get_int_array(obj, path, "counts");
  const auto lo = get_double_array(obj, path, "lo");
  const auto hi = get_double_array(obj, path, "hi");
  std::vector<int> periodic(counts.size(), 0);
  if (obj.contains("periodic")) {
    const auto& p = obj.at("periodic");
    if (!p.is_array()) fail(path + ".periodic", "expected an array of booleans");
    size_t i = 0;
    for (const auto& e : p) {
      if (!e.is_boolean()) fail(path + ".periodic", "expected boolean entries");
      if (i >= periodic.size()) break;
      periodic[i++] = e.get<bool>() ? 1 : 0;
    }
    if (p.size() != counts.size()) {
      fail(path + ".periodic", "length must match counts");
    }
  }
  if (lo.size() != counts.size() || hi.size() != counts.size()) {
    fail(path, "counts, lo, hi must have the same length");
  }
  std::vector<GridDim> dims;
  for (size_t d = 0; d < counts.size(); ++d) {
    GridDim g;
    g.count = counts[d];
    g.lo = lo[d];
    g.hi = hi[d];
    g.periodic = periodic[d] != 0;
    if (g.count < 3) fail(path + ".counts", "each count must be at least 3");
    if (!(g.lo < g.hi)) fail(path, "lo must be strictly below hi on every dim");
    dims.push_back(g);
  }
  return GridDef(std::move(dims));
}

GradientMode parse_gradient_mode(const std::string& s, const std::string& path) {
  if (s == "central") return GradientMode::Central;
  if (s == "left") return GradientMode::Left;
  if (s == "right") return GradientMode::Right;
  fail(path, "unknown gradient mode '" + s + "'");
}

/// Filter entries accept the pseudo-kinds "none" (raw nominal) and
/// "default" (pure reachability controller) alongside the real filters.
PolicyChoice parse_policy(const json& obj, const std::string& path,
                          ReachMode problem) {
  check_keys(obj, path,
             {"label", "kind", "gamma", "epsilon", "gradient_mode"}, {"kind"});
  PolicyChoice choice;
  const std::string kind = get_string(obj, path, "kind");
  choice.label = obj.contains("label") ? get_string(obj, path, "label") : kind;
  choice.filter.problem = problem;
  choice.filter.gamma = get_double_or(obj, path, "gamma", 0.0);
  choice.filter.epsilon = get_double_or(obj, path, "epsilon", 0.0);
  choice.filter.gradient_mode = parse_gradient_mode(
      obj.contains("gradient_mode") ? get_string(obj, path, "gradient_mode")
                                    : "central",
      path + ".gradient_mode");
  if (choice.filter.gamma < 0.0) fail(path + ".gamma", "must be >= 0");
  if (choice.filter.epsilon < 0.0) fail(path + ".epsilon", "must be >= 0");
  if (kind == "none") {
    choice.policy = ControllerPolicy::Nominal;
  } else if (kind == "default") {
    choice.policy = ControllerPolicy::DefaultOptimal;
  } else if (kind == "lr") {
    choice.policy = ControllerPolicy::Filtered;
    choice.filter.kind = FilterKind::LeastRestrictive;
  } else if (kind == "smooth_lr") {
    choice.policy = ControllerPolicy::Filtered;
    choice.filter.kind = FilterKind::SmoothLeastRestrictive;
  } else if (kind == "smooth_blending") {
    choice.policy = ControllerPolicy::Filtered;
    choice.filter.kind = FilterKind::SmoothBlending;
  } else {
    fail(path + ".kind", "unknown filter kind '" + kind + "'");
  }
  return choice;
}

CostSpec parse_cost(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  if (!obj.contains("kind")) fail(path + ".kind", "missing required key");
  const std::string kind = get_string(obj, path, "kind");
  CostSpec cost;
  if (kind == "rocket_landing") {
    check_keys(obj, path, {"kind"}, {});
    cost.kind = CostSpec::Kind::RocketLanding;
    return cost;
  }
  if (kind == "goal_distance") {
    check_keys(obj, path, {"kind", "center", "dims", "energy_weight"},
               {"center", "dims"});
    cost.kind = CostSpec::Kind::GoalDistance;
    const auto center = get_double_array(obj, path, "center");
    cost.goal_center = Eigen::Map<const Eigen::VectorXd>(
        center.data(), static_cast<int>(center.size()));
    cost.dims = get_int_array(obj, path, "dims");
    cost.energy_weight = get_double_or(obj, path, "energy_weight", 0.0);
    if (cost.dims.size() != center.size()) {
      fail(path, "dims and center must have the same length");
    }
    return cost;
  }
  fail(path + ".kind", "unknown cost kind '" + kind + "'");
}

MpcConfig parse_nominal(const json& obj, const std::string& path) {
  check_keys(obj, path,
             {"horizon_steps", "dt", "num_samples", "prior", "prior_sigma",
              "cost", "rng_seed"},
             {"cost"});
  MpcConfig c;
  c.horizon_steps = static_cast<int>(get_int_or(obj, path, "horizon_steps", 50));
  c.dt = get_double_or(obj, path, "dt", 0.01);
  c.num_samples = static_cast<int>(get_int_or(obj, path, "num_samples", 1024));
  if (c.horizon_steps < 1) fail(path + ".horizon_steps", "must be >= 1");
  if (c.num_samples < 1) fail(path + ".num_samples", "must be >= 1");
  if (!(c.dt > 0.0)) fail(path + ".dt", "must be positive");
  const std::string prior =
      obj.contains("prior") ? get_string(obj, path, "prior") : "uniform_box";
  if (prior == "uniform_box") {
    c.prior = MpcConfig::Prior::UniformBox;
  } else if (prior == "gaussian_around_previous") {
    c.prior = MpcConfig::Prior::GaussianAroundPrevious;
  } else {
    fail(path + ".prior", "unknown prior '" + prior + "'");
  }
  c.prior_sigma = get_double_or(obj, path, "prior_sigma", 0.25);
  c.cost = parse_cost(obj.at("cost"), path + ".cost");
  c.rng_seed = get_u64_or(obj, path, "rng_seed", 0);
  return c;
}

DisturbancePolicy parse_disturbance(const json& obj, const std::string& path) {
  check_keys(obj, path, {"policy", "vector", "seed"}, {"policy"});
  DisturbancePolicy p;
  const std::string kind = get_string(obj, path, "policy");
  if (kind == "none") {
    p.kind = DisturbancePolicy::Kind::None;
  } else if (kind == "worst_case") {
    p.kind = DisturbancePolicy::Kind::WorstCase;
  } else if (kind == "constant") {
    p.kind = DisturbancePolicy::Kind::ConstantVector;
    if (!obj.contains("vector")) fail(path + ".vector", "missing required key");
    const auto v = get_double_array(obj, path, "vector");
    p.constant.resize(static_cast<int>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) p.constant[static_cast<int>(i)] = v[i];
  } else if (kind == "seeded_random") {
    p.kind = DisturbancePolicy::Kind::SeededRandom;
  } else {
    fail(path + ".policy", "unknown disturbance policy '" + kind + "'");
  }
  p.seed = get_u64_or(obj, path, "seed", 0);
  return p;
}

}  // namespace

ScenarioFile parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  check_keys(doc, "scenario",
             {"model", "target", "grid", "solver", "filter", "nominal", "sim",
              "compare", "sweep"},
             {"model", "target", "grid", "solver"});

  ScenarioFile file;
  Scenario& sc = file.scenario;

  {
    const json& m = doc.at("model");
    check_keys(m, "model", {"name", "params"}, {"name"});
    sc.model_name = get_string(m, "model", "name");
    if (m.contains("params")) {
      const json& params = m.at("params");
      if (!params.is_object()) fail("model.params", "expected an object");
      for (const auto& item : params.items()) {
        if (!item.value().is_number()) {
          fail("model.params." + item.key(), "expected a number");
        }
        sc.model_params[item.key()] = item.value().get<double>();
      }
    }
  }

  sc.target = parse_target(doc.at("target"), "target");
  sc.grid = parse_grid(doc.at("grid"), "grid");

  {
    const json& s = doc.at("solver");
    check_keys(s, "solver",
               {"mode", "cfl", "convergence_tol", "max_horizon", "store_every"},
               {"mode", "max_horizon"});
    const std::string mode = get_string(s, "solver", "mode");
    if (mode == "liveness") {
      sc.mode = ReachMode::Liveness;
    } else if (mode == "safety") {
      sc.mode = ReachMode::Safety;
    } else {
      fail("solver.mode", "expected 'liveness' or 'safety'");
    }
    sc.solver.cfl = get_double_or(s, "solver", "cfl", 0.5);
    sc.solver.convergence_tol =
        get_double_or(s, "solver", "convergence_tol", 1e-3);
    sc.solver.max_horizon = get_double(s, "solver", "max_horizon");
    sc.solver.store_every =
        static_cast<int>(get_int_or(s, "solver", "store_every", 1));
    if (!(sc.solver.cfl > 0.0) || sc.solver.cfl > 0.9) {
      fail("solver.cfl", "must be in (0, 0.9]");
    }
    if (sc.solver.max_horizon < 0.0) fail("solver.max_horizon", "must be >= 0");
    if (sc.solver.store_every < 1) fail("solver.store_every", "must be >= 1");
  }

  if (doc.contains("filter")) {
    const PolicyChoice choice = parse_policy(doc.at("filter"), "filter", sc.mode);
    sc.policy = choice.policy;
    sc.filter = choice.filter;
  } else {
    sc.policy = ControllerPolicy::Filtered;
    sc.filter.problem = sc.mode;
  }

  if (doc.contains("nominal")) {
    sc.nominal = parse_nominal(doc.at("nominal"), "nominal");
  }

  if (doc.contains("sim")) {
    const json& s = doc.at("sim");
    check_keys(s, "sim", {"x0", "dt", "duration", "disturbance"},
               {"x0", "duration"});
    const auto x0 = get_double_array(s, "sim", "x0");
    sc.x0.resize(static_cast<int>(x0.size()));
    for (size_t i = 0; i < x0.size(); ++i) sc.x0[static_cast<int>(i)] = x0[i];
    sc.sim_dt = get_double_or(s, "sim", "dt", 0.01);
    sc.duration = get_double(s, "sim", "duration");
    if (!(sc.sim_dt > 0.0)) fail("sim.dt", "must be positive");
    if (sc.duration < 0.0) fail("sim.duration", "must be >= 0");
    if (s.contains("disturbance")) {
      sc.disturbance = parse_disturbance(s.at("disturbance"), "sim.disturbance");
    }
  }

  if (doc.contains("compare")) {
    const json& arr = doc.at("compare");
    if (!arr.is_array()) fail("compare", "expected an array");
    int idx = 0;
    for (const auto& entry : arr) {
      file.compare.push_back(parse_policy(
          entry, "compare[" + std::to_string(idx++) + "]", sc.mode));
    }
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    check_keys(s, "sweep", {"gammas"}, {"gammas"});
    file.sweep_gammas = get_double_array(s, "sweep", "gammas");
    for (double g : file.sweep_gammas) {
      if (g < 0.0) fail("sweep.gammas", "gammas must be >= 0");
    }
  }

  // Cross-section checks that need the model.
  const auto model = make_model(sc.model_name, sc.model_params);
  if (sc.grid.num_dims() != model->state_dim()) {
    fail("grid", "dimension count does not match the model state dimension");
  }
  if (doc.contains("sim")) {
    if (static_cast<int>(sc.x0.size()) != model->state_dim()) {
      fail("sim.x0", "dimension does not match the model state dimension");
    }
    if (!sc.grid.contains(sc.grid.wrap(sc.x0))) {
      fail("sim.x0", "lies outside the grid domain");
    }
    if (sc.disturbance.kind == DisturbancePolicy::Kind::ConstantVector &&
        static_cast<int>(sc.disturbance.constant.size()) !=
            model->disturbance_dim()) {
      fail("sim.disturbance.vector", "dimension does not match the model");
    }
  }
  return file;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str());
}

namespace {

constexpr char kMagic[4] = {'H', 'J', 'V', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is, const std::string& what) {
  T value;
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw NumericalError("archive truncated while reading " + what);
  return value;
}

}  // namespace

void save_value_function(const ValueFunction& vf, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("archive: cannot open " + path + " for writing");
  os.write(kMagic, 4);
  write_raw(os, kVersion);
  std::uint8_t mode_byte = vf.mode() == ReachMode::Safety ? 1 : 0;
  if (vf.converged()) mode_byte |= 2;
  write_raw(os, mode_byte);
  const std::uint8_t ndims = static_cast<std::uint8_t>(vf.grid().num_dims());
  write_raw(os, ndims);
  for (int d = 0; d < vf.grid().num_dims(); ++d) {
    const GridDim& g = vf.grid().dim(d);
    write_raw(os, static_cast<std::uint64_t>(g.count));
    write_raw(os, g.lo);
    write_raw(os, g.hi);
    write_raw(os, static_cast<std::uint8_t>(g.periodic ? 1 : 0));
  }
  write_raw(os, static_cast<std::uint64_t>(vf.times().size()));
  for (double t : vf.times()) write_raw(os, t);
  for (int k = 0; k < vf.num_slices(); ++k) {
    const auto& data = vf.slice(k).data;
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(double)));
  }
  if (!os) throw NumericalError("archive: write failed for " + path);
}

ValueFunction load_value_function(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("archive: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("archive: bad magic in " + path);
  }
  const auto version = read_raw<std::uint32_t>(is, "version");
  if (version != kVersion) {
    throw ConfigError("archive: unsupported version " + std::to_string(version));
  }
  const auto mode_byte = read_raw<std::uint8_t>(is, "mode");
  const ReachMode mode = (mode_byte & 1) ? ReachMode::Safety : ReachMode::Liveness;
  const bool converged = (mode_byte & 2) != 0;
  const auto ndims = read_raw<std::uint8_t>(is, "dim count");
  std::vector<GridDim> dims;
  for (int d = 0; d < ndims; ++d) {
    GridDim g;
    g.count = static_cast<int>(read_raw<std::uint64_t>(is, "dim count"));
    g.lo = read_raw<double>(is, "dim lo");
    g.hi = read_raw<double>(is, "dim hi");
    g.periodic = read_raw<std::uint8_t>(is, "dim periodic") != 0;
    dims.push_back(g);
  }
  GridDef grid(std::move(dims));
  const auto ntimes = read_raw<std::uint64_t>(is, "time count");
  std::vector<double> times;
  for (std::uint64_t k = 0; k < ntimes; ++k) {
    times.push_back(read_raw<double>(is, "time"));
  }
  std::vector<ScalarField> slices;
  for (std::uint64_t k = 0; k < ntimes; ++k) {
    ScalarField f;
    f.grid = grid;
    f.data.resize(static_cast<size_t>(grid.num_points()));
    is.read(reinterpret_cast<char*>(f.data.data()),
            static_cast<std::streamsize>(f.data.size() * sizeof(double)));
    if (!is) throw NumericalError("archive truncated while reading slices");
    slices.push_back(std::move(f));
  }
  const double horizon = times.empty() ? 0.0 : times.back();
  return ValueFunction(grid, std::move(times), std::move(slices), mode,
                       converged, horizon);
}

std::string describe_archive(const std::string& path) {
  const ValueFunction vf = load_value_function(path);
  std::ostringstream os;
  os << "mode: " << to_string(vf.mode()) << "\n";
  os << "converged: " << (vf.converged() ? "true" : "false") << "\n";
  os << "dims:";
  for (int d = 0; d < vf.grid().num_dims(); ++d) {
    const GridDim& g = vf.grid().dim(d);
    os << " [" << g.count << " pts, " << g.lo << ".." << g.hi
       << (g.periodic ? ", periodic]" : "]");
  }
  os << "\n";
  os << "slices: " << vf.num_slices() << "\n";
  os << "time range: " << vf.times().front() << " .. " << vf.times().back()
     << "\n";
  return os.str();
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_trajectory_csv(const TrajectoryRecord& record, int state_dim,
                          int control_dim, int disturbance_dim,
                          std::ostream& os, bool with_timing) {
  os << "t";
  for (int i = 0; i < state_dim; ++i) os << ",x" << i;
  for (int i = 0; i < control_dim; ++i) os << ",u" << i;
  for (int i = 0; i < disturbance_dim; ++i) os << ",d" << i;
  os << ",value,branch,active,step_ns\n";
  for (const TrajectoryStep& step : record.steps) {
    os << fmt_double(step.t);
    for (int i = 0; i < state_dim; ++i) os << "," << fmt_double(step.x[i]);
    for (int i = 0; i < control_dim; ++i) os << "," << fmt_double(step.u[i]);
    for (int i = 0; i < disturbance_dim; ++i) os << "," << fmt_double(step.d[i]);
    os << "," << fmt_double(step.value) << "," << to_string(step.branch) << ","
       << (step.active ? 1 : 0) << "," << (with_timing ? step.step_ns : 0)
       << "\n";
  }
}

namespace {

json metrics_json_object(const MetricsReport& m, bool with_timing) {
  json j;
  j["label"] = m.label;
  j["termination"] = m.termination;
  j["num_steps"] = m.num_steps;
  j["min_signed_distance"] = m.min_signed_distance;
  j["final_signed_distance"] = m.final_signed_distance;
  j["total_cost"] = m.total_cost;
  j["control_energy"] = m.control_energy;
  j["jerk_energy"] = m.jerk_energy;
  j["mean_step_compute_ns"] = with_timing ? m.mean_step_compute_ns : 0.0;
  j["max_step_compute_ns"] = with_timing ? m.max_step_compute_ns : 0;
  j["qp_fallback_count"] = m.qp_fallback_count;
  j["active_steps"] = m.active_steps;
  return j;
}

}  // namespace

std::string metrics_to_json(const MetricsReport& metrics, bool with_timing) {
  json j;
  j["schema_version"] = 1;
  j["metrics"] = metrics_json_object(metrics, with_timing);
  return j.dump(2) + "\n";
}

std::string reports_to_json(const std::vector<MetricsReport>& reports,
                            bool with_timing) {
  json j;
  j["schema_version"] = 1;
  j["reports"] = json::array();
  for (const auto& r : reports) {
    j["reports"].push_back(metrics_json_object(r, with_timing));
  }
  return j.dump(2) + "\n";
}

std::string sweep_to_json(const std::vector<SweepRow>& rows) {
  json j;
  j["schema_version"] = 1;
  j["rows"] = json::array();
  for (const auto& r : rows) {
    json row;
    row["gamma"] = r.gamma;
    row["total_cost"] = r.total_cost;
    row["normalized_cost"] = r.normalized_cost;
    j["rows"].push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace reachfilter

#ifndef REACHFILTER_IO_HPP
#define REACHFILTER_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "reachfilter/sim.hpp"

namespace reachfilter {

/// Scenario-file validation failure; the message names the offending key
/// path (e.g. "solver.max_horizon").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Parsed scenario document: the closed-loop scenario itself plus the
/// optional comparison roster and sweep gammas used by batch commands.
struct ScenarioFile {
  Scenario scenario;
  std::vector<PolicyChoice> compare;
  std::vector<double> sweep_gammas;
};

/// Parses and validates a JSON scenario document. Unknown keys anywhere in
/// the document are rejected.
ScenarioFile parse_scenario_text(const std::string& text);
ScenarioFile load_scenario(const std::string& path);

/// Binary value-function archive:
///   magic "HJVF", format version u32, mode byte (bit0 safety, bit1
///   converged), dim count u8, per-dim {count u64, lo f64, hi f64,
///   periodic u8}, time count u64, times f64 ascending, then slices as
///   little-endian f64 in C-order, time-major.
void save_value_function(const ValueFunction& vf, const std::string& path);
ValueFunction load_value_function(const std::string& path);

/// Human-readable archive metadata (for the `info` command).
std::string describe_archive(const std::string& path);

/// Trajectory CSV with header t, x0.., u0.., d0.., value, branch, active,
/// step_ns. Timing columns are zeroed unless with_timing is set so reruns
/// are byte-identical.
void write_trajectory_csv(const TrajectoryRecord& record, int state_dim,
                          int control_dim, int disturbance_dim,
                          std::ostream& os, bool with_timing);

std::string metrics_to_json(const MetricsReport& metrics, bool with_timing);
std::string reports_to_json(const std::vector<MetricsReport>& reports,
                            bool with_timing);
std::string sweep_to_json(const std::vector<SweepRow>& rows);

}  // namespace reachfilter

#endif  // REACHFILTER_IO_HPP

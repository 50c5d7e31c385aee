#ifndef REACHFILTER_TYPES_HPP
#define REACHFILTER_TYPES_HPP

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace reachfilter {

// All registered systems fit in these caps; vectors stay on the stack.
inline constexpr int kMaxStateDim = 6;
inline constexpr int kMaxControlDim = 2;
inline constexpr int kMaxDisturbanceDim = 2;

using StateVec =
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxStateDim, 1>;
using ControlVec =
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxControlDim, 1>;
using DisturbanceVec =
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor,
                  kMaxDisturbanceDim, 1>;

// f2 (n x m) and f3 (n x k) blocks of a control-affine decomposition.
using ControlJacobian =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                  kMaxStateDim, kMaxControlDim>;
using DisturbanceJacobian =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                  kMaxStateDim, kMaxDisturbanceDim>;

/// Whether a reachability problem drives the system into the target set
/// (liveness: control minimizes value) or away from it (safety: control
/// maximizes value, disturbance minimizes).
enum class ReachMode { Liveness, Safety };

inline const char* to_string(ReachMode m) {
  return m == ReachMode::Liveness ? "liveness" : "safety";
}

/// Contract violation (bad dimensions, invalid configuration values).
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what)
      : std::invalid_argument(what) {}
};

/// Numerical failure during a solve or simulation (NaN blow-up etc.).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace reachfilter

#endif  // REACHFILTER_TYPES_HPP

#ifndef REACHFILTER_GRID_HPP
#define REACHFILTER_GRID_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "reachfilter/types.hpp"

namespace reachfilter {

/// Query outside the non-periodic extent of a grid.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct GridDim {
  int count = 0;
  double lo = 0.0;
  double hi = 0.0;
  bool periodic = false;
};

/// Uniform rectangular grid. Data layout is C-order with the last dimension
/// fastest. Periodic dimensions identify hi with lo (period hi - lo), so
/// their nodes run lo, lo+h, ..., hi-h.
class GridDef {
 public:
  GridDef() = default;
  explicit GridDef(std::vector<GridDim> dims);

  int num_dims() const { return static_cast<int>(dims_.size()); }
  std::int64_t num_points() const { return num_points_; }
  const GridDim& dim(int d) const { return dims_[d]; }
  const std::vector<GridDim>& dims() const { return dims_; }

  double spacing(int d) const { return spacing_[d]; }
  double max_spacing() const;
  std::int64_t stride(int d) const { return strides_[d]; }

  std::int64_t flat_index(const std::vector<int>& multi) const;
  std::vector<int> multi_index(std::int64_t flat) const;
  StateVec node(std::int64_t flat) const;
  StateVec node(const std::vector<int>& multi) const;

  /// Wraps periodic coordinates into [lo, hi); other dims pass through.
  StateVec wrap(const StateVec& x) const;
  /// True when every non-periodic coordinate of wrap(x) lies in [lo, hi].
  bool contains(const StateVec& x, double tol = 1e-12) const;

  bool operator==(const GridDef& other) const;

 private:
  std::vector<GridDim> dims_;
  std::vector<double> spacing_;
  std::vector<std::int64_t> strides_;
  std::int64_t num_points_ = 0;
};

/// Scalar samples over a grid's nodes; immutable in spirit once filled.
struct ScalarField {
  GridDef grid;
  std::vector<double> data;

  double at(std::int64_t flat) const { return data[static_cast<size_t>(flat)]; }
  double& at(std::int64_t flat) { return data[static_cast<size_t>(flat)]; }
};

enum class GradientMode { Central, Left, Right };

struct GradientSample {
  StateVec grad;
  /// Central mode had to fall back to a one-sided stencil at a non-periodic
  /// boundary for at least one contributing node.
  bool boundary_fallback = false;
};

/// Samples f at every node. Throws NumericalError naming the offending node
/// if f produces a non-finite value.
ScalarField sample_function(const GridDef& grid,
                            const std::function<double(const StateVec&)>& f);

/// Multilinear interpolation; exact at nodes, wraps periodic dims. Throws
/// DomainError for out-of-bounds non-periodic coordinates.
double interpolate(const ScalarField& field, const StateVec& x);

/// Finite-difference gradient of the interpolated field: second-order
/// stencils (or one-sided for Left/Right) at the enclosing cell's nodes,
/// then multilinear interpolation of those node gradients.
GradientSample gradient(const ScalarField& field, const StateVec& x,
                        GradientMode mode);

}  // namespace reachfilter

#endif  // REACHFILTER_GRID_HPP

#include "reachfilter/grid.hpp"

#include <cmath>
#include <sstream>

namespace reachfilter {

GridDef::GridDef(std::vector<GridDim> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ContractError("grid needs at least one dimension");
  if (dims_.size() > static_cast<size_t>(kMaxStateDim)) {
    throw ContractError("grid dimension exceeds supported maximum");
  }
  spacing_.resize(dims_.size());
  strides_.resize(dims_.size());
  num_points_ = 1;
  for (size_t d = 0; d < dims_.size(); ++d) {
    const GridDim& g = dims_[d];
    if (g.count < 3) {
      throw ContractError("grid dim " + std::to_string(d) +
                          " needs at least 3 points");
    }
    if (!(g.lo < g.hi)) {
      throw ContractError("grid dim " + std::to_string(d) + " needs lo < hi");
    }
    spacing_[d] = (g.hi - g.lo) / (g.periodic ? g.count : g.count - 1);
    num_points_ *= g.count;
  }
  std::int64_t stride = 1;
  for (int d = num_dims() - 1; d >= 0; --d) {
    strides_[d] = stride;
    stride *= dims_[d].count;
  }
}

double GridDef::max_spacing() const {
  double h = 0.0;
  for (int d = 0; d < num_dims(); ++d) h = std::max(h, spacing_[d]);
  return h;
}

std::int64_t GridDef::flat_index(const std::vector<int>& multi) const {
  std::int64_t flat = 0;
  for (int d = 0; d < num_dims(); ++d) flat += strides_[d] * multi[d];
  return flat;
}

std::vector<int> GridDef::multi_index(std::int64_t flat) const {
  std::vector<int> multi(dims_.size());
  for (int d = 0; d < num_dims(); ++d) {
    multi[d] = static_cast<int>(flat / strides_[d]);
    flat -= multi[d] * strides_[d];
  }
  return multi;
}

StateVec GridDef::node(std::int64_t flat) const {
  StateVec x(num_dims());
  for (int d = 0; d < num_dims(); ++d) {
    const int i = static_cast<int>(flat / strides_[d]);
    flat -= static_cast<std::int64_t>(i) * strides_[d];
    x[d] = dims_[d].lo + i * spacing_[d];
  }
  return x;
}

StateVec GridDef::node(const std::vector<int>& multi) const {
  StateVec x(num_dims());
  for (int d = 0; d < num_dims(); ++d) x[d] = dims_[d].lo + multi[d] * spacing_[d];
  return x;
}

StateVec GridDef::wrap(const StateVec& x) const {
  StateVec y = x;
  for (int d = 0; d < num_dims(); ++d) {
    if (!dims_[d].periodic) continue;
    const double period = dims_[d].hi - dims_[d].lo;
    double v = std::fmod(y[d] - dims_[d].lo, period);
    if (v < 0.0) v += period;
    y[d] = dims_[d].lo + v;
  }
  return y;
}

bool GridDef::contains(const StateVec& x, double tol) const {
  for (int d = 0; d < num_dims(); ++d) {
    if (dims_[d].periodic) continue;
    if (x[d] < dims_[d].lo - tol || x[d] > dims_[d].hi + tol) return false;
  }
  return true;
}

bool GridDef::operator==(const GridDef& other) const {
  if (dims_.size() != other.dims_.size()) return false;
  for (size_t d = 0; d < dims_.size(); ++d) {
    if (dims_[d].count != other.dims_[d].count ||
        dims_[d].lo != other.dims_[d].lo || dims_[d].hi != other.dims_[d].hi ||
        dims_[d].periodic != other.dims_[d].periodic) {
      return false;
    }
  }
  return true;
}

ScalarField sample_function(
    const GridDef& grid, const std::function<double(const StateVec&)>& f) {
  ScalarField field;
  field.grid = grid;
  field.data.resize(static_cast<size_t>(grid.num_points()));
  const std::int64_t n = grid.num_points();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    field.data[static_cast<size_t>(i)] = f(grid.node(i));
  }
  for (std::int64_t i = 0; i < n; ++i) {
    if (!std::isfinite(field.data[static_cast<size_t>(i)])) {
      std::ostringstream oss;
      oss << "non-finite sample at node " << i << " (";
      const StateVec x = grid.node(i);
      for (int d = 0; d < grid.num_dims(); ++d) {
        oss << (d ? ", " : "") << x[d];
      }
      oss << ")";
      throw NumericalError(oss.str());
    }
  }
  return field;
}

namespace {

struct CellLocation {
  int base[kMaxStateDim];    // lower corner node index per dim
  double frac[kMaxStateDim]; // in [0, 1]
};

CellLocation locate_cell(const GridDef& grid, const StateVec& x_raw) {
  const StateVec x = grid.wrap(x_raw);
  CellLocation loc;
  for (int d = 0; d < grid.num_dims(); ++d) {
    const GridDim& g = grid.dim(d);
    const double h = grid.spacing(d);
    if (!g.periodic && (x[d] < g.lo - 1e-12 || x[d] > g.hi + 1e-12)) {
      std::ostringstream oss;
      oss << "coordinate " << x[d] << " outside [" << g.lo << ", " << g.hi
          << "] on dim " << d;
      throw DomainError(oss.str());
    }
    double t = (x[d] - g.lo) / h;
    int i = static_cast<int>(std::floor(t));
    const int max_base = g.periodic ? g.count - 1 : g.count - 2;
    if (i < 0) i = 0;
    if (i > max_base) i = max_base;
    loc.base[d] = i;
    loc.frac[d] = (x[d] - (g.lo + i * h)) / h;
    if (loc.frac[d] < 0.0) loc.frac[d] = 0.0;
    if (loc.frac[d] > 1.0) loc.frac[d] = 1.0;
  }
  return loc;
}

int wrap_node(int i, int count) {
  if (i < 0) return i + count;
  if (i >= count) return i - count;
  return i;
}

/// One-dimensional finite difference of the node values along dim d at the
/// node with the given multi-index. Returns the derivative and whether a
/// central request degraded to one-sided at a non-periodic edge.
std::pair<double, bool> node_derivative(const ScalarField& field,
                                        const std::vector<int>& multi,
                                        std::int64_t flat, int d,
                                        GradientMode mode) {
  const GridDef& grid = field.grid;
  const GridDim& g = grid.dim(d);
  const double h = grid.spacing(d);
  const std::int64_t stride = grid.stride(d);
  const int i = multi[d];

  auto value_at = [&](int j) {
    return field.at(flat + static_cast<std::int64_t>(j - i) * stride);
  };
  auto value_wrapped = [&](int j) {
    const int jw = wrap_node(j, g.count);
    return field.at(flat + static_cast<std::int64_t>(jw - i) * stride);
  };

  if (g.periodic) {
    switch (mode) {
      case GradientMode::Central:
        return {(value_wrapped(i + 1) - value_wrapped(i - 1)) / (2.0 * h), false};
      case GradientMode::Left:
        return {(value_at(i) - value_wrapped(i - 1)) / h, false};
      case GradientMode::Right:
        return {(value_wrapped(i + 1) - value_at(i)) / h, false};
    }
  }

  const bool at_lo = (i == 0);
  const bool at_hi = (i == g.count - 1);
  switch (mode) {
    case GradientMode::Central:
      if (at_lo) return {(value_at(i + 1) - value_at(i)) / h, true};
      if (at_hi) return {(value_at(i) - value_at(i - 1)) / h, true};
      return {(value_at(i + 1) - value_at(i - 1)) / (2.0 * h), false};
    case GradientMode::Left:
      if (at_lo) return {(value_at(i + 1) - value_at(i)) / h, true};
      return {(value_at(i) - value_at(i - 1)) / h, false};
    case GradientMode::Right:
      if (at_hi) return {(value_at(i) - value_at(i - 1)) / h, true};
      return {(value_at(i + 1) - value_at(i)) / h, false};
  }
  return {0.0, false};
}

}  // namespace

double interpolate(const ScalarField& field, const StateVec& x) {
  const GridDef& grid = field.grid;
  if (static_cast<int>(x.size()) != grid.num_dims()) {
    throw ContractError("interpolate: coordinate dimension mismatch");
  }
  const CellLocation loc = locate_cell(grid, x);
  const int n = grid.num_dims();
  double acc = 0.0;
  const int corners = 1 << n;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::int64_t flat = 0;
    for (int d = 0; d < n; ++d) {
      const bool upper = (c >> d) & 1;
      w *= upper ? loc.frac[d] : 1.0 - loc.frac[d];
      int idx = loc.base[d] + (upper ? 1 : 0);
      if (grid.dim(d).periodic) idx = wrap_node(idx, grid.dim(d).count);
      flat += grid.stride(d) * idx;
    }
    if (w != 0.0) acc += w * field.at(flat);
  }
  return acc;
}

GradientSample gradient(const ScalarField& field, const StateVec& x,
                        GradientMode mode) {
  const GridDef& grid = field.grid;
  if (static_cast<int>(x.size()) != grid.num_dims()) {
    throw ContractError("gradient: coordinate dimension mismatch");
  }
  const CellLocation loc = locate_cell(grid, x);
  const int n = grid.num_dims();

  GradientSample out;
  out.grad = StateVec::Zero(n);
  const int corners = 1 << n;
  std::vector<int> multi(n);
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::int64_t flat = 0;
    for (int d = 0; d < n; ++d) {
      const bool upper = (c >> d) & 1;
      w *= upper ? loc.frac[d] : 1.0 - loc.frac[d];
      int idx = loc.base[d] + (upper ? 1 : 0);
      if (grid.dim(d).periodic) idx = wrap_node(idx, grid.dim(d).count);
      multi[d] = idx;
      flat += grid.stride(d) * idx;
    }
    if (w == 0.0) continue;
    for (int d = 0; d < n; ++d) {
      const auto [deriv, fell_back] = node_derivative(field, multi, flat, d, mode);
      out.grad[d] += w * deriv;
      out.boundary_fallback = out.boundary_fallback || fell_back;
    }
  }
  return out;
}

}  // namespace reachfilter

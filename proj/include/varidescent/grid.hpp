#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace varidescent {

inline constexpr int kMaxRank = 4;

/// Error thrown on contract violations (bad shapes, invalid input, I/O).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Open box \prod_i (a_i, b_i), 1 <= rank <= 4.
struct BoxDomain {
  std::array<double, kMaxRank> lower{};
  std::array<double, kMaxRank> upper{};
  int rank = 0;

  BoxDomain() = default;
  BoxDomain(std::span<const double> lo, std::span<const double> hi);

  double length(int axis) const { return upper[axis] - lower[axis]; }
  double volume() const;
};

/// Placement of samples along one axis: grid nodes a + k*h (N+1 of them)
/// or cell centers a + (k+1/2)*h (N of them).
enum class Placement { Nodes, Cells };

/// Uniform tensor grid over a box. Node grid carries u, cell grid carries v.
struct UniformGrid {
  BoxDomain domain;
  std::array<int, kMaxRank> cells{};
  std::array<double, kMaxRank> spacing{};

  int rank() const { return domain.rank; }
  double node_coord(int axis, int k) const {
    return domain.lower[axis] + k * spacing[axis];
  }
  double cell_coord(int axis, int k) const {
    return domain.lower[axis] + (k + 0.5) * spacing[axis];
  }
  double cell_volume() const;
  std::size_t node_count() const;
  std::size_t cell_count() const;

  bool operator==(const UniformGrid& o) const;
};

/// cells[i] >= 2 required on every axis.
UniformGrid build_grid(const BoxDomain& domain, std::span<const int> cells);

/// Dense d-component field sampled on a tensor grid. Placement is tracked
/// per axis so that partially lifted fields (nodes along one axis, cells
/// along the rest) are first-class values.
///
/// Layout: point index runs row-major with x1 fastest; components are
/// interleaved, element (p, c) lives at data[p*components + c].
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(const UniformGrid& grid, Placement placement, int components = 1);
  GridFunction(const UniformGrid& grid,
               std::array<Placement, kMaxRank> axis_placement, int components);

  static GridFunction zeros(const UniformGrid& grid, Placement placement,
                            int components = 1) {
    return GridFunction(grid, placement, components);
  }

  const UniformGrid& grid() const { return grid_; }
  int rank() const { return grid_.rank(); }
  int components() const { return components_; }
  Placement axis_placement(int axis) const { return placement_[axis]; }
  const std::array<Placement, kMaxRank>& placements() const { return placement_; }

  /// True when every axis shares one placement.
  bool uniform_placement(Placement p) const;

  /// Number of samples along an axis (N+1 for nodes, N for cells).
  int extent(int axis) const;
  /// Coordinate of sample k along an axis under this field's placement.
  double coord(int axis, int k) const;

  std::size_t point_count() const;
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t point, int comp) {
    return data_[point * components_ + comp];
  }
  double at(std::size_t point, int comp) const {
    return data_[point * components_ + comp];
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Flat point index of a multi-dimensional sample index (x1 fastest).
  std::size_t flat_index(std::span<const int> idx) const;
  /// Inverse of flat_index.
  void unflatten(std::size_t point, std::span<int> idx) const;
  /// Coordinates of a flat point index.
  void point_coords(std::size_t point, std::span<double> x) const;

  bool same_layout(const GridFunction& o) const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double s);
  friend GridFunction operator+(GridFunction a, const GridFunction& b) {
    a += b;
    return a;
  }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) {
    a -= b;
    return a;
  }
  friend GridFunction operator*(GridFunction a, double s) {
    a *= s;
    return a;
  }

  /// this += s * o
  void axpy(double s, const GridFunction& o);

  double max_abs() const;
  /// Throws if any entry is NaN or infinite.
  void require_finite(const char* what) const;

 private:
  UniformGrid grid_{};
  std::array<Placement, kMaxRank> placement_{};
  int components_ = 0;
  std::vector<double> data_;
};

/// Deterministic pairwise summation; the result does not depend on thread
/// count because it is always reduced in this fixed order.
double pairwise_sum(std::span<const double> values);

/// L2 inner product with the quadrature matched to placement: midpoint
/// weights on cell axes, trapezoid weights on node axes. Sums over
/// components.
double inner_product_l2(const GridFunction& f, const GridFunction& g);

/// sqrt(inner_product_l2(f, f))
double norm_l2(const GridFunction& f);

}  // namespace varidescent

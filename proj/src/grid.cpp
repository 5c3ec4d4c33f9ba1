#include "varidescent/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace varidescent {

BoxDomain::BoxDomain(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != hi.size())
    throw Error("BoxDomain: lower has " + std::to_string(lo.size()) +
                " entries but upper has " + std::to_string(hi.size()));
  if (lo.empty() || lo.size() > kMaxRank)
    throw Error("BoxDomain: rank must be between 1 and " +
                std::to_string(kMaxRank) + ", got " + std::to_string(lo.size()));
  rank = static_cast<int>(lo.size());
  for (int i = 0; i < rank; ++i) {
    if (!(lo[i] < hi[i]))
      throw Error("BoxDomain: need lower < upper on axis " + std::to_string(i + 1));
    lower[i] = lo[i];
    upper[i] = hi[i];
  }
}

double BoxDomain::volume() const {
  double v = 1.0;
  for (int i = 0; i < rank; ++i) v *= length(i);
  return v;
}

double UniformGrid::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < rank(); ++i) v *= spacing[i];
  return v;
}

std::size_t UniformGrid::node_count() const {
  std::size_t n = 1;
  for (int i = 0; i < rank(); ++i) n *= static_cast<std::size_t>(cells[i] + 1);
  return n;
}

std::size_t UniformGrid::cell_count() const {
  std::size_t n = 1;
  for (int i = 0; i < rank(); ++i) n *= static_cast<std::size_t>(cells[i]);
  return n;
}

bool UniformGrid::operator==(const UniformGrid& o) const {
  if (domain.rank != o.domain.rank) return false;
  for (int i = 0; i < domain.rank; ++i) {
    if (domain.lower[i] != o.domain.lower[i]) return false;
    if (domain.upper[i] != o.domain.upper[i]) return false;
    if (cells[i] != o.cells[i]) return false;
  }
  return true;
}

UniformGrid build_grid(const BoxDomain& domain, std::span<const int> cells) {
  if (static_cast<int>(cells.size()) != domain.rank)
    throw Error("build_grid: domain rank " + std::to_string(domain.rank) +
                " does not match cells length " + std::to_string(cells.size()));
  UniformGrid g;
  g.domain = domain;
  for (int i = 0; i < domain.rank; ++i) {
    if (cells[i] < 2)
      throw Error("build_grid: need at least 2 cells on axis " +
                  std::to_string(i + 1) + ", got " + std::to_string(cells[i]));
    g.cells[i] = cells[i];
    g.spacing[i] = domain.length(i) / cells[i];
  }
  return g;
}

GridFunction::GridFunction(const UniformGrid& grid, Placement placement,
                           int components)
    : grid_(grid), components_(components) {
  placement_.fill(placement);
  if (components < 1) throw Error("GridFunction: components must be positive");
  data_.assign(point_count() * static_cast<std::size_t>(components), 0.0);
}

GridFunction::GridFunction(const UniformGrid& grid,
                           std::array<Placement, kMaxRank> axis_placement,
                           int components)
    : grid_(grid), placement_(axis_placement), components_(components) {
  if (components < 1) throw Error("GridFunction: components must be positive");
  data_.assign(point_count() * static_cast<std::size_t>(components), 0.0);
}

bool GridFunction::uniform_placement(Placement p) const {
  for (int i = 0; i < rank(); ++i)
    if (placement_[i] != p) return false;
  return true;
}

int GridFunction::extent(int axis) const {
  return placement_[axis] == Placement::Nodes ? grid_.cells[axis] + 1
                                              : grid_.cells[axis];
}

double GridFunction::coord(int axis, int k) const {
  return placement_[axis] == Placement::Nodes ? grid_.node_coord(axis, k)
                                              : grid_.cell_coord(axis, k);
}

std::size_t GridFunction::point_count() const {
  std::size_t n = 1;
  for (int i = 0; i < rank(); ++i) n *= static_cast<std::size_t>(extent(i));
  return n;
}

std::size_t GridFunction::flat_index(std::span<const int> idx) const {
  std::size_t flat = 0;
  std::size_t stride = 1;
  for (int i = 0; i < rank(); ++i) {
    flat += static_cast<std::size_t>(idx[i]) * stride;
    stride *= static_cast<std::size_t>(extent(i));
  }
  return flat;
}

void GridFunction::unflatten(std::size_t point, std::span<int> idx) const {
  for (int i = 0; i < rank(); ++i) {
    const auto e = static_cast<std::size_t>(extent(i));
    idx[i] = static_cast<int>(point % e);
    point /= e;
  }
}

void GridFunction::point_coords(std::size_t point, std::span<double> x) const {
  std::array<int, kMaxRank> idx{};
  unflatten(point, std::span<int>(idx.data(), static_cast<std::size_t>(rank())));
  for (int i = 0; i < rank(); ++i) x[i] = coord(i, idx[i]);
}

bool GridFunction::same_layout(const GridFunction& o) const {
  if (!(grid_ == o.grid_) || components_ != o.components_) return false;
  for (int i = 0; i < rank(); ++i)
    if (placement_[i] != o.placement_[i]) return false;
  return true;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (!same_layout(o)) throw Error("GridFunction: layout mismatch in +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  if (!same_layout(o)) throw Error("GridFunction: layout mismatch in -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

void GridFunction::axpy(double s, const GridFunction& o) {
  if (!same_layout(o)) throw Error("GridFunction: layout mismatch in axpy");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

void GridFunction::require_finite(const char* what) const {
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (!std::isfinite(data_[i]))
      throw Error(std::string(what) + ": non-finite value at entry " +
                  std::to_string(i));
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 16;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double inner_product_l2(const GridFunction& f, const GridFunction& g) {
  if (!f.same_layout(g))
    throw Error("inner_product_l2: mismatched grid, placement, or components");
  const int n = f.rank();
  std::array<int, kMaxRank> idx{};
  std::vector<double> terms(f.size());
  const std::size_t points = f.point_count();
  for (std::size_t p = 0; p < points; ++p) {
    f.unflatten(p, std::span<int>(idx.data(), static_cast<std::size_t>(n)));
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      const double h = f.grid().spacing[i];
      if (f.axis_placement(i) == Placement::Cells) {
        w *= h;
      } else {
        const bool edge = idx[i] == 0 || idx[i] == f.grid().cells[i];
        w *= edge ? 0.5 * h : h;
      }
    }
    for (int c = 0; c < f.components(); ++c)
      terms[p * f.components() + c] = w * f.at(p, c) * g.at(p, c);
  }
  return pairwise_sum(terms);
}

double norm_l2(const GridFunction& f) {
  return std::sqrt(std::max(0.0, inner_product_l2(f, f)));
}

}  // namespace varidescent

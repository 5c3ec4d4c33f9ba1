#pragma once

#include "varidescent/grid.hpp"

namespace varidescent {

/// Binary multi-index selecting a subset of axes.
struct MultiIndex {
  std::array<bool, kMaxRank> bits{};
  int rank = 0;

  MultiIndex() = default;
  MultiIndex(std::initializer_list<bool> b);
  static MultiIndex from_mask(unsigned mask, int rank);

  int order() const;  // |alpha|
  MultiIndex complement() const;
  bool operator[](int axis) const { return bits[axis]; }
};

/// Result of the discrete L0 membership check: the largest full-line
/// integral residual over all axes.
struct L0Certificate {
  double max_slab_residual = 0.0;
  double tolerance = 0.0;
  bool passes() const { return max_slab_residual <= tolerance; }
};

// ---- staggered one-axis building blocks -----------------------------------

/// Cumulative midpoint integral along one axis; cells -> nodes on that axis.
/// Node k carries h * sum_{j<k} v_j, so node 0 is exactly zero.
GridFunction cumulative_integral_axis(const GridFunction& v, int axis);

/// Tail integral int_{x_i}^{b_i} at cell centers; cells -> cells.
/// Cell k carries h * (v_k / 2 + sum_{j>k} v_j).
GridFunction reversed_cumulative_axis(const GridFunction& w, int axis);

/// Head integral int_{a_i}^{x_i} at cell centers; cells -> cells.
/// Cell k carries h * (sum_{j<k} v_j + v_k / 2). Discrete transpose of
/// reversed_cumulative_axis, and equal to the node average of
/// cumulative_integral_axis.
GridFunction forward_cumulative_axis(const GridFunction& v, int axis);

/// Tail integral anchored at nodes; cells -> nodes on that axis.
/// Node k carries h * sum_{j>=k} v_j, so the last node is exactly zero.
GridFunction node_tail_cumulative_axis(const GridFunction& v, int axis);

/// Midpoint average of the two bracketing nodes; nodes -> cells on one axis.
GridFunction node_average_axis(const GridFunction& u, int axis);

/// Forward difference divided by h; nodes -> cells on one axis.
GridFunction forward_difference_axis(const GridFunction& u, int axis);

/// Trapezoid cumulative integral along one node-placed axis; nodes -> nodes.
GridFunction trapezoid_cumulative_axis(const GridFunction& g, int axis);

// ---- the transformation operators -----------------------------------------

/// T = T_1 ... T_n: full corner-anchored lift, cells -> nodes on every axis.
/// Vanishes identically on every face x_i = a_i.
GridFunction full_lift_T(const GridFunction& v);

/// Values of T v at cell centers (2^n-node averages), as the composition of
/// forward_cumulative_axis over every axis.
GridFunction lift_interp_cells(const GridFunction& v);

/// D^(1,...,1): forward differences over all axes; exact discrete inverse of
/// full_lift_T.
GridFunction mixed_derivative(const GridFunction& u);

/// S_alpha: full midpoint integral over the selected axes, broadcast back
/// onto the cell grid. Requires |alpha| >= 1.
GridFunction slab_integral(const GridFunction& v, const MultiIndex& alpha);

/// Orthogonal projection of L2 onto L0 in closed form:
/// v + sum_{|alpha|>=1} (-1)^|alpha| c_alpha S_alpha v with
/// c_alpha = prod (b_i - a_i)^(-alpha_i).
GridFunction project_L0(const GridFunction& v);

/// Axis derivatives of T v at cell centers: entry i is the composition of
/// forward_cumulative_axis over all axes except i. When lift_grad is
/// non-empty its entries are added (gradient of the boundary lift).
std::vector<GridFunction> lifted_gradient(const GridFunction& v,
                                          std::span<const GridFunction> lift_grad = {});

/// || D^(1,...,1) u ||_2, the norm carried over from L2 by the lift.
double m0_norm(const GridFunction& u);

/// Reports max_i ||S_i v||_inf against a tolerance.
L0Certificate certify_L0(const GridFunction& v, double tol);

}  // namespace varidescent

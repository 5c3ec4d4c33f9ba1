#pragma once

#include <utility>

#include "varidescent/calculus.hpp"
#include "varidescent/problem.hpp"

namespace varidescent {

/// Thrown when a descent direction is requested at a critical point
/// (G(u*) = 0, so no descent direction exists).
struct CriticalPointError : Error {
  CriticalPointError() : Error("critical point: G = 0, no descent direction") {}
};

/// Snapshot of the first-order information at a state v.
struct GradientBundle {
  GridFunction Q;                // integral kernel of F' (cells, d components)
  GridFunction G;                // mode-specific projection of Q
  double grad_norm = 0.0;        // ||G||_2
  double functional_value = 0.0; // F(v)
  BoundaryMode mode = BoundaryMode::AllSides;
};

/// Linear isoperimetric constraint J(u) = c on 2-D scalar problems:
/// J(u) = int (g0 u + g1 D1 u + g2 D2 u) dx.
struct IsoperimetricConstraint {
  AnalyticExpr g0, g1, g2;
  double c = 0.0;
};

/// u and grad u evaluated at cell centers for the mode's lift.
struct CellState {
  GridFunction u;               // d components
  std::vector<GridFunction> z;  // one d-component field per axis
};
CellState evaluate_state(const Problem& problem, const GridFunction& v);

/// u = ubar + (mode lift of v) sampled at grid nodes.
GridFunction lift_to_nodes(const Problem& problem, const GridFunction& v);

/// F(v) = I(ubar + T v) by midpoint quadrature over cells.
double evaluate_functional(const Problem& problem, const GridFunction& v);

/// The integral kernel Q of F': the exact transpose of the discrete lift
/// applied to df/du and df/dz_i at cell centers (tail integrals with
/// half-weight on the originating cell).
GridFunction compute_Q(const Problem& problem, const GridFunction& v);

/// G = Pr_{L0} Q for all-sides boundary conditions, with F(v) and ||G||.
GradientBundle compute_G(const Problem& problem, const GridFunction& v);

/// Mode-specific gradient: the projection of Q matching the constraint set
/// of the mode's lift (see BoundaryMode).
GradientBundle boundary_mode_gradient(const Problem& problem,
                                      const GridFunction& v, BoundaryMode mode);

/// h = -G/||G|| together with its lift to nodes (vanishing on the mode's
/// fixed boundary). Throws CriticalPointError when ||G|| = 0.
std::pair<GridFunction, GridFunction> steepest_direction(
    const Problem& problem, const GradientBundle& bundle);

/// F'[v](h) = <G, h> from a fresh bundle at v.
double directional_derivative(const Problem& problem, const GridFunction& v,
                              const GridFunction& h);

/// df/du - sum_i d/dx_i df/dz_i at interior nodes (zeros on the boundary).
GridFunction euler_lagrange_residual(const Problem& problem,
                                     const GridFunction& v);

/// Steepest-descent bundle tangent to the linear isoperimetric constraint:
/// G = Pr_{L0}(Q_I + lambda Q_J) with lambda chosen so <Pr Q_J, h> = 0.
GradientBundle isoperimetric_direction(const Problem& problem,
                                       const IsoperimetricConstraint& constraint,
                                       const GridFunction& v);

/// J(ubar + T v) by the same cell quadrature as the functional.
double isoperimetric_value(const Problem& problem,
                           const IsoperimetricConstraint& constraint,
                           const GridFunction& v);

/// The kernel Q_J representing the linear functional J on v-space.
GridFunction isoperimetric_kernel(const UniformGrid& grid,
                                  const IsoperimetricConstraint& constraint);

/// Fourth-order corner lift for 2-D scalar fields: double cumulative
/// integration along each axis. v = d^4 w / dx1^2 dx2^2 recovers the input.
GridFunction higher_order_lift(const GridFunction& v);

/// dw/dx_axis for the higher-order lift, node-placed on both axes so the
/// normal derivative can be read off on the faces x_axis = a, b.
GridFunction higher_order_normal_derivative(const GridFunction& v, int axis);

/// Anchored-corner lift of the AdjacentCorner2D mode at nodes:
/// (T~ v)(x) = -int_{a1}^{x1} int_{x2}^{b2} v. Vanishes on x1 = a1 and
/// x2 = b2.
GridFunction corner_lift_nodes(const GridFunction& v);

}  // namespace varidescent

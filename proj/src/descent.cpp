#include "varidescent/descent.hpp"

#include <algorithm>
#include <cmath>

#include "varidescent/parallel.hpp"

namespace varidescent {

namespace {

void require_cells(const GridFunction& v, const char* op) {
  if (!v.uniform_placement(Placement::Cells))
    throw Error(std::string(op) + ": state must be cell-placed");
}

void require_rank(const Problem& problem, const GridFunction& v, const char* op) {
  if (problem.n != v.rank())
    throw Error(std::string(op) + ": problem rank " + std::to_string(problem.n) +
                " does not match grid rank " + std::to_string(v.rank()));
  if (problem.d != v.components())
    throw Error(std::string(op) + ": component count mismatch");
}

bool corner_mode(BoundaryMode mode) { return mode == BoundaryMode::AdjacentCorner2D; }

/// Mode lift values at cell centers (without ubar).
GridFunction mode_lift_cells(BoundaryMode mode, const GridFunction& v) {
  if (!corner_mode(mode)) return lift_interp_cells(v);
  // T~ v = -int_{a1}^{x1} int_{x2}^{b2} v
  GridFunction w = forward_cumulative_axis(reversed_cumulative_axis(v, 1), 0);
  w *= -1.0;
  return w;
}

/// Mode lift derivatives d(lift v)/dx_i at cell centers (without ubar).
std::vector<GridFunction> mode_lift_gradient_cells(BoundaryMode mode,
                                                   const GridFunction& v) {
  if (!corner_mode(mode)) return lifted_gradient(v);
  GridFunction z1 = reversed_cumulative_axis(v, 1);
  z1 *= -1.0;
  GridFunction z2 = forward_cumulative_axis(v, 0);
  std::vector<GridFunction> z;
  z.push_back(std::move(z1));
  z.push_back(std::move(z2));
  return z;
}

GridFunction mode_lift_nodes(BoundaryMode mode, const GridFunction& v) {
  if (!corner_mode(mode)) return full_lift_T(v);
  return corner_lift_nodes(v);
}

/// Transpose of the mode's cell-value lift applied to a cell field.
GridFunction mode_lift_transpose(BoundaryMode mode, const GridFunction& f) {
  if (!corner_mode(mode)) {
    GridFunction out = f;
    for (int i = 0; i < f.rank(); ++i) out = reversed_cumulative_axis(out, i);
    return out;
  }
  GridFunction out = reversed_cumulative_axis(forward_cumulative_axis(f, 1), 0);
  out *= -1.0;
  return out;
}

/// Transpose of the mode's axis-i lift derivative applied to a cell field.
GridFunction mode_gradient_transpose(BoundaryMode mode, const GridFunction& f,
                                     int axis) {
  if (!corner_mode(mode)) {
    GridFunction out = f;
    for (int j = 0; j < f.rank(); ++j)
      if (j != axis) out = reversed_cumulative_axis(out, j);
    return out;
  }
  if (axis == 0) {
    GridFunction out = forward_cumulative_axis(f, 1);
    out *= -1.0;
    return out;
  }
  return reversed_cumulative_axis(f, 0);
}

CellState evaluate_state_mode(const Problem& problem, const GridFunction& v,
                              BoundaryMode mode) {
  require_cells(v, "evaluate_state");
  require_rank(problem, v, "evaluate_state");
  CellState state;
  state.u = problem.lift_values(v.grid(), Placement::Cells);
  state.u += mode_lift_cells(mode, v);
  state.z = problem.lift_gradient_cells(v.grid());
  std::vector<GridFunction> dz = mode_lift_gradient_cells(mode, v);
  for (int i = 0; i < problem.n; ++i)
    state.z[static_cast<std::size_t>(i)] += dz[static_cast<std::size_t>(i)];
  return state;
}

/// df/du and df/dz at every cell of a state.
struct DerivativeFields {
  GridFunction fu;               // d components
  std::vector<GridFunction> fz;  // per axis, d components
};

DerivativeFields lagrangian_derivatives(const Problem& problem,
                                        const CellState& state) {
  const int n = problem.n;
  const int d = problem.d;
  DerivativeFields out;
  out.fu = GridFunction(state.u.grid(), Placement::Cells, d);
  for (int i = 0; i < n; ++i)
    out.fz.emplace_back(state.u.grid(), Placement::Cells, d);
  const std::size_t cells = state.u.point_count();
  GridFunction* fu = &out.fu;
  std::vector<GridFunction>* fz = &out.fz;
  parallel_for(cells, [&](std::size_t lo, std::size_t hi) {
    std::array<double, kMaxRank> x{};
    std::array<double, 8> u{};
    std::array<double, 8 * kMaxRank> z{};
    std::array<double, 8> du{};
    std::array<double, 8 * kMaxRank> dz{};
    for (std::size_t p = lo; p < hi; ++p) {
      state.u.point_coords(p, std::span<double>(x.data(), static_cast<std::size_t>(n)));
      for (int j = 0; j < d; ++j) {
        u[static_cast<std::size_t>(j)] = state.u.at(p, j);
        for (int i = 0; i < n; ++i)
          z[static_cast<std::size_t>(j * n + i)] =
              state.z[static_cast<std::size_t>(i)].at(p, j);
      }
      problem.lagrangian.grad_u(x.data(), u.data(), z.data(), du.data());
      problem.lagrangian.grad_z(x.data(), u.data(), z.data(), dz.data());
      for (int j = 0; j < d; ++j) {
        fu->at(p, j) = du[static_cast<std::size_t>(j)];
        for (int i = 0; i < n; ++i)
          (*fz)[static_cast<std::size_t>(i)].at(p, j) =
              dz[static_cast<std::size_t>(j * n + i)];
      }
    }
  });
  out.fu.require_finite("lagrangian derivative df/du");
  for (const GridFunction& f : out.fz) f.require_finite("lagrangian derivative df/dz");
  return out;
}

GridFunction compute_Q_mode(const Problem& problem, const GridFunction& v,
                            BoundaryMode mode) {
  const CellState state = evaluate_state_mode(problem, v, mode);
  const DerivativeFields der = lagrangian_derivatives(problem, state);
  GridFunction q = mode_lift_transpose(mode, der.fu);
  for (int i = 0; i < problem.n; ++i)
    q += mode_gradient_transpose(mode, der.fz[static_cast<std::size_t>(i)], i);
  q.require_finite("compute_Q");
  return q;
}

double evaluate_functional_mode(const Problem& problem, const GridFunction& v,
                                BoundaryMode mode) {
  const CellState state = evaluate_state_mode(problem, v, mode);
  const int n = problem.n;
  const int d = problem.d;
  const std::size_t cells = state.u.point_count();
  std::vector<double> terms(cells);
  const double vol = v.grid().cell_volume();
  parallel_for(cells, [&](std::size_t lo, std::size_t hi) {
    std::array<double, kMaxRank> x{};
    std::array<double, 8> u{};
    std::array<double, 8 * kMaxRank> z{};
    for (std::size_t p = lo; p < hi; ++p) {
      state.u.point_coords(p, std::span<double>(x.data(), static_cast<std::size_t>(n)));
      for (int j = 0; j < d; ++j) {
        u[static_cast<std::size_t>(j)] = state.u.at(p, j);
        for (int i = 0; i < n; ++i)
          z[static_cast<std::size_t>(j * n + i)] =
              state.z[static_cast<std::size_t>(i)].at(p, j);
      }
      const double f = problem.lagrangian.value(x.data(), u.data(), z.data());
      if (!std::isfinite(f))
        throw Error("evaluate_functional: non-finite Lagrangian at cell " +
                    std::to_string(p));
      terms[p] = f * vol;
    }
  });
  return pairwise_sum(terms);
}

GradientBundle bundle_from_QG(const Problem& problem, const GridFunction& v,
                              BoundaryMode mode, GridFunction q, GridFunction g) {
  GradientBundle b;
  b.Q = std::move(q);
  b.G = std::move(g);
  b.grad_norm = norm_l2(b.G);
  b.functional_value = evaluate_functional_mode(problem, v, mode);
  b.mode = mode;
  return b;
}

}  // namespace

CellState evaluate_state(const Problem& problem, const GridFunction& v) {
  return evaluate_state_mode(problem, v, problem.boundary_mode);
}

GridFunction lift_to_nodes(const Problem& problem, const GridFunction& v) {
  GridFunction u = problem.lift_values(v.grid(), Placement::Nodes);
  u += mode_lift_nodes(problem.boundary_mode, v);
  return u;
}

double evaluate_functional(const Problem& problem, const GridFunction& v) {
  require_cells(v, "evaluate_functional");
  require_rank(problem, v, "evaluate_functional");
  return evaluate_functional_mode(problem, v, problem.boundary_mode);
}

GridFunction compute_Q(const Problem& problem, const GridFunction& v) {
  require_cells(v, "compute_Q");
  require_rank(problem, v, "compute_Q");
  return compute_Q_mode(problem, v, problem.boundary_mode);
}

GradientBundle compute_G(const Problem& problem, const GridFunction& v) {
  if (problem.boundary_mode != BoundaryMode::AllSides)
    throw Error("compute_G: use boundary_mode_gradient for partial boundaries");
  GridFunction q = compute_Q(problem, v);
  GridFunction g = project_L0(q);
  return bundle_from_QG(problem, v, BoundaryMode::AllSides, std::move(q),
                        std::move(g));
}

GradientBundle boundary_mode_gradient(const Problem& problem,
                                      const GridFunction& v, BoundaryMode mode) {
  require_cells(v, "boundary_mode_gradient");
  require_rank(problem, v, "boundary_mode_gradient");
  if (mode == BoundaryMode::AllSides) return compute_G(problem, v);
  if (problem.n != 2)
    throw Error("boundary_mode_gradient: mode " + to_string(mode) +
                " requires rank 2");
  GridFunction q = compute_Q_mode(problem, v, mode);
  GridFunction g = q;
  if (mode == BoundaryMode::ThreeSides2D) {
    // Only the x1 line-integral constraint is active: subtract the row mean.
    MultiIndex alpha;
    alpha.rank = 2;
    alpha.bits[0] = true;
    g.axpy(-1.0 / v.grid().domain.length(0), slab_integral(q, alpha));
  }
  return bundle_from_QG(problem, v, mode, std::move(q), std::move(g));
}

std::pair<GridFunction, GridFunction> steepest_direction(
    const Problem& problem, const GradientBundle& bundle) {
  if (bundle.grad_norm <= 0.0) throw CriticalPointError();
  GridFunction h = bundle.G;
  h *= -1.0 / bundle.grad_norm;
  GridFunction lifted = mode_lift_nodes(bundle.mode, h);
  return {std::move(h), std::move(lifted)};
}

double directional_derivative(const Problem& problem, const GridFunction& v,
                              const GridFunction& h) {
  const GradientBundle bundle =
      boundary_mode_gradient(problem, v, problem.boundary_mode);
  return inner_product_l2(bundle.G, h);
}

GridFunction euler_lagrange_residual(const Problem& problem,
                                     const GridFunction& v) {
  require_cells(v, "euler_lagrange_residual");
  require_rank(problem, v, "euler_lagrange_residual");
  const CellState state = evaluate_state(problem, v);
  const DerivativeFields der = lagrangian_derivatives(problem, state);
  const int n = problem.n;
  const UniformGrid& grid = v.grid();

  // Per-axis cell -> node maps: averaging for carried axes, centered
  // difference across the node for the divergence axis. Boundary nodes get
  // one-sided garbage and are masked to zero at the end.
  auto to_nodes = [n](GridFunction f, int diff_axis) {
    for (int i = 0; i < n; ++i) {
      GridFunction out(f.grid(),
                       [&] {
                         auto pl = f.placements();
                         pl[i] = Placement::Nodes;
                         return pl;
                       }(),
                       f.components());
      const double inv_h = 1.0 / f.grid().spacing[i];
      const int cells_i = f.grid().cells[i];
      std::array<int, kMaxRank> idx{};
      const std::size_t points = out.point_count();
      for (std::size_t p = 0; p < points; ++p) {
        out.unflatten(p, std::span<int>(idx.data(), static_cast<std::size_t>(n)));
        const int k = idx[i];
        const int klo = std::max(0, k - 1);
        const int khi = std::min(cells_i - 1, k);
        auto fidx = idx;
        fidx[i] = klo;
        const std::size_t plo =
            f.flat_index(std::span<const int>(fidx.data(), static_cast<std::size_t>(n)));
        fidx[i] = khi;
        const std::size_t phi =
            f.flat_index(std::span<const int>(fidx.data(), static_cast<std::size_t>(n)));
        for (int c = 0; c < f.components(); ++c) {
          if (i == diff_axis)
            out.at(p, c) = (f.at(phi, c) - f.at(plo, c)) * inv_h;
          else
            out.at(p, c) = 0.5 * (f.at(plo, c) + f.at(phi, c));
        }
      }
      f = std::move(out);
    }
    return f;
  };

  GridFunction residual = to_nodes(der.fu, -1);
  for (int i = 0; i < n; ++i)
    residual -= to_nodes(der.fz[static_cast<std::size_t>(i)], i);

  // interior only
  std::array<int, kMaxRank> idx{};
  const std::size_t points = residual.point_count();
  for (std::size_t p = 0; p < points; ++p) {
    residual.unflatten(p, std::span<int>(idx.data(), static_cast<std::size_t>(n)));
    bool boundary = false;
    for (int i = 0; i < n; ++i)
      boundary = boundary || idx[i] == 0 || idx[i] == grid.cells[i];
    if (boundary)
      for (int c = 0; c < residual.components(); ++c) residual.at(p, c) = 0.0;
  }
  residual.require_finite("euler_lagrange_residual");
  return residual;
}

GridFunction isoperimetric_kernel(const UniformGrid& grid,
                                  const IsoperimetricConstraint& constraint) {
  if (grid.rank() != 2)
    throw Error("isoperimetric_kernel: requires a rank-2 grid");
  // J is a fixed linear functional of u = ubar + T v; its kernel on v-space
  // is the lift transpose applied to the sampled coefficient fields.
  const GridFunction g0 = sample_expression(constraint.g0, grid, Placement::Cells);
  const GridFunction g1 = sample_expression(constraint.g1, grid, Placement::Cells);
  const GridFunction g2 = sample_expression(constraint.g2, grid, Placement::Cells);
  GridFunction qj = mode_lift_transpose(BoundaryMode::AllSides, g0);
  qj += mode_gradient_transpose(BoundaryMode::AllSides, g1, 0);
  qj += mode_gradient_transpose(BoundaryMode::AllSides, g2, 1);
  return qj;
}

GradientBundle isoperimetric_direction(const Problem& problem,
                                       const IsoperimetricConstraint& constraint,
                                       const GridFunction& v) {
  require_cells(v, "isoperimetric_direction");
  require_rank(problem, v, "isoperimetric_direction");
  if (problem.n != 2 || problem.d != 1)
    throw Error("isoperimetric_direction: requires n = 2, d = 1");
  if (problem.boundary_mode != BoundaryMode::AllSides)
    throw Error("isoperimetric_direction: requires all-sides boundary mode");

  const GridFunction qi = compute_Q(problem, v);
  const GridFunction qj = isoperimetric_kernel(v.grid(), constraint);
  const GridFunction pj = project_L0(qj);
  const double pj_norm2 = inner_product_l2(pj, pj);
  if (pj_norm2 <= 1e-28)
    throw Error(
        "isoperimetric_direction: degenerate constraint (J is constant on the "
        "feasible space)");
  const GridFunction pi = project_L0(qi);
  const double lambda = -inner_product_l2(pi, pj) / pj_norm2;
  GridFunction q = qi;
  q.axpy(lambda, qj);
  GridFunction g = pi;
  g.axpy(lambda, pj);
  return bundle_from_QG(problem, v, BoundaryMode::AllSides, std::move(q),
                        std::move(g));
}

double isoperimetric_value(const Problem& problem,
                           const IsoperimetricConstraint& constraint,
                           const GridFunction& v) {
  const CellState state = evaluate_state(problem, v);
  const UniformGrid& grid = v.grid();
  const GridFunction g0 = sample_expression(constraint.g0, grid, Placement::Cells);
  const GridFunction g1 = sample_expression(constraint.g1, grid, Placement::Cells);
  const GridFunction g2 = sample_expression(constraint.g2, grid, Placement::Cells);
  return inner_product_l2(g0, state.u) + inner_product_l2(g1, state.z[0]) +
         inner_product_l2(g2, state.z[1]);
}

GridFunction higher_order_lift(const GridFunction& v) {
  if (v.rank() != 2) throw Error("higher_order_lift: requires rank 2");
  if (v.components() != 1) throw Error("higher_order_lift: requires d = 1");
  require_cells(v, "higher_order_lift");
  GridFunction w = v;
  for (int i = 0; i < 2; ++i)
    w = trapezoid_cumulative_axis(cumulative_integral_axis(w, i), i);
  return w;
}

GridFunction higher_order_normal_derivative(const GridFunction& v, int axis) {
  if (v.rank() != 2) throw Error("higher_order_normal_derivative: requires rank 2");
  if (axis != 0 && axis != 1)
    throw Error("higher_order_normal_derivative: axis out of range");
  const int other = 1 - axis;
  GridFunction w = cumulative_integral_axis(v, axis);
  w = trapezoid_cumulative_axis(cumulative_integral_axis(w, other), other);
  return w;
}

GridFunction corner_lift_nodes(const GridFunction& v) {
  if (v.rank() != 2) throw Error("corner_lift_nodes: requires rank 2");
  require_cells(v, "corner_lift_nodes");
  GridFunction w = cumulative_integral_axis(node_tail_cumulative_axis(v, 1), 0);
  w *= -1.0;
  return w;
}

}  // namespace varidescent

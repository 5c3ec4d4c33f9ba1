#include "varidescent/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace varidescent {

MultiIndex::MultiIndex(std::initializer_list<bool> b) {
  if (b.size() > kMaxRank) throw Error("MultiIndex: too many axes");
  rank = static_cast<int>(b.size());
  int i = 0;
  for (bool bit : b) bits[i++] = bit;
}

MultiIndex MultiIndex::from_mask(unsigned mask, int rank_in) {
  MultiIndex m;
  m.rank = rank_in;
  for (int i = 0; i < rank_in; ++i) m.bits[i] = (mask >> i) & 1u;
  return m;
}

int MultiIndex::order() const {
  int k = 0;
  for (int i = 0; i < rank; ++i) k += bits[i] ? 1 : 0;
  return k;
}

MultiIndex MultiIndex::complement() const {
  MultiIndex m = *this;
  for (int i = 0; i < rank; ++i) m.bits[i] = !m.bits[i];
  return m;
}

namespace {

void require_axis(const GridFunction& f, int axis) {
  if (axis < 0 || axis >= f.rank())
    throw Error("axis " + std::to_string(axis + 1) + " out of range for rank " +
                std::to_string(f.rank()));
}

void require_placement(const GridFunction& f, int axis, Placement p,
                       const char* op) {
  if (f.axis_placement(axis) != p)
    throw Error(std::string(op) + ": wrong placement along axis " +
                std::to_string(axis + 1));
}

/// Applies fn to every grid line along `axis`. in and out must agree on all
/// other axes; fn sees raw strided line views.
template <class F>
void transform_lines(const GridFunction& in, GridFunction& out, int axis, F&& fn) {
  const int n = in.rank();
  const int d = in.components();
  std::array<std::size_t, kMaxRank> ipstr{}, opstr{};
  {
    std::size_t si = 1, so = 1;
    for (int k = 0; k < n; ++k) {
      ipstr[k] = si;
      opstr[k] = so;
      si *= static_cast<std::size_t>(in.extent(k));
      so *= static_cast<std::size_t>(out.extent(k));
    }
  }
  const double* id = in.data().data();
  double* od = out.data().data();
  const std::size_t istep = ipstr[axis] * static_cast<std::size_t>(d);
  const std::size_t ostep = opstr[axis] * static_cast<std::size_t>(d);
  const int icount = in.extent(axis);
  const int ocount = out.extent(axis);
  std::array<int, kMaxRank> idx{};
  for (;;) {
    std::size_t ibase = 0, obase = 0;
    for (int k = 0; k < n; ++k)
      if (k != axis) {
        ibase += static_cast<std::size_t>(idx[k]) * ipstr[k];
        obase += static_cast<std::size_t>(idx[k]) * opstr[k];
      }
    for (int c = 0; c < d; ++c)
      fn(id + ibase * static_cast<std::size_t>(d) + c, istep, icount,
         od + obase * static_cast<std::size_t>(d) + c, ostep, ocount);
    int k = 0;
    for (; k < n; ++k) {
      if (k == axis) continue;
      if (++idx[k] < in.extent(k)) break;
      idx[k] = 0;
    }
    if (k == n) break;
  }
}

GridFunction with_axis_placement(const GridFunction& like, int axis, Placement p) {
  auto placements = like.placements();
  placements[axis] = p;
  return GridFunction(like.grid(), placements, like.components());
}

}  // namespace

GridFunction cumulative_integral_axis(const GridFunction& v, int axis) {
  require_axis(v, axis);
  require_placement(v, axis, Placement::Cells, "cumulative_integral_axis");
  GridFunction out = with_axis_placement(v, axis, Placement::Nodes);
  const double h = v.grid().spacing[axis];
  transform_lines(v, out, axis,
                  [h](const double* in, std::size_t is, int ic, double* o,
                      std::size_t os, int oc) {
                    (void)oc;
                    double acc = 0.0;
                    o[0] = 0.0;
                    for (int k = 0; k < ic; ++k) {
                      acc += h * in[static_cast<std::size_t>(k) * is];
                      o[static_cast<std::size_t>(k + 1) * os] = acc;
                    }
                  });
  return out;
}

GridFunction reversed_cumulative_axis(const GridFunction& w, int axis) {
  require_axis(w, axis);
  require_placement(w, axis, Placement::Cells, "reversed_cumulative_axis");
  GridFunction out = with_axis_placement(w, axis, Placement::Cells);
  const double h = w.grid().spacing[axis];
  transform_lines(w, out, axis,
                  [h](const double* in, std::size_t is, int ic, double* o,
                      std::size_t os, int oc) {
                    (void)oc;
                    double acc = 0.0;
                    for (int k = ic - 1; k >= 0; --k) {
                      const double vk = in[static_cast<std::size_t>(k) * is];
                      o[static_cast<std::size_t>(k) * os] = h * (0.5 * vk + acc);
                      acc += vk;
                    }
                  });
  return out;
}

GridFunction forward_cumulative_axis(const GridFunction& v, int axis) {
  require_axis(v, axis);
  require_placement(v, axis, Placement::Cells, "forward_cumulative_axis");
  GridFunction out = with_axis_placement(v, axis, Placement::Cells);
  const double h = v.grid().spacing[axis];
  transform_lines(v, out, axis,
                  [h](const double* in, std::size_t is, int ic, double* o,
                      std::size_t os, int oc) {
                    (void)oc;
                    double acc = 0.0;
                    for (int k = 0; k < ic; ++k) {
                      const double vk = in[static_cast<std::size_t>(k) * is];
                      o[static_cast<std::size_t>(k) * os] = h * (acc + 0.5 * vk);
                      acc += vk;
                    }
                  });
  return out;
}

GridFunction node_tail_cumulative_axis(const GridFunction& v, int axis) {
  require_axis(v, axis);
  require_placement(v, axis, Placement::Cells, "node_tail_cumulative_axis");
  GridFunction out = with_axis_placement(v, axis, Placement::Nodes);
  const double h = v.grid().spacing[axis];
  transform_lines(v, out, axis,
                  [h](const double* in, std::size_t is, int ic, double* o,
                      std::size_t os, int oc) {
                    (void)oc;
                    double acc = 0.0;
                    o[static_cast<std::size_t>(ic) * os] = 0.0;
                    for (int k = ic - 1; k >= 0; --k) {
                      acc += h * in[static_cast<std::size_t>(k) * is];
                      o[static_cast<std::size_t>(k) * os] = acc;
                    }
                  });
  return out;
}

GridFunction node_average_axis(const GridFunction& u, int axis) {
  require_axis(u, axis);
  require_placement(u, axis, Placement::Nodes, "node_average_axis");
  GridFunction out = with_axis_placement(u, axis, Placement::Cells);
  transform_lines(u, out, axis,
                  [](const double* in, std::size_t is, int ic, double* o,
                     std::size_t os, int oc) {
                    (void)ic;
                    for (int k = 0; k < oc; ++k)
                      o[static_cast<std::size_t>(k) * os] =
                          0.5 * (in[static_cast<std::size_t>(k) * is] +
                                 in[static_cast<std::size_t>(k + 1) * is]);
                  });
  return out;
}

GridFunction forward_difference_axis(const GridFunction& u, int axis) {
  require_axis(u, axis);
  require_placement(u, axis, Placement::Nodes, "forward_difference_axis");
  GridFunction out = with_axis_placement(u, axis, Placement::Cells);
  const double inv_h = 1.0 / u.grid().spacing[axis];
  transform_lines(u, out, axis,
                  [inv_h](const double* in, std::size_t is, int ic, double* o,
                          std::size_t os, int oc) {
                    (void)ic;
                    for (int k = 0; k < oc; ++k)
                      o[static_cast<std::size_t>(k) * os] =
                          inv_h * (in[static_cast<std::size_t>(k + 1) * is] -
                                   in[static_cast<std::size_t>(k) * is]);
                  });
  return out;
}

GridFunction trapezoid_cumulative_axis(const GridFunction& g, int axis) {
  require_axis(g, axis);
  require_placement(g, axis, Placement::Nodes, "trapezoid_cumulative_axis");
  GridFunction out = with_axis_placement(g, axis, Placement::Nodes);
  const double h = g.grid().spacing[axis];
  transform_lines(g, out, axis,
                  [h](const double* in, std::size_t is, int ic, double* o,
                      std::size_t os, int oc) {
                    (void)oc;
                    double acc = 0.0;
                    o[0] = 0.0;
                    for (int k = 1; k < ic; ++k) {
                      acc += 0.5 * h *
                             (in[static_cast<std::size_t>(k - 1) * is] +
                              in[static_cast<std::size_t>(k) * is]);
                      o[static_cast<std::size_t>(k) * os] = acc;
                    }
                  });
  return out;
}

GridFunction full_lift_T(const GridFunction& v) {
  GridFunction out = v;
  // Canonical axis order keeps results bit-reproducible.
  for (int i = 0; i < v.rank(); ++i) out = cumulative_integral_axis(out, i);
  return out;
}

GridFunction lift_interp_cells(const GridFunction& v) {
  GridFunction out = v;
  for (int i = 0; i < v.rank(); ++i) out = forward_cumulative_axis(out, i);
  return out;
}

GridFunction mixed_derivative(const GridFunction& u) {
  GridFunction out = u;
  for (int i = 0; i < u.rank(); ++i) out = forward_difference_axis(out, i);
  return out;
}

GridFunction slab_integral(const GridFunction& v, const MultiIndex& alpha) {
  if (alpha.rank != v.rank()) throw Error("slab_integral: multi-index rank mismatch");
  if (alpha.order() < 1) throw Error("slab_integral: |alpha| must be >= 1");
  if (!v.uniform_placement(Placement::Cells))
    throw Error("slab_integral: field must be cell-placed");
  GridFunction out = v;
  for (int i = 0; i < v.rank(); ++i) {
    if (!alpha[i]) continue;
    const double h = out.grid().spacing[i];
    GridFunction next = out;
    transform_lines(out, next, i,
                    [h](const double* in, std::size_t is, int ic, double* o,
                        std::size_t os, int oc) {
                      double total = 0.0;
                      for (int k = 0; k < ic; ++k)
                        total += in[static_cast<std::size_t>(k) * is];
                      total *= h;
                      for (int k = 0; k < oc; ++k)
                        o[static_cast<std::size_t>(k) * os] = total;
                    });
    out = std::move(next);
  }
  return out;
}

GridFunction project_L0(const GridFunction& v) {
  if (!v.uniform_placement(Placement::Cells))
    throw Error("project_L0: field must be cell-placed");
  const int n = v.rank();
  GridFunction w = v;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const MultiIndex alpha = MultiIndex::from_mask(mask, n);
    double c = 1.0;
    for (int i = 0; i < n; ++i)
      if (alpha[i]) c /= v.grid().domain.length(i);
    const double sign = alpha.order() % 2 == 0 ? 1.0 : -1.0;
    w.axpy(sign * c, slab_integral(v, alpha));
  }
  return w;
}

std::vector<GridFunction> lifted_gradient(const GridFunction& v,
                                          std::span<const GridFunction> lift_grad) {
  if (!v.uniform_placement(Placement::Cells))
    throw Error("lifted_gradient: field must be cell-placed");
  if (!lift_grad.empty() && static_cast<int>(lift_grad.size()) != v.rank())
    throw Error("lifted_gradient: lift gradient needs one entry per axis");
  std::vector<GridFunction> grad;
  grad.reserve(static_cast<std::size_t>(v.rank()));
  for (int i = 0; i < v.rank(); ++i) {
    GridFunction gi = v;
    for (int j = 0; j < v.rank(); ++j)
      if (j != i) gi = forward_cumulative_axis(gi, j);
    if (!lift_grad.empty()) gi += lift_grad[static_cast<std::size_t>(i)];
    grad.push_back(std::move(gi));
  }
  return grad;
}

double m0_norm(const GridFunction& u) {
  if (!u.uniform_placement(Placement::Nodes))
    throw Error("m0_norm: field must be node-placed");
  return norm_l2(mixed_derivative(u));
}

L0Certificate certify_L0(const GridFunction& v, double tol) {
  if (tol <= 0.0) throw Error("certify_L0: tolerance must be positive");
  L0Certificate cert;
  cert.tolerance = tol;
  for (int i = 0; i < v.rank(); ++i) {
    MultiIndex ei;
    ei.rank = v.rank();
    ei.bits[i] = true;
    cert.max_slab_residual =
        std::max(cert.max_slab_residual, slab_integral(v, ei).max_abs());
  }
  return cert;
}

}  // namespace varidescent

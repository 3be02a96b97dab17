#pragma once

#include "quadsurf/extension.hpp"

#include <vector>

namespace quadsurf {

struct AxisRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Composite 24-point Gauss–Legendre rule on [a, b] with enough panels that no
// panel spans more than four oscillation cycles. Throws GridTooCoarse if the
// rule needs more than node_budget nodes.
AxisRule composite_gauss(double a, double b, double cycles, int node_budget);

// Composite n-point Gauss–Legendre rule with a fixed number of equal panels.
AxisRule gauss_panels(double a, double b, int n, int panels);

// Connected components of the cross-term graph of the pair: i and j share a
// block when p or q has a nonzero (i, j) entry. Blocks are sorted.
std::vector<std::vector<int>> variable_blocks(const SurfaceSpec &s);

// Values of ∫_{box restricted to axes} e(Σ_a x_a ξ_a + Σ_{a,b} m_ab ξ_a ξ_b)
// on the product grid coords[0] × coords[1] × … (one coordinate list per
// block axis, last axis fastest). `m` must have no cross terms between the
// block and the other axes. Axes with zero diagonal and no cross terms among
// themselves are integrated in closed form, the rest by composite_gauss.
std::vector<cplx> block_extension_grid(const RMat3 &m, const std::vector<int> &axes, const Box3 &box,
                                       const std::vector<std::vector<double>> &coords, int node_budget);

cplx block_extension_point(const RMat3 &m, const std::vector<int> &axes, const Box3 &box, const Real3 &x_prime,
                           int node_budget);

// E 1_box at x as the product of its block factors.
cplx box_extension_point(const SurfaceSpec &s, const Box3 &box, const EvalPoint &x, int node_budget);

}  // namespace quadsurf

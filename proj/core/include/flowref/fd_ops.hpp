#pragma once

#include <utility>

#include "flowref/field.hpp"

namespace flowref {

/// Finite-difference operators on ScalarField / FlowField grids.
///
/// All first derivatives are second-order: central differences in the
/// interior, one-sided three-point formulas on the boundary ring. Stencil
/// operators (laplacian9, laplacian5, local_average9) use Dirichlet-zero
/// ghost values outside the domain. Every operator is linear and pure.

/// (d/dx s, d/dy s). Requires width, height >= 3.
std::pair<ScalarField, ScalarField> gradient(const ScalarField& s);

/// u_x + v_y.
ScalarField divergence(const FlowField& w);

/// u_y - v_x (sign convention fixed project-wide; rigid rotation
/// u = -y, v = x has curl -2).
ScalarField curl(const FlowField& w);

/// Orthogonal (symplectic) gradient (d/dy s, -d/dx s).
std::pair<ScalarField, ScalarField> orthogonal_gradient(const ScalarField& s);

/// Nine-point Laplacian, stencil (1/(6 h^2)) [1 4 1; 4 -20 4; 1 4 1].
/// Requires dx == dy and width, height >= 3.
ScalarField laplacian9(const ScalarField& s);

/// Five-point Laplacian (s_E - 2s + s_W)/dx^2 + (s_N - 2s + s_S)/dy^2,
/// supporting dx != dy. Used by the explicit diffusion steps.
ScalarField laplacian5(const ScalarField& s);

/// Weighted nine-point local average: (1/20) [1 4 1; 4 0 4; 1 4 1],
/// i.e. the neighbour weights of the nine-point Laplacian normalized to
/// unit sum. `dirichlet` selects zero ghost values; otherwise the grid is
/// reflected at the boundary.
ScalarField local_average9(const ScalarField& s, bool dirichlet);

}  // namespace flowref

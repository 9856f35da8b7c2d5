#pragma once

#include "warpcheck/hypersurface.hpp"

namespace warpcheck::detail {

/// Solves h w = kappa g w. Eigenvalues come back ascending, the frame columns
/// are g-orthonormal. Throws GeometryInvalid if g is not positive definite.
void principal_curvatures(const SmallMat& g, const SmallMat& h, SmallVec& kappa, SmallMat& frame);

/// Determinant of the round metric in the grid coordinates, square-rooted.
inline double sqrt_det_sigma(const GridNode& node, int n) { return n == 1 ? 1.0 : node.sin_theta; }

}  // namespace warpcheck::detail

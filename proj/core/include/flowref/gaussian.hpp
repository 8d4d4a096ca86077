#pragma once

#include "flowref/field.hpp"

namespace flowref {

/// Separable Gaussian blur with kernel radius ceil(3 sigma) and symmetric
/// (reflected) boundary handling. sigma <= 0 returns the input unchanged.
ScalarField gaussian_blur(const ScalarField& s, double sigma);

}  // namespace flowref

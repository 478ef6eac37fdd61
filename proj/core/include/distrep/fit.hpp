#pragma once

#include "distrep/types.hpp"

namespace distrep {

/// Variance floor added to both axes before deriving sigma and rho.
inline constexpr double kVarianceFloor = 1e-4;

/// Variance of a unit-width uniform, added per axis by the UnitPixel correction.
inline constexpr double kUnitPixelVariance = 1.0 / 12.0;

enum class PixelCorrection { None, UnitPixel };

/// Maximum-likelihood Gaussian of a pixel set.
///
/// Means are sample means of the pixel centers; variances and the cross
/// moment are population (divide-by-N) moments. kVarianceFloor (and, with
/// UnitPixel, kUnitPixelVariance) is added to each variance, then rho is
/// derived and clamped into [-kRhoBound, kRhoBound]. The result always
/// passes validate_gaussian.
Gaussian2D fit_gaussian(const PixelSet& pixels, PixelCorrection correction = PixelCorrection::None);

/// Tight axis-aligned box treating each pixel as a unit square.
BoundingBox bbox_of(const PixelSet& pixels);

}  // namespace distrep

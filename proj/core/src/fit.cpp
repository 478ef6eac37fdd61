#include "distrep/fit.hpp"

#include <algorithm>
#include <cmath>

namespace distrep {

Gaussian2D fit_gaussian(const PixelSet& pixels, PixelCorrection correction) {
  const auto n = static_cast<double>(pixels.size());

  double sum_x = 0.0;
  double sum_y = 0.0;
  for (const auto& p : pixels) {
    sum_x += p.x;
    sum_y += p.y;
  }
  const double mu_x = sum_x / n;
  const double mu_y = sum_y / n;

  // Second pass on centered coordinates.
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (const auto& p : pixels) {
    const double dx = p.x - mu_x;
    const double dy = p.y - mu_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }

  double var_x = sxx / n;
  double var_y = syy / n;
  const double cov = sxy / n;
  if (correction == PixelCorrection::UnitPixel) {
    var_x += kUnitPixelVariance;
    var_y += kUnitPixelVariance;
  }
  var_x += kVarianceFloor;
  var_y += kVarianceFloor;

  Gaussian2D g{mu_x, mu_y, std::sqrt(var_x), std::sqrt(var_y), 0.0};
  g.rho = std::clamp(cov / (g.sigma_x * g.sigma_y), -kRhoBound, kRhoBound);
  return g;
}

BoundingBox bbox_of(const PixelSet& pixels) {
  auto [x_lo, x_hi] = std::minmax_element(pixels.begin(), pixels.end(),
                                          [](const PixelCoord& a, const PixelCoord& b) { return a.x < b.x; });
  auto [y_lo, y_hi] = std::minmax_element(pixels.begin(), pixels.end(),
                                          [](const PixelCoord& a, const PixelCoord& b) { return a.y < b.y; });
  return BoundingBox{static_cast<double>(x_lo->x), static_cast<double>(y_lo->y),
                     static_cast<double>(x_hi->x) + 1.0, static_cast<double>(y_hi->y) + 1.0};
}

}  // namespace distrep

#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace distrep::testing {

double log_density(const Gaussian2D& g, double x, double y) {
  const double zx = (x - g.mu_x) / g.sigma_x;
  const double zy = (y - g.mu_y) / g.sigma_y;
  const double one_minus = 1.0 - g.rho * g.rho;
  const double quad = (zx * zx - 2.0 * g.rho * zx * zy + zy * zy) / one_minus;
  return -std::log(2.0 * std::numbers::pi * g.sigma_x * g.sigma_y * std::sqrt(one_minus)) - 0.5 * quad;
}

double kl_quadrature_box(const Gaussian2D& p, const Gaussian2D& q, double h) {
  const double x_lo = p.mu_x - 8.0 * p.sigma_x;
  const double y_lo = p.mu_y - 8.0 * p.sigma_y;
  const int nx = static_cast<int>(std::ceil(16.0 * p.sigma_x / h));
  const int ny = static_cast<int>(std::ceil(16.0 * p.sigma_y / h));
  double sum = 0.0;
  for (int j = 0; j < ny; ++j) {
    const double y = y_lo + (j + 0.5) * h;
    double row = 0.0;
    for (int i = 0; i < nx; ++i) {
      const double x = x_lo + (i + 0.5) * h;
      const double lp = log_density(p, x, y);
      row += std::exp(lp) * (lp - log_density(q, x, y));
    }
    sum += row;
  }
  return sum * h * h;
}

double kl_quadrature_whitened(const Gaussian2D& p, const Gaussian2D& q, double h) {
  // Sigma_p = L L^T with L = [[sx, 0], [rho sy, sy sqrt(1 - rho^2)]].
  const double l00 = p.sigma_x;
  const double l10 = p.rho * p.sigma_y;
  const double l11 = p.sigma_y * std::sqrt(1.0 - p.rho * p.rho);
  const int n = static_cast<int>(std::lround(16.0 / h));
  const double log_norm = -std::log(2.0 * std::numbers::pi);
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double v = -8.0 + (j + 0.5) * h;
    double row = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = -8.0 + (i + 0.5) * h;
      const double x = p.mu_x + l00 * u;
      const double y = p.mu_y + l10 * u + l11 * v;
      const double phi = std::exp(log_norm - 0.5 * (u * u + v * v));
      row += phi * (log_density(p, x, y) - log_density(q, x, y));
    }
    sum += row;
  }
  return sum * h * h;
}

Gaussian2D random_gaussian(harness::Rng& rng, double mu_range, double sigma_lo, double sigma_hi, double rho_max) {
  return Gaussian2D{rng.uniform(-mu_range, mu_range), rng.uniform(-mu_range, mu_range),
                    rng.uniform(sigma_lo, sigma_hi), rng.uniform(sigma_lo, sigma_hi),
                    rng.uniform(-rho_max, rho_max)};
}

std::vector<PixelCoord> random_pixels(harness::Rng& rng, int count, int x0, int y0, int w, int h) {
  std::set<PixelCoord> seen;
  std::vector<PixelCoord> out;
  while (static_cast<int>(out.size()) < count) {
    const PixelCoord p{x0 + rng.uniform_int(0, w - 1), y0 + rng.uniform_int(0, h - 1)};
    if (seen.insert(p).second) {
      out.push_back(p);
    }
  }
  return out;
}

PredictionGrid random_grid(harness::Rng& rng, int width, int height, int scale, int n, int classes) {
  PredictionGrid grid(width, height, scale, n, classes);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    for (auto& c : grid.candidates(cell)) {
      c.params = EncodedParams{rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0), rng.uniform(-1.0, 2.5),
                               rng.uniform(-1.0, 2.5), rng.uniform(-2.0, 2.0)};
      c.logit = rng.uniform(-5.0, 5.0);
    }
    for (auto& s : grid.class_scores(cell)) {
      s = rng.uniform(-3.0, 3.0);
    }
  }
  return grid;
}

}  // namespace distrep::testing

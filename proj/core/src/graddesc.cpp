#include "distrep/graddesc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "distrep/divergence.hpp"
#include "distrep/encoding.hpp"
#include "distrep/harness/rng.hpp"

namespace distrep {

namespace {

constexpr double kDivergenceCeiling = 1e6;
constexpr int kMaxHalvings = 60;

Sym2 inverse(const Sym2& m) {
  const double det = m.det();
  return Sym2{m.yy / det, -m.xy / det, m.xx / det};
}

// s * b * s, symmetric for symmetric s and b.
Sym2 sandwich(const Sym2& s, const Sym2& b) {
  const double m00 = s.xx * b.xx + s.xy * b.xy;
  const double m01 = s.xx * b.xy + s.xy * b.yy;
  const double m10 = s.xy * b.xx + s.yy * b.xy;
  const double m11 = s.xy * b.xy + s.yy * b.yy;
  return Sym2{m00 * s.xx + m01 * s.xy, m00 * s.xy + m01 * s.yy, m10 * s.xy + m11 * s.yy};
}

void check_divergence(double value) {
  if (!std::isfinite(value) || value > kDivergenceCeiling) {
    throw Error(ErrorCode::Diverged, "divergence left the finite range during descent");
  }
}

// Divergence of a trial iterate; a numerically singular covariance counts as +inf.
double trial_divergence(const Gaussian2D& candidate, const Gaussian2D& target) {
  try {
    return sym_kl(candidate, target);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateCovariance) {
      throw;
    }
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

Gradient5 sym_kl_grad(const Gaussian2D& pred, const Gaussian2D& target, ParamSpace space) {
  const Sym2 sp = covariance_of(pred);
  const Sym2 st = covariance_of(target);
  if (sp.det() < kMinCovarianceDet || st.det() < kMinCovarianceDet) {
    throw Error(ErrorCode::DegenerateCovariance, "covariance determinant below 1e-12");
  }
  const Sym2 a = inverse(st);
  const Sym2 sp_inv = inverse(sp);
  const double dx = pred.mu_x - target.mu_x;
  const double dy = pred.mu_y - target.mu_y;

  const Sym2 h{a.xx + sp_inv.xx, a.xy + sp_inv.xy, a.yy + sp_inv.yy};
  const double g_mu_x = 0.5 * (h.xx * dx + h.xy * dy);
  const double g_mu_y = 0.5 * (h.xy * dx + h.yy * dy);

  const Sym2 b{st.xx + dx * dx, st.xy + dx * dy, st.yy + dy * dy};
  const Sym2 q = sandwich(sp_inv, b);
  const Sym2 g{0.25 * (a.xx - q.xx), 0.25 * (a.xy - q.xy), 0.25 * (a.yy - q.yy)};

  const double sx = pred.sigma_x;
  const double sy = pred.sigma_y;
  const double rho = pred.rho;
  // Sp = [[sx^2, rho sx sy], [rho sx sy, sy^2]]; df = Gxx dSxx + 2 Gxy dSxy + Gyy dSyy.
  const double g_sx = 2.0 * g.xx * sx + 2.0 * g.xy * rho * sy;
  const double g_sy = 2.0 * g.yy * sy + 2.0 * g.xy * rho * sx;
  const double g_rho = 2.0 * g.xy * sx * sy;

  if (space == ParamSpace::Natural) {
    return {g_mu_x, g_mu_y, g_sx, g_sy, g_rho};
  }
  return {-g_mu_x, -g_mu_y, sx * g_sx, sy * g_sy, (1.0 - rho * rho) * g_rho};
}

std::array<double, 5> to_params(const Gaussian2D& g, ParamSpace space, double anchor_x, double anchor_y) {
  if (space == ParamSpace::Natural) {
    return {g.mu_x, g.mu_y, g.sigma_x, g.sigma_y, g.rho};
  }
  const EncodedParams e = encode(Anchor{anchor_x, anchor_y}, g);
  return {e.dx, e.dy, e.log_sigma_x, e.log_sigma_y, e.atanh_rho};
}

Gaussian2D from_params(const std::array<double, 5>& theta, ParamSpace space, double anchor_x,
                       double anchor_y) {
  if (space == ParamSpace::Natural) {
    return Gaussian2D{theta[0], theta[1], theta[2], theta[3], theta[4]};
  }
  return decode(Anchor{anchor_x, anchor_y}, EncodedParams{theta[0], theta[1], theta[2], theta[3], theta[4]});
}

Gradient5 finite_difference_grad(const Gaussian2D& pred, const Gaussian2D& target, ParamSpace space,
                                 double rel_step) {
  const double ax = pred.mu_x;
  const double ay = pred.mu_y;
  const auto theta = to_params(pred, space, ax, ay);
  Gradient5 grad{};
  for (std::size_t i = 0; i < 5; ++i) {
    const double h = rel_step * std::max(1.0, std::abs(theta[i]));
    auto plus = theta;
    auto minus = theta;
    plus[i] += h;
    minus[i] -= h;
    const double f_plus = sym_kl(from_params(plus, space, ax, ay), target);
    const double f_minus = sym_kl(from_params(minus, space, ax, ay), target);
    grad[i] = (f_plus - f_minus) / (plus[i] - minus[i]);
  }
  return grad;
}

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

GradcheckReport gradcheck(int trials, std::uint64_t seed) {
  if (trials <= 0) {
    throw Error(ErrorCode::InvalidArgument, "trials must be positive");
  }
  harness::Rng rng(seed);
  auto random_gaussian = [&rng] {
    return Gaussian2D{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), rng.uniform(0.5, 4.0), rng.uniform(0.5, 4.0),
                      rng.uniform(-0.9, 0.9)};
  };
  GradcheckReport report;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const Gaussian2D pred = random_gaussian();
    const Gaussian2D target = random_gaussian();
    for (ParamSpace space : {ParamSpace::Natural, ParamSpace::Encoded}) {
      const Gradient5 analytic = sym_kl_grad(pred, target, space);
      const Gradient5 numeric = finite_difference_grad(pred, target, space);
      double& slot = space == ParamSpace::Natural ? report.max_rel_error_natural : report.max_rel_error_encoded;
      for (std::size_t i = 0; i < 5; ++i) {
        slot = std::max(slot, relative_error(analytic[i], numeric[i]));
      }
    }
  }
  report.max_rel_error = std::max(report.max_rel_error_natural, report.max_rel_error_encoded);
  return report;
}

DescentResult fit_by_descent(const Gaussian2D& target, const Gaussian2D& init, const DescentOptions& options) {
  validate_gaussian(target);
  validate_gaussian(init);
  if (!(options.step > 0.0) || !std::isfinite(options.step)) {
    throw Error(ErrorCode::InvalidArgument, "step must be positive");
  }
  if (!(options.tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  }
  if (options.max_iters < 0) {
    throw Error(ErrorCode::InvalidArgument, "max_iters must be non-negative");
  }

  const double ax = init.mu_x;
  const double ay = init.mu_y;
  auto theta = to_params(init, ParamSpace::Encoded, ax, ay);
  Gaussian2D current = init;
  double f = sym_kl(current, target);
  check_divergence(f);

  DescentResult result;
  result.initial_divergence = f;
  if (options.record_history) {
    result.history.push_back(f);
  }

  int iter = 0;
  while (f >= options.tol && iter < options.max_iters) {
    const Gradient5 grad = sym_kl_grad(current, target, ParamSpace::Encoded);
    double step = options.step;
    std::array<double, 5> next{};
    Gaussian2D candidate;
    double f_next = 0.0;
    bool accepted = false;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      for (std::size_t i = 0; i < 5; ++i) {
        next[i] = theta[i] - step * grad[i];
      }
      candidate = from_params(next, ParamSpace::Encoded, ax, ay);
      f_next = trial_divergence(candidate, target);
      if (!options.backtracking || (std::isfinite(f_next) && f_next <= f)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No descent direction at machine precision; the iterate is stationary.
      break;
    }
    check_divergence(f_next);
    theta = next;
    current = candidate;
    f = f_next;
    ++iter;
    if (options.record_history) {
      result.history.push_back(f);
    }
  }

  result.estimate = current;
  result.iterations = iter;
  result.divergence = f;
  result.converged = f < options.tol;
  return result;
}

}  // namespace distrep

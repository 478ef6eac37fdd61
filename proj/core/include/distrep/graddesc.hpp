#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "distrep/types.hpp"

namespace distrep {

enum class ParamSpace {
  /// (mu_x, mu_y, sigma_x, sigma_y, rho)
  Natural,
  /// (dx, dy, log sigma_x, log sigma_y, atanh rho), dx = anchor - mu
  Encoded,
};

using Gradient5 = std::array<double, 5>;

/// Analytic gradient of sym_kl(pred, target) with respect to pred's parameters.
///
/// With d = mu_p - mu_t, A = St^-1 and B = St + d d^T,
///   sym_kl = 1/4 [ tr(A Sp) + tr(Sp^-1 B) + d^T (A + Sp^-1) d - 4 ]
///   d/d mu_p = 1/2 (A + Sp^-1) d
///   d/d Sp   = 1/4 (A - Sp^-1 B Sp^-1)   (symmetric G)
/// then the chain rule through Sp(sigma_x, sigma_y, rho) and, for Encoded,
/// through (-mu, exp, tanh). The Encoded gradient does not depend on the anchor.
Gradient5 sym_kl_grad(const Gaussian2D& pred, const Gaussian2D& target, ParamSpace space);

/// Parameters of `g` in the given space; Encoded is taken relative to `anchor_x/y`.
std::array<double, 5> to_params(const Gaussian2D& g, ParamSpace space, double anchor_x = 0.0,
                                double anchor_y = 0.0);

/// Inverse of to_params.
Gaussian2D from_params(const std::array<double, 5>& theta, ParamSpace space, double anchor_x = 0.0,
                       double anchor_y = 0.0);

/// Central finite differences of sym_kl(pred, target) in the given space,
/// with per-coordinate step h = rel_step * max(1, |theta_i|).
Gradient5 finite_difference_grad(const Gaussian2D& pred, const Gaussian2D& target, ParamSpace space,
                                 double rel_step = 1e-5);

/// |a - b| / max(|a|, |b|, floor).
double relative_error(double a, double b, double floor = 1e-3);

struct GradcheckReport {
  int trials = 0;
  /// Largest per-coordinate relative error over all trials and both spaces.
  double max_rel_error = 0.0;
  double max_rel_error_natural = 0.0;
  double max_rel_error_encoded = 0.0;
};

/// Compares sym_kl_grad with finite_difference_grad on seeded random pairs
/// (mu in [-5,5]^2, sigma in [0.5,4], |rho| <= 0.9), in both spaces.
GradcheckReport gradcheck(int trials, std::uint64_t seed);

struct DescentOptions {
  double step = 0.5;
  int max_iters = 10000;
  double tol = 1e-6;
  /// Halve the step until the divergence does not increase.
  bool backtracking = true;
  /// Record the divergence of every iterate in DescentResult::history.
  bool record_history = false;
};

struct DescentResult {
  Gaussian2D estimate;
  int iterations = 0;
  double divergence = 0.0;
  double initial_divergence = 0.0;
  bool converged = false;
  std::vector<double> history;
};

/// Gradient descent on sym_kl(estimate, target) in Encoded space, anchored at
/// the initial mean. Stops when the divergence drops below tol or after
/// max_iters steps. Throws Diverged if the divergence exceeds 1e6 or becomes
/// non-finite.
DescentResult fit_by_descent(const Gaussian2D& target, const Gaussian2D& init, const DescentOptions& options);

}  // namespace distrep

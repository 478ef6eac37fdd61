#pragma once

#include "distrep/types.hpp"

namespace distrep {

/// Closed-form KL(p || q) between two bivariate normals:
///   1/2 [ tr(Sq^-1 Sp) + d^T Sq^-1 d - 2 + ln(det Sq / det Sp) ],  d = mu_q - mu_p.
/// Throws on invalid inputs or a covariance determinant below kMinCovarianceDet.
double kl(const Gaussian2D& p, const Gaussian2D& q);

/// Symmetrized divergence 1/2 (KL(p||q) + KL(q||p)). Bitwise symmetric in its arguments.
double sym_kl(const Gaussian2D& p, const Gaussian2D& q);

/// Intersection over union of two axis-aligned boxes.
/// Throws ZeroAreaUnion when both boxes have zero area.
double iou(const BoundingBox& a, const BoundingBox& b);

}  // namespace distrep

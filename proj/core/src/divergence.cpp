#include "distrep/divergence.hpp"

#include <algorithm>
#include <cmath>

namespace distrep {

namespace {

Sym2 checked_covariance(const Gaussian2D& g, const char* which) {
  const Sym2 cov = covariance_of(g);
  if (!(cov.det() >= kMinCovarianceDet)) {
    throw Error(ErrorCode::DegenerateCovariance, std::string(which) + ": covariance determinant below 1e-12");
  }
  return cov;
}

}  // namespace

double kl(const Gaussian2D& p, const Gaussian2D& q) {
  const Sym2 sp = checked_covariance(p, "p");
  const Sym2 sq = checked_covariance(q, "q");
  if (p == q) {
    return 0.0;
  }
  const double det_p = sp.det();
  const double det_q = sq.det();

  // Sq^-1 = adj(Sq) / det(Sq), adj = [[yy, -xy], [-xy, xx]].
  const double trace_term = (sq.yy * sp.xx - 2.0 * sq.xy * sp.xy + sq.xx * sp.yy) / det_q;
  const double dx = q.mu_x - p.mu_x;
  const double dy = q.mu_y - p.mu_y;
  const double mahalanobis = (sq.yy * dx * dx - 2.0 * sq.xy * dx * dy + sq.xx * dy * dy) / det_q;
  const double log_det_ratio = std::log(det_q / det_p);

  const double value = 0.5 * (trace_term + mahalanobis - 2.0 + log_det_ratio);
  // Rounding can leave a tiny negative residue near p == q.
  return std::max(value, 0.0);
}

double sym_kl(const Gaussian2D& p, const Gaussian2D& q) {
  return 0.5 * (kl(p, q) + kl(q, p));
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  validate_box(a);
  validate_box(b);
  const double area_a = a.area();
  const double area_b = b.area();
  if (area_a <= 0.0 && area_b <= 0.0) {
    throw Error(ErrorCode::ZeroAreaUnion, "both boxes have zero area");
  }
  const double iw = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double ih = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = iw * ih;
  return inter / (area_a + area_b - inter);
}

}  // namespace distrep

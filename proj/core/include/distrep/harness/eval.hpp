#pragma once

#include <map>
#include <span>
#include <vector>

#include "distrep/postproc.hpp"
#include "distrep/types.hpp"

namespace distrep::harness {

struct ClassAp {
  /// AP at each requested threshold, in request order.
  std::vector<double> ap;
  double ap50 = 0.0;
  double mean_ap = 0.0;
  int num_gt = 0;
  int num_pred = 0;
};

struct ApReport {
  std::vector<double> thresholds;
  /// Classes with at least one ground-truth instance.
  std::map<int, ClassAp> per_class;
  double ap50 = 0.0;
  double mean_ap = 0.0;
};

/// 0.50, 0.55, ..., 0.95.
std::vector<double> coco_thresholds();

/// Mask-level average precision of an instance map against a scene.
///
/// Per class, predictions are ranked by detection score (ties by instance
/// id) and greedily matched to the unmatched ground-truth object of highest
/// mask IoU >= threshold. AP is the area under the monotone precision
/// envelope. Throws DimensionMismatch if the map and scene sizes differ.
ApReport evaluate_ap(const InstanceMap& pred, const Scene& gt, std::span<const double> iou_thresholds);

}  // namespace distrep::harness

#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "distrep/types.hpp"

namespace distrep::harness {

/// Boxes overlapping above this IoU count as indistinguishable by IoU.
inline constexpr double kIouFailureThreshold = 0.5;

/// One unordered within-scene object pair.
struct PairRecord {
  int scene_id = 0;
  int obj_a = 0;
  int obj_b = 0;
  double iou = 0.0;
  double sym_kl = 0.0;
  bool same_class = false;
  int class_a = 0;
  int class_b = 0;

  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

/// Fits every object and emits one record per unordered pair, in
/// (scene, a, b) order. `first_scene_id` offsets the scene numbering.
std::vector<PairRecord> pair_analysis(std::span<const Scene> scenes, int first_scene_id = 0);

/// Writes `scene_id,obj_a,obj_b,iou,sym_kl,same_class`; with `with_classes`
/// two trailing columns `class_a,class_b` are added. Reals use the shortest
/// round-trip representation.
void write_pairs_csv(std::ostream& out, std::span<const PairRecord> records, bool with_classes = false);

/// Parses either column layout. Throws ParseError on malformed input.
std::vector<PairRecord> read_pairs_csv(std::istream& in);

struct DecouplingReport {
  double tau = 0.0;
  /// Same-class pairs with IoU above the threshold: all of them fail under IoU.
  int iou_failures = 0;
  /// The subset that also has sym_kl < tau.
  int kl_failures = 0;
  /// 1 - kl_failures / iou_failures.
  double reduction = 0.0;
};

struct Calibration {
  double global_tau = 0.0;
  std::map<int, double> per_class;
  std::size_t pairs_used = 0;

  /// Per-class threshold, or the global one for classes without enough pairs.
  double tau_for(int class_id) const;
};

/// Throws NoOverlappingPairs when no same-class pair exceeds the IoU threshold.
DecouplingReport decoupling_report(std::span<const PairRecord> records, double tau);

/// Same, with each pair judged against the threshold of its class.
/// DecouplingReport::tau holds the global fallback.
DecouplingReport decoupling_report(std::span<const PairRecord> records, const Calibration& calibration);

/// Largest tau such that at most `max_false_merge` of the distinct-object
/// pairs have sym_kl < tau. Per-class thresholds are computed from same-class
/// pairs of classes with at least `min_class_pairs` records (needs class
/// columns); other classes fall back to the global value.
/// Throws InsufficientData when there are no records.
Calibration calibrate_tau(std::span<const PairRecord> records, double max_false_merge,
                          std::size_t min_class_pairs = 50);

/// Shortest round-trip decimal form of a double.
std::string format_real(double v);

}  // namespace distrep::harness

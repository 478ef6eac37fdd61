#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "distrep/encoding.hpp"
#include "distrep/types.hpp"

namespace distrep {

/// Class-dependent suppression thresholds on the symmetrized divergence.
struct NmsConfig {
  std::map<int, double> thresholds;
  double default_tau = 1.0;

  double tau_for(int class_id) const;
};

/// Throws InvalidArgument when a threshold is negative or not finite.
void validate_nms_config(const NmsConfig& cfg);

/// Greedy divergence NMS. Detections are visited by descending score (ties
/// by input order); one is kept iff its sym_kl to every already kept
/// detection of the same class is >= tau(class). Output is in keep order.
std::vector<Detection> divergence_nms(std::span<const Detection> dets, const NmsConfig& cfg);

/// Literal O(n^2) suppression-flag simulation of divergence_nms, for testing.
std::vector<Detection> brute_force_nms(std::span<const Detection> dets, const NmsConfig& cfg);

/// One detection per foreground cell of a grid: the decoded selected
/// candidate, its argmax class, and its softmax likelihood as the score.
std::vector<Detection> detections_from_grid(const PredictionGrid& grid);

/// Full-resolution instance assignment. instance_ids is row-major with
/// 0 for background and k + 1 for detections[k]; class_ids holds the
/// semantic prediction per pixel.
struct InstanceMap {
  int width = 0;
  int height = 0;
  std::vector<int> instance_ids;
  std::vector<int> class_ids;
  std::vector<Detection> detections;

  friend bool operator==(const InstanceMap&, const InstanceMap&) = default;
};

/// Assigns every foreground pixel to the kept detection with the lowest
/// sym_kl from the pixel's decoded Gaussian, preferring detections of the
/// pixel's class when any exist (ties to the lower index). With scale > 1
/// each pixel uses its covering cell's prediction. Output dimensions default
/// to grid extent x scale. Throws NoDetections if foreground exists but
/// `kept` is empty.
InstanceMap cluster_pixels(const PredictionGrid& grid, std::span<const Detection> kept,
                           std::optional<int> width = std::nullopt, std::optional<int> height = std::nullopt);

/// Pixels of each instance, indexed by instance id - 1. Empty instances are empty vectors.
std::vector<std::vector<PixelCoord>> instance_pixels(const InstanceMap& map);

}  // namespace distrep

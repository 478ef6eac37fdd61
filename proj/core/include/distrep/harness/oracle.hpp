#pragma once

#include <cstdint>

#include "distrep/encoding.hpp"
#include "distrep/types.hpp"

namespace distrep::harness {

struct OracleOptions {
  int scale = 1;
  int n = 1;
  /// Half-width of uniform noise added to each encoded parameter of the true candidate.
  double noise = 0.0;
  std::uint64_t seed = 0;
  /// Number of class scores per cell; 0 derives max class id + 1.
  int num_classes = 0;
  /// Logit of the true candidate; decoys get 0.
  double true_logit = 4.0;
  /// Score of the true class; the others get 0.
  double class_logit = 8.0;
};

/// Synthesizes the prediction a perfect model would emit for `scene`.
///
/// Cells owned by an object (see cell_owners) carry that object's fitted
/// Gaussian as candidate 0, encoded at the cell anchor, with the largest
/// logit; candidates 1..n-1 are decoys (other objects' fits or shifted
/// copies). Class scores favor the cell's ground-truth class.
PredictionGrid oracle_grid(const Scene& scene, const OracleOptions& options);

}  // namespace distrep::harness

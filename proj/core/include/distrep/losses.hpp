#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "distrep/encoding.hpp"
#include "distrep/types.hpp"

namespace distrep {

struct LossWeights {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Per-cell ground truth for the representation and mixture losses;
/// std::nullopt marks background cells.
using CellTargets = std::vector<std::optional<Gaussian2D>>;

/// Numerically stable log-softmax.
std::vector<double> log_softmax(std::span<const double> logits);

/// Mean over non-void pixels of -log softmax(scores)[gt].
///
/// `scores` is row-major, `num_classes` values per pixel. Pixels labeled
/// kIgnoreClass are skipped. Throws AllVoid if nothing contributes.
double seg_loss(std::span<const double> scores, std::size_t num_classes, std::span<const int> gt_classes);

/// seg_loss on the class scores of a prediction grid.
double seg_loss(const PredictionGrid& grid, std::span<const int> gt_classes);

/// Representation term of a single cell: the symmetrized divergence of the
/// argmin-divergence candidate plus that of the argmax-logit candidate,
/// counted once when they coincide.
double rep_term(const Gaussian2D& target, std::span<const Candidate> candidates, const Anchor& anchor);

/// Sum of rep_term over foreground cells.
double rep_loss(const PredictionGrid& grid, const CellTargets& targets);

/// Mean over foreground cells of -log softmax(logits)[j*], with j* the
/// argmin-divergence candidate. Throws AllBackground without foreground cells.
double mix_loss(const PredictionGrid& grid, const CellTargets& targets);

/// l_seg + alpha * l_rep + beta * l_mix.
double total_loss(double l_seg, double l_rep, double l_mix, const LossWeights& weights);

/// Per-cell targets for a scene at the grid's scale: the fitted Gaussian of
/// the cell owner (see cell_owners), or nullopt.
CellTargets cell_targets(const Scene& scene, int scale);

/// Semantic label per grid cell: the owner object's class, otherwise the
/// semantic class at the cell's center pixel.
std::vector<int> cell_classes(const Scene& scene, int scale);

}  // namespace distrep

#include "distrep/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "distrep/divergence.hpp"
#include "distrep/fit.hpp"

namespace distrep {

namespace {

void check_cells(const PredictionGrid& grid, const CellTargets& targets) {
  if (targets.size() != grid.cell_count()) {
    throw Error(ErrorCode::ShapeMismatch, "target count " + std::to_string(targets.size()) +
                                              " does not match grid cell count " +
                                              std::to_string(grid.cell_count()));
  }
}

std::vector<double> candidate_divergences(const Gaussian2D& target, std::span<const Candidate> candidates,
                                          const Anchor& anchor) {
  std::vector<double> div;
  div.reserve(candidates.size());
  for (const auto& c : candidates) {
    div.push_back(sym_kl(target, decode(anchor, c.params)));
  }
  return div;
}

std::size_t argmin(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] < values[best]) {
      best = k;
    }
  }
  return best;
}

std::vector<double> logits_of(std::span<const Candidate> candidates) {
  std::vector<double> logits;
  logits.reserve(candidates.size());
  for (const auto& c : candidates) {
    logits.push_back(c.logit);
  }
  return logits;
}

}  // namespace

std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty()) {
    throw Error(ErrorCode::InvalidArgument, "log_softmax of an empty range");
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) {
    sum += std::exp(v - peak);
  }
  const double log_norm = peak + std::log(sum);
  std::vector<double> out;
  out.reserve(logits.size());
  for (double v : logits) {
    out.push_back(v - log_norm);
  }
  return out;
}

double seg_loss(std::span<const double> scores, std::size_t num_classes, std::span<const int> gt_classes) {
  if (num_classes == 0 || scores.size() != gt_classes.size() * num_classes) {
    throw Error(ErrorCode::ShapeMismatch, "score array does not match pixels x classes");
  }
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < gt_classes.size(); ++i) {
    const int gt = gt_classes[i];
    if (gt == kIgnoreClass) {
      continue;
    }
    if (gt < 0 || static_cast<std::size_t>(gt) >= num_classes) {
      throw Error(ErrorCode::InvalidArgument, "ground-truth class " + std::to_string(gt) + " out of range");
    }
    const auto lsm = log_softmax(scores.subspan(i * num_classes, num_classes));
    total -= lsm[static_cast<std::size_t>(gt)];
    ++count;
  }
  if (count == 0) {
    throw Error(ErrorCode::AllVoid, "no non-void pixels contribute to the segmentation loss");
  }
  return std::max(total / static_cast<double>(count), 0.0);
}

double seg_loss(const PredictionGrid& grid, std::span<const int> gt_classes) {
  if (gt_classes.size() != grid.cell_count()) {
    throw Error(ErrorCode::ShapeMismatch, "class target count does not match grid cell count");
  }
  std::vector<double> scores;
  scores.reserve(grid.cell_count() * static_cast<std::size_t>(grid.num_classes()));
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const auto s = grid.class_scores(cell);
    scores.insert(scores.end(), s.begin(), s.end());
  }
  return seg_loss(scores, static_cast<std::size_t>(grid.num_classes()), gt_classes);
}

double rep_term(const Gaussian2D& target, std::span<const Candidate> candidates, const Anchor& anchor) {
  const std::size_t selected = select_candidate(candidates);
  const auto div = candidate_divergences(target, candidates, anchor);
  const std::size_t closest = argmin(div);
  return closest == selected ? div[closest] : div[closest] + div[selected];
}

double rep_loss(const PredictionGrid& grid, const CellTargets& targets) {
  check_cells(grid, targets);
  double total = 0.0;
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    if (targets[cell]) {
      total += rep_term(*targets[cell], grid.candidates(cell), grid.cell_anchor(cell));
    }
  }
  return total;
}

double mix_loss(const PredictionGrid& grid, const CellTargets& targets) {
  check_cells(grid, targets);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    if (!targets[cell]) {
      continue;
    }
    const auto cands = grid.candidates(cell);
    const auto div = candidate_divergences(*targets[cell], cands, grid.cell_anchor(cell));
    const auto lsm = log_softmax(logits_of(cands));
    total -= lsm[argmin(div)];
    ++count;
  }
  if (count == 0) {
    throw Error(ErrorCode::AllBackground, "no foreground cells contribute to the mixture loss");
  }
  return std::max(total / static_cast<double>(count), 0.0);
}

double total_loss(double l_seg, double l_rep, double l_mix, const LossWeights& weights) {
  return l_seg + weights.alpha * l_rep + weights.beta * l_mix;
}

CellTargets cell_targets(const Scene& scene, int scale) {
  std::vector<Gaussian2D> fits;
  fits.reserve(scene.objects.size());
  for (const auto& obj : scene.objects) {
    fits.push_back(fit_gaussian(obj.pixels));
  }
  const auto owners = cell_owners(scene, scale);
  CellTargets targets(owners.size());
  for (std::size_t cell = 0; cell < owners.size(); ++cell) {
    if (owners[cell] >= 0) {
      targets[cell] = fits[static_cast<std::size_t>(owners[cell])];
    }
  }
  return targets;
}

std::vector<int> cell_classes(const Scene& scene, int scale) {
  const int gw = scaled_extent(scene.width, scale);
  const int gh = scaled_extent(scene.height, scale);
  const auto classes = semantic_classes(scene);
  const auto owners = cell_owners(scene, scale);
  std::vector<int> out(owners.size());
  for (int cy = 0; cy < gh; ++cy) {
    for (int cx = 0; cx < gw; ++cx) {
      const auto cell = static_cast<std::size_t>(cy) * gw + cx;
      if (owners[cell] >= 0) {
        out[cell] = scene.objects[static_cast<std::size_t>(owners[cell])].class_id;
        continue;
      }
      const int px = std::min(cx * scale + scale / 2, scene.width - 1);
      const int py = std::min(cy * scale + scale / 2, scene.height - 1);
      out[cell] = classes[static_cast<std::size_t>(py) * scene.width + px];
    }
  }
  return out;
}

}  // namespace distrep

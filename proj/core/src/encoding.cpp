#include "distrep/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace distrep {

PredictionGrid::PredictionGrid(int width, int height, int scale, int n, int num_classes)
    : width_(width), height_(height), scale_(scale), n_(n), num_classes_(num_classes) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::InvalidGrid, "grid dimensions must be positive");
  }
  if (scale <= 0) {
    throw Error(ErrorCode::InvalidGrid, "grid scale must be positive");
  }
  if (n < 1) {
    throw Error(ErrorCode::EmptyCandidateSet, "grid needs at least one candidate per cell");
  }
  if (num_classes < 1) {
    throw Error(ErrorCode::InvalidGrid, "grid needs at least one class");
  }
  candidates_.resize(cell_count() * static_cast<std::size_t>(n));
  class_scores_.resize(cell_count() * static_cast<std::size_t>(num_classes));
}

std::span<Candidate> PredictionGrid::candidates(std::size_t cell) {
  return std::span<Candidate>(candidates_).subspan(cell * n_, n_);
}

std::span<const Candidate> PredictionGrid::candidates(std::size_t cell) const {
  return std::span<const Candidate>(candidates_).subspan(cell * n_, n_);
}

std::span<double> PredictionGrid::class_scores(std::size_t cell) {
  return std::span<double>(class_scores_).subspan(cell * num_classes_, num_classes_);
}

std::span<const double> PredictionGrid::class_scores(std::size_t cell) const {
  return std::span<const double>(class_scores_).subspan(cell * num_classes_, num_classes_);
}

Anchor PredictionGrid::cell_anchor(std::size_t cell) const noexcept {
  const auto cx = static_cast<double>(cell % static_cast<std::size_t>(width_));
  const auto cy = static_cast<double>(cell / static_cast<std::size_t>(width_));
  return Anchor{(cx + 0.5) * scale_ - 0.5, (cy + 0.5) * scale_ - 0.5};
}

void validate_grid(const PredictionGrid& grid) {
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    for (const auto& c : grid.candidates(cell)) {
      const auto& e = c.params;
      for (double v : {e.dx, e.dy, e.log_sigma_x, e.log_sigma_y, e.atanh_rho, c.logit}) {
        if (!std::isfinite(v)) {
          throw Error(ErrorCode::InvalidGrid, "non-finite candidate value in cell " + std::to_string(cell));
        }
      }
    }
    for (double s : grid.class_scores(cell)) {
      if (!std::isfinite(s)) {
        throw Error(ErrorCode::InvalidGrid, "non-finite class score in cell " + std::to_string(cell));
      }
    }
  }
}

EncodedParams encode(const Anchor& anchor, const Gaussian2D& g) {
  validate_gaussian(g);
  return EncodedParams{anchor.x - g.mu_x, anchor.y - g.mu_y, std::log(g.sigma_x), std::log(g.sigma_y),
                       std::atanh(g.rho)};
}

Gaussian2D decode(const Anchor& anchor, const EncodedParams& e) {
  for (double v : {e.dx, e.dy, e.log_sigma_x, e.log_sigma_y, e.atanh_rho}) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteValue, "encoded parameter is not finite");
    }
  }
  return Gaussian2D{anchor.x - e.dx, anchor.y - e.dy, std::exp(e.log_sigma_x), std::exp(e.log_sigma_y),
                    std::clamp(std::tanh(e.atanh_rho), -kRhoBound, kRhoBound)};
}

std::size_t select_candidate(std::span<const Candidate> candidates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::EmptyCandidateSet, "candidate set is empty");
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    if (candidates[k].logit > candidates[best].logit) {
      best = k;
    }
  }
  return best;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::InvalidArgument, "argmax of an empty range");
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) {
      best = k;
    }
  }
  return best;
}

DecodedMap decode_grid(const PredictionGrid& grid) {
  validate_grid(grid);
  DecodedMap out{grid.width(), grid.height(), grid.scale(), {}};
  out.cells.reserve(grid.cell_count());
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const auto cands = grid.candidates(cell);
    const std::size_t j = select_candidate(cands);
    out.cells.push_back(DecodedCell{decode(grid.cell_anchor(cell), cands[j].params),
                                    static_cast<int>(argmax(grid.class_scores(cell))), j});
  }
  return out;
}

}  // namespace distrep

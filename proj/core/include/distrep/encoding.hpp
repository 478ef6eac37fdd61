#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "distrep/types.hpp"

namespace distrep {

/// Location-invariant parameterization predicted at a pixel:
/// (pixel - mean, log sigma, atanh rho).
struct EncodedParams {
  double dx = 0.0;
  double dy = 0.0;
  double log_sigma_x = 0.0;
  double log_sigma_y = 0.0;
  double atanh_rho = 0.0;

  friend bool operator==(const EncodedParams&, const EncodedParams&) = default;
};

/// One mixture candidate: encoded distribution plus its unnormalized log-likelihood.
struct Candidate {
  EncodedParams params;
  double logit = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Real-valued image position a candidate is decoded relative to.
struct Anchor {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Anchor&, const Anchor&) = default;
};

inline Anchor anchor_of(const PixelCoord& p) {
  return Anchor{static_cast<double>(p.x), static_cast<double>(p.y)};
}

/// Dense prediction: n candidates and `num_classes` class scores per cell,
/// at a down-scale factor `scale` relative to the scene. Row-major cells.
class PredictionGrid {
 public:
  PredictionGrid(int width, int height, int scale, int n, int num_classes);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int scale() const noexcept { return scale_; }
  int n() const noexcept { return n_; }
  int num_classes() const noexcept { return num_classes_; }
  std::size_t cell_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  std::size_t cell_index(int cx, int cy) const noexcept {
    return static_cast<std::size_t>(cy) * width_ + static_cast<std::size_t>(cx);
  }

  std::span<Candidate> candidates(std::size_t cell);
  std::span<const Candidate> candidates(std::size_t cell) const;
  std::span<double> class_scores(std::size_t cell);
  std::span<const double> class_scores(std::size_t cell) const;

  /// Image-space anchor of a cell: (c + 0.5) * scale - 0.5 per axis.
  Anchor cell_anchor(std::size_t cell) const noexcept;

  friend bool operator==(const PredictionGrid&, const PredictionGrid&) = default;

 private:
  int width_;
  int height_;
  int scale_;
  int n_;
  int num_classes_;
  std::vector<Candidate> candidates_;
  std::vector<double> class_scores_;
};

/// Throws InvalidGrid when any value is non-finite.
void validate_grid(const PredictionGrid& grid);

EncodedParams encode(const Anchor& anchor, const Gaussian2D& g);
inline EncodedParams encode(const PixelCoord& pixel, const Gaussian2D& g) { return encode(anchor_of(pixel), g); }

/// Inverse of encode. rho = tanh(atanh_rho) is clamped into [-kRhoBound, kRhoBound].
Gaussian2D decode(const Anchor& anchor, const EncodedParams& e);
inline Gaussian2D decode(const PixelCoord& pixel, const EncodedParams& e) { return decode(anchor_of(pixel), e); }

/// Index of the largest logit; ties go to the lowest index.
std::size_t select_candidate(std::span<const Candidate> candidates);

/// Index of the largest score; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

struct DecodedCell {
  Gaussian2D gaussian;
  int class_id = 0;
  std::size_t candidate = 0;
};

struct DecodedMap {
  int width = 0;
  int height = 0;
  int scale = 1;
  std::vector<DecodedCell> cells;
};

/// Per cell: decode the selected candidate at the cell anchor; class = argmax score.
DecodedMap decode_grid(const PredictionGrid& grid);

}  // namespace distrep

#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "distrep/error.hpp"

namespace distrep {

/// Largest admissible |rho|. Keeps atanh(rho) and the inverse covariance finite.
inline constexpr double kRhoBound = 1.0 - 1e-6;

/// Covariances with a determinant below this are rejected by the divergence code.
inline constexpr double kMinCovarianceDet = 1e-12;

/// Semantic class 0 is background ("stuff" / no object).
inline constexpr int kBackgroundClass = 0;

/// Reserved semantic value for void / unlabeled pixels, ignored by the losses.
inline constexpr int kIgnoreClass = 255;

struct PixelCoord {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

/// Non-empty ordered set of pixel coordinates without duplicates.
class PixelSet {
 public:
  explicit PixelSet(std::vector<PixelCoord> pixels);

  std::span<const PixelCoord> pixels() const noexcept { return pixels_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  auto begin() const noexcept { return pixels_.begin(); }
  auto end() const noexcept { return pixels_.end(); }

  friend bool operator==(const PixelSet&, const PixelSet&) = default;

 private:
  std::vector<PixelCoord> pixels_;
};

/// Five-parameter bivariate normal object representation.
struct Gaussian2D {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double rho = 0.0;

  friend bool operator==(const Gaussian2D&, const Gaussian2D&) = default;
};

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double det() const noexcept { return xx * yy - xy * xy; }
  double trace() const noexcept { return xx + yy; }

  friend bool operator==(const Sym2&, const Sym2&) = default;
};

/// Throws Error{NonPositiveSigma | RhoOutOfRange | NonFiniteValue}.
void validate_gaussian(const Gaussian2D& g);

/// Covariance [[sx^2, rho sx sy], [rho sx sy, sy^2]] of a validated Gaussian.
Sym2 covariance_of(const Gaussian2D& g);

/// Builds a Gaussian2D from a mean and a positive-definite covariance.
Gaussian2D gaussian_from_covariance(double mu_x, double mu_y, const Sym2& cov);

struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Throws Error{InvalidBox} when min > max or a coordinate is not finite.
void validate_box(const BoundingBox& box);

struct Detection {
  Gaussian2D gaussian;
  int class_id = 0;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Throws on an invalid Gaussian or a score outside [0, 1].
void validate_detection(const Detection& det);

struct SceneObject {
  int id = 0;
  int class_id = 0;
  PixelSet pixels;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

/// Image-space container of labeled objects.
///
/// Object masks are disjoint unless `allow_overlap` is set. The optional
/// semantic grid is row-major, height x width, with kIgnoreClass for void.
struct Scene {
  int width = 0;
  int height = 0;
  std::vector<SceneObject> objects;
  std::optional<std::vector<int>> semantic;
  bool allow_overlap = false;

  friend bool operator==(const Scene&, const Scene&) = default;
};

/// Checks dimensions, bounds, id uniqueness, disjointness and class ranges.
void validate_scene(const Scene& scene);

/// Per-pixel semantic class: the explicit semantic grid when present,
/// otherwise object classes painted over kBackgroundClass.
std::vector<int> semantic_classes(const Scene& scene);

/// Per-pixel object index (into scene.objects), -1 for background.
std::vector<int> object_index_map(const Scene& scene);

/// Grid extent at a given down-scale factor: ceil(size / scale).
int scaled_extent(int size, int scale);

/// Object owning each down-scaled cell: the object with the most pixels in
/// the cell (ties to the lower index), -1 when the cell has no object pixel.
std::vector<int> cell_owners(const Scene& scene, int scale);

}  // namespace distrep

#include "distrep/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace distrep {

namespace {

std::string coord_str(const PixelCoord& p) {
  return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteValue, std::string(field) + " is not finite");
  }
}

}  // namespace

PixelSet::PixelSet(std::vector<PixelCoord> pixels) : pixels_(std::move(pixels)) {
  if (pixels_.empty()) {
    throw Error(ErrorCode::EmptyPixelSet, "pixel set is empty");
  }
  std::vector<PixelCoord> sorted = pixels_;
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw Error(ErrorCode::DuplicatePixel, "duplicate pixel " + coord_str(*dup));
  }
}

void validate_gaussian(const Gaussian2D& g) {
  require_finite(g.mu_x, "mu_x");
  require_finite(g.mu_y, "mu_y");
  require_finite(g.sigma_x, "sigma_x");
  require_finite(g.sigma_y, "sigma_y");
  require_finite(g.rho, "rho");
  if (!(g.sigma_x > 0.0)) {
    throw Error(ErrorCode::NonPositiveSigma, "sigma_x must be > 0, got " + std::to_string(g.sigma_x));
  }
  if (!(g.sigma_y > 0.0)) {
    throw Error(ErrorCode::NonPositiveSigma, "sigma_y must be > 0, got " + std::to_string(g.sigma_y));
  }
  if (!(std::abs(g.rho) <= kRhoBound)) {
    throw Error(ErrorCode::RhoOutOfRange, "rho must satisfy |rho| <= 1 - 1e-6, got " + std::to_string(g.rho));
  }
}

Sym2 covariance_of(const Gaussian2D& g) {
  validate_gaussian(g);
  return Sym2{g.sigma_x * g.sigma_x, g.rho * g.sigma_x * g.sigma_y, g.sigma_y * g.sigma_y};
}

Gaussian2D gaussian_from_covariance(double mu_x, double mu_y, const Sym2& cov) {
  if (!(cov.xx > 0.0) || !(cov.yy > 0.0) || !(cov.det() > 0.0)) {
    throw Error(ErrorCode::DegenerateCovariance, "covariance is not positive definite");
  }
  Gaussian2D g{mu_x, mu_y, std::sqrt(cov.xx), std::sqrt(cov.yy), 0.0};
  g.rho = std::clamp(cov.xy / (g.sigma_x * g.sigma_y), -kRhoBound, kRhoBound);
  validate_gaussian(g);
  return g;
}

void validate_box(const BoundingBox& box) {
  for (double v : {box.x_min, box.y_min, box.x_max, box.y_max}) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidBox, "box coordinate is not finite");
    }
  }
  if (box.x_min > box.x_max || box.y_min > box.y_max) {
    throw Error(ErrorCode::InvalidBox, "box has min > max");
  }
}

void validate_detection(const Detection& det) {
  validate_gaussian(det.gaussian);
  if (!std::isfinite(det.score) || det.score < 0.0 || det.score > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "detection score must lie in [0, 1]");
  }
}

void validate_scene(const Scene& scene) {
  if (scene.width <= 0 || scene.height <= 0) {
    throw Error(ErrorCode::InvalidScene, "scene dimensions must be positive");
  }
  const auto area = static_cast<std::size_t>(scene.width) * static_cast<std::size_t>(scene.height);
  std::set<int> ids;
  std::vector<int> owner(area, -1);
  for (const auto& obj : scene.objects) {
    if (!ids.insert(obj.id).second) {
      throw Error(ErrorCode::InvalidScene, "duplicate object id " + std::to_string(obj.id));
    }
    if (obj.class_id == kBackgroundClass || obj.class_id == kIgnoreClass || obj.class_id < 0) {
      throw Error(ErrorCode::InvalidScene,
                  "object " + std::to_string(obj.id) + " has reserved class " + std::to_string(obj.class_id));
    }
    for (const auto& p : obj.pixels) {
      if (p.x < 0 || p.y < 0 || p.x >= scene.width || p.y >= scene.height) {
        throw Error(ErrorCode::InvalidScene,
                    "object " + std::to_string(obj.id) + " pixel " + coord_str(p) + " outside the scene");
      }
      auto& slot = owner[static_cast<std::size_t>(p.y) * scene.width + p.x];
      if (slot != -1 && !scene.allow_overlap) {
        throw Error(ErrorCode::InvalidScene, "objects " + std::to_string(slot) + " and " +
                                                 std::to_string(obj.id) + " overlap at " + coord_str(p));
      }
      slot = obj.id;
    }
  }
  if (scene.semantic) {
    if (scene.semantic->size() != area) {
      throw Error(ErrorCode::InvalidScene, "semantic grid size does not match width x height");
    }
    for (int c : *scene.semantic) {
      if (c < 0) {
        throw Error(ErrorCode::InvalidScene, "negative semantic class");
      }
    }
  }
}

std::vector<int> semantic_classes(const Scene& scene) {
  if (scene.semantic) {
    return *scene.semantic;
  }
  std::vector<int> classes(static_cast<std::size_t>(scene.width) * scene.height, kBackgroundClass);
  for (const auto& obj : scene.objects) {
    for (const auto& p : obj.pixels) {
      classes[static_cast<std::size_t>(p.y) * scene.width + p.x] = obj.class_id;
    }
  }
  return classes;
}

std::vector<int> object_index_map(const Scene& scene) {
  std::vector<int> index(static_cast<std::size_t>(scene.width) * scene.height, -1);
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    for (const auto& p : scene.objects[i].pixels) {
      index[static_cast<std::size_t>(p.y) * scene.width + p.x] = static_cast<int>(i);
    }
  }
  return index;
}

int scaled_extent(int size, int scale) {
  if (size <= 0 || scale <= 0) {
    throw Error(ErrorCode::InvalidArgument, "size and scale must be positive");
  }
  return (size + scale - 1) / scale;
}

std::vector<int> cell_owners(const Scene& scene, int scale) {
  const int gw = scaled_extent(scene.width, scale);
  const int gh = scaled_extent(scene.height, scale);
  const auto n_obj = scene.objects.size();
  std::vector<int> counts(static_cast<std::size_t>(gw) * gh * n_obj, 0);
  for (std::size_t i = 0; i < n_obj; ++i) {
    for (const auto& p : scene.objects[i].pixels) {
      const auto cell = static_cast<std::size_t>(p.y / scale) * gw + static_cast<std::size_t>(p.x / scale);
      ++counts[cell * n_obj + i];
    }
  }
  std::vector<int> owners(static_cast<std::size_t>(gw) * gh, -1);
  for (std::size_t cell = 0; cell < owners.size(); ++cell) {
    int best = 0;
    for (std::size_t i = 0; i < n_obj; ++i) {
      const int c = counts[cell * n_obj + i];
      if (c > best) {
        best = c;
        owners[cell] = static_cast<int>(i);
      }
    }
  }
  return owners;
}

}  // namespace distrep

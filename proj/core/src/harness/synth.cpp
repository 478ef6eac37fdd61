#include "distrep/harness/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "distrep/divergence.hpp"
#include "distrep/fit.hpp"
#include "distrep/harness/rng.hpp"

namespace distrep::harness {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kIouTolerance = 0.05;
constexpr int kSearchSteps = 40;

struct IntBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;  // inclusive
  int y1 = 0;

  bool intersects(const IntBox& o, int margin) const {
    return x0 - margin <= o.x1 && o.x0 - margin <= x1 && y0 - margin <= o.y1 && o.y0 - margin <= y1;
  }
};

IntBox box_of(const std::vector<PixelCoord>& pixels) {
  IntBox b{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), std::numeric_limits<int>::min(),
           std::numeric_limits<int>::min()};
  for (const auto& p : pixels) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

// Objects of one independently placed group, in a local frame.
struct Group {
  std::vector<std::vector<PixelCoord>> members;
};

double box_iou(const std::vector<PixelCoord>& a, const std::vector<PixelCoord>& b) {
  return iou(bbox_of(PixelSet(a)), bbox_of(PixelSet(b)));
}

// Draws `later` over `earlier`: earlier loses every pixel the later shape covers.
std::vector<PixelCoord> occlude(const std::vector<PixelCoord>& earlier, const std::vector<PixelCoord>& later) {
  std::vector<PixelCoord> sorted_later = later;
  std::sort(sorted_later.begin(), sorted_later.end());
  std::vector<PixelCoord> out;
  out.reserve(earlier.size());
  for (const auto& p : earlier) {
    if (!std::binary_search(sorted_later.begin(), sorted_later.end(), p)) {
      out.push_back(p);
    }
  }
  return out;
}

double bounding_radius(const Shape& s) { return std::hypot(s.half_u, s.half_v) + 1.0; }

// Rasterizes shapes centered near the origin onto a local canvas large enough
// to avoid clipping, then translates back so coordinates may be negative.
std::vector<PixelCoord> rasterize_local(const Shape& shape, int extent) {
  Shape shifted = shape;
  shifted.cx += extent;
  shifted.cy += extent;
  auto pixels = rasterize(shifted, 2 * extent + 1, 2 * extent + 1);
  for (auto& p : pixels) {
    p.x -= extent;
    p.y -= extent;
  }
  return pixels;
}

struct PairResult {
  std::vector<PixelCoord> first;
  std::vector<PixelCoord> second;
  double realized_iou = 0.0;
};

using PairBuilder = std::function<std::optional<PairResult>(double)>;

// Searches the scalar parameter in [lo, hi] for a realized IoU near target.
// `increasing` states the direction of the IoU response; degenerate
// geometry (an empty member) occurs at the high end when increasing and at
// the low end otherwise.
std::optional<PairResult> search_pair(const PairBuilder& build, double lo, double hi, bool increasing,
                                      double target) {
  std::optional<PairResult> best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int step = 0; step < kSearchSteps; ++step) {
    const double mid = 0.5 * (lo + hi);
    auto res = build(mid);
    if (!res) {
      (increasing ? hi : lo) = mid;
      continue;
    }
    const double err = std::abs(res->realized_iou - target);
    if (err < best_err) {
      best_err = err;
      best = res;
    }
    if ((res->realized_iou < target) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!best || best_err > kIouTolerance) {
    return std::nullopt;
  }
  return best;
}

std::optional<PairResult> finish_pair(const std::vector<PixelCoord>& first_full, std::vector<PixelCoord> second) {
  if (first_full.empty() || second.empty()) {
    return std::nullopt;
  }
  auto first = occlude(first_full, second);
  if (first.empty()) {
    return std::nullopt;
  }
  const double v = box_iou(first, second);
  return PairResult{std::move(first), std::move(second), v};
}

std::optional<PairResult> make_concentric(Rng& rng, const SynthSpec& spec, double target) {
  Shape ring;
  ring.family = ShapeFamily::Ring;
  ring.half_u = rng.uniform(std::max(spec.min_half_size, 6.0), std::max(spec.max_half_size, 6.0));
  ring.half_v = ring.half_u * rng.uniform(0.6, 1.0);
  ring.angle = rng.uniform(0.0, kPi);
  ring.inner_ratio = rng.uniform(0.45, 0.8);
  const int extent = static_cast<int>(std::ceil(bounding_radius(ring)));
  const auto ring_pixels = rasterize_local(ring, extent);

  PairBuilder build = [&](double q) -> std::optional<PairResult> {
    Shape inner = ring;
    inner.family = ShapeFamily::Ellipse;
    inner.half_u = ring.half_u * q;
    inner.half_v = ring.half_v * q;
    return finish_pair(ring_pixels, rasterize_local(inner, extent));
  };
  return search_pair(build, 0.2, 0.97, true, target);
}

std::optional<PairResult> make_cross(Rng& rng, const SynthSpec& spec, double target) {
  const double length = rng.uniform(std::max(spec.min_half_size, 6.0), std::max(spec.max_half_size, 6.0));
  const double thickness = rng.uniform(1.2, std::max(1.5, length * 0.25));
  const double phi = rng.uniform(20.0, 70.0) * kPi / 180.0;
  // Mirror about the x or the y axis so the full-length boxes coincide.
  const double base = rng.uniform() < 0.5 ? 0.0 : kPi / 2.0;

  Shape a;
  a.family = ShapeFamily::RotatedRect;
  a.half_u = length;
  a.half_v = thickness;
  a.angle = base + phi;
  const int extent = static_cast<int>(std::ceil(bounding_radius(a)));
  const auto a_pixels = rasterize_local(a, extent);

  PairBuilder build = [&](double s) -> std::optional<PairResult> {
    Shape b = a;
    b.angle = base - phi;
    b.half_u = length * s;
    return finish_pair(a_pixels, rasterize_local(b, extent));
  };
  return search_pair(build, 0.15, 1.0, true, target);
}

std::optional<PairResult> make_offset(Rng& rng, const SynthSpec& spec, double target) {
  static constexpr ShapeFamily kFamilies[] = {ShapeFamily::Ellipse, ShapeFamily::AxisRect, ShapeFamily::RotatedRect};
  Shape a;
  a.family = kFamilies[rng.uniform_int(0, 2)];
  a.half_u = rng.uniform(spec.min_half_size, spec.max_half_size);
  a.half_v = rng.uniform(spec.min_half_size, spec.max_half_size);
  a.angle = a.family == ShapeFamily::AxisRect ? 0.0 : rng.uniform(0.0, kPi);
  Shape b = a;
  const double size = rng.uniform(0.85, 1.15);
  b.half_u *= size;
  b.half_v *= size;
  if (b.family != ShapeFamily::AxisRect) {
    b.angle += rng.uniform(-0.3, 0.3);
  }
  const double dir = rng.uniform(0.0, 2.0 * kPi);
  const double reach = 2.0 * std::max(a.half_u, a.half_v);
  const int extent = static_cast<int>(std::ceil(std::max(bounding_radius(a), bounding_radius(b)) + reach));
  const auto a_pixels = rasterize_local(a, extent);

  PairBuilder build = [&](double d) -> std::optional<PairResult> {
    Shape moved = b;
    moved.cx = std::round(d * std::cos(dir));
    moved.cy = std::round(d * std::sin(dir));
    return finish_pair(a_pixels, rasterize_local(moved, extent));
  };
  return search_pair(build, 0.0, reach, false, target);
}

Shape random_shape(Rng& rng, const SynthSpec& spec) {
  Shape s;
  s.family = spec.shapes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(spec.shapes.size()) - 1))];
  s.half_u = rng.uniform(spec.min_half_size, spec.max_half_size);
  s.half_v = rng.uniform(spec.min_half_size, spec.max_half_size);
  s.angle = s.family == ShapeFamily::AxisRect ? 0.0 : rng.uniform(0.0, kPi);
  s.inner_ratio = rng.uniform(0.4, 0.75);
  return s;
}

std::optional<Group> make_pair_group(Rng& rng, const SynthSpec& spec, PairGeometry geometry) {
  const double target = rng.uniform(spec.overlap.iou_min, spec.overlap.iou_max);
  std::optional<PairResult> pair;
  switch (geometry) {
    case PairGeometry::Concentric: pair = make_concentric(rng, spec, target); break;
    case PairGeometry::RotatedCross: pair = make_cross(rng, spec, target); break;
    case PairGeometry::Offset: pair = make_offset(rng, spec, target); break;
  }
  if (!pair) {
    return std::nullopt;
  }
  return Group{{std::move(pair->first), std::move(pair->second)}};
}

struct Placed {
  std::vector<PixelCoord> pixels;
  int class_id = 1;
  Gaussian2D fit;
};

class SceneBuilder {
 public:
  SceneBuilder(const SynthSpec& spec, Rng& rng) : spec_(spec), rng_(rng) {}

  // Tries random integer placements of the group; returns false if none fits.
  bool place(const Group& group, const std::vector<int>& classes, bool check_divergence) {
    std::vector<PixelCoord> all;
    for (const auto& m : group.members) {
      all.insert(all.end(), m.begin(), m.end());
    }
    const IntBox local = box_of(all);
    const int span_x = spec_.width - (local.x1 - local.x0 + 1);
    const int span_y = spec_.height - (local.y1 - local.y0 + 1);
    if (span_x < 0 || span_y < 0) {
      return false;
    }
    for (int attempt = 0; attempt < spec_.max_retries; ++attempt) {
      const int ox = rng_.uniform_int(0, span_x) - local.x0;
      const int oy = rng_.uniform_int(0, span_y) - local.y0;
      const IntBox placed{local.x0 + ox, local.y0 + oy, local.x1 + ox, local.y1 + oy};
      const bool collides = std::any_of(boxes_.begin(), boxes_.end(),
                                        [&](const IntBox& b) { return b.intersects(placed, spec_.margin); });
      if (collides) {
        continue;
      }
      std::vector<Placed> members;
      for (std::size_t i = 0; i < group.members.size(); ++i) {
        Placed p;
        p.class_id = classes[i];
        for (auto px : group.members[i]) {
          p.pixels.push_back(PixelCoord{px.x + ox, px.y + oy});
        }
        std::sort(p.pixels.begin(), p.pixels.end(),
                  [](const PixelCoord& a, const PixelCoord& b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
        p.fit = fit_gaussian(PixelSet(p.pixels));
        members.push_back(std::move(p));
      }
      if (check_divergence && spec_.min_pair_divergence > 0.0 && !separated(members)) {
        continue;
      }
      boxes_.push_back(placed);
      for (auto& m : members) {
        placed_.push_back(std::move(m));
      }
      return true;
    }
    return false;
  }

  Scene finish() const {
    Scene scene;
    scene.width = spec_.width;
    scene.height = spec_.height;
    int id = 1;
    for (const auto& p : placed_) {
      scene.objects.push_back(SceneObject{id++, p.class_id, PixelSet(p.pixels)});
    }
    validate_scene(scene);
    return scene;
  }

  std::size_t object_count() const { return placed_.size(); }

 private:
  bool separated(const std::vector<Placed>& members) const {
    for (const auto& m : members) {
      for (const auto& p : placed_) {
        if (sym_kl(m.fit, p.fit) < spec_.min_pair_divergence) {
          return false;
        }
      }
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        if (sym_kl(members[i].fit, members[j].fit) < spec_.min_pair_divergence) {
          return false;
        }
      }
    }
    return true;
  }

  const SynthSpec& spec_;
  Rng& rng_;
  std::vector<IntBox> boxes_;
  std::vector<Placed> placed_;
};

Scene synth_one(const SynthSpec& spec, std::uint64_t scene_seed, int scene_index) {
  Rng rng(scene_seed);
  SceneBuilder builder(spec, rng);

  for (int p = 0; p < spec.overlap.pairs_per_scene; ++p) {
    const auto pair_index = static_cast<std::size_t>(scene_index) * spec.overlap.pairs_per_scene + p;
    const PairGeometry geometry = spec.overlap.geometries[pair_index % spec.overlap.geometries.size()];
    const int cls = rng.uniform_int(1, spec.num_classes);
    bool ok = false;
    for (int attempt = 0; attempt < spec.max_retries && !ok; ++attempt) {
      auto group = make_pair_group(rng, spec, geometry);
      ok = group && builder.place(*group, {cls, cls}, false);
    }
    if (!ok) {
      throw Error(ErrorCode::UnsatisfiableOverlap,
                  "scene " + std::to_string(scene_index) + ": could not realize overlapping pair " +
                      std::to_string(p) + " (" + std::string(to_string(geometry)) + ")");
    }
  }

  const int wanted = rng.uniform_int(spec.min_objects, spec.max_objects);
  int placed = 0;
  for (int i = 0; i < wanted; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < spec.max_retries && !ok; ++attempt) {
      const Shape shape = random_shape(rng, spec);
      auto pixels = rasterize_local(shape, static_cast<int>(std::ceil(bounding_radius(shape))));
      if (pixels.empty()) {
        continue;
      }
      ok = builder.place(Group{{std::move(pixels)}}, {rng.uniform_int(1, spec.num_classes)}, true);
    }
    if (!ok) {
      break;
    }
    ++placed;
  }
  if (placed < spec.min_objects) {
    throw Error(ErrorCode::PlacementFailed, "scene " + std::to_string(scene_index) + ": placed only " +
                                                std::to_string(placed) + " of at least " +
                                                std::to_string(spec.min_objects) + " free objects");
  }
  return builder.finish();
}

}  // namespace

std::string_view to_string(ShapeFamily family) {
  switch (family) {
    case ShapeFamily::AxisRect: return "AxisRect";
    case ShapeFamily::RotatedRect: return "RotatedRect";
    case ShapeFamily::Ellipse: return "Ellipse";
    case ShapeFamily::Ring: return "Ring";
  }
  return "Unknown";
}

std::string_view to_string(PairGeometry geometry) {
  switch (geometry) {
    case PairGeometry::Concentric: return "Concentric";
    case PairGeometry::RotatedCross: return "RotatedCross";
    case PairGeometry::Offset: return "Offset";
  }
  return "Unknown";
}

ShapeFamily shape_family_from_string(std::string_view name) {
  for (auto f : {ShapeFamily::AxisRect, ShapeFamily::RotatedRect, ShapeFamily::Ellipse, ShapeFamily::Ring}) {
    if (to_string(f) == name) {
      return f;
    }
  }
  throw Error(ErrorCode::ParseError, "unknown shape family '" + std::string(name) + "'");
}

PairGeometry pair_geometry_from_string(std::string_view name) {
  for (auto g : {PairGeometry::Concentric, PairGeometry::RotatedCross, PairGeometry::Offset}) {
    if (to_string(g) == name) {
      return g;
    }
  }
  throw Error(ErrorCode::ParseError, "unknown pair geometry '" + std::string(name) + "'");
}

std::vector<PixelCoord> rasterize(const Shape& shape, int width, int height) {
  const double c = std::cos(shape.angle);
  const double s = std::sin(shape.angle);
  const double r = bounding_radius(shape);
  const int x0 = std::max(0, static_cast<int>(std::floor(shape.cx - r)));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(shape.cx + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(shape.cy - r)));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(shape.cy + r)));

  std::vector<PixelCoord> out;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double px = x - shape.cx;
      const double py = y - shape.cy;
      bool inside = false;
      if (shape.family == ShapeFamily::AxisRect) {
        inside = std::abs(px) <= shape.half_u && std::abs(py) <= shape.half_v;
      } else {
        // Coordinates in the shape's rotated frame.
        const double u = c * px + s * py;
        const double v = -s * px + c * py;
        if (shape.family == ShapeFamily::RotatedRect) {
          inside = std::abs(u) <= shape.half_u && std::abs(v) <= shape.half_v;
        } else {
          const double q = (u * u) / (shape.half_u * shape.half_u) + (v * v) / (shape.half_v * shape.half_v);
          inside = q <= 1.0;
          if (shape.family == ShapeFamily::Ring) {
            inside = inside && q > shape.inner_ratio * shape.inner_ratio;
          }
        }
      }
      if (inside) {
        out.push_back(PixelCoord{x, y});
      }
    }
  }
  return out;
}

void validate_synth_spec(const SynthSpec& spec) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (spec.num_scenes < 0) fail("num_scenes must be non-negative");
  if (spec.width <= 0 || spec.height <= 0) fail("scene size must be positive");
  if (spec.min_objects < 0 || spec.min_objects > spec.max_objects) fail("object count range is empty");
  if (spec.shapes.empty()) fail("shape family list is empty");
  if (spec.num_classes < 1 || spec.num_classes >= kIgnoreClass) fail("num_classes must lie in [1, 254]");
  if (!(spec.min_half_size >= 1.0) || spec.min_half_size > spec.max_half_size) fail("half-size range is empty");
  if (spec.margin < 0) fail("margin must be non-negative");
  if (!(spec.min_pair_divergence >= 0.0)) fail("min_pair_divergence must be non-negative");
  if (spec.max_retries < 1) fail("max_retries must be positive");
  const auto& o = spec.overlap;
  if (o.pairs_per_scene < 0) fail("pairs_per_scene must be non-negative");
  if (o.pairs_per_scene > 0) {
    if (o.geometries.empty()) fail("overlap geometry list is empty");
    if (!(o.iou_min >= 0.0) || o.iou_min > o.iou_max || o.iou_max > 1.0) fail("overlap IoU range is empty");
  }
}

std::vector<Scene> synth_scenes(const SynthSpec& spec) {
  validate_synth_spec(spec);
  Rng master(spec.seed);
  std::vector<Scene> scenes;
  scenes.reserve(static_cast<std::size_t>(spec.num_scenes));
  for (int i = 0; i < spec.num_scenes; ++i) {
    scenes.push_back(synth_one(spec, master.next(), i));
  }
  return scenes;
}

}  // namespace distrep::harness

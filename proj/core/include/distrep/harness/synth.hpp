#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "distrep/types.hpp"

namespace distrep::harness {

enum class ShapeFamily { AxisRect, RotatedRect, Ellipse, Ring };

/// Geometry of a designated overlapping pair.
enum class PairGeometry {
  /// Ring with a concentric ellipse drawn on top of it.
  Concentric,
  /// Two elongated bars through a shared center at different angles.
  RotatedCross,
  /// Two similar shapes offset so the later one occludes the earlier.
  Offset,
};

std::string_view to_string(ShapeFamily family);
std::string_view to_string(PairGeometry geometry);
ShapeFamily shape_family_from_string(std::string_view name);
PairGeometry pair_geometry_from_string(std::string_view name);

/// Analytic shape in image space; pixel centers sit at integer coordinates.
struct Shape {
  ShapeFamily family = ShapeFamily::Ellipse;
  double cx = 0.0;
  double cy = 0.0;
  /// Half extents along the shape's own axes.
  double half_u = 1.0;
  double half_v = 1.0;
  /// Rotation in radians (ignored for AxisRect).
  double angle = 0.0;
  /// Ring hole as a fraction of the outer half extents.
  double inner_ratio = 0.6;
};

/// Pixel centers covered by the shape, clipped to [0,w) x [0,h), row-major order.
std::vector<PixelCoord> rasterize(const Shape& shape, int width, int height);

struct OverlapSpec {
  /// Designated same-class overlapping pairs per scene.
  int pairs_per_scene = 0;
  /// Target bbox-IoU range; each pair draws a target uniformly from it.
  double iou_min = 0.5;
  double iou_max = 1.0;
  /// Geometries cycled through in order, pair by pair across the whole suite.
  std::vector<PairGeometry> geometries{PairGeometry::Concentric, PairGeometry::RotatedCross, PairGeometry::Offset};
};

struct SynthSpec {
  std::uint64_t seed = 0;
  int num_scenes = 1;
  int width = 128;
  int height = 128;
  /// Free (non-designated) object count range.
  int min_objects = 1;
  int max_objects = 4;
  std::vector<ShapeFamily> shapes{ShapeFamily::AxisRect, ShapeFamily::RotatedRect, ShapeFamily::Ellipse,
                                  ShapeFamily::Ring};
  /// Foreground classes are 1..num_classes.
  int num_classes = 3;
  /// Half-extent range of generated shapes, in pixels.
  double min_half_size = 4.0;
  double max_half_size = 14.0;
  /// Minimum gap in pixels between the boxes of independently placed groups.
  int margin = 2;
  /// When > 0, every object pair in a scene must have sym_kl >= this value.
  double min_pair_divergence = 0.0;
  OverlapSpec overlap;
  int max_retries = 200;
};

/// Throws InvalidArgument for empty or inverted ranges.
void validate_synth_spec(const SynthSpec& spec);

/// Deterministic rasterized scenes. Designated pairs come first (objects 2k
/// and 2k+1 form pair k) and realize their target bbox IoU within 0.05;
/// overlaps are resolved to the later object. Free objects follow.
/// Throws UnsatisfiableOverlap or PlacementFailed when bounded retries run out.
std::vector<Scene> synth_scenes(const SynthSpec& spec);

}  // namespace distrep::harness

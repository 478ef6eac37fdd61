#include "distrep/harness/suites.hpp"

#include <string>

#include "distrep/error.hpp"

namespace distrep::harness {

SynthSpec separated_suite() {
  SynthSpec s;
  s.seed = 20170801;
  s.num_scenes = 24;
  s.width = 96;
  s.height = 96;
  s.min_objects = 3;
  s.max_objects = 6;
  s.num_classes = 3;
  s.min_half_size = 3.0;
  s.max_half_size = 10.0;
  s.margin = 3;
  s.min_pair_divergence = 10.0;
  return s;
}

SynthSpec overlap_suite() {
  SynthSpec s;
  s.seed = 20170802;
  s.num_scenes = 120;
  s.width = 128;
  s.height = 128;
  s.min_objects = 1;
  s.max_objects = 3;
  s.num_classes = 3;
  s.min_half_size = 5.0;
  s.max_half_size = 16.0;
  s.margin = 2;
  s.overlap.pairs_per_scene = 2;
  s.overlap.iou_min = 0.55;
  s.overlap.iou_max = 0.95;
  return s;
}

SynthSpec calibration_suite() {
  SynthSpec s = overlap_suite();
  s.seed = 20170803;
  return s;
}

SynthSpec suite_by_name(std::string_view name) {
  if (name == "separated") return separated_suite();
  if (name == "overlap") return overlap_suite();
  if (name == "calibration") return calibration_suite();
  throw Error(ErrorCode::InvalidArgument, "unknown suite '" + std::string(name) + "'");
}

std::vector<std::string_view> suite_names() { return {"separated", "overlap", "calibration"}; }

}  // namespace distrep::harness

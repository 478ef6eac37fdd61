#pragma once

#include <string_view>
#include <vector>

#include "distrep/harness/synth.hpp"

namespace distrep::harness {

/// Scenes whose objects are far apart in both space and divergence.
SynthSpec separated_suite();

/// Scenes built around designated same-class overlapping pairs.
SynthSpec overlap_suite();

/// Same generator as overlap_suite with an independent seed, used to pick tau.
SynthSpec calibration_suite();

/// Looks up a suite by name ("separated", "overlap", "calibration").
/// Throws InvalidArgument for unknown names.
SynthSpec suite_by_name(std::string_view name);

std::vector<std::string_view> suite_names();

}  // namespace distrep::harness

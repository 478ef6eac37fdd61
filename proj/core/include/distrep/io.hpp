#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "distrep/encoding.hpp"
#include "distrep/harness/synth.hpp"
#include "distrep/postproc.hpp"
#include "distrep/types.hpp"

namespace distrep::io {

using nlohmann::json;

json to_json(const Gaussian2D& g);
/// Accepts {"mu_x":..,"mu_y":..,"sigma_x":..,"sigma_y":..,"rho":..} or a 5-element array.
Gaussian2D gaussian_from_json(const json& j);

json to_json(const BoundingBox& box);

/// Canonical scene document:
///   {"width":W,"height":H,"objects":[{"id":1,"class":2,"pixels":[[x,y],...]}],"semantic":null|[[...]]}
/// "allow_overlap":true is appended only when set.
json to_json(const Scene& scene);
/// Also accepts "rle":{"counts":[...],"order":"row-major"|"column-major"} in place of "pixels".
Scene scene_from_json(const json& j);

json to_json(const Detection& det);
Detection detection_from_json(const json& j);
json detections_to_json(std::span<const Detection> dets);
std::vector<Detection> detections_from_json(const json& j);

/// Single-document grid: header fields plus "data", a flat row-major array of
/// 6n + classes reals per cell: n x (dx, dy, log_sigma_x, log_sigma_y, atanh_rho, logit), then class scores.
json to_json(const PredictionGrid& grid);
PredictionGrid grid_from_json(const json& j);

/// Two-part text form: a one-line JSON header {width,height,scale,n,classes}
/// followed by the flat array as whitespace-separated reals.
std::string grid_to_text(const PredictionGrid& grid);
/// Accepts either the single-document or the two-part form.
PredictionGrid grid_from_text(std::string_view text);

/// {"width":W,"height":H,"instances":[{"id":k,"class":c,"score":s,"gaussian":{...},"rle":{...}}]}
json to_json(const InstanceMap& map);
InstanceMap instance_map_from_json(const json& j);

harness::SynthSpec synth_spec_from_json(const json& j);
json to_json(const harness::SynthSpec& spec);

std::string read_text_file(const std::filesystem::path& path);
json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace distrep::io

#include "distrep/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "distrep/rle.hpp"

namespace distrep::io {

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) {
    parse_fail(std::string("expected an object with field '") + key + "'");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    parse_fail(std::string("missing field '") + key + "'");
  }
  return *it;
}

double get_real(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) {
    parse_fail(std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

int get_int(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) {
    parse_fail(std::string("field '") + key + "' must be an integer");
  }
  return v.get<int>();
}

// Converts nlohmann exceptions raised inside `fn` into ParseError.
template <typename Fn>
auto guarded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

json rle_json(std::span<const PixelCoord> pixels, int width, int height) {
  return json{{"counts", rle_encode(pixels, width, height)}, {"order", "row-major"}};
}

std::vector<PixelCoord> pixels_from_rle(const json& rle, int width, int height) {
  const auto counts = field(rle, "counts").get<std::vector<std::int64_t>>();
  RleOrder order = RleOrder::RowMajor;
  if (rle.contains("order")) {
    order = rle_order_from_string(rle.at("order").get<std::string>());
  }
  return rle_decode(counts, width, height, order);
}

}  // namespace

json to_json(const Gaussian2D& g) {
  return json{{"mu_x", g.mu_x}, {"mu_y", g.mu_y}, {"sigma_x", g.sigma_x}, {"sigma_y", g.sigma_y}, {"rho", g.rho}};
}

Gaussian2D gaussian_from_json(const json& j) {
  return guarded([&] {
    Gaussian2D g;
    if (j.is_array()) {
      if (j.size() != 5) {
        parse_fail("a Gaussian array needs 5 values");
      }
      g = Gaussian2D{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>(),
                     j[4].get<double>()};
    } else {
      g = Gaussian2D{get_real(j, "mu_x"), get_real(j, "mu_y"), get_real(j, "sigma_x"), get_real(j, "sigma_y"),
                     get_real(j, "rho")};
    }
    validate_gaussian(g);
    return g;
  });
}

json to_json(const BoundingBox& box) { return json::array({box.x_min, box.y_min, box.x_max, box.y_max}); }

json to_json(const Scene& scene) {
  json objects = json::array();
  for (const auto& obj : scene.objects) {
    json pixels = json::array();
    for (const auto& p : obj.pixels) {
      pixels.push_back(json::array({p.x, p.y}));
    }
    objects.push_back(json{{"id", obj.id}, {"class", obj.class_id}, {"pixels", std::move(pixels)}});
  }
  json semantic = nullptr;
  if (scene.semantic) {
    semantic = json::array();
    for (int y = 0; y < scene.height; ++y) {
      auto row_begin = scene.semantic->begin() + static_cast<std::ptrdiff_t>(y) * scene.width;
      semantic.push_back(std::vector<int>(row_begin, row_begin + scene.width));
    }
  }
  json j{{"width", scene.width}, {"height", scene.height}, {"objects", std::move(objects)},
         {"semantic", std::move(semantic)}};
  if (scene.allow_overlap) {
    j["allow_overlap"] = true;
  }
  return j;
}

Scene scene_from_json(const json& j) {
  return guarded([&] {
    Scene scene;
    scene.width = get_int(j, "width");
    scene.height = get_int(j, "height");
    if (scene.width <= 0 || scene.height <= 0) {
      parse_fail("scene dimensions must be positive");
    }
    if (j.contains("allow_overlap")) {
      scene.allow_overlap = j.at("allow_overlap").get<bool>();
    }
    for (const auto& o : field(j, "objects")) {
      std::vector<PixelCoord> pixels;
      if (o.contains("pixels")) {
        for (const auto& p : o.at("pixels")) {
          if (!p.is_array() || p.size() != 2) {
            parse_fail("pixels must be [x, y] pairs");
          }
          pixels.push_back(PixelCoord{p[0].get<int>(), p[1].get<int>()});
        }
      } else if (o.contains("rle")) {
        pixels = pixels_from_rle(o.at("rle"), scene.width, scene.height);
      } else {
        parse_fail("object needs 'pixels' or 'rle'");
      }
      scene.objects.push_back(SceneObject{get_int(o, "id"), get_int(o, "class"), PixelSet(std::move(pixels))});
    }
    if (j.contains("semantic") && !j.at("semantic").is_null()) {
      const json& rows = j.at("semantic");
      if (!rows.is_array() || rows.size() != static_cast<std::size_t>(scene.height)) {
        parse_fail("semantic must have one row per image row");
      }
      std::vector<int> grid;
      grid.reserve(static_cast<std::size_t>(scene.width) * scene.height);
      for (const auto& row : rows) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(scene.width)) {
          parse_fail("semantic rows must have width entries");
        }
        for (const auto& v : row) grid.push_back(v.get<int>());
      }
      scene.semantic = std::move(grid);
    }
    validate_scene(scene);
    return scene;
  });
}

json to_json(const Detection& det) {
  return json{{"gaussian", to_json(det.gaussian)}, {"class", det.class_id}, {"score", det.score}};
}

Detection detection_from_json(const json& j) {
  return guarded([&] {
    Detection d{gaussian_from_json(field(j, "gaussian")), get_int(j, "class"), get_real(j, "score")};
    validate_detection(d);
    return d;
  });
}

json detections_to_json(std::span<const Detection> dets) {
  json out = json::array();
  for (const auto& d : dets) out.push_back(to_json(d));
  return out;
}

std::vector<Detection> detections_from_json(const json& j) {
  if (!j.is_array()) {
    parse_fail("detections must be a JSON array");
  }
  std::vector<Detection> out;
  for (const auto& d : j) out.push_back(detection_from_json(d));
  return out;
}

namespace {

json grid_header(const PredictionGrid& grid) {
  return json{{"width", grid.width()},
              {"height", grid.height()},
              {"scale", grid.scale()},
              {"n", grid.n()},
              {"classes", grid.num_classes()}};
}

std::vector<double> grid_values(const PredictionGrid& grid) {
  std::vector<double> data;
  data.reserve(grid.cell_count() * static_cast<std::size_t>(6 * grid.n() + grid.num_classes()));
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    for (const auto& c : grid.candidates(cell)) {
      const auto& e = c.params;
      data.insert(data.end(), {e.dx, e.dy, e.log_sigma_x, e.log_sigma_y, e.atanh_rho, c.logit});
    }
    const auto s = grid.class_scores(cell);
    data.insert(data.end(), s.begin(), s.end());
  }
  return data;
}

PredictionGrid grid_from_values(const json& header, std::span<const double> data) {
  PredictionGrid grid(get_int(header, "width"), get_int(header, "height"), get_int(header, "scale"),
                      get_int(header, "n"), get_int(header, "classes"));
  const std::size_t per_cell = static_cast<std::size_t>(6 * grid.n() + grid.num_classes());
  if (data.size() != grid.cell_count() * per_cell) {
    parse_fail("grid data has " + std::to_string(data.size()) + " values, expected " +
               std::to_string(grid.cell_count() * per_cell));
  }
  std::size_t i = 0;
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    for (auto& c : grid.candidates(cell)) {
      c.params = EncodedParams{data[i], data[i + 1], data[i + 2], data[i + 3], data[i + 4]};
      c.logit = data[i + 5];
      i += 6;
    }
    for (auto& s : grid.class_scores(cell)) {
      s = data[i++];
    }
  }
  validate_grid(grid);
  return grid;
}

}  // namespace

json to_json(const PredictionGrid& grid) {
  json j = grid_header(grid);
  j["data"] = grid_values(grid);
  return j;
}

PredictionGrid grid_from_json(const json& j) {
  return guarded([&] { return grid_from_values(j, field(j, "data").get<std::vector<double>>()); });
}

std::string grid_to_text(const PredictionGrid& grid) {
  std::string out = grid_header(grid).dump();
  out += '\n';
  const auto values = grid_values(grid);
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), values[i]);
    out.append(buf, ptr);
    out += (i + 1) % 8 == 0 || i + 1 == values.size() ? '\n' : ' ';
  }
  return out;
}

PredictionGrid grid_from_text(std::string_view text) {
  return guarded([&] {
    const auto newline = text.find('\n');
    const std::string_view first = text.substr(0, newline);
    const json header = json::parse(first, nullptr, false);
    if (!header.is_discarded() && header.is_object() && !header.contains("data") && newline != std::string_view::npos) {
      std::vector<double> data;
      const char* p = text.data() + newline + 1;
      const char* end = text.data() + text.size();
      while (p < end) {
        while (p < end && (*p == ' ' || *p == '\n' || *p == '\t' || *p == '\r')) ++p;
        if (p == end) break;
        double v = 0.0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc()) {
          parse_fail("malformed number in grid data");
        }
        data.push_back(v);
        p = next;
      }
      return grid_from_values(header, data);
    }
    return grid_from_json(json::parse(text));
  });
}

json to_json(const InstanceMap& map) {
  const auto pixels = instance_pixels(map);
  json instances = json::array();
  for (std::size_t k = 0; k < map.detections.size(); ++k) {
    const auto& d = map.detections[k];
    instances.push_back(json{{"id", k + 1},
                             {"class", d.class_id},
                             {"score", d.score},
                             {"gaussian", to_json(d.gaussian)},
                             {"rle", rle_json(pixels[k], map.width, map.height)}});
  }
  return json{{"width", map.width}, {"height", map.height}, {"instances", std::move(instances)}};
}

InstanceMap instance_map_from_json(const json& j) {
  return guarded([&] {
    InstanceMap map;
    map.width = get_int(j, "width");
    map.height = get_int(j, "height");
    if (map.width <= 0 || map.height <= 0) {
      parse_fail("instance map dimensions must be positive");
    }
    const auto area = static_cast<std::size_t>(map.width) * map.height;
    map.instance_ids.assign(area, 0);
    map.class_ids.assign(area, kBackgroundClass);
    const json& instances = field(j, "instances");
    map.detections.resize(instances.size());
    for (const auto& inst : instances) {
      const int id = get_int(inst, "id");
      if (id < 1 || static_cast<std::size_t>(id) > instances.size()) {
        parse_fail("instance ids must be 1..count");
      }
      Detection det{Gaussian2D{}, get_int(inst, "class"), inst.contains("score") ? get_real(inst, "score") : 1.0};
      if (inst.contains("gaussian")) {
        det.gaussian = gaussian_from_json(inst.at("gaussian"));
      }
      map.detections[static_cast<std::size_t>(id - 1)] = det;
      for (const auto& p : pixels_from_rle(field(inst, "rle"), map.width, map.height)) {
        const std::size_t i = static_cast<std::size_t>(p.y) * map.width + p.x;
        if (map.instance_ids[i] != 0) {
          parse_fail("instances overlap");
        }
        map.instance_ids[i] = id;
        map.class_ids[i] = det.class_id;
      }
    }
    return map;
  });
}

harness::SynthSpec synth_spec_from_json(const json& j) {
  return guarded([&] {
    harness::SynthSpec s;
    s.seed = j.value("seed", s.seed);
    s.num_scenes = j.value("num_scenes", s.num_scenes);
    if (j.contains("scene_size")) {
      const auto& size = j.at("scene_size");
      s.width = size.at(0).get<int>();
      s.height = size.at(1).get<int>();
    }
    if (j.contains("objects")) {
      const auto& range = j.at("objects");
      s.min_objects = range.at(0).get<int>();
      s.max_objects = range.at(1).get<int>();
    }
    if (j.contains("shapes")) {
      s.shapes.clear();
      for (const auto& name : j.at("shapes")) s.shapes.push_back(harness::shape_family_from_string(name.get<std::string>()));
    }
    s.num_classes = j.value("num_classes", s.num_classes);
    if (j.contains("half_size")) {
      s.min_half_size = j.at("half_size").at(0).get<double>();
      s.max_half_size = j.at("half_size").at(1).get<double>();
    }
    s.margin = j.value("margin", s.margin);
    s.min_pair_divergence = j.value("min_pair_divergence", s.min_pair_divergence);
    s.max_retries = j.value("max_retries", s.max_retries);
    if (j.contains("overlap")) {
      const auto& o = j.at("overlap");
      s.overlap.pairs_per_scene = o.value("pairs_per_scene", 0);
      if (o.contains("iou")) {
        s.overlap.iou_min = o.at("iou").at(0).get<double>();
        s.overlap.iou_max = o.at("iou").at(1).get<double>();
      }
      if (o.contains("geometries")) {
        s.overlap.geometries.clear();
        for (const auto& name : o.at("geometries")) {
          s.overlap.geometries.push_back(harness::pair_geometry_from_string(name.get<std::string>()));
        }
      }
    }
    harness::validate_synth_spec(s);
    return s;
  });
}

json to_json(const harness::SynthSpec& spec) {
  json shapes = json::array();
  for (auto f : spec.shapes) shapes.push_back(std::string(harness::to_string(f)));
  json geometries = json::array();
  for (auto g : spec.overlap.geometries) geometries.push_back(std::string(harness::to_string(g)));
  return json{{"seed", spec.seed},
              {"num_scenes", spec.num_scenes},
              {"scene_size", {spec.width, spec.height}},
              {"objects", {spec.min_objects, spec.max_objects}},
              {"shapes", std::move(shapes)},
              {"num_classes", spec.num_classes},
              {"half_size", {spec.min_half_size, spec.max_half_size}},
              {"margin", spec.margin},
              {"min_pair_divergence", spec.min_pair_divergence},
              {"max_retries", spec.max_retries},
              {"overlap",
               {{"pairs_per_scene", spec.overlap.pairs_per_scene},
                {"iou", {spec.overlap.iou_min, spec.overlap.iou_max}},
                {"geometries", std::move(geometries)}}}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  return guarded([&] { return json::parse(text); });
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << text;
}

}  // namespace distrep::io

#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "distrep/divergence.hpp"
#include "distrep/fit.hpp"
#include "distrep/graddesc.hpp"
#include "distrep/harness/analysis.hpp"
#include "distrep/harness/eval.hpp"
#include "distrep/harness/oracle.hpp"
#include "distrep/harness/suites.hpp"
#include "distrep/harness/synth.hpp"
#include "distrep/io.hpp"
#include "distrep/losses.hpp"
#include "distrep/postproc.hpp"

namespace distrep::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

void emit(const json& doc, const std::string& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    io::write_text_file(out, text);
  }
}

json parse_inline(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

/// A Gaussian given inline as JSON or as a path to a JSON file.
Gaussian2D gaussian_arg(const std::string& value) {
  if (fs::is_regular_file(value)) {
    return io::gaussian_from_json(io::read_json_file(value));
  }
  return io::gaussian_from_json(parse_inline(value));
}

Scene load_scene(const std::string& path) { return io::scene_from_json(io::read_json_file(path)); }

PredictionGrid load_grid(const std::string& path) { return io::grid_from_text(io::read_text_file(path)); }

std::vector<fs::path> scene_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json" &&
        entry.path().filename().string().rfind("scene_", 0) == 0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<harness::PairRecord> load_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path);
  }
  return harness::read_pairs_csv(in);
}

void add_fit(CLI::App& app) {
  auto* cmd = app.add_subcommand("fit", "Fit a Gaussian to every object of a scene");
  auto scene = std::make_shared<std::string>();
  auto unit_pixel = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  cmd->add_option("--scene", *scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  cmd->add_flag("--unit-pixel", *unit_pixel, "Add the 1/12 px^2 unit-pixel variance");
  cmd->add_option("-o,--out", *out, "Output file (default stdout)");
  cmd->callback([=] {
    const Scene s = load_scene(*scene);
    const auto correction = *unit_pixel ? PixelCorrection::UnitPixel : PixelCorrection::None;
    json result = json::array();
    for (const auto& obj : s.objects) {
      result.push_back(json{{"id", obj.id},
                            {"class", obj.class_id},
                            {"gaussian", io::to_json(fit_gaussian(obj.pixels, correction))},
                            {"bbox", io::to_json(bbox_of(obj.pixels))}});
    }
    emit(result, *out);
  });
}

void add_kl(CLI::App& app) {
  auto* cmd = app.add_subcommand("kl", "KL divergence between two Gaussians");
  auto p = std::make_shared<std::string>();
  auto q = std::make_shared<std::string>();
  auto sym = std::make_shared<bool>(false);
  cmd->add_option("--p", *p, "Gaussian as JSON object, 5-array, or file")->required();
  cmd->add_option("--q", *q, "Gaussian as JSON object, 5-array, or file")->required();
  cmd->add_flag("--sym", *sym, "Symmetrized divergence");
  cmd->callback([=] {
    const Gaussian2D gp = gaussian_arg(*p);
    const Gaussian2D gq = gaussian_arg(*q);
    std::cout << harness::format_real(*sym ? sym_kl(gp, gq) : kl(gp, gq)) << '\n';
  });
}

void add_loss(CLI::App& app) {
  auto* cmd = app.add_subcommand("loss", "Training losses of a prediction grid against a scene");
  auto grid = std::make_shared<std::string>();
  auto scene = std::make_shared<std::string>();
  auto alpha = std::make_shared<double>(0.0);
  auto beta = std::make_shared<double>(0.0);
  cmd->add_option("--grid", *grid, "Prediction grid (JSON or text form)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--scene", *scene, "Ground-truth scene JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--alpha", *alpha, "Weight of the representation loss")->required();
  cmd->add_option("--beta", *beta, "Weight of the mixture loss")->required();
  cmd->callback([=] {
    const PredictionGrid g = load_grid(*grid);
    const Scene s = load_scene(*scene);
    if (scaled_extent(s.width, g.scale()) != g.width() || scaled_extent(s.height, g.scale()) != g.height()) {
      throw Error(ErrorCode::DimensionMismatch, "grid extent does not match the scene at the grid's scale");
    }
    const auto classes = cell_classes(s, g.scale());
    const auto targets = cell_targets(s, g.scale());
    const double seg = seg_loss(g, classes);
    const double rep = rep_loss(g, targets);
    const double mix = mix_loss(g, targets);
    emit(json{{"seg", seg}, {"rep", rep}, {"mix", mix}, {"total", total_loss(seg, rep, mix, {*alpha, *beta})}}, "");
  });
}

void add_gradcheck(CLI::App& app) {
  auto* cmd = app.add_subcommand("gradcheck", "Compare analytic and finite-difference sym_kl gradients");
  auto trials = std::make_shared<int>(100);
  auto seed = std::make_shared<std::uint64_t>(0);
  cmd->add_option("--trials", *trials, "Random (pred, target) pairs")->capture_default_str();
  cmd->add_option("--seed", *seed, "RNG seed")->capture_default_str();
  cmd->callback([=] {
    const GradcheckReport r = gradcheck(*trials, *seed);
    emit(json{{"trials", r.trials},
              {"max_rel_error", r.max_rel_error},
              {"max_rel_error_natural", r.max_rel_error_natural},
              {"max_rel_error_encoded", r.max_rel_error_encoded}},
         "");
  });
}

void add_descend(CLI::App& app) {
  auto* cmd = app.add_subcommand("descend", "Fit a Gaussian to a target by gradient descent on sym_kl");
  auto target = std::make_shared<std::string>();
  auto init = std::make_shared<std::string>();
  auto opts = std::make_shared<DescentOptions>();
  auto no_backtracking = std::make_shared<bool>(false);
  cmd->add_option("--target", *target, "Target Gaussian (JSON or file)")->required();
  cmd->add_option("--init", *init, "Initial Gaussian (JSON or file)")->required();
  cmd->add_option("--step", opts->step, "Step size")->capture_default_str();
  cmd->add_option("--max-iters", opts->max_iters, "Iteration limit")->capture_default_str();
  cmd->add_option("--tol", opts->tol, "Stop once sym_kl < tol")->capture_default_str();
  cmd->add_flag("--no-backtracking", *no_backtracking, "Take fixed steps");
  cmd->add_flag("--history", opts->record_history, "Include the divergence of every iterate");
  cmd->callback([=] {
    DescentOptions o = *opts;
    o.backtracking = !*no_backtracking;
    const DescentResult r = fit_by_descent(gaussian_arg(*target), gaussian_arg(*init), o);
    json doc{{"estimate", io::to_json(r.estimate)},
             {"iterations", r.iterations},
             {"divergence", r.divergence},
             {"initial_divergence", r.initial_divergence},
             {"converged", r.converged}};
    if (o.record_history) {
      doc["history"] = r.history;
    }
    emit(doc, "");
  });
}

void add_detect(CLI::App& app) {
  auto* cmd = app.add_subcommand("detect", "One detection per foreground cell of a prediction grid");
  auto grid = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--grid", *grid, "Prediction grid")->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", *out, "Output file (default stdout)");
  cmd->callback([=] { emit(io::detections_to_json(detections_from_grid(load_grid(*grid))), *out); });
}

NmsConfig parse_taus(double tau_default, const std::vector<std::string>& taus) {
  NmsConfig cfg;
  cfg.default_tau = tau_default;
  for (const auto& entry : taus) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "--tau expects CLASS=VALUE, got '" + entry + "'");
    }
    try {
      std::size_t used = 0;
      const int cls = std::stoi(entry.substr(0, eq), &used);
      if (used != eq) throw std::invalid_argument("class");
      const std::string value = entry.substr(eq + 1);
      const double tau = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("value");
      cfg.thresholds[cls] = tau;
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidArgument, "--tau expects CLASS=VALUE, got '" + entry + "'");
    }
  }
  validate_nms_config(cfg);
  return cfg;
}

void add_nms(CLI::App& app) {
  auto* cmd = app.add_subcommand("nms", "Divergence-based non-maximum suppression");
  auto dets = std::make_shared<std::string>();
  auto tau_default = std::make_shared<double>(1.0);
  auto taus = std::make_shared<std::vector<std::string>>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--dets", *dets, "Detections JSON array")->required()->check(CLI::ExistingFile);
  cmd->add_option("--tau-default", *tau_default, "Threshold for classes without --tau")->capture_default_str();
  cmd->add_option("--tau", *taus, "Per-class threshold CLASS=VALUE (repeatable)");
  cmd->add_option("-o,--out", *out, "Output file (default stdout)");
  cmd->callback([=] {
    const NmsConfig cfg = parse_taus(*tau_default, *taus);
    const auto d = io::detections_from_json(io::read_json_file(*dets));
    emit(io::detections_to_json(divergence_nms(d, cfg)), *out);
  });
}

void add_cluster(CLI::App& app) {
  auto* cmd = app.add_subcommand("cluster", "Assign pixels to kept detections");
  auto grid = std::make_shared<std::string>();
  auto dets = std::make_shared<std::string>();
  auto width = std::make_shared<int>(0);
  auto height = std::make_shared<int>(0);
  auto out = std::make_shared<std::string>();
  cmd->add_option("--grid", *grid, "Prediction grid")->required()->check(CLI::ExistingFile);
  cmd->add_option("--dets", *dets, "Kept detections JSON array")->required()->check(CLI::ExistingFile);
  cmd->add_option("--width", *width, "Output width (default grid width x scale)");
  cmd->add_option("--height", *height, "Output height (default grid height x scale)");
  cmd->add_option("-o,--out", *out, "Output file (default stdout)");
  cmd->callback([=] {
    const PredictionGrid g = load_grid(*grid);
    const auto kept = io::detections_from_json(io::read_json_file(*dets));
    std::optional<int> w;
    std::optional<int> h;
    if (*width > 0) w = *width;
    if (*height > 0) h = *height;
    emit(io::to_json(cluster_pixels(g, kept, w, h)), *out);
  });
}

void add_synth(CLI::App& app) {
  auto* cmd = app.add_subcommand("synth", "Generate seeded synthetic scenes");
  auto spec = std::make_shared<std::string>();
  auto suite = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto count = std::make_shared<int>(-1);
  auto* spec_opt = cmd->add_option("--spec", *spec, "SynthSpec JSON")->check(CLI::ExistingFile);
  auto* suite_opt = cmd->add_option("--suite", *suite, "Built-in suite: separated, overlap, calibration");
  spec_opt->excludes(suite_opt);
  cmd->add_option("--count", *count, "Override the number of scenes");
  cmd->add_option("-o,--out", *out, "Output directory")->required();
  cmd->callback([=] {
    if (spec->empty() && suite->empty()) {
      throw Error(ErrorCode::InvalidArgument, "one of --spec or --suite is required");
    }
    harness::SynthSpec s =
        spec->empty() ? harness::suite_by_name(*suite) : io::synth_spec_from_json(io::read_json_file(*spec));
    if (*count >= 0) {
      s.num_scenes = *count;
    }
    const auto scenes = harness::synth_scenes(s);
    fs::create_directories(*out);
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "scene_%04zu.json", i);
      io::write_text_file(fs::path(*out) / name, io::to_json(scenes[i]).dump() + "\n");
    }
    io::write_text_file(fs::path(*out) / "spec.json", io::to_json(s).dump(2) + "\n");
    emit(json{{"scenes", scenes.size()}, {"dir", *out}}, "");
  });
}

void add_pairs(CLI::App& app) {
  auto* cmd = app.add_subcommand("pairs", "KL-vs-IoU records for every within-scene object pair");
  auto dir = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto with_classes = std::make_shared<bool>(false);
  cmd->add_option("--scenes", *dir, "Directory of scene_*.json files")->required();
  cmd->add_option("-o,--out", *out, "Output CSV (default stdout)");
  cmd->add_flag("--with-classes", *with_classes, "Append class_a,class_b columns");
  cmd->callback([=] {
    std::vector<Scene> scenes;
    for (const auto& path : scene_files(*dir)) {
      scenes.push_back(load_scene(path.string()));
    }
    const auto records = harness::pair_analysis(scenes);
    std::ostringstream csv;
    harness::write_pairs_csv(csv, records, *with_classes);
    if (out->empty()) {
      std::cout << csv.str();
    } else {
      io::write_text_file(*out, csv.str());
    }
  });
}

harness::Calibration calibration_from_json(const json& j) {
  try {
    harness::Calibration c;
    c.global_tau = j.at("tau").get<double>();
    if (j.contains("per_class")) {
      for (const auto& [cls, tau] : j.at("per_class").items()) {
        c.per_class[std::stoi(cls)] = tau.get<double>();
      }
    }
    return c;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("calibration: ") + e.what());
  }
}

void add_report(CLI::App& app) {
  auto* cmd = app.add_subcommand("report", "Decoupling failures under IoU and under divergence");
  auto pairs = std::make_shared<std::string>();
  auto tau = std::make_shared<double>(0.0);
  auto calibration = std::make_shared<std::string>();
  cmd->add_option("--pairs", *pairs, "Pairs CSV")->required()->check(CLI::ExistingFile);
  auto* tau_opt = cmd->add_option("--tau", *tau, "Divergence threshold for every class");
  auto* cal_opt = cmd->add_option("--calibration", *calibration, "Output of `calibrate`; per-class thresholds")
                      ->check(CLI::ExistingFile);
  tau_opt->excludes(cal_opt);
  cmd->callback([=] {
    const auto records = load_pairs(*pairs);
    harness::DecouplingReport r;
    if (!calibration->empty()) {
      r = harness::decoupling_report(records, calibration_from_json(io::read_json_file(*calibration)));
    } else if (cmd->count("--tau") > 0) {
      r = harness::decoupling_report(records, *tau);
    } else {
      throw Error(ErrorCode::InvalidArgument, "one of --tau or --calibration is required");
    }
    emit(json{{"tau", r.tau},
              {"iou_failures", r.iou_failures},
              {"kl_failures", r.kl_failures},
              {"reduction", r.reduction}},
         "");
  });
}

void add_calibrate(CLI::App& app) {
  auto* cmd = app.add_subcommand("calibrate", "Pick the divergence threshold from pair records");
  auto pairs = std::make_shared<std::string>();
  auto fraction = std::make_shared<double>(0.05);
  auto min_class_pairs = std::make_shared<std::size_t>(50);
  cmd->add_option("--pairs", *pairs, "Pairs CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--max-false-merge", *fraction, "Admissible fraction of pairs below tau")->required();
  cmd->add_option("--min-class-pairs", *min_class_pairs, "Pairs needed for a per-class threshold")
      ->capture_default_str();
  cmd->callback([=] {
    const auto c = harness::calibrate_tau(load_pairs(*pairs), *fraction, *min_class_pairs);
    json per_class = json::object();
    for (const auto& [cls, tau] : c.per_class) {
      per_class[std::to_string(cls)] = tau;
    }
    emit(json{{"tau", c.global_tau}, {"per_class", per_class}, {"pairs_used", c.pairs_used}}, "");
  });
}

void add_oracle_grid(CLI::App& app) {
  auto* cmd = app.add_subcommand("oracle-grid", "Synthesize the prediction a perfect model would emit");
  auto scene = std::make_shared<std::string>();
  auto opts = std::make_shared<harness::OracleOptions>();
  auto text = std::make_shared<bool>(false);
  auto out = std::make_shared<std::string>();
  cmd->add_option("--scene", *scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--scale", opts->scale, "Down-scale factor")->capture_default_str();
  cmd->add_option("--n", opts->n, "Candidates per cell")->capture_default_str();
  cmd->add_option("--noise", opts->noise, "Uniform noise half-width in encoded space")->capture_default_str();
  cmd->add_option("--seed", opts->seed, "Noise seed")->capture_default_str();
  cmd->add_option("--classes", opts->num_classes, "Class scores per cell (0: derive)")->capture_default_str();
  cmd->add_flag("--text", *text, "Write the header + whitespace text form");
  cmd->add_option("-o,--out", *out, "Output file (default stdout)");
  cmd->callback([=] {
    const PredictionGrid g = harness::oracle_grid(load_scene(*scene), *opts);
    if (*text) {
      const std::string body = io::grid_to_text(g);
      if (out->empty()) {
        std::cout << body;
      } else {
        io::write_text_file(*out, body);
      }
    } else {
      const std::string body = io::to_json(g).dump() + "\n";
      if (out->empty()) {
        std::cout << body;
      } else {
        io::write_text_file(*out, body);
      }
    }
  });
}

void add_eval(CLI::App& app) {
  auto* cmd = app.add_subcommand("eval", "Mask AP of an instance map against a scene");
  auto pred = std::make_shared<std::string>();
  auto gt = std::make_shared<std::string>();
  cmd->add_option("--pred", *pred, "InstanceMap JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--gt", *gt, "Ground-truth scene JSON")->required()->check(CLI::ExistingFile);
  cmd->callback([=] {
    const auto map = io::instance_map_from_json(io::read_json_file(*pred));
    const auto thresholds = harness::coco_thresholds();
    const auto report = harness::evaluate_ap(map, load_scene(*gt), thresholds);
    json per_class = json::object();
    for (const auto& [cls, ap] : report.per_class) {
      per_class[std::to_string(cls)] = json{{"ap", ap.ap},
                                            {"ap50", ap.ap50},
                                            {"mean_ap", ap.mean_ap},
                                            {"num_gt", ap.num_gt},
                                            {"num_pred", ap.num_pred}};
    }
    emit(json{{"thresholds", report.thresholds},
              {"ap50", report.ap50},
              {"mean_ap", report.mean_ap},
              {"per_class", per_class}},
         "");
  });
}

void add_decode(CLI::App& app) {
  auto* cmd = app.add_subcommand("decode", "Selected Gaussian and class of every grid cell");
  auto grid = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--grid", *grid, "Prediction grid")->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", *out, "Output file (default stdout)");
  cmd->callback([=] {
    const DecodedMap m = decode_grid(load_grid(*grid));
    json cells = json::array();
    for (const auto& c : m.cells) {
      cells.push_back(json{{"gaussian", io::to_json(c.gaussian)}, {"class", c.class_id}, {"candidate", c.candidate}});
    }
    emit(json{{"width", m.width}, {"height", m.height}, {"scale", m.scale}, {"cells", std::move(cells)}}, *out);
  });
}

}  // namespace

void register_commands(CLI::App& app) {
  add_fit(app);
  add_kl(app);
  add_loss(app);
  add_gradcheck(app);
  add_descend(app);
  add_decode(app);
  add_detect(app);
  add_nms(app);
  add_cluster(app);
  add_synth(app);
  add_pairs(app);
  add_report(app);
  add_calibrate(app);
  add_oracle_grid(app);
  add_eval(app);
}

}  // namespace distrep::cli

#include "distrep/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "distrep/divergence.hpp"
#include "distrep/losses.hpp"

namespace distrep {

namespace {

bool is_foreground(int class_id) { return class_id != kBackgroundClass && class_id != kIgnoreClass; }

}  // namespace

double NmsConfig::tau_for(int class_id) const {
  auto it = thresholds.find(class_id);
  return it == thresholds.end() ? default_tau : it->second;
}

void validate_nms_config(const NmsConfig& cfg) {
  auto check = [](double tau, const std::string& what) {
    if (!std::isfinite(tau) || tau < 0.0) {
      throw Error(ErrorCode::InvalidArgument, what + " threshold must be finite and non-negative");
    }
  };
  check(cfg.default_tau, "default");
  for (const auto& [cls, tau] : cfg.thresholds) {
    check(tau, "class " + std::to_string(cls));
  }
}

std::vector<Detection> divergence_nms(std::span<const Detection> dets, const NmsConfig& cfg) {
  validate_nms_config(cfg);
  for (const auto& d : dets) {
    validate_detection(d);
  }
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  std::vector<Detection> kept;
  std::map<int, std::vector<std::size_t>> kept_by_class;
  for (std::size_t idx : order) {
    const Detection& d = dets[idx];
    const double tau = cfg.tau_for(d.class_id);
    auto& same_class = kept_by_class[d.class_id];
    const bool suppressed = std::any_of(same_class.begin(), same_class.end(), [&](std::size_t k) {
      return sym_kl(kept[k].gaussian, d.gaussian) < tau;
    });
    if (!suppressed) {
      same_class.push_back(kept.size());
      kept.push_back(d);
    }
  }
  return kept;
}

std::vector<Detection> brute_force_nms(std::span<const Detection> dets, const NmsConfig& cfg) {
  validate_nms_config(cfg);
  for (const auto& d : dets) {
    validate_detection(d);
  }
  const std::size_t n = dets.size();
  std::vector<bool> done(n, false);
  std::vector<bool> suppressed(n, false);
  std::vector<Detection> kept;
  for (std::size_t round = 0; round < n; ++round) {
    // Highest remaining score, lowest input index on ties.
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && (best == n || dets[i].score > dets[best].score)) {
        best = i;
      }
    }
    done[best] = true;
    if (suppressed[best]) {
      continue;
    }
    kept.push_back(dets[best]);
    for (std::size_t j = 0; j < n; ++j) {
      if (!done[j] && dets[j].class_id == dets[best].class_id &&
          sym_kl(dets[best].gaussian, dets[j].gaussian) < cfg.tau_for(dets[j].class_id)) {
        suppressed[j] = true;
      }
    }
  }
  return kept;
}

std::vector<Detection> detections_from_grid(const PredictionGrid& grid) {
  const DecodedMap decoded = decode_grid(grid);
  std::vector<Detection> dets;
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const DecodedCell& dc = decoded.cells[cell];
    if (!is_foreground(dc.class_id)) {
      continue;
    }
    const auto cands = grid.candidates(cell);
    std::vector<double> logits;
    logits.reserve(cands.size());
    for (const auto& c : cands) {
      logits.push_back(c.logit);
    }
    const double score = std::clamp(std::exp(log_softmax(logits)[dc.candidate]), 0.0, 1.0);
    dets.push_back(Detection{dc.gaussian, dc.class_id, score});
  }
  return dets;
}

InstanceMap cluster_pixels(const PredictionGrid& grid, std::span<const Detection> kept, std::optional<int> width,
                           std::optional<int> height) {
  const int scale = grid.scale();
  const int w = width.value_or(grid.width() * scale);
  const int h = height.value_or(grid.height() * scale);
  if (w <= 0 || h <= 0 || scaled_extent(w, scale) != grid.width() || scaled_extent(h, scale) != grid.height()) {
    throw Error(ErrorCode::DimensionMismatch, "output size is inconsistent with the grid extent and scale");
  }
  for (const auto& d : kept) {
    validate_detection(d);
  }

  const DecodedMap decoded = decode_grid(grid);

  // Assignment depends only on the covering cell, so resolve per cell.
  std::vector<int> cell_instance(grid.cell_count(), 0);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const DecodedCell& dc = decoded.cells[cell];
    if (!is_foreground(dc.class_id)) {
      continue;
    }
    if (kept.empty()) {
      throw Error(ErrorCode::NoDetections, "foreground pixels exist but no detections were kept");
    }
    const bool class_match = std::any_of(kept.begin(), kept.end(),
                                         [&](const Detection& d) { return d.class_id == dc.class_id; });
    std::size_t best = kept.size();
    double best_div = 0.0;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      if (class_match && kept[k].class_id != dc.class_id) {
        continue;
      }
      const double div = sym_kl(dc.gaussian, kept[k].gaussian);
      if (best == kept.size() || div < best_div) {
        best = k;
        best_div = div;
      }
    }
    cell_instance[cell] = static_cast<int>(best) + 1;
  }

  InstanceMap out;
  out.width = w;
  out.height = h;
  out.instance_ids.assign(static_cast<std::size_t>(w) * h, 0);
  out.class_ids.assign(static_cast<std::size_t>(w) * h, kBackgroundClass);
  out.detections.assign(kept.begin(), kept.end());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t cell = grid.cell_index(x / scale, y / scale);
      const std::size_t px = static_cast<std::size_t>(y) * w + x;
      out.instance_ids[px] = cell_instance[cell];
      out.class_ids[px] = decoded.cells[cell].class_id;
    }
  }
  return out;
}

std::vector<std::vector<PixelCoord>> instance_pixels(const InstanceMap& map) {
  std::vector<std::vector<PixelCoord>> out(map.detections.size());
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const int id = map.instance_ids[static_cast<std::size_t>(y) * map.width + x];
      if (id > 0) {
        out[static_cast<std::size_t>(id - 1)].push_back(PixelCoord{x, y});
      }
    }
  }
  return out;
}

}  // namespace distrep

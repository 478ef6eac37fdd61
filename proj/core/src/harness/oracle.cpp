#include "distrep/harness/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "distrep/fit.hpp"
#include "distrep/harness/rng.hpp"
#include "distrep/losses.hpp"

namespace distrep::harness {

PredictionGrid oracle_grid(const Scene& scene, const OracleOptions& options) {
  validate_scene(scene);
  if (options.n < 1) {
    throw Error(ErrorCode::EmptyCandidateSet, "oracle grid needs n >= 1");
  }
  if (!(options.noise >= 0.0) || !std::isfinite(options.noise)) {
    throw Error(ErrorCode::InvalidArgument, "noise must be finite and non-negative");
  }

  int num_classes = options.num_classes;
  if (num_classes == 0) {
    int max_class = kBackgroundClass;
    for (const auto& obj : scene.objects) {
      max_class = std::max(max_class, obj.class_id);
    }
    num_classes = max_class + 1;
  }

  const int scale = options.scale;
  PredictionGrid grid(scaled_extent(scene.width, scale), scaled_extent(scene.height, scale), scale, options.n,
                      num_classes);

  std::vector<Gaussian2D> fits;
  fits.reserve(scene.objects.size());
  for (const auto& obj : scene.objects) {
    fits.push_back(fit_gaussian(obj.pixels));
  }
  const auto owners = cell_owners(scene, scale);
  const auto classes = cell_classes(scene, scale);

  Rng rng(options.seed);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const Anchor anchor = grid.cell_anchor(cell);
    auto cands = grid.candidates(cell);
    const int owner = owners[cell];

    if (owner >= 0) {
      const Gaussian2D& truth = fits[static_cast<std::size_t>(owner)];
      EncodedParams e = encode(anchor, truth);
      if (options.noise > 0.0) {
        e.dx += rng.uniform(-options.noise, options.noise);
        e.dy += rng.uniform(-options.noise, options.noise);
        e.log_sigma_x += rng.uniform(-options.noise, options.noise);
        e.log_sigma_y += rng.uniform(-options.noise, options.noise);
        e.atanh_rho += rng.uniform(-options.noise, options.noise);
      }
      cands[0] = Candidate{e, options.true_logit};
      for (std::size_t k = 1; k < cands.size(); ++k) {
        // Prefer another object's distribution as the decoy; fall back to a shifted copy.
        Gaussian2D decoy = truth;
        if (fits.size() > 1) {
          const auto other = (static_cast<std::size_t>(owner) + k) % fits.size();
          decoy = other == static_cast<std::size_t>(owner) ? truth : fits[other];
        }
        if (decoy == truth) {
          decoy.mu_x += 3.0 * truth.sigma_x * static_cast<double>(k);
          decoy.sigma_y *= 1.5;
        }
        cands[k] = Candidate{encode(anchor, decoy), 0.0};
      }
    } else {
      for (auto& c : cands) {
        c = Candidate{EncodedParams{}, 0.0};
      }
    }

    const int cls = classes[cell];
    auto scores = grid.class_scores(cell);
    std::fill(scores.begin(), scores.end(), 0.0);
    if (cls >= 0 && cls < num_classes) {
      scores[static_cast<std::size_t>(cls)] = options.class_logit;
    }
  }
  return grid;
}

}  // namespace distrep::harness

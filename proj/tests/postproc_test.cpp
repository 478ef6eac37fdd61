#include <gtest/gtest.h>

#include "distrep/divergence.hpp"
#include "distrep/postproc.hpp"
#include "support/oracles.hpp"

namespace distrep {
namespace {

Detection det(double mx, double my, int cls, double score) { return {{mx, my, 1, 1, 0}, cls, score}; }

NmsConfig tau(double t) {
  NmsConfig cfg;
  cfg.default_tau = t;
  return cfg;
}

TEST(DivergenceNms, IdenticalPairKeepsHigherScore) {
  const std::vector<Detection> d{det(0, 0, 1, 0.8), det(0, 0, 1, 0.9)};
  const auto kept = divergence_nms(d, tau(1.0));
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].score, 0.9);
}

TEST(DivergenceNms, GreedyThreeDetections) {
  const Detection a = det(0, 0, 1, 0.9);
  const Detection b = det(0.1, 0, 1, 0.8);
  const Detection c = det(10, 10, 1, 0.7);
  EXPECT_NEAR(sym_kl(a.gaussian, b.gaussian), 0.005, 1e-12);
  EXPECT_NEAR(sym_kl(a.gaussian, c.gaussian), 100.0, 1e-12);
  const std::vector<Detection> d{c, b, a};
  EXPECT_EQ(divergence_nms(d, tau(1.0)), (std::vector<Detection>{a, c}));
  EXPECT_EQ(brute_force_nms(d, tau(1.0)), (std::vector<Detection>{a, c}));
}

TEST(DivergenceNms, ClassesAreIsolated) {
  const Detection a = det(0, 0, 1, 0.9);
  const Detection b = det(0.1, 0, 2, 0.8);
  const Detection c = det(10, 10, 1, 0.7);
  const std::vector<Detection> d{a, b, c};
  EXPECT_EQ(divergence_nms(d, tau(1.0)), d);
}

TEST(DivergenceNms, TiesKeepInputOrder) {
  const Detection a = det(0, 0, 1, 0.5);
  const Detection b = det(0.2, 0, 1, 0.5);
  EXPECT_EQ(divergence_nms(std::vector<Detection>{a, b}, tau(1.0)), std::vector<Detection>{a});
  EXPECT_EQ(divergence_nms(std::vector<Detection>{b, a}, tau(1.0)), std::vector<Detection>{b});
}

TEST(DivergenceNms, ZeroTauKeepsDistinctObjects) {
  const std::vector<Detection> d{det(0, 0, 1, 0.9), det(0.001, 0, 1, 0.8), det(0, 0, 1, 0.7)};
  const auto kept = divergence_nms(d, tau(0.0));
  EXPECT_EQ(kept.size(), 3u);
}

TEST(DivergenceNms, PerClassThresholds) {
  NmsConfig cfg = tau(1.0);
  cfg.thresholds[2] = 0.001;
  const std::vector<Detection> d{det(0, 0, 2, 0.9), det(0.1, 0, 2, 0.8), det(0, 0, 1, 0.9), det(0.1, 0, 1, 0.8)};
  const auto kept = divergence_nms(d, cfg);
  EXPECT_EQ(kept.size(), 3u);
  EXPECT_EQ(cfg.tau_for(2), 0.001);
  EXPECT_EQ(cfg.tau_for(9), 1.0);
}

TEST(DivergenceNms, EmptyInput) {
  EXPECT_TRUE(divergence_nms({}, tau(1.0)).empty());
  EXPECT_TRUE(brute_force_nms({}, tau(1.0)).empty());
}

TEST(DivergenceNms, RejectsBadConfigAndDetections) {
  EXPECT_THROW(divergence_nms({}, tau(-1.0)), Error);
  EXPECT_THROW(divergence_nms({}, tau(NAN)), Error);
  const std::vector<Detection> bad{{{0, 0, -1, 1, 0}, 1, 0.5}};
  EXPECT_THROW(divergence_nms(bad, tau(1.0)), Error);
}

std::vector<Detection> random_detections(harness::Rng& rng) {
  std::vector<Detection> d(static_cast<std::size_t>(rng.uniform_int(0, 10)));
  for (auto& x : d) {
    x.gaussian = testing::random_gaussian(rng, 3, 0.5, 2, 0.6);
    x.class_id = rng.uniform_int(1, 3);
    x.score = std::round(rng.uniform() * 10) / 10;
  }
  return d;
}

TEST(DivergenceNms, MatchesBruteForce) {
  harness::Rng rng(601);
  for (int t = 0; t < 1000; ++t) {
    const auto d = random_detections(rng);
    NmsConfig cfg = tau(rng.uniform(0, 4));
    cfg.thresholds[1] = rng.uniform(0, 4);
    ASSERT_EQ(divergence_nms(d, cfg), brute_force_nms(d, cfg)) << "instance " << t;
  }
}

TEST(DivergenceNms, OutputProperties) {
  harness::Rng rng(602);
  for (int t = 0; t < 300; ++t) {
    const auto d = random_detections(rng);
    const NmsConfig cfg = tau(rng.uniform(0.5, 3));
    const auto kept = divergence_nms(d, cfg);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (kept[i].class_id == kept[j].class_id) {
          EXPECT_GE(sym_kl(kept[i].gaussian, kept[j].gaussian), cfg.tau_for(kept[i].class_id));
        }
        EXPECT_GE(kept[j].score, kept[i].score);
      }
    }
    for (const auto& x : d) {
      if (std::find(kept.begin(), kept.end(), x) != kept.end()) continue;
      const bool covered = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
        return k.class_id == x.class_id && k.score >= x.score &&
               sym_kl(k.gaussian, x.gaussian) < cfg.tau_for(x.class_id);
      });
      EXPECT_TRUE(covered);
    }
  }
}

// 4x1 grid: two foreground objects (class 1) and two background cells.
PredictionGrid strip() {
  PredictionGrid g(4, 1, 1, 1, 2);
  const Gaussian2D left{0.5, 0, 1, 1, 0};
  const Gaussian2D right{3, 0, 1, 1, 0};
  for (std::size_t c = 0; c < 4; ++c) {
    g.class_scores(c)[c == 1 ? 0 : 1] = 5.0;
    g.candidates(c)[0].params = encode(g.cell_anchor(c), c < 2 ? left : right);
  }
  return g;
}

TEST(DetectionsFromGrid, OnePerForegroundCell) {
  const auto d = detections_from_grid(strip());
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].score, 1.0);
  EXPECT_EQ(d[0].class_id, 1);
}

TEST(ClusterPixels, AssignsNearestDetection) {
  const PredictionGrid g = strip();
  const std::vector<Detection> kept{{{3, 0, 1, 1, 0}, 1, 0.9}, {{0.5, 0, 1, 1, 0}, 1, 0.8}};
  const InstanceMap m = cluster_pixels(g, kept);
  EXPECT_EQ(m.instance_ids, (std::vector<int>{2, 0, 1, 1}));
  EXPECT_EQ(m.class_ids, (std::vector<int>{1, 0, 1, 1}));
  const auto px = instance_pixels(m);
  EXPECT_EQ(px[0], (std::vector<PixelCoord>{{2, 0}, {3, 0}}));
}

TEST(ClusterPixels, TieGoesToLowerIndex) {
  PredictionGrid g(1, 1, 1, 1, 2);
  g.class_scores(0)[1] = 1.0;
  g.candidates(0)[0].params = encode(g.cell_anchor(0), {0, 0, 1, 1, 0});
  const std::vector<Detection> kept{{{1, 0, 1, 1, 0}, 1, 0.5}, {{-1, 0, 1, 1, 0}, 1, 0.5}};
  EXPECT_EQ(cluster_pixels(g, kept).instance_ids[0], 1);
}

TEST(ClusterPixels, PrefersMatchingClassThenFallsBack) {
  PredictionGrid g(2, 1, 1, 1, 3);
  g.class_scores(0)[1] = 1.0;
  g.class_scores(1)[2] = 1.0;
  g.candidates(0)[0].params = encode(g.cell_anchor(0), {0, 0, 1, 1, 0});
  g.candidates(1)[0].params = encode(g.cell_anchor(1), {1, 0, 1, 1, 0});
  const std::vector<Detection> kept{{{0, 0, 1, 1, 0}, 2, 0.5}, {{50, 0, 1, 1, 0}, 1, 0.5}};
  const InstanceMap m = cluster_pixels(g, kept);
  EXPECT_EQ(m.instance_ids[0], 2);  // class 1 exists among kept, so the far one wins
  EXPECT_EQ(m.instance_ids[1], 1);
}

TEST(ClusterPixels, EmptyForegroundGivesZeros) {
  PredictionGrid g(3, 2, 1, 1, 2);
  for (std::size_t c = 0; c < g.cell_count(); ++c) g.class_scores(c)[0] = 1.0;
  const InstanceMap m = cluster_pixels(g, {});
  EXPECT_EQ(m.instance_ids, std::vector<int>(6, 0));
}

TEST(ClusterPixels, NoDetections) {
  try {
    cluster_pixels(strip(), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoDetections);
  }
}

TEST(ClusterPixels, ScaledGridCoversFullResolution) {
  PredictionGrid g(2, 1, 3, 1, 2);
  g.class_scores(0)[1] = 1.0;
  g.class_scores(1)[0] = 1.0;
  g.candidates(0)[0].params = encode(g.cell_anchor(0), {1, 1, 1, 1, 0});
  const std::vector<Detection> kept{{{1, 1, 1, 1, 0}, 1, 1.0}};
  const InstanceMap m = cluster_pixels(g, kept, 5, 3);
  EXPECT_EQ(m.width, 5);
  EXPECT_EQ(instance_pixels(m)[0].size(), 9u);
  EXPECT_THROW(cluster_pixels(g, kept, 7, 3), Error);
}

TEST(ClusterPixels, IdsComeFromKeptList) {
  harness::Rng rng(603);
  for (int t = 0; t < 100; ++t) {
    const PredictionGrid g = testing::random_grid(rng, 5, 4, 1, 2, 3);
    std::vector<Detection> kept = random_detections(rng);
    if (kept.empty()) kept.push_back(det(0, 0, 1, 1.0));
    const InstanceMap m = cluster_pixels(g, kept);
    for (int id : m.instance_ids) {
      EXPECT_GE(id, 0);
      EXPECT_LE(id, static_cast<int>(kept.size()));
    }
  }
}

}  // namespace
}  // namespace distrep

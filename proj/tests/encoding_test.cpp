#include <gtest/gtest.h>

#include <cmath>

#include "distrep/encoding.hpp"
#include "support/oracles.hpp"

namespace distrep {
namespace {

TEST(Encode, DirectSubstitution) {
  const EncodedParams e = encode(PixelCoord{5, 7}, {3, 4, 2, 1, 0});
  EXPECT_EQ(e.dx, 2.0);
  EXPECT_EQ(e.dy, 3.0);
  EXPECT_NEAR(e.log_sigma_x, 0.693147, 1e-6);
  EXPECT_EQ(e.log_sigma_y, 0.0);
  EXPECT_EQ(e.atanh_rho, 0.0);
}

TEST(Encode, ZeroOffsetAtMean) {
  const EncodedParams e = encode(Anchor{3.5, -2.25}, {3.5, -2.25, 1, 1, 0});
  EXPECT_EQ(e.dx, 0.0);
  EXPECT_EQ(e.dy, 0.0);
}

TEST(Encode, AtanhOfRho) { EXPECT_NEAR(encode(PixelCoord{0, 0}, {0, 0, 1, 1, 0.5}).atanh_rho, 0.549306, 1e-6); }

TEST(Encode, PropagatesValidation) { EXPECT_THROW(encode(PixelCoord{0, 0}, {0, 0, -1, 1, 0}), Error); }

TEST(Decode, InverseOfEncodeExample) {
  const Gaussian2D g = decode(PixelCoord{5, 7}, {2, 3, std::log(2.0), 0, 0});
  EXPECT_EQ(g.mu_x, 3.0);
  EXPECT_EQ(g.mu_y, 4.0);
  EXPECT_NEAR(g.sigma_x, 2.0, 1e-15);
  EXPECT_EQ(g.sigma_y, 1.0);
  EXPECT_EQ(g.rho, 0.0);
}

TEST(Decode, ZeroParamsGiveUnitGaussianAtPixel) {
  EXPECT_EQ(decode(PixelCoord{4, 9}, EncodedParams{}), (Gaussian2D{4, 9, 1, 1, 0}));
}

TEST(Decode, ClampsSaturatedRho) {
  const Gaussian2D g = decode(PixelCoord{0, 0}, {0, 0, 0, 0, 40.0});
  EXPECT_EQ(g.rho, kRhoBound);
  EXPECT_NO_THROW(validate_gaussian(g));
  EXPECT_EQ(decode(PixelCoord{0, 0}, {0, 0, 0, 0, -40.0}).rho, -kRhoBound);
}

TEST(Decode, RejectsNonFinite) {
  try {
    decode(PixelCoord{0, 0}, {NAN, 0, 0, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteValue);
  }
}

TEST(EncodeDecode, RoundTrip) {
  harness::Rng rng(301);
  for (int t = 0; t < 5000; ++t) {
    const PixelCoord px{rng.uniform_int(0, 2047), rng.uniform_int(0, 1023)};
    const Gaussian2D g{rng.uniform(0, 2048), rng.uniform(0, 1024), rng.uniform(0.01, 200), rng.uniform(0.01, 200),
                       rng.uniform(-0.999, 0.999)};
    const Gaussian2D back = decode(px, encode(px, g));
    ASSERT_NEAR(back.mu_x, g.mu_x, 1e-12 * std::max(1.0, std::abs(g.mu_x)));
    ASSERT_NEAR(back.mu_y, g.mu_y, 1e-12 * std::max(1.0, std::abs(g.mu_y)));
    ASSERT_NEAR(back.sigma_x, g.sigma_x, 1e-12 * g.sigma_x);
    ASSERT_NEAR(back.sigma_y, g.sigma_y, 1e-12 * g.sigma_y);
    ASSERT_NEAR(back.rho, g.rho, 1e-12);
  }
}

std::vector<Candidate> with_logits(std::initializer_list<double> logits) {
  std::vector<Candidate> c;
  for (double l : logits) c.push_back({EncodedParams{}, l});
  return c;
}

TEST(SelectCandidate, Examples) {
  EXPECT_EQ(select_candidate(with_logits({0.2, 0.5, 0.3})), 1u);
  EXPECT_EQ(select_candidate(with_logits({0.7})), 0u);
  EXPECT_EQ(select_candidate(with_logits({0.5, 0.5})), 0u);
}

TEST(SelectCandidate, EmptyRejected) {
  try {
    select_candidate(std::span<const Candidate>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCandidateSet);
  }
}

TEST(SelectCandidate, ShiftInvariant) {
  harness::Rng rng(302);
  for (int t = 0; t < 1000; ++t) {
    auto c = with_logits({});
    const int n = rng.uniform_int(1, 8);
    for (int k = 0; k < n; ++k) c.push_back({EncodedParams{}, std::round(rng.uniform(-4, 4) * 2) / 2});
    const std::size_t j = select_candidate(c);
    const double shift = std::round(rng.uniform(-100, 100));
    for (auto& x : c) x.logit += shift;
    EXPECT_EQ(select_candidate(c), j);
  }
}

TEST(Argmax, LowestIndexOnTies) {
  const std::vector<double> v{1, 3, 3, 2};
  EXPECT_EQ(argmax(v), 1u);
}

TEST(PredictionGrid, Construction) {
  EXPECT_THROW(PredictionGrid(0, 1, 1, 1, 1), Error);
  EXPECT_THROW(PredictionGrid(1, 1, 0, 1, 1), Error);
  EXPECT_THROW(PredictionGrid(1, 1, 1, 1, 0), Error);
  try {
    PredictionGrid(2, 2, 1, 0, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCandidateSet);
  }
  PredictionGrid g(3, 2, 4, 2, 5);
  EXPECT_EQ(g.cell_count(), 6u);
  EXPECT_EQ(g.candidates(0).size(), 2u);
  EXPECT_EQ(g.class_scores(5).size(), 5u);
  EXPECT_EQ(g.cell_index(2, 1), 5u);
}

TEST(PredictionGrid, ValidateRejectsNonFinite) {
  PredictionGrid g(2, 2, 1, 1, 2);
  EXPECT_NO_THROW(validate_grid(g));
  g.candidates(3)[0].logit = INFINITY;
  EXPECT_THROW(validate_grid(g), Error);
  g.candidates(3)[0].logit = 0;
  g.class_scores(1)[1] = NAN;
  EXPECT_THROW(validate_grid(g), Error);
}

TEST(DecodeGrid, ConstantGaussian) {
  const Gaussian2D g{4.5, 3.25, 2, 1.5, 0.3};
  PredictionGrid grid(6, 5, 1, 1, 2);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    grid.candidates(c)[0].params = encode(grid.cell_anchor(c), g);
    grid.class_scores(c)[1] = 1.0;
  }
  const DecodedMap m = decode_grid(grid);
  for (const auto& cell : m.cells) {
    EXPECT_NEAR(cell.gaussian.mu_x, g.mu_x, 1e-12);
    EXPECT_NEAR(cell.gaussian.mu_y, g.mu_y, 1e-12);
    EXPECT_NEAR(cell.gaussian.sigma_x, g.sigma_x, 1e-12);
    EXPECT_NEAR(cell.gaussian.rho, g.rho, 1e-12);
    EXPECT_EQ(cell.class_id, 1);
  }
}

TEST(DecodeGrid, TwoHalvesNoBlend) {
  const Gaussian2D left{2, 2, 1, 1, 0};
  const Gaussian2D right{12, 3, 3, 2, 0.5};
  PredictionGrid grid(8, 4, 1, 2, 2);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 8; ++x) {
      const auto c = grid.cell_index(x, y);
      const Anchor a = grid.cell_anchor(c);
      const bool is_left = x < 4;
      grid.candidates(c)[0] = {encode(a, left), is_left ? 2.0 : 0.0};
      grid.candidates(c)[1] = {encode(a, right), is_left ? 0.0 : 2.0};
    }
  }
  const DecodedMap m = decode_grid(grid);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 8; ++x) {
      const auto& d = m.cells[grid.cell_index(x, y)];
      const Gaussian2D& want = x < 4 ? left : right;
      EXPECT_EQ(d.candidate, x < 4 ? 0u : 1u);
      EXPECT_NEAR(d.gaussian.mu_x, want.mu_x, 1e-12);
      EXPECT_NEAR(d.gaussian.sigma_x, want.sigma_x, 1e-12);
    }
  }
}

TEST(DecodeGrid, ScaledAnchors) {
  PredictionGrid grid(2, 2, 4, 1, 1);
  EXPECT_EQ(grid.cell_anchor(0), (Anchor{1.5, 1.5}));
  EXPECT_EQ(grid.cell_anchor(1), (Anchor{5.5, 1.5}));
  EXPECT_EQ(grid.cell_anchor(2), (Anchor{1.5, 5.5}));
  EXPECT_EQ(grid.cell_anchor(3), (Anchor{5.5, 5.5}));
  const DecodedMap m = decode_grid(grid);
  EXPECT_EQ(m.scale, 4);
  EXPECT_EQ(m.cells[3].gaussian.mu_x, 5.5);
  EXPECT_EQ(m.cells[3].gaussian.mu_y, 5.5);
}

TEST(DecodeGrid, OutputIsAlwaysOneOfTheCandidates) {
  harness::Rng rng(303);
  for (int t = 0; t < 200; ++t) {
    const PredictionGrid grid = testing::random_grid(rng, rng.uniform_int(1, 6), rng.uniform_int(1, 6),
                                                     rng.uniform_int(1, 4), rng.uniform_int(1, 4), 3);
    const DecodedMap m = decode_grid(grid);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      const auto cands = grid.candidates(c);
      const Gaussian2D chosen = decode(grid.cell_anchor(c), cands[select_candidate(cands)].params);
      EXPECT_EQ(m.cells[c].gaussian, chosen);
      EXPECT_EQ(m.cells[c].class_id, static_cast<int>(argmax(grid.class_scores(c))));
    }
  }
}

}  // namespace
}  // namespace distrep

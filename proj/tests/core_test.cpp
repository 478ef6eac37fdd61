#include <gtest/gtest.h>

#include "distrep/types.hpp"
#include "support/oracles.hpp"

namespace distrep {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected distrep::Error";
  return ErrorCode::InvalidArgument;
}

TEST(ValidateGaussian, StandardNormalIsValid) { EXPECT_NO_THROW(validate_gaussian({0, 0, 1, 1, 0})); }

TEST(ValidateGaussian, NegativeSigmaRejected) {
  EXPECT_EQ(code_of([] { validate_gaussian({0, 0, -1, 1, 0}); }), ErrorCode::NonPositiveSigma);
  EXPECT_EQ(code_of([] { validate_gaussian({0, 0, 1, 0, 0}); }), ErrorCode::NonPositiveSigma);
}

TEST(ValidateGaussian, RhoAtBoundRejected) {
  EXPECT_EQ(code_of([] { validate_gaussian({0, 0, 1, 1, 1.0}); }), ErrorCode::RhoOutOfRange);
  EXPECT_EQ(code_of([] { validate_gaussian({0, 0, 1, 1, -1.0}); }), ErrorCode::RhoOutOfRange);
  EXPECT_NO_THROW(validate_gaussian({0, 0, 1, 1, kRhoBound}));
}

TEST(ValidateGaussian, MessageNamesField) {
  try {
    validate_gaussian({0, 0, 1, -2, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("sigma_y"), std::string::npos);
  }
}

TEST(ValidateGaussian, NonFiniteRejected) {
  EXPECT_EQ(code_of([] { validate_gaussian({std::nan(""), 0, 1, 1, 0}); }), ErrorCode::NonFiniteValue);
  EXPECT_EQ(code_of([] { validate_gaussian({0, 0, INFINITY, 1, 0}); }), ErrorCode::NonFiniteValue);
}

TEST(CovarianceOf, Examples) {
  EXPECT_EQ(covariance_of({0, 0, 1, 1, 0}), (Sym2{1, 0, 1}));
  EXPECT_EQ(covariance_of({0, 0, 2, 1, 0}), (Sym2{4, 0, 1}));
  EXPECT_EQ(covariance_of({0, 0, 1, 1, 0.5}), (Sym2{1, 0.5, 1}));
}

TEST(CovarianceOf, PropagatesValidation) {
  EXPECT_EQ(code_of([] { covariance_of({0, 0, 1, 1, 2}); }), ErrorCode::RhoOutOfRange);
}

TEST(CovarianceOf, PositiveDefiniteOnRandomInputs) {
  harness::Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Gaussian2D g = testing::random_gaussian(rng, 50, 0.01, 50, kRhoBound);
    const Sym2 s = covariance_of(g);
    EXPECT_GT(s.det(), 0.0);
    EXPECT_GT(s.trace(), 0.0);
  }
}

TEST(GaussianFromCovariance, InvertsCovarianceOf) {
  const Gaussian2D g{1, 2, 3, 0.5, -0.4};
  const Gaussian2D back = gaussian_from_covariance(1, 2, covariance_of(g));
  EXPECT_DOUBLE_EQ(back.sigma_x, 3);
  EXPECT_DOUBLE_EQ(back.sigma_y, 0.5);
  EXPECT_NEAR(back.rho, -0.4, 1e-15);
  EXPECT_EQ(code_of([] { gaussian_from_covariance(0, 0, Sym2{1, 2, 1}); }), ErrorCode::DegenerateCovariance);
}

TEST(PixelSet, RejectsEmptyAndDuplicates) {
  EXPECT_EQ(code_of([] { PixelSet({}); }), ErrorCode::EmptyPixelSet);
  EXPECT_EQ(code_of([] { PixelSet({{1, 2}, {3, 4}, {1, 2}}); }), ErrorCode::DuplicatePixel);
}

TEST(PixelSet, KeepsOrder) {
  PixelSet s({{3, 1}, {0, 0}, {2, 5}});
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.pixels()[0], (PixelCoord{3, 1}));
  EXPECT_EQ(s.pixels()[2], (PixelCoord{2, 5}));
}

TEST(ValidateBox, Ordering) {
  EXPECT_NO_THROW(validate_box({0, 0, 0, 0}));
  EXPECT_EQ(code_of([] { validate_box({2, 0, 1, 1}); }), ErrorCode::InvalidBox);
  EXPECT_EQ(code_of([] { validate_box({0, 0, NAN, 1}); }), ErrorCode::InvalidBox);
}

TEST(ValidateDetection, ScoreRange) {
  EXPECT_NO_THROW(validate_detection({{0, 0, 1, 1, 0}, 1, 0.0}));
  EXPECT_NO_THROW(validate_detection({{0, 0, 1, 1, 0}, 1, 1.0}));
  EXPECT_EQ(code_of([] { validate_detection({{0, 0, 1, 1, 0}, 1, 1.5}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { validate_detection({{0, 0, 1, 1, 0}, 1, NAN}); }), ErrorCode::InvalidArgument);
}

Scene two_object_scene() {
  Scene s;
  s.width = 4;
  s.height = 3;
  s.objects.push_back({1, 2, PixelSet({{0, 0}, {1, 0}})});
  s.objects.push_back({7, 1, PixelSet({{3, 2}})});
  return s;
}

TEST(ValidateScene, AcceptsDisjointObjects) { EXPECT_NO_THROW(validate_scene(two_object_scene())); }

TEST(ValidateScene, RejectsBadScenes) {
  auto with = [](auto edit) {
    Scene s = two_object_scene();
    edit(s);
    return code_of([&] { validate_scene(s); });
  };
  EXPECT_EQ(with([](Scene& s) { s.width = 0; }), ErrorCode::InvalidScene);
  EXPECT_EQ(with([](Scene& s) { s.objects[1].id = 1; }), ErrorCode::InvalidScene);
  EXPECT_EQ(with([](Scene& s) { s.objects[1].pixels = PixelSet({{4, 0}}); }), ErrorCode::InvalidScene);
  EXPECT_EQ(with([](Scene& s) { s.objects[1].pixels = PixelSet({{1, 0}}); }), ErrorCode::InvalidScene);
  EXPECT_EQ(with([](Scene& s) { s.objects[0].class_id = kBackgroundClass; }), ErrorCode::InvalidScene);
  EXPECT_EQ(with([](Scene& s) { s.objects[0].class_id = kIgnoreClass; }), ErrorCode::InvalidScene);
  EXPECT_EQ(with([](Scene& s) { s.semantic = std::vector<int>(5, 0); }), ErrorCode::InvalidScene);
}

TEST(ValidateScene, OverlapAllowedWhenDeclared) {
  Scene s = two_object_scene();
  s.objects[1].pixels = PixelSet({{1, 0}});
  s.allow_overlap = true;
  EXPECT_NO_THROW(validate_scene(s));
}

TEST(SceneHelpers, SemanticAndIndexMaps) {
  const Scene s = two_object_scene();
  const auto sem = semantic_classes(s);
  EXPECT_EQ(sem, (std::vector<int>{2, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1}));
  const auto idx = object_index_map(s);
  EXPECT_EQ(idx[0], 0);
  EXPECT_EQ(idx[11], 1);
  EXPECT_EQ(idx[5], -1);
}

TEST(SceneHelpers, ScaledExtentRoundsUp) {
  EXPECT_EQ(scaled_extent(8, 4), 2);
  EXPECT_EQ(scaled_extent(9, 4), 3);
  EXPECT_EQ(scaled_extent(1, 4), 1);
  EXPECT_EQ(code_of([] { scaled_extent(0, 2); }), ErrorCode::InvalidArgument);
}

TEST(SceneHelpers, CellOwnersByMajorityThenLowerIndex) {
  Scene s;
  s.width = 4;
  s.height = 2;
  // Cell 0 covers x in {0,1}: object 0 has one pixel, object 1 has two.
  s.objects.push_back({1, 1, PixelSet({{0, 0}, {2, 0}, {3, 0}})});
  s.objects.push_back({2, 1, PixelSet({{1, 0}, {1, 1}, {2, 1}, {3, 1}})});
  const auto owners = cell_owners(s, 2);
  ASSERT_EQ(owners.size(), 2u);
  EXPECT_EQ(owners[0], 1);
  EXPECT_EQ(owners[1], 0);  // tie 2 vs 2 goes to the lower index
  EXPECT_EQ(cell_owners(s, 1)[0], 0);
}

TEST(ErrorCodes, HaveNames) {
  EXPECT_EQ(to_string(ErrorCode::NonPositiveSigma), "NonPositiveSigma");
  EXPECT_EQ(to_string(ErrorCode::NoOverlappingPairs), "NoOverlappingPairs");
}

}  // namespace
}  // namespace distrep

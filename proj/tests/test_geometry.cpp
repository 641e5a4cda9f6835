#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sctracker/geometry.hpp"

#include <random>
#include <vector>

namespace sct {
namespace {

BoundingBox tlwh(double l, double t, double w, double h) { return BoundingBox::fromTlwh(l, t, w, h); }

TEST(BoundingBoxTest, StoresTopLeftAspectHeight) {
  const auto b = tlwh(0, 0, 10, 20);
  EXPECT_DOUBLE_EQ(b.x, 0.0);
  EXPECT_DOUBLE_EQ(b.y, 0.0);
  EXPECT_DOUBLE_EQ(b.a, 0.5);
  EXPECT_DOUBLE_EQ(b.h, 20.0);
  EXPECT_DOUBLE_EQ(b.width(), 10.0);
  EXPECT_TRUE(b.valid());
}

TEST(BoundingBoxTest, TlwhRoundTripWithinRelativeTolerance) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(-500, 2000), size(0.5, 800);
  for (int i = 0; i < 1000; ++i) {
    const double l = pos(rng), t = pos(rng), w = size(rng), h = size(rng);
    const auto b = tlwh(l, t, w, h);
    EXPECT_NEAR(b.x, l, 1e-9 * std::abs(l));
    EXPECT_NEAR(b.y, t, 1e-9 * std::abs(t));
    EXPECT_NEAR(b.width(), w, 1e-9 * w);
    EXPECT_NEAR(b.height(), h, 1e-9 * h);
  }
}

TEST(BoundingBoxTest, RejectsNonPositiveSize) {
  EXPECT_FALSE((BoundingBox{0, 0, 1, 0}).valid());
  EXPECT_FALSE((BoundingBox{0, 0, -1, 5}).valid());
  EXPECT_FALSE((BoundingBox{0, 0, 1, -5}).valid());
  EXPECT_FALSE((BoundingBox{std::nan(""), 0, 1, 5}).valid());
}

TEST(IouTest, IdenticalBoxesGiveOne) {
  const auto b = tlwh(5, 5, 10, 20);
  EXPECT_DOUBLE_EQ(iou(b, b), 1.0);
}

TEST(IouTest, DisjointBoxesGiveZero) {
  EXPECT_DOUBLE_EQ(iou(tlwh(0, 0, 10, 10), tlwh(20, 20, 5, 5)), 0.0);
}

TEST(IouTest, EdgeContactIsZero) {
  EXPECT_DOUBLE_EQ(iou(tlwh(0, 0, 10, 10), tlwh(10, 0, 10, 10)), 0.0);
}

TEST(IouTest, HalfShiftedSquares) {
  // Intersection 2, union 6.
  const double expected = oracle::iou({0, 0, 2, 2}, {1, 0, 2, 2});
  EXPECT_DOUBLE_EQ(expected, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(iou(tlwh(0, 0, 2, 2), tlwh(1, 0, 2, 2)), 1.0 / 3.0);
}

TEST(ShapeIouTest, IdenticalBoxesGiveZero) {
  const auto b = tlwh(13, -4, 37, 91);
  EXPECT_DOUBLE_EQ(shapeIouDistance(b, b), 0.0);
}

// Same IoU against R, different shape: the shape terms separate them.
TEST(ShapeIouTest, SameIouDifferentShape) {
  const auto r = tlwh(0, 0, 4, 4);
  const auto same_shape = tlwh(2, 0, 4, 4);
  const auto tall = tlwh(2, 0, 2, 8);

  EXPECT_DOUBLE_EQ(iou(r, same_shape), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(iou(r, tall), 1.0 / 3.0);

  const double eps = 1e-7;
  const double d1 = shapeIouDistance(r, same_shape);
  const double d2 = shapeIouDistance(r, tall);
  EXPECT_NEAR(d1, oracle::shapeDistance({0, 0, 4, 4}, {2, 0, 4, 4}, eps, true, true), 1e-15);
  EXPECT_NEAR(d2, oracle::shapeDistance({0, 0, 4, 4}, {2, 0, 2, 8}, eps, true, true), 1e-15);
  EXPECT_NEAR(d1, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(d2, 2.0 / 3.0 + 16.0 / std::pow(8.0 + eps, 2), 1e-12);
  EXPECT_NEAR(d2, 0.9167, 1e-4);
  EXPECT_LT(d1, d2);

  EXPECT_NEAR(heightConstraint(r, tall, eps), 0.25, 1e-7);
  EXPECT_DOUBLE_EQ(areaConstraint(r, tall, eps), 0.0);
}

TEST(ShapeIouTest, FlagsOffReducesToIouDistance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0, 100), size(1, 60);
  for (int i = 0; i < 500; ++i) {
    const auto a = tlwh(pos(rng), pos(rng), size(rng), size(rng));
    const auto b = tlwh(pos(rng), pos(rng), size(rng), size(rng));
    EXPECT_EQ(shapeIouDistance(a, b, ShapeIoUParams::plainIoU()), 1.0 - iou(a, b));
  }
}

TEST(ShapeIouTest, SingleTermsMatchOracle) {
  const oracle::Rect a{3, 7, 20, 45}, b{10, 2, 33, 30};
  const auto ba = tlwh(3, 7, 20, 45), bb = tlwh(10, 2, 33, 30);
  EXPECT_NEAR(shapeIouDistance(ba, bb, {1e-7, true, false}),
              oracle::shapeDistance(a, b, 1e-7, true, false), 1e-12);
  EXPECT_NEAR(shapeIouDistance(ba, bb, {1e-7, false, true}),
              oracle::shapeDistance(a, b, 1e-7, false, true), 1e-12);
}

TEST(ShapeIouTest, SymmetricBoundedAndTranslationInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0, 200), size(1, 120), shift(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const auto a = tlwh(pos(rng), pos(rng), size(rng), size(rng));
    const auto b = tlwh(pos(rng), pos(rng), size(rng), size(rng));
    const double d = shapeIouDistance(a, b);
    EXPECT_EQ(d, shapeIouDistance(b, a));
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 3.0);
    const double v = iou(a, b);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);

    // Shifts by integers keep the arithmetic exact enough for a tight bound.
    const double dx = std::round(shift(rng)), dy = std::round(shift(rng));
    EXPECT_NEAR(iou(a.translated(dx, dy), b.translated(dx, dy)), v, 1e-9);
    EXPECT_NEAR(shapeIouDistance(a.translated(dx, dy), b.translated(dx, dy)), d, 1e-9);
  }
}

// Among boxes with equal IoU against R, one matching R's height and area is
// never farther than one that differs.
TEST(ShapeIouTest, EqualIouPrefersMatchingShape) {
  const auto r = tlwh(0, 0, 6, 6);
  // Both overlap R in a 3x6 strip and have area 36, so IoU is 1/3 for each.
  const auto same = tlwh(3, 0, 6, 6);
  const auto tall = tlwh(3, 0, 3, 12);
  ASSERT_NEAR(iou(r, same), iou(r, tall), 1e-12);
  EXPECT_LE(shapeIouDistance(r, same), shapeIouDistance(r, tall));
}

TEST(CostMatrixTest, EmptyAndSingleShapes) {
  std::vector<BoundingBox> none;
  std::vector<BoundingBox> three{tlwh(0, 0, 1, 1), tlwh(1, 1, 1, 1), tlwh(2, 2, 1, 1)};
  const auto m = costMatrix(none, three);
  EXPECT_EQ(m.rows(), 0);
  EXPECT_EQ(m.cols(), 3);

  const std::vector<BoundingBox> one{tlwh(4, 4, 10, 20)};
  const auto single = costMatrix(one, one);
  ASSERT_EQ(single.rows(), 1);
  ASSERT_EQ(single.cols(), 1);
  EXPECT_DOUBLE_EQ(single(0, 0), 0.0);
}

TEST(CostMatrixTest, MatchesElementwiseDistance) {
  const std::vector<BoundingBox> tracks{tlwh(0, 0, 4, 4), tlwh(2, 0, 4, 4)};
  const std::vector<BoundingBox> dets{tlwh(2, 0, 4, 4), tlwh(2, 0, 2, 8)};
  const auto m = costMatrix(tracks, dets);
  const oracle::Rect rt[2] = {{0, 0, 4, 4}, {2, 0, 4, 4}};
  const oracle::Rect rd[2] = {{2, 0, 4, 4}, {2, 0, 2, 8}};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      EXPECT_EQ(m(i, j), shapeIouDistance(tracks[i], dets[j]));
      EXPECT_NEAR(m(i, j), oracle::shapeDistance(rt[i], rd[j], 1e-7, true, true), 1e-12);
    }
  }
}

}  // namespace
}  // namespace sct

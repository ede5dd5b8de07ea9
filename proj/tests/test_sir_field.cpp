#include <gtest/gtest.h>

#include <cmath>

#include "loccap/lattice.hpp"
#include "loccap/rng.hpp"
#include "loccap/sir_field.hpp"

using namespace loccap;

namespace {

SirFieldd pair_field(double D, double alpha, double beta) {
  const auto set = make_custom<double>({Point2d(-D / 2, 0), Point2d(D / 2, 0)}, Windowd::square(4 * D));
  return SirFieldd(set, FieldParamsd(alpha, beta));
}

SirFieldd square_field(double d = 25, double beta = 10, double alpha = 4) {
  return SirFieldd(generate_grid(PatternKind::Square, d, Windowd::square(2 * (16 * d + 3 * d))),
                   FieldParamsd(alpha, beta));
}

}  // namespace

TEST(SirField, PathlossExamples) {
  EXPECT_DOUBLE_EQ(pathloss<double>(Point2d(1, 0), Point2d::Zero(), 3.3), 1.0);
  EXPECT_DOUBLE_EQ(pathloss<double>(Point2d(0, 2), Point2d::Zero(), 4.0), 1.0 / 16);
  EXPECT_NEAR(pathloss<double>(Point2d(25, 0), Point2d::Zero(), 4.0), 2.56e-6, 1e-20);
  EXPECT_THROW(pathloss<double>(Point2d(1, 1), Point2d(1, 1), 4.0), std::domain_error);
}

TEST(SirField, ParamsValidation) {
  EXPECT_THROW(FieldParamsd(2.0, 10.0), std::invalid_argument);
  EXPECT_THROW(FieldParamsd(4.0, 0.0), std::invalid_argument);
  const FieldParamsd p(4.0, 10.0);
  EXPECT_EQ(p.beta_prime(), 10.0 / 11.0);
}

TEST(SirField, SymmetricPairMidpoint) {
  for (double alpha : {2.5, 4.0, 7.0}) {
    const auto f = pair_field(30, alpha, 10);
    EXPECT_NEAR(f.sir(0, Point2d::Zero()), 1.0, 1e-14);
    EXPECT_NEAR(f.g(0, Point2d::Zero()), 0.5, 1e-14);
  }
}

TEST(SirField, SingleInterfererOnSegment) {
  const auto set = make_custom<double>({Point2d::Zero(), Point2d(25, 0)}, Windowd::square(100));
  for (double alpha : {3.0, 4.0}) {
    const SirFieldd f(set, FieldParamsd(alpha, 10));
    for (double r : {1.0, 5.0, 12.5, 20.0}) {
      EXPECT_NEAR(f.sir(0, Point2d(r, 0)) / std::pow((25 - r) / r, alpha), 1.0, 1e-13);
      const Vector2d g = f.sir_gradient(0, Point2d(r, 0));
      EXPECT_NEAR(g.y(), 0.0, 1e-12 * g.norm());
    }
  }
}

TEST(SirField, EmitterPositionIsInfiniteSentinel) {
  const auto f = square_field();
  const std::size_t c = f.set().closest_to(Point2d::Zero());
  const auto s = f.local(c).evaluate(f.set()[c]);
  EXPECT_TRUE(std::isinf(s.sir));
  EXPECT_TRUE(s.at_emitter);
  EXPECT_EQ(f.g(c, f.set()[c]), 1.0);
  EXPECT_THROW(f.sir_gradient(c, f.set()[c]), std::domain_error);
}

TEST(SirField, LoneEmitterFlagsNoInterference) {
  const auto set = make_custom<double>({Point2d::Zero()}, Windowd::square(10));
  const SirFieldd f(set, FieldParamsd(4, 10));
  const auto s = f.local(0).evaluate(Point2d(1, 1));
  EXPECT_TRUE(std::isinf(s.sir));
  EXPECT_TRUE(s.no_interference);
}

TEST(SirField, SharesSumToOne) {
  Rng rng(5);
  std::vector<Point2d> pts;
  for (int k = 0; k < 12; ++k) pts.emplace_back(rng.uniform(-50, 50), rng.uniform(-50, 50));
  const SirFieldd f(make_custom(pts, Windowd::square(200)), FieldParamsd(3.5, 2));
  for (int n = 0; n < 50; ++n) {
    const Point2d z(rng.uniform(-60, 60), rng.uniform(-60, 60));
    double sum = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double s = f.sir(i, z), g = f.g(i, z);
      EXPECT_NEAR(g, s / (1 + s), 1e-12 * g);
      EXPECT_NEAR(s, g / (1 - g), 1e-11 * s);
      sum += g;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(SirField, ReceptionCountExamples) {
  const auto f = square_field();
  const std::size_t c = f.set().closest_to(Point2d::Zero());
  EXPECT_EQ(f.h(f.set()[c]), 1);
  EXPECT_EQ(f.h(Point2d(12.5, 0)), 0);

  const auto loose = pair_field(10, 4, 0.5);
  EXPECT_EQ(loose.h(Point2d::Zero()), 2);
}

TEST(SirField, ReceptionCountAtMostOneAboveUnitThreshold) {
  const auto f = square_field(25, 1.2, 3);
  Rng rng(9);
  for (int n = 0; n < 2000; ++n) {
    const Point2d z(rng.uniform(-50, 50), rng.uniform(-50, 50));
    EXPECT_LE(f.h(z), 1);
  }
}

TEST(SirField, CountEqualsSirThreshold) {
  const auto f = square_field(25, 10, 4);
  Rng rng(11);
  for (int n = 0; n < 500; ++n) {
    const Point2d z(rng.uniform(-30, 30), rng.uniform(-30, 30));
    int by_sir = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if ((f.set()[i] - z).norm() < 60 && f.sir(i, z) >= 10) ++by_sir;
    }
    EXPECT_EQ(f.h(z), by_sir);
  }
}

TEST(SirField, GradientMatchesCentralDifferences) {
  const auto f = square_field();
  const std::size_t c = f.set().closest_to(Point2d::Zero());
  const auto local = f.local(c);
  Rng rng(2024);
  const double h = 1e-4;
  int checked = 0;
  while (checked < 100) {
    const Point2d z(rng.uniform(-30, 30), rng.uniform(-30, 30));
    bool near_emitter = false;
    for (const auto& p : f.set().positions) near_emitter = near_emitter || (p - z).norm() < 0.5;
    if (near_emitter) continue;
    const Vector2d g = local.sir_gradient(z);
    const Vector2d fd((local.sir(z + Vector2d(h, 0)) - local.sir(z - Vector2d(h, 0))) / (2 * h),
                      (local.sir(z + Vector2d(0, h)) - local.sir(z - Vector2d(0, h))) / (2 * h));
    EXPECT_LT((g - fd).norm() / g.norm(), 1e-5);
    ++checked;
  }
}

TEST(SirField, GradientVanishesAlongBisector) {
  const auto f = pair_field(20, 4, 10);
  for (double y : {-7.0, 3.0, 15.0}) {
    const Vector2d g = f.sir_gradient(0, Point2d(0, y));
    EXPECT_NEAR(g.y(), 0.0, 1e-12 * g.norm());
  }
}

TEST(SirField, TruncationCollectsInterferersWithinRadius) {
  const auto f = square_field();
  EXPECT_DOUBLE_EQ(f.truncation_radius(), 16 * 25.0);
  const std::size_t c = f.set().closest_to(Point2d::Zero());
  const auto local = f.local(c);
  std::size_t expected = 0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (k != c && f.set()[k].norm() <= 400 * (1 + 1e-9)) ++expected;
  }
  EXPECT_EQ(local.interferer_count(), expected);
  EXPECT_TRUE(local.has_tail());
}

TEST(SirField, TailCorrectionApproachesWideTruncation) {
  const double d = 25;
  const auto set = generate_grid(PatternKind::Triangular, d, Windowd::square(2 * 63 * d));
  TruncationPolicy<double> wide;
  wide.radius = 60 * d;
  TruncationPolicy<double> bare;
  bare.tail_correction = false;
  const SirFieldd f_default(set, FieldParamsd(4, 10));
  const SirFieldd f_bare(set, FieldParamsd(4, 10, bare));
  const SirFieldd f_wide(set, FieldParamsd(4, 10, wide));
  const std::size_t c = set.closest_to(Point2d::Zero());
  const Point2d z(6, 3);
  const double ref = f_wide.sir(c, z);
  const double err_tail = std::abs(f_default.sir(c, z) - ref) / ref;
  const double err_bare = std::abs(f_bare.sir(c, z) - ref) / ref;
  EXPECT_LT(err_tail, 1e-4);
  EXPECT_LT(err_tail, err_bare / 10);
}

TEST(SirField, TransformedLocalMatchesTransformedSet) {
  const auto set = generate_grid(PatternKind::Square, 25.0, Windowd::square(200));
  TruncationPolicy<double> none;
  none.tail_correction = false;
  const SirFieldd f(set, FieldParamsd(4, 10, none));
  Matrix2d m;
  m << 1.01, 0.02, -0.01, 0.99;
  const auto moved = SirFieldd(transform(set, m), FieldParamsd(4, 10, none));
  const std::size_t c = set.closest_to(Point2d::Zero());
  const auto a = f.local(c).transformed(m);
  const auto b = moved.local(c);
  const Point2d z(5, -4);
  EXPECT_NEAR(a.sir(z) / b.sir(z), 1.0, 1e-12);
}

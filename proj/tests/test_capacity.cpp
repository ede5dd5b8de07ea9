#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "loccap/capacity.hpp"

using namespace loccap;

TEST(Capacity, AlohaClosedForm) {
  EXPECT_NEAR(aloha_sigma(1, 10, 4), 2 / std::numbers::pi / std::sqrt(10.0), 1e-15);
  EXPECT_NEAR(aloha_sigma(1, 10, 4), 0.201317, 1e-6);
  EXPECT_NEAR(aloha_sigma(1e-3, 10, 4), 201.317, 1e-3);
  EXPECT_NEAR(aloha_sigma(1, 10, 100), 0.95436435, 1e-8);
  EXPECT_NEAR(aloha_sigma(1, 10, 100), 0.9547, 1e-3);
  for (double alpha : {2.5, 4.0, 8.0}) {
    for (double beta : {0.5, 3.0, 40.0}) {
      EXPECT_NEAR(aloha_sigma(2e-3, beta, alpha), aloha_sigma(1e-3, beta, alpha) / 2, 1e-12);
    }
  }
  EXPECT_THROW(aloha_sigma(0, 10, 4), std::invalid_argument);
  EXPECT_THROW(aloha_sigma(1, 10, 2), std::invalid_argument);
  EXPECT_THROW(aloha_sigma(1, 0, 4), std::invalid_argument);
}

TEST(Capacity, AlohaMonteCarloAgrees) {
  const auto mc = mc_aloha_sigma(1e-3, 10, 4, 100000, 17);
  EXPECT_EQ(mc.samples, 100000u);
  EXPECT_LT(std::abs(mc.mean - 201.317) / 201.317, 0.03);
  EXPECT_LT(std::abs(mc.mean - 201.317), 3 * mc.half_width);
}

TEST(Capacity, AlohaMonteCarloOtherExponent) {
  const double exact = aloha_sigma(1.0, 3.0, 3.0);
  const auto mc = mc_aloha_sigma(1.0, 3.0, 3.0, 20000, 3, 5000);
  EXPECT_LT(std::abs(mc.mean - exact) / exact, 0.03);
}

TEST(Capacity, MonteCarloPreconditions) {
  EXPECT_THROW(mc_aloha_sigma(1e-3, 10, 4, 9999, 1), std::invalid_argument);
  const auto set = generate_grid(PatternKind::Square, 25.0, Windowd::square(100));
  EXPECT_THROW(mc_grid_coverage(set, 10, 4, 100, 1), std::invalid_argument);
  const auto poisson = sample_poisson(1e-3, Windowd::square(100), 1);
  EXPECT_THROW(mc_grid_coverage(poisson, 10, 4, 10000, 1), std::invalid_argument);
}

TEST(Capacity, TracerAgreesWithCoverageSampling) {
  for (auto kind : {PatternKind::Square, PatternKind::Hexagonal, PatternKind::Triangular}) {
    const auto traced = grid_capacity(kind, 10, 4, 25);
    const auto set = generate_grid(kind, 25.0, grid_window(25.0, {}));
    const auto mc = mc_grid_coverage(set, 10, 4, 400000, 99);
    EXPECT_LT(std::abs(traced.c - mc.mean), std::max(0.01 * traced.c, 2 * mc.half_width)) << to_string(kind);
  }
}

TEST(Capacity, CoverageVanishesForHugeThreshold) {
  const auto set = generate_grid(PatternKind::Square, 25.0, grid_window(25.0, {}));
  const auto mc = mc_grid_coverage(set, 1e12, 4, 10000, 4);
  EXPECT_LT(mc.mean, 1e-3);
}

TEST(Capacity, SteepPathLossApproachesOne) {
  for (auto kind : {PatternKind::Square, PatternKind::Hexagonal, PatternKind::Triangular}) {
    EXPECT_LT(std::abs(grid_capacity(kind, 10, 100, 25).c - 1), 0.05) << to_string(kind);
  }
  EXPECT_LT(std::abs(aloha_capacity(10, 100).c - 1), 0.05);
  const auto set = generate_grid(PatternKind::Triangular, 25.0, grid_window(25.0, {}));
  const auto mc = mc_grid_coverage(set, 10, 100, 20000, 8);
  EXPECT_NEAR(mc.mean, 1.0, 0.05);
}

TEST(Capacity, TriangularIsBest) {
  const double tri = grid_capacity(PatternKind::Triangular, 10, 4, 25).c;
  const double sq = grid_capacity(PatternKind::Square, 10, 4, 25).c;
  const double hex = grid_capacity(PatternKind::Hexagonal, 10, 4, 25).c;
  const double aloha = aloha_capacity(10, 4).c;
  EXPECT_GT(tri, sq);
  EXPECT_GT(tri, hex);
  EXPECT_GT(tri / aloha, 1.0);
  EXPECT_LE(tri / aloha, 2.2);
}

TEST(Capacity, IndependentOfSpacing) {
  const double a = grid_capacity(PatternKind::Triangular, 10, 4, 25).c;
  const double b = grid_capacity(PatternKind::Triangular, 10, 4, 50).c;
  const double c = grid_capacity(PatternKind::Triangular, 10, 4, 7.5).c;
  EXPECT_LT(std::abs(a - b) / a, 1e-3);
  EXPECT_LT(std::abs(a - c) / a, 1e-3);
}

TEST(Capacity, GridRejectsUnsupportedThreshold) {
  EXPECT_THROW(grid_capacity(PatternKind::Square, 0.8, 4, 25), TracerError);
  EXPECT_THROW(grid_capacity(PatternKind::Square, 10, 4, 25, Windowd::square(200)), std::invalid_argument);
}

TEST(Capacity, SweepIsMonotoneInThreshold) {
  SweepSpec spec;
  spec.schemes = {Scheme::Square, Scheme::Hexagonal, Scheme::Triangular, Scheme::SlottedAloha};
  spec.swept = SweepParameter::Beta;
  spec.fixed_value = 4;
  spec.values = log_spaced(1.5, 100, 7);
  const auto rows = run_sweep(spec);
  ASSERT_EQ(rows.size(), 28u);
  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t v = 1; v < 7; ++v) {
      ASSERT_TRUE(rows[s * 7 + v].ok) << rows[s * 7 + v].error;
      EXPECT_LT(rows[s * 7 + v].c, rows[s * 7 + v - 1].c);
      EXPECT_EQ(rows[s * 7 + v].scheme, spec.schemes[s]);
    }
  }
}

TEST(Capacity, SweepRecordsFailuresAndKeepsGoing) {
  SweepSpec spec;
  spec.schemes = {Scheme::Square, Scheme::SlottedAloha};
  spec.fixed_value = 4;
  spec.values = {0.5, 10};
  CapacityConfig cfg;
  cfg.threads = 2;
  const auto rows = run_sweep(spec, cfg);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_FALSE(rows[0].ok);
  EXPECT_NE(rows[0].error.find("unsupported-by-tracer"), std::string::npos);
  EXPECT_TRUE(std::isnan(rows[0].c));
  EXPECT_TRUE(rows[1].ok);
  EXPECT_TRUE(rows[2].ok);
  EXPECT_TRUE(rows[3].ok);
}

TEST(Capacity, SweepValidation) {
  SweepSpec spec;
  spec.schemes = {Scheme::Square};
  spec.values = {10, 5};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.values = {5, 10};
  spec.fixed_value = 2;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  EXPECT_THROW(log_spaced(0, 1, 5), std::invalid_argument);
  const auto v = log_spaced(1.5, 100, 21);
  EXPECT_DOUBLE_EQ(v.front(), 1.5);
  EXPECT_DOUBLE_EQ(v.back(), 100);
}

TEST(Capacity, SchemeNames) {
  for (auto s : {Scheme::Square, Scheme::Hexagonal, Scheme::Triangular, Scheme::SlottedAloha}) {
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  EXPECT_THROW(parse_scheme("cdma"), std::invalid_argument);
}

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "smartlet/errors.hpp"
#include "smartlet/photosensor.hpp"

using namespace smartlet;
using namespace smartlet::photo;

TEST(Responsivity, AssetMatchesBuiltIn) {
  const auto file = ResponsivityTable::from_csv_file(SMARTLET_SOURCE_DIR "/assets/pd_responsivity.csv");
  const auto builtin = ResponsivityTable::defaults();
  for (double bias : {0.0, -0.5, -1.0, -2.0}) {
    for (double suns : {0.0, 0.01, 0.3, 1.0, 6.0, 20.0}) {
      EXPECT_DOUBLE_EQ(file.current_density(suns, bias), builtin.current_density(suns, bias));
    }
  }
}

TEST(Responsivity, LogInterpolationBetweenRows) {
  const auto t = ResponsivityTable::defaults();
  // Geometric mean of two rows sits halfway in log space.
  EXPECT_NEAR(t.responsivity(std::sqrt(1.0 * 2.0), -1.0), (0.230 + 0.225) / 2, 1e-12);
  EXPECT_NEAR(t.responsivity(1.0, -1.5), (0.230 + 0.268) / 2, 1e-12);
  EXPECT_NEAR(t.responsivity(100.0, 0.0), 0.145, 1e-12);
}

TEST(Responsivity, CsvErrorsCarryLocation) {
  std::istringstream bad("intensity_suns,0,-1\ndark,1e-9,1e-8\n1,0.2,x\n");
  try {
    ResponsivityTable::from_csv(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 3);
  }
  std::istringstream no_dark("intensity_suns,0\n1,0.2\n");
  EXPECT_THROW(ResponsivityTable::from_csv(no_dark), ParseError);
}

TEST(SteadyResponse, DarkOutputAtZeroIntensity) {
  PhotodiodeModel m;
  const double dark = m.table.dark_current_density(m.bias_v) * m.area_cm2 * m.load_ohm;
  for (double angle = 0; angle <= 180; angle += 15) {
    EXPECT_DOUBLE_EQ(steady_response(m, {0.0, 0.0, angle}), dark);
  }
  EXPECT_THROW(m.voltage(-1.0), InvalidParameter);
}

TEST(SteadyResponse, NormalIncidenceMaximizesAndGrazingLeavesAmbient) {
  PhotodiodeModel m;
  double best = -1, best_angle = -1;
  for (double angle = 0; angle <= 180; angle += 1) {
    const double v = steady_response(m, {1.0, 5.0, angle});
    if (v > best) best = v, best_angle = angle;
  }
  EXPECT_DOUBLE_EQ(best_angle, 90.0);
  EXPECT_NEAR(steady_response(m, {1.0, 5.0, 0.0}), steady_response(m, {1.0, 0.0, 0.0}), 1e-15);
}

TEST(SteadyResponse, LaserCurveDominatesAmbientCurve) {
  PhotodiodeModel m;
  for (double angle = 0; angle <= 180; angle += 5) {
    EXPECT_GE(steady_response(m, {1.0, 5.0, angle}), steady_response(m, {1.0, 0.0, angle}));
  }
}

TEST(SteadyResponse, MonotoneInIntensityOnGrid) {
  PhotodiodeModel m;
  for (double bias : {0.0, -0.7, -1.0, -2.0}) {
    double prev = -1;
    for (double e = -3; e <= 1.5; e += 0.01) {
      const double v = m.voltage(std::pow(10.0, e), bias);
      EXPECT_GE(v, prev) << "bias " << bias << " log10(suns) " << e;
      prev = v;
    }
  }
}

TEST(Transient, RiseAndFallTimesMatchMeasurement) {
  PhotodiodeModel m;
  const double dt = 1.0;
  std::vector<double> targets(2000, m.voltage(1.0));
  targets.resize(12000, m.voltage(6.0));
  const auto up = transient(m, targets, dt);
  EXPECT_NEAR(rise_time_10_90(up, dt), 230.0, 230.0 * 0.05);

  std::vector<double> down_targets(2000, m.voltage(6.0));
  down_targets.resize(20000, m.voltage(1.0));
  const auto down = transient(m, down_targets, dt);
  EXPECT_NEAR(fall_time_90_10(down, dt), 1850.0, 1850.0 * 0.05);
}

TEST(Transient, NeverOvershootsAndFlatForZeroStep) {
  PhotodiodeModel m;
  PdTransient pd(m, 0.1);
  for (int i = 0; i < 200; ++i) EXPECT_LE(pd.step(0.5, 50.0), 0.5);
  for (int i = 0; i < 200; ++i) EXPECT_GE(pd.step(0.2, 50.0), 0.2);
  const auto flat = transient(m, std::vector<double>(100, 0.3), 50.0);
  for (double v : flat) EXPECT_DOUBLE_EQ(v, 0.3);
}

TEST(Comparator, HysteresisBand) {
  Comparator c{1.0, 0.2};
  EXPECT_TRUE(c.step(5.0, false));
  EXPECT_FALSE(c.step(-5.0, true));
  for (double v : {0.95, 1.05, 0.91, 1.09}) {
    EXPECT_TRUE(c.step(v, true));
    EXPECT_FALSE(c.step(v, false));
  }
}

TEST(Comparator, DefaultSeparatesAmbientFromLaser) {
  PhotodiodeModel m;
  const auto c = default_comparator(m);
  EXPECT_FALSE(c.step(m.voltage(1.0), false));
  EXPECT_FALSE(c.step(m.voltage(1.0), true));
  EXPECT_TRUE(c.step(m.voltage(6.0), false));
  EXPECT_NEAR(c.hysteresis_v, 0.1 * (m.voltage(6.0) - m.voltage(1.0)), 1e-15);
}

TEST(Comparator, EnteringLaserZoneFlipsDinWithinThreeTicks) {
  PhotodiodeModel m;
  const auto c = default_comparator(m);
  PdTransient pd(m, m.voltage(1.0));
  bool din = false;
  int flipped_at = -1;
  // 1 ms ticks sub-stepped at 50 us.
  for (int tick = 0; tick < 10 && flipped_at < 0; ++tick) {
    for (int sub = 0; sub < 20; ++sub) din = c.step(pd.step(m.voltage(6.0), 50.0), din);
    if (din) flipped_at = tick;
  }
  ASSERT_GE(flipped_at, 0);
  EXPECT_LT(flipped_at, 3);
}

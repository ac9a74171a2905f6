#include <gtest/gtest.h>

#include <cmath>

#include "smartlet/bubble_dynamics.hpp"
#include "smartlet/errors.hpp"

using namespace smartlet;
using namespace smartlet::bubbles;

TEST(Laplace, FiftyAndHundredMicron) {
  EXPECT_NEAR(laplace_pressure_mbar(50.0), 29.1, 29.1 * 0.02);
  EXPECT_NEAR(laplace_pressure_mbar(100.0), 14.55, 1e-9);
  EXPECT_NEAR(laplace_pressure_mbar(100.0), 14.4, 14.4 * 0.02);
  EXPECT_LT(laplace_pressure_mbar(1e6), 2e-3);
  EXPECT_THROW(laplace_pressure_mbar(0.0), InvalidParameter);
  EXPECT_THROW(laplace_pressure_mbar(-3.0), InvalidParameter);
  double prev = 1e9;
  for (double r = 1; r < 1e4; r *= 1.5) {
    EXPECT_LT(laplace_pressure_mbar(r), prev);
    prev = laplace_pressure_mbar(r);
  }
}

TEST(Buoyancy, SquarePackedFace) {
  EXPECT_DOUBLE_EQ(monolayer_buoyancy_uN(0, 75.0), 0.0);
  const int count = (1000 / 150) * (1000 / 150);
  EXPECT_EQ(count, 36);
  // 36 * 1000 * 9.8 * 4/3 pi (75e-6)^3
  EXPECT_NEAR(monolayer_buoyancy_uN(count, 75.0), 0.6234, 1e-3);
  EXPECT_NEAR(monolayer_buoyancy_uN(2 * count, 75.0), 2 * monolayer_buoyancy_uN(count, 75.0), 1e-12);
}

TEST(Nucleation, IdleFaceUnchanged) {
  BubbleParams p;
  Rng rng(1);
  FaceInventory face{10, 60.0, 0.3, true};
  const auto before = face;
  EXPECT_EQ(nucleate(face, false, 1.0, p, rng), 0);
  EXPECT_EQ(face, before);
}

TEST(Nucleation, FillsFaceInAboutTwoHundredMs) {
  BubbleParams p;
  EXPECT_NEAR(p.k_nuc_per_ms(), 0.2566, 1e-3);
  Rng rng(2);
  FaceInventory face;
  int t = 0;
  while (face.fill_fraction(p) < 0.99 * p.packing_limit && t < 1000) {
    nucleate(face, true, 1.0, p, rng);
    ++t;
    EXPECT_LE(face.fill_fraction(p), p.packing_limit);
    EXPECT_GE(face.mean_radius_um, p.r_nucleation_um);
    EXPECT_LE(face.mean_radius_um, p.r_max_um);
  }
  EXPECT_NEAR(t, 200, 20);
  EXPECT_DOUBLE_EQ(face.mean_radius_um, 75.0);
}

TEST(Nucleation, FacesAreIndependent) {
  BubbleParams p;
  Rng a(3), b(3), c(4);
  FaceInventory f1, f2, other;
  for (int t = 0; t < 100; ++t) {
    nucleate(f1, true, 1.0, p, a);
    nucleate(f2, true, 1.0, p, b);
    nucleate(other, t % 2 == 0, 1.0, p, c);
  }
  EXPECT_EQ(f1, f2);
  EXPECT_LT(other.count, f1.count);
}

TEST(Coalesce, BelowCriticalIsIdentity) {
  BubbleParams p;
  FaceInventory face{20, 75.0};
  ASSERT_LT(face.fill_fraction(p), p.critical_density());
  const auto before = face;
  EXPECT_FALSE(coalesce(face, p));
  EXPECT_EQ(face, before);
}

TEST(Coalesce, EightBubblesBecomeOne) {
  BubbleParams p;
  FaceInventory face{8, 50.0};
  coalesce_fully(face, p);
  EXPECT_EQ(face.count, 1);
  EXPECT_NEAR(face.mean_radius_um, 100.0, 1e-12);
}

TEST(Coalesce, ConservesVolumeAndLowersPressure) {
  BubbleParams p;
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    FaceInventory face{static_cast<int>(2 + rng.next() % 200), rng.uniform(10.0, 70.0)};
    const double v0 = face.gas_volume_um3();
    const double p0 = face.pressure_mbar(p);
    if (merge_once(face, p)) {
      EXPECT_NEAR(face.gas_volume_um3(), v0, 1e-12 * v0);
      EXPECT_LT(face.pressure_mbar(p), p0);
    }
  }
}

TEST(Coalesce, RespectsRadiusCap) {
  BubbleParams p;
  FaceInventory face{4, 140.0};
  EXPECT_FALSE(merge_once(face, p));
  EXPECT_EQ(face.count, 4);
}

TEST(Release, GapClosedKeepsBubbles) {
  BubbleParams p;
  FaceInventory face{36, 75.0};
  EXPECT_EQ(release(face, false, p).released, 0);
  EXPECT_EQ(face.count, 36);
}

TEST(Release, OneRowOfFullFace) {
  BubbleParams p;
  FaceInventory face{36, 75.0};
  EXPECT_EQ(p.rows(75.0), 6);
  const double f0 = face.fill_fraction(p);
  const auto r = release(face, true, p);
  EXPECT_EQ(r.released, 6);
  EXPECT_NEAR(face.fill_fraction(p), f0 * 5.0 / 6.0, 1e-12);
  EXPECT_NEAR(r.released_volume_um3, 6 * 4.0 / 3.0 * M_PI * std::pow(75.0, 3), 1e-6);
}

TEST(Release, RepeatedReleaseEmptiesMonotonically) {
  BubbleParams p;
  FaceInventory face{51, 75.0};
  int prev = face.count;
  for (int i = 0; i < 100 && face.count > 0; ++i) {
    release(face, true, p);
    EXPECT_LT(face.count, prev);
    prev = face.count;
  }
  EXPECT_EQ(face.count, 0);
}

#include <gtest/gtest.h>

#include <cmath>

#include "cellws/morphology.hpp"
#include "oracles.hpp"

using namespace cellws;

namespace {

GrayImage row(std::initializer_list<float> v) { return GrayImage(static_cast<int>(v.size()), 1, std::vector<float>(v)); }

BinaryMask disk_mask(int size, double diameter) {
  BinaryMask m(size, size, 0);
  const double c = (size - 1) / 2.0;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      if ((x - c) * (x - c) + (y - c) * (y - c) <= diameter * diameter / 4.0) m(x, y) = 1;
  return m;
}

}  // namespace

TEST(DiskSE, Rasterization) {
  EXPECT_EQ(DiskSE(1).offsets().size(), 1u);
  EXPECT_EQ(DiskSE(1.9).offsets().size(), 1u);
  EXPECT_EQ(DiskSE(2).offsets().size(), 5u);
  EXPECT_EQ(DiskSE(3).offsets().size(), 9u);
  EXPECT_THROW(DiskSE(0), std::invalid_argument);
  for (double d : {1.0, 2.0, 3.0, 4.5, 7.0, 10.0, 23.0}) {
    const DiskSE se(d);
    EXPECT_EQ(se.offsets().size(), oracle::disk(d).size()) << d;
    for (const auto& o : se.offsets()) {
      bool mirrored = false;
      for (const auto& q : se.offsets()) mirrored |= (q.dx == -o.dx && q.dy == -o.dy);
      EXPECT_TRUE(mirrored);
    }
  }
}

TEST(BinaryMorphology, DiameterOneIsIdentity) {
  Rng rng(21);
  const BinaryMask m = oracle::random_mask(rng, 17, 13, 0.5);
  EXPECT_EQ(erode(m, DiskSE(1)), m);
  EXPECT_EQ(dilate(m, DiskSE(1)), m);
}

TEST(BinaryMorphology, OpeningRemovesIsolatedPixel) {
  BinaryMask m(9, 9, 0);
  m(4, 4) = 1;
  EXPECT_EQ(count_set(open(m, DiskSE(3))), 0u);
}

TEST(BinaryMorphology, ErodedDiskDiameter) {
  const BinaryMask cell = disk_mask(16, 10);
  const BinaryMask eroded = erode(cell, DiskSE(4));
  EXPECT_EQ(eroded, oracle::mask_erode(cell, 4));
  EXPECT_NEAR(max_inscribed_diameter(eroded), 6, 1);
}

TEST(BinaryMorphology, MatchesBruteForce) {
  Rng rng(22);
  for (int trial = 0; trial < 60; ++trial) {
    const BinaryMask m = oracle::random_blobs(rng, rng.uniform_int(4, 28), rng.uniform_int(4, 28), 4, 1, 6);
    const double d = rng.uniform_int(1, 9);
    ASSERT_EQ(erode(m, DiskSE(d)), oracle::mask_erode(m, d)) << trial;
  }
}

TEST(BinaryMorphology, DualityOnInterior) {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const BinaryMask m = oracle::random_mask(rng, 24, 24, 0.6);
    const DiskSE se(rng.uniform_int(2, 7));
    const BinaryMask a = erode(m, se);
    const BinaryMask b = complement(dilate(complement(m), se));
    const int r = se.radius();
    for (int y = r; y < 24 - r; ++y)
      for (int x = r; x < 24 - r; ++x) ASSERT_EQ(a(x, y), b(x, y));
  }
}

TEST(BinaryMorphology, OpeningProperties) {
  Rng rng(24);
  for (int trial = 0; trial < 40; ++trial) {
    const BinaryMask m = oracle::random_blobs(rng, 30, 30, 5, 1, 7);
    BinaryMask bigger = m;
    for (auto& v : bigger)
      if (rng.bernoulli(0.1)) v = 1;
    const DiskSE se(rng.uniform_int(2, 8));
    const BinaryMask o = open(m, se);
    for (std::size_t i = 0; i < m.size(); ++i) ASSERT_LE(o[i], m[i]);
    EXPECT_EQ(open(o, se), o);
    const BinaryMask ob = open(bigger, se);
    for (std::size_t i = 0; i < m.size(); ++i) ASSERT_LE(o[i], ob[i]);
  }
}

TEST(GrayMorphology, MatchesBruteForce) {
  Rng rng(25);
  for (int trial = 0; trial < 60; ++trial) {
    const GrayImage img = oracle::random_levels(rng, rng.uniform_int(2, 26), rng.uniform_int(2, 26), 255);
    const double d = rng.uniform_int(1, 9);
    ASSERT_EQ(erode(img, DiskSE(d)), oracle::slide(img, d, true, 0, false)) << trial;
    ASSERT_EQ(dilate(img, DiskSE(d)), oracle::slide(img, d, false, 0, false)) << trial;
    ASSERT_EQ(open(img, DiskSE(d)), oracle::gray_open(img, d)) << trial;
  }
}

TEST(TopHat, ConstantAndPeak) {
  for (float v : top_hat(GrayImage(9, 9, 3.0f), DiskSE(3))) EXPECT_EQ(v, 0.0f);
  GrayImage img(11, 11, 2.0f);
  img(5, 5) = 9.0f;
  const GrayImage th = top_hat(img, DiskSE(3));
  for (int y = 0; y < 11; ++y)
    for (int x = 0; x < 11; ++x) EXPECT_EQ(th(x, y), (x == 5 && y == 5) ? 7.0f : 0.0f);
}

TEST(TopHat, RampMatchesSlidingOracle) {
  GrayImage img(12, 9);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 12; ++x) img(x, y) = static_cast<float>(x + 2 * y);
  const GrayImage th = top_hat(img, DiskSE(3));
  const GrayImage opened = oracle::gray_open(img, 3);
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_EQ(th[i], img[i] - opened[i]);
    EXPECT_GE(th[i], 0.0f);
  }
}

TEST(Reconstruct, FixedPoint) {
  Rng rng(26);
  const GrayImage c = oracle::random_levels(rng, 10, 8, 20);
  EXPECT_EQ(geodesic_reconstruct(c, c, Connectivity::Eight), c);
}

TEST(Reconstruct, FlatCeilingKeepsMarker) {
  const GrayImage ceiling(6, 5, 10.0f);
  const GrayImage marker(6, 5, 7.0f);
  EXPECT_EQ(geodesic_reconstruct(marker, ceiling, Connectivity::Four), marker);
}

TEST(Reconstruct, WorkedRow) {
  const GrayImage ceiling = row({0, 4, 0, 6, 0});
  const GrayImage marker = row({-3, 1, -3, 3, -3});
  const GrayImage r = geodesic_reconstruct(marker, ceiling, Connectivity::Eight);
  EXPECT_EQ(r, row({0, 1, 0, 3, 0}));
  EXPECT_EQ(r, oracle::reconstruct(marker, ceiling, 8));
}

TEST(Reconstruct, RejectsMarkerAboveCeiling) {
  EXPECT_THROW(geodesic_reconstruct(row({0, 2}), row({1, 1}), Connectivity::Eight), std::invalid_argument);
}

TEST(Reconstruct, MatchesIterativeOracle) {
  Rng rng(27);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = rng.uniform_int(1, 32), h = rng.uniform_int(1, 32);
    const GrayImage ceiling = trial % 2 ? oracle::random_levels(rng, w, h, 30) : oracle::random_terrain(rng, w, h, 6, 60);
    GrayImage marker = ceiling;
    for (auto& v : marker) v -= static_cast<float>(rng.uniform_int(0, 15));
    for (int c : {4, 8})
      ASSERT_EQ(geodesic_reconstruct(marker, ceiling, connectivity_from_int(c)), oracle::reconstruct(marker, ceiling, c))
          << trial;
  }
}

TEST(HDome, ConstantImage) {
  for (float v : hdome(GrayImage(7, 7, 42.0f), 3, Connectivity::Eight)) EXPECT_EQ(v, 0.0f);
}

TEST(HDome, WorkedRow) {
  const GrayImage img = row({0, 4, 0, 6, 0});
  EXPECT_EQ(hdome(img, 3, Connectivity::Eight), row({0, 3, 0, 3, 0}));
  const BinaryMask tops = dome_pixels(img, 3, Connectivity::Eight);
  EXPECT_EQ(tops, BinaryMask(5, 1, std::vector<std::uint8_t>{0, 1, 0, 1, 0}));
}

TEST(HDome, ShallowPeakNeverReachesH) {
  GrayImage img(9, 9, 10.0f);
  img(4, 4) = 12.0f;
  const GrayImage dome = hdome(img, 3, Connectivity::Eight);
  EXPECT_EQ(dome(4, 4), 2.0f);
  EXPECT_EQ(count_set(dome_pixels(img, 3, Connectivity::Eight)), 0u);
}

TEST(HDome, SaddleSeparatesPeaks) {
  const BinaryMask tops = dome_pixels(row({0, 9, 5, 9, 0}), 3, Connectivity::Eight);
  const LabelMap l = connected_components(tops, Connectivity::Eight);
  EXPECT_EQ(count_labels(l), 2u);
  EXPECT_GT(l[1], 0);
  EXPECT_GT(l[3], 0);
  EXPECT_EQ(l[2], 0);
}

TEST(HDome, RejectsNonPositiveH) {
  EXPECT_THROW(hdome(row({1, 2}), 0, Connectivity::Eight), std::invalid_argument);
}

TEST(HDome, MatchesOracleAndBounds) {
  Rng rng(28);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = rng.uniform_int(1, 32), h = rng.uniform_int(1, 32);
    const GrayImage img = oracle::random_terrain(rng, w, h, rng.uniform_int(1, 8), 255);
    const int hh = rng.uniform_int(1, 40);
    for (int c : {4, 8}) {
      const GrayImage dome = hdome(img, hh, connectivity_from_int(c));
      ASSERT_EQ(dome, oracle::hdome(img, static_cast<float>(hh), c)) << trial;
      for (float v : dome) {
        ASSERT_GE(v, 0.0f);
        ASSERT_LE(v, static_cast<float>(hh));
      }
    }
  }
}

TEST(HDome, DomeComponentsHoldDeepMaxima) {
  Rng rng(29);
  for (int trial = 0; trial < 60; ++trial) {
    const int w = rng.uniform_int(4, 32), h = rng.uniform_int(4, 32);
    const GrayImage img = oracle::random_terrain(rng, w, h, rng.uniform_int(1, 8), 120);
    const int hh = rng.uniform_int(1, 30);
    const LabelMap comps = connected_components(dome_pixels(img, hh, Connectivity::Eight), Connectivity::Eight);
    const auto n = static_cast<std::size_t>(max_label(comps));
    std::vector<bool> ok(n + 1, false);
    for (std::size_t i = 0; i < img.size(); ++i) {
      const auto l = comps[i];
      if (l == 0 || ok[l]) continue;
      if (oracle::dynamics(img, i, 8) >= hh) ok[l] = true;
    }
    for (std::size_t l = 1; l <= n; ++l) EXPECT_TRUE(ok[l]) << "trial " << trial << " component " << l;
  }
}

TEST(HDome, PeakReachesHIffDynamicsAtLeastH) {
  Rng rng(32);
  for (int trial = 0; trial < 40; ++trial) {
    const GrayImage img = oracle::random_terrain(rng, rng.uniform_int(3, 24), rng.uniform_int(3, 24), 5, 90);
    const int hh = rng.uniform_int(1, 50);
    const GrayImage dome = hdome(img, hh, Connectivity::Eight);
    // Local maxima pixels: no strictly higher 8-neighbour.
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) {
        bool top = true;
        for (const auto& o : neighbor_offsets(Connectivity::Eight))
          if (img.contains(x + o.dx, y + o.dy) && img(x + o.dx, y + o.dy) > img(x, y)) top = false;
        if (!top) continue;
        const int dyn = oracle::dynamics(img, img.index(x, y), 8);
        ASSERT_EQ(dome(x, y) == static_cast<float>(hh), dyn >= hh) << trial << " @" << x << "," << y;
      }
  }
}

TEST(Distance, Basics) {
  BinaryMask m(6, 6, 0);
  m(0, 0) = 1;
  const GrayImage d = distance_transform(m);
  EXPECT_EQ(d(0, 0), 0.0f);
  EXPECT_FLOAT_EQ(d(3, 4), 5.0f);
  const GrayImage empty = distance_transform(BinaryMask(6, 6, 0));
  for (float v : empty) EXPECT_GT(v, std::hypot(6.0f, 6.0f));
}

TEST(Distance, MatchesExhaustiveScan) {
  Rng rng(30);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = rng.uniform_int(1, 32), h = rng.uniform_int(1, 32);
    const BinaryMask m = oracle::random_mask(rng, w, h, rng.uniform(0.01, 0.4));
    if (count_set(m) == 0) continue;
    const auto brute = oracle::squared_distance(m);
    const SquaredDistanceMap d2 = squared_distance_transform(m);
    const GrayImage d = distance_transform(m);
    for (std::size_t i = 0; i < m.size(); ++i) {
      ASSERT_EQ(d2[i], brute[i]) << trial;
      ASSERT_EQ(d[i], static_cast<float>(std::sqrt(static_cast<double>(brute[i]))));
    }
  }
}

TEST(InscribedDiameter, Fixtures) {
  EXPECT_EQ(max_inscribed_diameter(BinaryMask(9, 1, 1)), 1);
  EXPECT_EQ(max_inscribed_diameter(BinaryMask(1, 1, 1)), 1);
  const BinaryMask disk = disk_mask(15, 11);
  EXPECT_NEAR(max_inscribed_diameter(disk), 11, 1);
  EXPECT_EQ(max_inscribed_diameter(disk), oracle::inscribed_diameter(disk));
  const BinaryMask rect(10, 4, 1);
  EXPECT_NEAR(max_inscribed_diameter(rect), 4, 1);
  EXPECT_EQ(max_inscribed_diameter(rect), oracle::inscribed_diameter(rect));
  EXPECT_THROW(max_inscribed_diameter(BinaryMask(3, 3, 0)), std::invalid_argument);
}

TEST(InscribedDiameter, MatchesDiskFitOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = rng.uniform_int(1, 32), h = rng.uniform_int(1, 32);
    BinaryMask m = oracle::random_blobs(rng, w, h, rng.uniform_int(1, 3), 1, 9);
    if (count_set(m) == 0) m(0, 0) = 1;
    ASSERT_EQ(max_inscribed_diameter(m), oracle::inscribed_diameter(m)) << trial;
  }
}

TEST(UltimatePoint, DeepestFirstInRasterOrder) {
  const BinaryMask rect(7, 3, 1);
  EXPECT_EQ(ultimate_erosion_point(rect), rect.index(1, 1));
  const BinaryMask disk = disk_mask(11, 9);
  EXPECT_EQ(ultimate_erosion_point(disk), disk.index(5, 5));
}

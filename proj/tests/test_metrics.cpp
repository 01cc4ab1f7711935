#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "cellws/metrics.hpp"
#include "oracles.hpp"

using namespace cellws;

namespace {

// Ten 3x3 cells on a 40x8 strip.
LabelMap ten_cells() {
  LabelMap l(40, 8, 0);
  for (int c = 0; c < 10; ++c)
    for (int y = 2; y < 5; ++y)
      for (int x = 4 * c; x < 4 * c + 3; ++x) l(x, y) = c + 1;
  return l;
}

LabelMap permute(const LabelMap& l, Rng& rng) {
  const int n = max_label(l);
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 100);
  for (int i = n - 1; i > 0; --i) std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  LabelMap out = l;
  for (auto& v : out)
    if (v > 0) v = ids[static_cast<std::size_t>(v - 1)];
  return out;
}

// Perturbs a segmentation: random merges, splits and spurious blobs.
LabelMap perturb(const LabelMap& refs, Rng& rng) {
  LabelMap s = refs;
  const int n = max_label(refs);
  for (auto& v : s)
    if (v > 0 && rng.bernoulli(0.05)) v = 0;
  for (int m = 0; m < 2; ++m) {
    const int a = rng.uniform_int(1, std::max(1, n)), b = rng.uniform_int(1, std::max(1, n));
    if (rng.bernoulli(0.5))
      for (auto& v : s)
        if (v == b) v = a;
  }
  for (int y = 0; y < s.height(); ++y)
    for (int x = 0; x < s.width() / 2; ++x)
      if (s(x, y) > 0 && rng.bernoulli(0.1)) s(x, y) = n + 1;
  const int bx = rng.uniform_int(0, s.width() - 3), by = rng.uniform_int(0, s.height() - 3);
  for (int y = by; y < by + 3; ++y)
    for (int x = bx; x < bx + 3; ++x)
      if (s(x, y) == 0) s(x, y) = n + 2;
  return s;
}

}  // namespace

TEST(Jaccard, Fixtures) {
  const BinaryMask r(6, 1, std::vector<std::uint8_t>{1, 1, 1, 0, 0, 0});
  EXPECT_DOUBLE_EQ(jaccard(r, r), 1.0);
  EXPECT_DOUBLE_EQ(jaccard(r, complement(r)), 0.0);
  EXPECT_DOUBLE_EQ(jaccard(r, BinaryMask(6, 1, 0)), 0.0);
  EXPECT_DOUBLE_EQ(jaccard(60, 100, 80), 0.5);
  EXPECT_THROW(jaccard(BinaryMask(3, 1, 0), r), std::invalid_argument);
}

TEST(Seg, Fixtures) {
  const LabelMap refs = ten_cells();
  EXPECT_DOUBLE_EQ(seg_measure(refs, refs), 1.0);

  LabelMap two(10, 1, std::vector<std::int32_t>{1, 1, 1, 1, 0, 2, 2, 2, 2, 0});
  LabelMap half = two;
  for (auto& v : half)
    if (v == 2) v = 0;
  half[4] = 1;
  EXPECT_DOUBLE_EQ(seg_measure(two, half), (4.0 / 5.0 + 0.0) / 2.0);

  // |R| = 100, |S| = 80, overlap 60.
  LabelMap r(20, 10, 0), s(20, 10, 0);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) r(x, y) = 1;
  for (int y = 0; y < 10; ++y)
    for (int x = 4; x < 12; ++x) s(x, y) = 1;
  std::vector<RegionScore> detail;
  EXPECT_DOUBLE_EQ(seg_measure(r, s, &detail), 0.5);
  ASSERT_EQ(detail.size(), 1u);
  EXPECT_EQ(detail[0].segment, 1);
}

TEST(Seg, RejectsEmptyReference) {
  EXPECT_THROW(seg_measure(LabelMap(4, 4, 0), LabelMap(4, 4, 0)), std::invalid_argument);
  EXPECT_THROW(seg_measure(LabelMap(4, 4, 0), LabelMap(5, 4, 0)), std::invalid_argument);
}

TEST(Seg, PoolsRegionsAcrossFrames) {
  const LabelMap a = ten_cells();
  LabelMap b(4, 4, 0);
  b(1, 1) = 1;
  const LabelMap empty(4, 4, 0);
  const FramePair frames[] = {{"a", &a, &a}, {"b", &b, &empty}};
  EXPECT_DOUBLE_EQ(seg_measure(frames), 10.0 / 11.0);
}

TEST(Det, Fixtures) {
  const LabelMap refs = ten_cells();
  EXPECT_DOUBLE_EQ(det_measure(refs, refs), 1.0);

  LabelMap missed = refs;
  for (auto& v : missed)
    if (v == 4) v = 0;
  DetEvents ev;
  EXPECT_DOUBLE_EQ(det_measure(refs, missed, &ev), 0.9);
  EXPECT_EQ(ev.false_negatives, 1u);
  EXPECT_DOUBLE_EQ(oracle::det_events(refs, missed).det(), 0.9);

  LabelMap extra = refs;
  extra(1, 6) = extra(2, 6) = 11;
  EXPECT_DOUBLE_EQ(det_measure(refs, extra), 0.99);
  EXPECT_DOUBLE_EQ(oracle::det_events(refs, extra).det(), 0.99);
}

TEST(Det, MergeCostsOneSplit) {
  const LabelMap refs = ten_cells();
  LabelMap merged = refs;
  for (auto& v : merged)
    if (v == 2 || v == 3) v = 2;
  DetEvents ev;
  EXPECT_DOUBLE_EQ(det_measure(refs, merged, &ev), 1.0 - 5.0 / 100.0);
  EXPECT_EQ(ev.splits_needed, 1u);
}

TEST(Det, FloorsAtZero) {
  LabelMap refs(4, 1, std::vector<std::int32_t>{1, 0, 0, 0});
  LabelMap segs(4, 1, std::vector<std::int32_t>{0, 2, 3, 4});
  EXPECT_EQ(det_measure(refs, segs), 0.0);
}

TEST(Det, DeletingMatchedSegmentsCostsTen) {
  const LabelMap refs = ten_cells();
  LabelMap segs = refs;
  DetEvents ev;
  for (int del = 1; del <= 10; ++del) {
    for (auto& v : segs)
      if (v == del) v = 0;
    det_measure(refs, segs, &ev);
    EXPECT_DOUBLE_EQ(ev.cost(), 10.0 * del);
  }
}

TEST(Det, MatchesEventEnumerationOracle) {
  Rng rng(81);
  for (int trial = 0; trial < 100; ++trial) {
    const LabelMap refs = oracle::random_cells(rng, 30, 24, rng.uniform_int(1, 8), 2, 7);
    if (count_labels(refs) == 0) continue;
    const LabelMap segs = perturb(refs, rng);
    DetEvents ev;
    const double det = det_measure(refs, segs, &ev);
    const oracle::DetOracle o = oracle::det_events(refs, segs);
    ASSERT_EQ(static_cast<long>(ev.false_negatives), o.fn) << trial;
    ASSERT_EQ(static_cast<long>(ev.false_positives), o.fp) << trial;
    ASSERT_EQ(static_cast<long>(ev.splits_needed), o.ns) << trial;
    ASSERT_DOUBLE_EQ(det, o.det()) << trial;
  }
}

TEST(Matching, EachReferenceAtMostOneSegment) {
  Rng rng(82);
  for (int trial = 0; trial < 100; ++trial) {
    const LabelMap refs = oracle::random_cells(rng, 30, 24, rng.uniform_int(1, 8), 2, 7);
    const LabelMap segs = perturb(refs, rng);
    const MatchTable t = match_frame(refs, segs);
    std::map<int, int> matched;
    for (const auto& s : t.segments)
      for (int r : s.references) ++matched[r];
    for (const auto& [r, n] : matched) ASSERT_EQ(n, 1) << trial;
  }
}

TEST(Measures, InvariantUnderRelabeling) {
  Rng rng(83);
  for (int trial = 0; trial < 50; ++trial) {
    const LabelMap refs = oracle::random_cells(rng, 30, 24, rng.uniform_int(1, 8), 2, 7);
    if (count_labels(refs) == 0) continue;
    const LabelMap segs = perturb(refs, rng);
    const LabelMap pr = permute(refs, rng), ps = permute(segs, rng);
    EXPECT_DOUBLE_EQ(seg_measure(refs, segs), seg_measure(pr, ps));
    EXPECT_DOUBLE_EQ(det_measure(refs, segs), det_measure(pr, ps));
    EXPECT_DOUBLE_EQ(seg_measure(refs, refs), 1.0);
    EXPECT_DOUBLE_EQ(det_measure(refs, refs), 1.0);
  }
}

TEST(OpCsb, Fixtures) {
  EXPECT_DOUBLE_EQ(op_csb(1.0, 1.0), 1.0);
  EXPECT_NEAR(op_csb(0.863, 0.961), 0.912, 5e-4);
  EXPECT_NEAR(op_csb(0.715, 0.967), 0.841, 5e-4);
  EXPECT_THROW(op_csb(1.2, 0.5), std::invalid_argument);
}

TEST(Evaluate, ReportIsConsistent) {
  Rng rng(84);
  const LabelMap refs = oracle::random_cells(rng, 40, 30, 6, 3, 8);
  const LabelMap segs = perturb(refs, rng);
  const FramePair f{"t000", &refs, &segs};
  const EvalReport r = evaluate(std::span(&f, 1));
  EXPECT_DOUBLE_EQ(r.op_csb, (r.seg + r.det) / 2);
  EXPECT_EQ(r.reference_count, count_labels(refs));
  EXPECT_EQ(r.segment_count, count_labels(segs));
  EXPECT_EQ(r.per_region.size(), r.reference_count);
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellws/raster.hpp"

namespace cellws {

/// |R n S| / |R u S| from set sizes. Throws if R is empty.
double jaccard(std::size_t intersection, std::size_t r_size, std::size_t s_size);
double jaccard(const BinaryMask& r, const BinaryMask& s);

/// Majority-overlap matching of one frame: reference R matches segment S iff
/// |R n S| > 0.5 |R|, so each reference matches at most one segment.
struct MatchTable {
  struct Reference {
    std::int32_t label = 0;
    std::size_t area = 0;
    std::int32_t segment = 0;  // 0 when unmatched
    std::size_t overlap = 0;
    std::size_t segment_area = 0;
  };
  struct Segment {
    std::int32_t label = 0;
    std::size_t area = 0;
    std::vector<std::int32_t> references;
  };
  std::vector<Reference> references;
  std::vector<Segment> segments;
};

MatchTable match_frame(const LabelMap& refs, const LabelMap& segs);

struct RegionScore {
  std::string frame;
  std::int32_t reference = 0;
  std::int32_t segment = 0;
  double jaccard = 0.0;
};

struct DetEvents {
  std::size_t false_negatives = 0;  // reference matched by nothing, x10
  std::size_t false_positives = 0;  // segment matching no reference, x1
  std::size_t splits_needed = 0;    // extra references on one segment, x5

  double cost() const noexcept {
    return 10.0 * static_cast<double>(false_negatives) + 1.0 * static_cast<double>(false_positives) +
           5.0 * static_cast<double>(splits_needed);
  }
};

struct EvalReport {
  double seg = 0.0;
  double det = 0.0;
  double op_csb = 0.0;
  std::size_t reference_count = 0;
  std::size_t segment_count = 0;
  std::vector<RegionScore> per_region;
  DetEvents events;
};

/// One frame of a sequence to evaluate.
struct FramePair {
  std::string id;
  const LabelMap* refs = nullptr;
  const LabelMap* segs = nullptr;
};

/// Mean Jaccard over all reference regions of all frames (pooled).
double seg_measure(std::span<const FramePair> frames, std::vector<RegionScore>* detail = nullptr);
double seg_measure(const LabelMap& refs, const LabelMap& segs, std::vector<RegionScore>* detail = nullptr);

/// max(0, 1 - AOGM-D / (10 * #references)).
double det_measure(std::span<const FramePair> frames, DetEvents* events = nullptr);
double det_measure(const LabelMap& refs, const LabelMap& segs, DetEvents* events = nullptr);

double op_csb(double seg, double det);

EvalReport evaluate(std::span<const FramePair> frames);

}  // namespace cellws

#include "cellws/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace cellws {

double jaccard(std::size_t intersection, std::size_t r_size, std::size_t s_size) {
  if (r_size == 0) throw std::invalid_argument("jaccard: reference set is empty");
  if (intersection > r_size || intersection > s_size)
    throw std::invalid_argument("jaccard: intersection larger than a set");
  return static_cast<double>(intersection) / static_cast<double>(r_size + s_size - intersection);
}

double jaccard(const BinaryMask& r, const BinaryMask& s) {
  require_same_shape(r, s, "jaccard");
  std::size_t inter = 0;
  for (std::size_t i = 0; i < r.size(); ++i) inter += (r[i] && s[i]) ? 1 : 0;
  return jaccard(inter, count_set(r), count_set(s));
}

MatchTable match_frame(const LabelMap& refs, const LabelMap& segs) {
  require_same_shape(refs, segs, "match_frame");
  std::map<std::int32_t, std::size_t> ref_area, seg_area;
  std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> overlap;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto r = refs[i], s = segs[i];
    if (r > 0) ++ref_area[r];
    if (s > 0) ++seg_area[s];
    if (r > 0 && s > 0) ++overlap[{r, s}];
  }

  MatchTable table;
  std::map<std::int32_t, std::size_t> seg_index;
  for (const auto& [label, area] : seg_area) {
    seg_index[label] = table.segments.size();
    table.segments.push_back({label, area, {}});
  }
  for (const auto& [label, area] : ref_area) table.references.push_back({label, area, 0, 0, 0});

  std::map<std::int32_t, std::size_t> ref_index;
  for (std::size_t i = 0; i < table.references.size(); ++i) ref_index[table.references[i].label] = i;
  for (const auto& [key, count] : overlap) {
    auto& ref = table.references[ref_index[key.first]];
    if (2 * count > ref.area) {
      ref.segment = key.second;
      ref.overlap = count;
      ref.segment_area = seg_area[key.second];
      table.segments[seg_index[key.second]].references.push_back(key.first);
    }
  }
  return table;
}

double seg_measure(std::span<const FramePair> frames, std::vector<RegionScore>* detail) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& f : frames) {
    const MatchTable table = match_frame(*f.refs, *f.segs);
    for (const auto& r : table.references) {
      const double j = r.segment != 0 ? jaccard(r.overlap, r.area, r.segment_area) : 0.0;
      sum += j;
      ++n;
      if (detail) detail->push_back({f.id, r.label, r.segment, j});
    }
  }
  if (n == 0) throw std::invalid_argument("seg_measure: no reference regions");
  return sum / static_cast<double>(n);
}

double seg_measure(const LabelMap& refs, const LabelMap& segs, std::vector<RegionScore>* detail) {
  const FramePair f{"", &refs, &segs};
  return seg_measure(std::span<const FramePair>(&f, 1), detail);
}

double det_measure(std::span<const FramePair> frames, DetEvents* events) {
  DetEvents ev;
  std::size_t n = 0;
  for (const auto& f : frames) {
    const MatchTable table = match_frame(*f.refs, *f.segs);
    n += table.references.size();
    for (const auto& r : table.references)
      if (r.segment == 0) ++ev.false_negatives;
    for (const auto& s : table.segments) {
      if (s.references.empty()) ++ev.false_positives;
      else ev.splits_needed += s.references.size() - 1;
    }
  }
  if (n == 0) throw std::invalid_argument("det_measure: no reference objects");
  if (events) *events = ev;
  return std::max(0.0, 1.0 - ev.cost() / (10.0 * static_cast<double>(n)));
}

double det_measure(const LabelMap& refs, const LabelMap& segs, DetEvents* events) {
  const FramePair f{"", &refs, &segs};
  return det_measure(std::span<const FramePair>(&f, 1), events);
}

double op_csb(double seg, double det) {
  if (!(seg >= 0.0 && seg <= 1.0 && det >= 0.0 && det <= 1.0))
    throw std::invalid_argument("op_csb: measures must lie in [0, 1]");
  return 0.5 * (seg + det);
}

EvalReport evaluate(std::span<const FramePair> frames) {
  EvalReport report;
  report.seg = seg_measure(frames, &report.per_region);
  report.det = det_measure(frames, &report.events);
  report.op_csb = op_csb(report.seg, report.det);
  report.reference_count = report.per_region.size();
  for (const auto& f : frames) report.segment_count += count_labels(*f.segs);
  return report;
}

}  // namespace cellws

#include "cellws/markerseg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

#include "cellws/morphology.hpp"

namespace cellws {

double PipelineParams::marker_diameter() const noexcept { return std::max(1.0, k * d_inf); }

void PipelineParams::validate() const {
  if (!(t_m > 0.0 && t_m < 1.0)) throw std::invalid_argument("t_m must lie in (0, 1)");
  if (h < 1) throw std::invalid_argument("h must be an integer >= 1");
  if (!(k >= 0.0 && k <= 1.0)) throw std::invalid_argument("k must lie in [0, 1]");
  if (!(d_inf > 0.0)) throw std::invalid_argument("d_inf must be positive");
  if (t_c < 0 || t_c > 255) throw std::invalid_argument("t_c must lie in [0, 255]");
}

double marker_filter_diameter_from(std::span<const double> diameters, double k) {
  if (diameters.empty()) throw std::invalid_argument("marker_filter_diameter: no training cells");
  if (!(k > 0.0 && k <= 1.0)) throw std::invalid_argument("marker_filter_diameter: k must lie in (0, 1]");
  return k * *std::min_element(diameters.begin(), diameters.end());
}

double marker_filter_diameter(std::span<const BinaryMask> training_cells, double k) {
  std::vector<double> diameters;
  diameters.reserve(training_cells.size());
  for (const auto& cell : training_cells) diameters.push_back(max_inscribed_diameter(cell));
  return marker_filter_diameter_from(diameters, k);
}

MarkerFunction extract_markers(const GrayImage& marker_pred, double d, double t_m, int h,
                               Connectivity connectivity) {
  if (!(d >= 1.0)) throw std::invalid_argument("extract_markers: d must be >= 1");
  if (!(t_m > 0.0 && t_m < 1.0)) throw std::invalid_argument("extract_markers: t_m must lie in (0, 1)");
  if (h < 1) throw std::invalid_argument("extract_markers: h must be >= 1");

  const ByteImage q = quantize(marker_pred);
  GrayImage levels(q.width(), q.height());
  for (std::size_t i = 0; i < q.size(); ++i) levels[i] = q[i];

  GrayImage opened = open(levels, DiskSE(d));
  const auto floor_level = static_cast<float>(std::lround(t_m * 255.0));
  for (auto& v : opened)
    if (v < floor_level) v = 0.0f;

  const BinaryMask tops = dome_pixels(opened, h, connectivity);
  return MarkerFunction{connected_components(tops, connectivity)};
}

SegmentationFunction segmentation_function(const GrayImage& fg_pred) {
  GrayImage relief(fg_pred.width(), fg_pred.height());
  for (std::size_t i = 0; i < fg_pred.size(); ++i) relief[i] = 1.0f - fg_pred[i];
  return SegmentationFunction{std::move(relief)};
}

ThresholdCurve threshold_curve(std::span<const GrayImage> fg_preds, std::span<const BinaryMask> refs) {
  if (fg_preds.empty() || fg_preds.size() != refs.size())
    throw std::invalid_argument("calibrate_tc: need equally many (nonzero) predictions and references");
  std::array<std::uint64_t, 256> all{}, hit{};
  std::uint64_t positives = 0;
  for (std::size_t f = 0; f < fg_preds.size(); ++f) {
    require_same_shape(fg_preds[f], refs[f], "calibrate_tc");
    const ByteImage q = quantize(fg_preds[f]);
    for (std::size_t i = 0; i < q.size(); ++i) {
      ++all[q[i]];
      if (refs[f][i]) {
        ++hit[q[i]];
        ++positives;
      }
    }
  }
  ThresholdCurve curve;
  std::uint64_t predicted = 0, tp = 0;
  for (int t = 255; t >= 0; --t) {
    predicted += all[t];
    tp += hit[t];
    const std::uint64_t uni = predicted + positives - tp;
    curve.jaccard[t] = uni == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(uni);
  }
  curve.best = 0;
  for (int t = 1; t < 256; ++t)
    if (curve.jaccard[t] > curve.jaccard[curve.best]) curve.best = t;
  return curve;
}

int calibrate_tc(std::span<const GrayImage> fg_preds, std::span<const BinaryMask> refs) {
  return threshold_curve(fg_preds, refs).best;
}

BinaryMask cell_region_mask(const GrayImage& fg_pred, int t_c) {
  if (t_c < 0 || t_c > 255) throw std::invalid_argument("cell_region_mask: t_c must lie in [0, 255]");
  const ByteImage q = quantize(fg_pred);
  BinaryMask out(q.width(), q.height());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = q[i] >= t_c ? 1 : 0;
  return out;
}

namespace {

struct FloodEntry {
  float priority;
  std::uint64_t order;
  std::uint32_t pixel;
  std::int32_t label;
};

struct LaterFirst {
  bool operator()(const FloodEntry& a, const FloodEntry& b) const noexcept {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.order > b.order;
  }
};

// Marker pixels outside the region are discarded.
LabelMap clip_markers(const MarkerFunction& markers, const BinaryMask& region, std::size_t& dropped) {
  LabelMap clipped(region.width(), region.height(), 0);
  std::set<std::int32_t> before, after;
  for (std::size_t i = 0; i < region.size(); ++i) {
    const auto l = markers.markers[i];
    if (l <= 0) continue;
    before.insert(l);
    if (region[i]) {
      clipped[i] = l;
      after.insert(l);
    }
  }
  dropped = before.size() - after.size();
  return clipped;
}

}  // namespace

WatershedResult watershed(const MarkerFunction& markers, const SegmentationFunction& relief,
                          const BinaryMask& region, Connectivity connectivity) {
  require_same_shape(markers.markers, relief.relief, "watershed");
  require_same_shape(markers.markers, region, "watershed");
  WatershedResult result;
  result.labels = clip_markers(markers, region, result.dropped_markers);
  LabelMap& out = result.labels;
  const GrayImage& r = relief.relief;
  const int w = r.width();

  std::vector<std::uint8_t> queued(r.size(), 0);
  std::priority_queue<FloodEntry, std::vector<FloodEntry>, LaterFirst> open;
  std::uint64_t order = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] > 0) {
      queued[i] = 1;
      open.push({r[i], order++, static_cast<std::uint32_t>(i), out[i]});
    }
  }

  const auto offsets = neighbor_offsets(connectivity);
  while (!open.empty()) {
    const FloodEntry e = open.top();
    open.pop();
    out[e.pixel] = e.label;
    const int px = static_cast<int>(e.pixel % w), py = static_cast<int>(e.pixel / w);
    for (const auto& o : offsets) {
      const int nx = px + o.dx, ny = py + o.dy;
      if (!out.contains(nx, ny)) continue;
      const std::size_t n = out.index(nx, ny);
      if (!region[n] || queued[n]) continue;
      queued[n] = 1;
      open.push({std::max(r[n], e.priority), order++, static_cast<std::uint32_t>(n), e.label});
    }
  }
  return result;
}

LabelMap distance_baseline(const MarkerFunction& markers, const BinaryMask& region) {
  require_same_shape(markers.markers, region, "distance_baseline");
  std::size_t dropped = 0;
  const LabelMap clipped = clip_markers(markers, region, dropped);
  LabelMap out(region.width(), region.height(), 0);
  std::vector<std::int64_t> best(region.size(), std::numeric_limits<std::int64_t>::max());

  std::set<std::int32_t> labels(clipped.begin(), clipped.end());
  labels.erase(0);
  for (const auto label : labels) {
    const auto d2 = squared_distance_transform(label_mask(clipped, label));
    for (std::size_t i = 0; i < region.size(); ++i) {
      if (region[i] && d2[i] < best[i]) {
        best[i] = d2[i];
        out[i] = label;
      }
    }
  }
  return out;
}

LabelMap remove_border_cells(const LabelMap& labels) {
  if (labels.empty()) return labels;
  const int w = labels.width(), h = labels.height();
  std::set<std::int32_t> touching;
  for (int x = 0; x < w; ++x) {
    touching.insert(labels(x, 0));
    touching.insert(labels(x, h - 1));
  }
  for (int y = 0; y < h; ++y) {
    touching.insert(labels(0, y));
    touching.insert(labels(w - 1, y));
  }
  LabelMap kept = labels;
  for (auto& v : kept)
    if (v > 0 && touching.count(v)) v = 0;
  return canonicalize(kept);
}

SegmentationStages prepare_stages(const GrayImage& marker_pred, const GrayImage& fg_pred,
                                  const PipelineParams& params) {
  params.validate();
  require_same_shape(marker_pred, fg_pred, "segment_image");
  require_probability(marker_pred, "marker prediction");
  require_probability(fg_pred, "foreground prediction");
  SegmentationStages stages;
  stages.markers = extract_markers(marker_pred, params.marker_diameter(), params.t_m, params.h, params.connectivity);
  stages.relief = segmentation_function(fg_pred);
  stages.region = cell_region_mask(fg_pred, params.t_c);
  return stages;
}

SegmentationResult finish_segmentation(const SegmentationStages& stages, const PipelineParams& params) {
  SegmentationResult result;
  result.marker_count = stages.markers.count();
  WatershedResult ws = watershed(stages.markers, stages.relief, stages.region, params.connectivity);
  result.dropped_markers = ws.dropped_markers;
  result.labels = params.remove_border ? remove_border_cells(ws.labels) : canonicalize(ws.labels);
  return result;
}

SegmentationResult segment_image_detailed(const GrayImage& marker_pred, const GrayImage& fg_pred,
                                          const PipelineParams& params) {
  return finish_segmentation(prepare_stages(marker_pred, fg_pred, params), params);
}

LabelMap segment_image(const GrayImage& marker_pred, const GrayImage& fg_pred, const PipelineParams& params) {
  return segment_image_detailed(marker_pred, fg_pred, params).labels;
}

}  // namespace cellws

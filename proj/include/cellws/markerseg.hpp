#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "cellws/raster.hpp"

namespace cellws {

/// Post-processing parameters for one dataset. Thresholds `h` and `t_c`
/// live on the 0-255 scale of quantized predictions.
struct PipelineParams {
  double t_m = 0.6;
  int h = 5;
  double k = 0.8;
  double d_inf = 60.0;
  int t_c = 216;
  Connectivity connectivity = Connectivity::Eight;
  bool remove_border = false;

  /// Diameter of the marker opening, k * d_inf, never below 1.
  double marker_diameter() const noexcept;
  void validate() const;
};

/// Labelled watershed seeds, one label per marker.
struct MarkerFunction {
  LabelMap markers;

  std::size_t count() const { return count_labels(markers); }
};

/// Relief flooded by the watershed: high on boundaries, low inside cells.
struct SegmentationFunction {
  GrayImage relief;
};

/// k * min(max_inscribed_diameter) over training cells.
double marker_filter_diameter(std::span<const BinaryMask> training_cells, double k);
/// Same, from already measured diameters.
double marker_filter_diameter_from(std::span<const double> diameters, double k);

/// Opening by disk(d) of the 0-255 quantized prediction, zeroing of pixels
/// below round(t_m * 255), then the h-dome tops, labelled.
MarkerFunction extract_markers(const GrayImage& marker_pred, double d, double t_m, int h,
                               Connectivity connectivity);

/// 1 - foreground prediction.
SegmentationFunction segmentation_function(const GrayImage& fg_pred);

struct ThresholdCurve {
  std::array<double, 256> jaccard{};
  int best = 0;
};

/// Exhaustive sweep of t in 0..255 maximizing the pooled Jaccard index
/// between {quantize(fg) >= t} and the references; ties go to the smallest t.
ThresholdCurve threshold_curve(std::span<const GrayImage> fg_preds, std::span<const BinaryMask> refs);
int calibrate_tc(std::span<const GrayImage> fg_preds, std::span<const BinaryMask> refs);

/// quantize(fg) >= t_c.
BinaryMask cell_region_mask(const GrayImage& fg_pred, int t_c);

struct WatershedResult {
  LabelMap labels;
  /// Markers with no pixel inside the region.
  std::size_t dropped_markers = 0;
};

/// Marker-controlled priority flood restricted to `region`. Lowest priority
/// first, FIFO among equal priorities; a pushed pixel gets priority
/// max(relief, priority of the pixel that pushed it) and that pixel's label.
/// Region pixels not reachable from a marker stay 0.
WatershedResult watershed(const MarkerFunction& markers, const SegmentationFunction& relief,
                          const BinaryMask& region, Connectivity connectivity);

/// Label of the Euclidean-nearest marker pixel for each region pixel (ties to
/// the smaller label).
LabelMap distance_baseline(const MarkerFunction& markers, const BinaryMask& region);

/// Deletes labels that touch the outermost rows/columns and renumbers.
LabelMap remove_border_cells(const LabelMap& labels);

/// Intermediate products of one segmentation run.
struct SegmentationStages {
  MarkerFunction markers;
  SegmentationFunction relief;
  BinaryMask region;
};

SegmentationStages prepare_stages(const GrayImage& marker_pred, const GrayImage& fg_pred,
                                  const PipelineParams& params);

struct SegmentationResult {
  LabelMap labels;
  std::size_t marker_count = 0;
  std::size_t dropped_markers = 0;
};

/// Watershed of prepared stages, optional border removal, canonical labels.
SegmentationResult finish_segmentation(const SegmentationStages& stages, const PipelineParams& params);

SegmentationResult segment_image_detailed(const GrayImage& marker_pred, const GrayImage& fg_pred,
                                          const PipelineParams& params);
LabelMap segment_image(const GrayImage& marker_pred, const GrayImage& fg_pred, const PipelineParams& params);

}  // namespace cellws

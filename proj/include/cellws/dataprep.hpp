#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cellws/random.hpp"
#include "cellws/raster.hpp"

namespace cellws {

// --- normalization ----------------------------------------------------------

enum class NormalizationMethod { HE, CLAHE, Median };

NormalizationMethod parse_normalization(std::string_view name);
std::string_view to_string(NormalizationMethod m) noexcept;

struct ClaheParams {
  int tiles_x = 8;
  int tiles_y = 8;
  double clip_limit = 2.0;
};

/// Maps an arbitrary raw image into [-0.5, 0.5]. Constant images map to 0.
///   HE:     256-bin cumulative histogram, cdf - 0.5
///   CLAHE:  tiled contrast-limited equalization, v/255 - 0.5
///   Median: 0.5 * (v - median) / (max - median), clamped
GrayImage normalize(const GrayImage& img, NormalizationMethod method, const ClaheParams& clahe = {});

// --- annotations and reference outputs --------------------------------------

/// Pixel-accurate label map; each positive label is one cell mask.
struct FullAnnotation {
  LabelMap labels;
};

/// Compact per-cell markers; each positive label is one marker.
struct WeakAnnotation {
  LabelMap markers;
};

/// Training targets: y_m (markers) and y_c (foreground).
struct ReferenceOutputs {
  BinaryMask markers;
  BinaryMask foreground;
};

struct CellMarkerInfo {
  std::int32_t label = 0;
  int d_max = 0;
  double d_se = 0.0;
  bool largest_component = false;  // erosion split the cell
  bool ultimate_point = false;     // marker is the single deepest pixel
  bool trimmed = false;            // pixels touching another marker removed
};

struct ReferenceDetail {
  ReferenceOutputs outputs;
  /// Marker pixels labelled with the owning cell's label.
  LabelMap marker_labels;
  std::vector<CellMarkerInfo> cells;
};

/// Erodes each cell by a disk of diameter (1 - k) * d_max(cell), keeping the
/// largest 8-connected piece. k = 0 yields the ultimate-erosion point. Marker
/// pixels 8-adjacent to another cell's marker are removed so markers never
/// touch.
ReferenceDetail make_reference_detailed(const FullAnnotation& full, double k);
ReferenceOutputs make_reference(const FullAnnotation& full, double k);

/// Weak markers, repeatedly eroded by a diameter-3 disk while they touch a
/// neighbour. Returned labelled with the original marker labels.
LabelMap separate_weak_markers(const WeakAnnotation& weak);
BinaryMask markers_from_weak(const WeakAnnotation& weak);

// --- pixel weights and loss -------------------------------------------------

enum class BalanceMode { None, ClassFrequency };

BalanceMode parse_balance_mode(std::string_view name);
std::string_view to_string(BalanceMode m) noexcept;

struct WeightParams {
  double a = 0.075;
  double d = 20.0;
  BalanceMode balance = BalanceMode::None;

  void validate() const;
};

/// w(q) = [1 + a * sum_cells max(d - dist(q, cell), 0)] * b(q), where b is 1
/// or |image| / (2 * |pixels of q's foreground class|).
GrayImage weight_map(const FullAnnotation& full, const WeightParams& params);

inline constexpr double kLossEpsilon = 1e-7;

/// Weighted binary cross-entropy normalised by the total weight. `p` is the
/// probability of class 1, clipped to [eps, 1 - eps].
double weighted_cross_entropy(const GrayImage& p, const BinaryMask& y, const GrayImage& w);

// --- augmentation -----------------------------------------------------------

struct ElasticParams {
  double alpha = 300.0;
  double sigma = 12.0;
};

struct AugmentationSpec {
  bool rigid = true;
  double scale_min = 0.6;
  double scale_max = 1.4;
  double angle_min = 0.0;
  double angle_max = 2.0 * std::numbers::pi;
  double flip_probability = 0.5;
  std::optional<ElasticParams> elastic;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One realised random transform.
struct AugmentationDraw {
  double scale = 1.0;
  double angle = 0.0;
  bool flip = false;
  /// Elastic displacement in pixels; empty when elastic is off.
  GrayImage dx;
  GrayImage dy;
};

struct Sample {
  GrayImage image;
  LabelMap labels;
};

AugmentationDraw draw_augmentation(const AugmentationSpec& spec, int width, int height, Rng& rng);

/// Scale, rotate and flip about the image centre, then displace elastically.
/// Image is sampled bilinearly and labels by nearest neighbour; samples
/// outside the domain are mirrored.
Sample apply_augmentation(const Sample& sample, const AugmentationDraw& draw);

Sample augment(const Sample& sample, const AugmentationSpec& spec, Rng& rng);

}  // namespace cellws

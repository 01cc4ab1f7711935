#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cellws/raster.hpp"

namespace cellws {

/// Flat disk: all integer offsets whose centre lies within diameter/2
/// (inclusive) of the origin. Any diameter below 2 is the origin alone.
class DiskSE {
 public:
  explicit DiskSE(double diameter);

  double diameter() const noexcept { return diameter_; }
  /// Largest |dy| (and |dx|) present.
  int radius() const noexcept { return radius_; }
  std::span<const Offset> offsets() const noexcept { return offsets_; }
  /// Half-width of the horizontal run at row dy, indexed by dy + radius().
  std::span<const int> row_half_widths() const noexcept { return half_widths_; }

 private:
  double diameter_;
  int radius_ = 0;
  std::vector<Offset> offsets_;
  std::vector<int> half_widths_;
};

// Binary morphology. Outside the domain counts as background, so erosion
// shrinks objects touching the border.
BinaryMask erode(const BinaryMask& mask, const DiskSE& se);
BinaryMask dilate(const BinaryMask& mask, const DiskSE& se);
BinaryMask open(const BinaryMask& mask, const DiskSE& se);

// Grayscale morphology. Outside is +inf for erosion and -inf for dilation.
GrayImage erode(const GrayImage& img, const DiskSE& se);
GrayImage dilate(const GrayImage& img, const DiskSE& se);
GrayImage open(const GrayImage& img, const DiskSE& se);

/// img - open(img, se).
GrayImage top_hat(const GrayImage& img, const DiskSE& se);

/// Reconstruction by dilation of `marker` under `ceiling`, iterated to
/// convergence (hybrid raster scan + FIFO propagation).
/// Throws std::invalid_argument if marker > ceiling anywhere.
GrayImage geodesic_reconstruct(const GrayImage& marker, const GrayImage& ceiling,
                               Connectivity connectivity);

/// img - reconstruct(max(img - h, min(img)), img), in [0, h]. At a regional
/// maximum this is min(h, dynamics); the global maximum's dynamics is
/// max(img) - min(img), so a constant image has an all-zero dome.
GrayImage hdome(const GrayImage& img, double h, Connectivity connectivity);

/// Pixels where the h-dome of the integer-rounded image equals h, i.e. the
/// tops of regional maxima with dynamics >= h.
BinaryMask dome_pixels(const GrayImage& img, int h, Connectivity connectivity);

struct DistanceTag {};
/// Exact squared Euclidean distances (integers).
using SquaredDistanceMap = Raster<std::int64_t, DistanceTag>;

/// Value used for every pixel when the mask has no set pixel; larger than
/// the image diagonal.
float distance_sentinel(int width, int height) noexcept;

SquaredDistanceMap squared_distance_transform(const BinaryMask& mask);
/// Euclidean distance of each pixel to the nearest set pixel of `mask`.
GrayImage distance_transform(const BinaryMask& mask);

/// Largest integer diameter D whose DiskSE(D) fits inside the cell, with
/// everything outside the raster counting as outside the cell. Equals
/// ceil(2 * max distance-to-complement) - 1.
int max_inscribed_diameter(const BinaryMask& cell);

/// Pixel index of the cell pixel farthest from the complement (first in
/// raster order on ties).
std::size_t ultimate_erosion_point(const BinaryMask& cell);

}  // namespace cellws

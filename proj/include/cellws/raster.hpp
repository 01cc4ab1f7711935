#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cellws {

/// Pixel adjacency used by labeling, reconstruction and flooding.
enum class Connectivity : int { Four = 4, Eight = 8 };

/// Accepts 4 or 8; anything else is a usage error.
Connectivity connectivity_from_int(int n);

struct Offset {
  int dx;
  int dy;
};

/// Neighbour offsets in a fixed order (W, E, N, S, then diagonals for 8).
std::span<const Offset> neighbor_offsets(Connectivity c);

/// Dense row-major 2D raster. `Tag` keeps semantically different rasters
/// with the same storage type (masks vs. 8-bit images) from mixing.
template <class T, class Tag>
class Raster {
 public:
  using value_type = T;

  Raster() = default;

  Raster(int width, int height, T fill = T{})
      : width_(checked_dim(width)), height_(checked_dim(height)),
        data_(static_cast<std::size_t>(width_) * height_, fill) {}

  Raster(int width, int height, std::vector<T> data)
      : width_(checked_dim(width)), height_(checked_dim(height)), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(width_) * height_)
      throw std::invalid_argument("raster data length does not match width*height");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool operator==(const Raster&) const = default;

 private:
  static int checked_dim(int d) {
    if (d < 0) throw std::invalid_argument("raster dimensions must be non-negative");
    return d;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct GrayTag {};
struct ByteTag {};
struct LabelTag {};
struct MaskTag {};

/// Real-valued image: raw input, normalized input, probability map, relief.
using GrayImage = Raster<float, GrayTag>;
/// 8-bit image on the 0-255 scale used for h and t_c.
using ByteImage = Raster<std::uint8_t, ByteTag>;
/// Instance labels, 0 = background.
using LabelMap = Raster<std::int32_t, LabelTag>;
/// One bit per pixel stored as 0/1 bytes.
using BinaryMask = Raster<std::uint8_t, MaskTag>;

template <class A, class B>
bool same_shape(const A& a, const B& b) noexcept {
  return a.width() == b.width() && a.height() == b.height();
}

template <class A, class B>
void require_same_shape(const A& a, const B& b, std::string_view what) {
  if (!same_shape(a, b))
    throw std::invalid_argument(std::string(what) + ": raster dimensions differ");
}

bool is_probability(const GrayImage& img) noexcept;
bool is_normalized(const GrayImage& img) noexcept;
void require_probability(const GrayImage& img, std::string_view what);

// --- labels -----------------------------------------------------------------

/// Inclusive pixel bounding box.
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = -1;
  int y1 = -1;

  bool valid() const noexcept { return x1 >= x0 && y1 >= y0; }
  int width() const noexcept { return x1 - x0 + 1; }
  int height() const noexcept { return y1 - y0 + 1; }
  void include(int x, int y) noexcept;
  BoundingBox grown(int margin, int width, int height) const noexcept;
};

/// Labels 1..N in raster order of each component's first pixel.
LabelMap connected_components(const BinaryMask& mask, Connectivity connectivity);

std::int32_t max_label(const LabelMap& labels) noexcept;
/// Number of distinct positive labels present.
std::size_t count_labels(const LabelMap& labels);
/// Renumbers positive labels to 1..N in raster order of first pixel.
LabelMap canonicalize(const LabelMap& labels);
BinaryMask binarize(const LabelMap& labels);
BinaryMask label_mask(const LabelMap& labels, std::int32_t label);
/// Pixel count per label, indexed by label (entry 0 is left at 0).
std::vector<std::size_t> label_areas(const LabelMap& labels);
/// Bounding box per label, indexed by label; absent labels are invalid boxes.
std::vector<BoundingBox> label_boxes(const LabelMap& labels);

BinaryMask complement(const BinaryMask& mask);
std::size_t count_set(const BinaryMask& mask) noexcept;

template <class R>
R crop(const R& src, const BoundingBox& box) {
  R out(box.width(), box.height());
  for (int y = 0; y < box.height(); ++y)
    for (int x = 0; x < box.width(); ++x) out(x, y) = src(box.x0 + x, box.y0 + y);
  return out;
}

// --- padding ----------------------------------------------------------------

enum class PadMode { Zero, Mirror };

/// Reflects an out-of-range index back into [0, n) without repeating the
/// edge sample (..., 2, 1, 0, 1, 2, ..., n-2, n-1, n-2, ...).
int mirror_index(int i, int n) noexcept;

struct PaddedImage {
  GrayImage image;
  int offset_x = 0;
  int offset_y = 0;
  int original_width = 0;
  int original_height = 0;
};

/// Pads to the smallest dimensions divisible by `multiple`; content is centred
/// (extra pixel goes right/bottom).
PaddedImage pad_to_multiple(const GrayImage& img, int multiple, PadMode mode);
/// Inverse of pad_to_multiple.
GrayImage unpad(const PaddedImage& padded);

// --- quantization -----------------------------------------------------------

inline constexpr double kQuantizeTolerance = 1e-6;

std::uint8_t quantize_value(double v);
ByteImage quantize(const GrayImage& probability);
GrayImage dequantize(const ByteImage& bytes);

// --- filtering --------------------------------------------------------------

/// Separable Gaussian with mirrored borders; sigma 0 returns the input.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

}  // namespace cellws

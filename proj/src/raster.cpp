#include "cellws/raster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

namespace cellws {

namespace {

constexpr std::array<Offset, 4> kFour{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
constexpr std::array<Offset, 8> kEight{
    {{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {-1, -1}, {1, -1}, {-1, 1}, {1, 1}}};

}  // namespace

Connectivity connectivity_from_int(int n) {
  if (n == 4) return Connectivity::Four;
  if (n == 8) return Connectivity::Eight;
  throw std::invalid_argument("connectivity must be 4 or 8, got " + std::to_string(n));
}

std::span<const Offset> neighbor_offsets(Connectivity c) {
  if (c == Connectivity::Four) return kFour;
  return kEight;
}

bool is_probability(const GrayImage& img) noexcept {
  return std::all_of(img.begin(), img.end(), [](float v) { return v >= 0.0f && v <= 1.0f; });
}

bool is_normalized(const GrayImage& img) noexcept {
  return std::all_of(img.begin(), img.end(), [](float v) { return v >= -0.5f && v <= 0.5f; });
}

void require_probability(const GrayImage& img, std::string_view what) {
  if (!is_probability(img))
    throw std::invalid_argument(std::string(what) + ": probability map has values outside [0, 1]");
}

void BoundingBox::include(int x, int y) noexcept {
  if (!valid()) {
    x0 = x1 = x;
    y0 = y1 = y;
    return;
  }
  x0 = std::min(x0, x);
  y0 = std::min(y0, y);
  x1 = std::max(x1, x);
  y1 = std::max(y1, y);
}

BoundingBox BoundingBox::grown(int margin, int width, int height) const noexcept {
  return {std::max(0, x0 - margin), std::max(0, y0 - margin), std::min(width - 1, x1 + margin),
          std::min(height - 1, y1 + margin)};
}

LabelMap connected_components(const BinaryMask& mask, Connectivity connectivity) {
  LabelMap out(mask.width(), mask.height(), 0);
  const auto offsets = neighbor_offsets(connectivity);
  std::int32_t next = 0;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y) || out(x, y) != 0) continue;
      const std::int32_t label = ++next;
      out(x, y) = label;
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (const auto& o : offsets) {
          const int nx = cx + o.dx, ny = cy + o.dy;
          if (!mask.contains(nx, ny) || !mask(nx, ny) || out(nx, ny) != 0) continue;
          out(nx, ny) = label;
          stack.emplace_back(nx, ny);
        }
      }
    }
  }
  return out;
}

std::int32_t max_label(const LabelMap& labels) noexcept {
  std::int32_t m = 0;
  for (auto v : labels) m = std::max(m, v);
  return m;
}

std::size_t count_labels(const LabelMap& labels) {
  const auto areas = label_areas(labels);
  return static_cast<std::size_t>(
      std::count_if(areas.begin() + (areas.empty() ? 0 : 1), areas.end(),
                    [](std::size_t a) { return a > 0; }));
}

LabelMap canonicalize(const LabelMap& labels) {
  LabelMap out(labels.width(), labels.height(), 0);
  std::unordered_map<std::int32_t, std::int32_t> remap;
  std::int32_t next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto v = labels[i];
    if (v <= 0) continue;
    auto [it, inserted] = remap.try_emplace(v, next + 1);
    if (inserted) ++next;
    out[i] = it->second;
  }
  return out;
}

BinaryMask binarize(const LabelMap& labels) {
  BinaryMask out(labels.width(), labels.height(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] > 0 ? 1 : 0;
  return out;
}

BinaryMask label_mask(const LabelMap& labels, std::int32_t label) {
  BinaryMask out(labels.width(), labels.height(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] == label ? 1 : 0;
  return out;
}

std::vector<std::size_t> label_areas(const LabelMap& labels) {
  std::vector<std::size_t> areas(static_cast<std::size_t>(max_label(labels)) + 1, 0);
  for (auto v : labels)
    if (v > 0) ++areas[static_cast<std::size_t>(v)];
  return areas;
}

std::vector<BoundingBox> label_boxes(const LabelMap& labels) {
  std::vector<BoundingBox> boxes(static_cast<std::size_t>(max_label(labels)) + 1);
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x)
      if (const auto v = labels(x, y); v > 0) boxes[static_cast<std::size_t>(v)].include(x, y);
  return boxes;
}

BinaryMask complement(const BinaryMask& mask) {
  BinaryMask out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 0 : 1;
  return out;
}

std::size_t count_set(const BinaryMask& mask) noexcept {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto v) { return v != 0; }));
}

int mirror_index(int i, int n) noexcept {
  if (n <= 1) return 0;
  const int period = 2 * n - 2;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

PaddedImage pad_to_multiple(const GrayImage& img, int multiple, PadMode mode) {
  if (multiple < 1) throw std::invalid_argument("pad_to_multiple: multiple must be >= 1");
  const auto round_up = [multiple](int v) { return (v + multiple - 1) / multiple * multiple; };
  PaddedImage out;
  out.original_width = img.width();
  out.original_height = img.height();
  const int w = round_up(img.width());
  const int h = round_up(img.height());
  out.offset_x = (w - img.width()) / 2;
  out.offset_y = (h - img.height()) / 2;
  out.image = GrayImage(w, h, 0.0f);
  if (img.empty()) return out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int sx = x - out.offset_x, sy = y - out.offset_y;
      if (img.contains(sx, sy)) {
        out.image(x, y) = img(sx, sy);
      } else if (mode == PadMode::Mirror) {
        out.image(x, y) = img(mirror_index(sx, img.width()), mirror_index(sy, img.height()));
      }
    }
  }
  return out;
}

GrayImage unpad(const PaddedImage& padded) {
  if (padded.original_width == 0 || padded.original_height == 0)
    return GrayImage(padded.original_width, padded.original_height);
  return crop(padded.image, BoundingBox{padded.offset_x, padded.offset_y,
                                        padded.offset_x + padded.original_width - 1,
                                        padded.offset_y + padded.original_height - 1});
}

std::uint8_t quantize_value(double v) {
  if (!(v >= -kQuantizeTolerance && v <= 1.0 + kQuantizeTolerance))
    throw std::invalid_argument("quantize: value " + std::to_string(v) + " outside [0, 1]");
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

ByteImage quantize(const GrayImage& probability) {
  ByteImage out(probability.width(), probability.height());
  for (std::size_t i = 0; i < probability.size(); ++i) out[i] = quantize_value(probability[i]);
  return out;
}

GrayImage dequantize(const ByteImage& bytes) {
  GrayImage out(bytes.width(), bytes.height());
  for (std::size_t i = 0; i < bytes.size(); ++i)
    out[i] = static_cast<float>(static_cast<double>(bytes[i]) / 255.0);
  return out;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
  if (sigma == 0.0 || img.empty()) return img;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (auto& k : kernel) k /= sum;

  const int w = img.width(), h = img.height();
  std::vector<double> tmp(img.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * img(mirror_index(x + i, w), y);
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * tmp[static_cast<std::size_t>(mirror_index(y + i, h)) * w + x];
      out(x, y) = static_cast<float>(acc);
    }
  return out;
}

}  // namespace cellws

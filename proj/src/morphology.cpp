#include "cellws/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

namespace cellws {

DiskSE::DiskSE(double diameter) : diameter_(diameter) {
  if (!(diameter > 0.0) || !std::isfinite(diameter))
    throw std::invalid_argument("DiskSE: diameter must be a positive finite number");
  const double r = diameter / 2.0;
  const double r2 = r * r;
  radius_ = static_cast<int>(std::floor(r));
  half_widths_.assign(2 * radius_ + 1, -1);
  for (int dy = -radius_; dy <= radius_; ++dy) {
    for (int dx = -radius_; dx <= radius_; ++dx) {
      if (static_cast<double>(dx * dx + dy * dy) <= r2) {
        offsets_.push_back({dx, dy});
        half_widths_[dy + radius_] = std::max(half_widths_[dy + radius_], dx);
      }
    }
  }
}

namespace {

constexpr float kInf = std::numeric_limits<float>::infinity();

// Sliding min/max over [x - hw, x + hw] along one row (van Herk / Gil-Werman),
// `outside` standing in for samples beyond the row ends.
template <class Op>
void sliding_row(std::span<const float> row, int hw, float outside, Op op, std::span<float> out,
                 std::vector<float>& pad, std::vector<float>& pre, std::vector<float>& suf) {
  const int n = static_cast<int>(row.size());
  if (hw == 0) {
    std::copy(row.begin(), row.end(), out.begin());
    return;
  }
  const int k = 2 * hw + 1;
  const int len = n + 2 * hw;
  pad.assign(len, outside);
  std::copy(row.begin(), row.end(), pad.begin() + hw);
  pre.resize(len);
  suf.resize(len);
  for (int i = 0; i < len; ++i) pre[i] = (i % k == 0) ? pad[i] : op(pre[i - 1], pad[i]);
  for (int i = len - 1; i >= 0; --i)
    suf[i] = (i == len - 1 || (i + 1) % k == 0) ? pad[i] : op(suf[i + 1], pad[i]);
  for (int x = 0; x < n; ++x) out[x] = op(suf[x], pre[x + k - 1]);
}

// Flat disk morphology decomposed into horizontal runs: a 1D sliding filter
// per distinct run width followed by a vertical combination over disk rows.
template <class Op>
GrayImage flat_filter(const GrayImage& img, const DiskSE& se, float outside, Op op) {
  const int w = img.width(), h = img.height();
  if (img.empty()) return img;
  const int r = se.radius();
  const auto widths = se.row_half_widths();

  std::map<int, std::vector<float>> rows_by_width;
  std::vector<float> pad, pre, suf;
  for (int hw : widths) {
    if (hw < 0 || rows_by_width.count(hw)) continue;
    auto& buf = rows_by_width[hw];
    buf.resize(img.size());
    for (int y = 0; y < h; ++y) {
      sliding_row<Op>(img.data().subspan(static_cast<std::size_t>(y) * w, w), hw, outside, op,
                      std::span<float>(buf).subspan(static_cast<std::size_t>(y) * w, w), pad, pre, suf);
    }
  }

  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    float* dst = &out(0, y);
    bool first = true;
    for (int dy = -r; dy <= r; ++dy) {
      const int hw = widths[dy + r];
      if (hw < 0) continue;
      const int sy = y + dy;
      if (sy < 0 || sy >= h) {
        if (first) std::fill(dst, dst + w, outside);
        else
          for (int x = 0; x < w; ++x) dst[x] = op(dst[x], outside);
        first = false;
        continue;
      }
      const float* src = rows_by_width[hw].data() + static_cast<std::size_t>(sy) * w;
      if (first) std::copy(src, src + w, dst);
      else
        for (int x = 0; x < w; ++x) dst[x] = op(dst[x], src[x]);
      first = false;
    }
  }
  return out;
}

const auto kMin = [](float a, float b) { return std::min(a, b); };
const auto kMax = [](float a, float b) { return std::max(a, b); };

GrayImage as_gray(const BinaryMask& m) {
  GrayImage g(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) g[i] = m[i] ? 1.0f : 0.0f;
  return g;
}

BinaryMask as_mask(const GrayImage& g) {
  BinaryMask m(g.width(), g.height());
  for (std::size_t i = 0; i < g.size(); ++i) m[i] = g[i] > 0.5f ? 1 : 0;
  return m;
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, const DiskSE& se) {
  return as_mask(flat_filter(as_gray(mask), se, 0.0f, kMin));
}

BinaryMask dilate(const BinaryMask& mask, const DiskSE& se) {
  return as_mask(flat_filter(as_gray(mask), se, 0.0f, kMax));
}

BinaryMask open(const BinaryMask& mask, const DiskSE& se) { return dilate(erode(mask, se), se); }

GrayImage erode(const GrayImage& img, const DiskSE& se) { return flat_filter(img, se, kInf, kMin); }

GrayImage dilate(const GrayImage& img, const DiskSE& se) { return flat_filter(img, se, -kInf, kMax); }

GrayImage open(const GrayImage& img, const DiskSE& se) { return dilate(erode(img, se), se); }

GrayImage top_hat(const GrayImage& img, const DiskSE& se) {
  GrayImage opened = open(img, se);
  for (std::size_t i = 0; i < img.size(); ++i) opened[i] = std::max(0.0f, img[i] - opened[i]);
  return opened;
}

GrayImage geodesic_reconstruct(const GrayImage& marker, const GrayImage& ceiling,
                               Connectivity connectivity) {
  require_same_shape(marker, ceiling, "geodesic_reconstruct");
  for (std::size_t i = 0; i < marker.size(); ++i)
    if (marker[i] > ceiling[i])
      throw std::invalid_argument("geodesic_reconstruct: marker exceeds ceiling");

  const int w = marker.width(), h = marker.height();
  GrayImage rec = marker;
  const auto all = neighbor_offsets(connectivity);
  // Neighbours already visited by a forward raster scan; the backward scan
  // uses their mirror images.
  std::vector<Offset> causal;
  for (const auto& o : all)
    if (o.dy < 0 || (o.dy == 0 && o.dx < 0)) causal.push_back(o);

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      float m = rec(x, y);
      for (const auto& o : causal)
        if (rec.contains(x + o.dx, y + o.dy)) m = std::max(m, rec(x + o.dx, y + o.dy));
      rec(x, y) = std::min(m, ceiling(x, y));
    }

  std::deque<std::size_t> fifo;
  for (int y = h - 1; y >= 0; --y)
    for (int x = w - 1; x >= 0; --x) {
      float m = rec(x, y);
      for (const auto& o : causal)
        if (rec.contains(x - o.dx, y - o.dy)) m = std::max(m, rec(x - o.dx, y - o.dy));
      const float v = std::min(m, ceiling(x, y));
      rec(x, y) = v;
      for (const auto& o : causal) {
        const int qx = x - o.dx, qy = y - o.dy;
        if (rec.contains(qx, qy) && rec(qx, qy) < v && rec(qx, qy) < ceiling(qx, qy)) {
          fifo.push_back(rec.index(x, y));
          break;
        }
      }
    }

  while (!fifo.empty()) {
    const std::size_t p = fifo.front();
    fifo.pop_front();
    const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
    const float v = rec[p];
    for (const auto& o : all) {
      const int qx = px + o.dx, qy = py + o.dy;
      if (!rec.contains(qx, qy)) continue;
      const std::size_t q = rec.index(qx, qy);
      if (rec[q] < v && rec[q] != ceiling[q]) {
        rec[q] = std::min(v, ceiling[q]);
        fifo.push_back(q);
      }
    }
  }
  return rec;
}

GrayImage hdome(const GrayImage& img, double h, Connectivity connectivity) {
  if (!(h > 0.0)) throw std::invalid_argument("hdome: h must be positive");
  const float hf = static_cast<float>(h);
  GrayImage lowered(img.width(), img.height());
  if (img.empty()) return lowered;
  // Marker floored at the image minimum: a global maximum's dynamics is its
  // height above the lowest pixel.
  const float floor_value = *std::min_element(img.begin(), img.end());
  for (std::size_t i = 0; i < img.size(); ++i) lowered[i] = std::min(img[i], std::max(img[i] - hf, floor_value));
  GrayImage dome = geodesic_reconstruct(lowered, img, connectivity);
  for (std::size_t i = 0; i < img.size(); ++i) dome[i] = std::clamp(img[i] - dome[i], 0.0f, hf);
  return dome;
}

BinaryMask dome_pixels(const GrayImage& img, int h, Connectivity connectivity) {
  if (h <= 0) throw std::invalid_argument("dome_pixels: h must be positive");
  GrayImage rounded(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) rounded[i] = std::nearbyint(img[i]);
  const GrayImage dome = hdome(rounded, h, connectivity);
  BinaryMask out(img.width(), img.height(), 0);
  const float hf = static_cast<float>(h);
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = dome[i] == hf ? 1 : 0;
  return out;
}

float distance_sentinel(int width, int height) noexcept {
  return static_cast<float>(width + height + 1);
}

namespace {

constexpr std::int64_t kUnreached = std::numeric_limits<std::int64_t>::max();

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher); sites are the
// entries with finite f.
void envelope_1d(std::span<const std::int64_t> f, std::span<std::int64_t> d, std::vector<int>& v,
                 std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  v.resize(n);
  z.resize(n + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kUnreached) continue;
    const double fq = static_cast<double>(f[q]) + static_cast<double>(q) * q;
    while (k >= 0) {
      const int p = v[k];
      const double fp = static_cast<double>(f[p]) + static_cast<double>(p) * p;
      const double s = (fq - fp) / (2.0 * (q - p));
      if (s <= z[k]) {
        --k;
      } else {
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
        break;
      }
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -std::numeric_limits<double>::infinity();
      z[1] = std::numeric_limits<double>::infinity();
    }
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kUnreached);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const std::int64_t dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace

SquaredDistanceMap squared_distance_transform(const BinaryMask& mask) {
  const int w = mask.width(), h = mask.height();
  SquaredDistanceMap out(w, h, kUnreached);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out[i] = 0;

  std::vector<int> v;
  std::vector<double> z;
  std::vector<std::int64_t> col_in(h), col_out(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) col_in[y] = out(x, y);
    envelope_1d(col_in, col_out, v, z);
    for (int y = 0; y < h; ++y) out(x, y) = col_out[y];
  }
  std::vector<std::int64_t> row_in(w), row_out(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) row_in[x] = out(x, y);
    envelope_1d(row_in, row_out, v, z);
    for (int x = 0; x < w; ++x) out(x, y) = row_out[x];
  }
  return out;
}

GrayImage distance_transform(const BinaryMask& mask) {
  const auto sq = squared_distance_transform(mask);
  const float sentinel = distance_sentinel(mask.width(), mask.height());
  GrayImage out(mask.width(), mask.height());
  for (std::size_t i = 0; i < sq.size(); ++i)
    out[i] = sq[i] == kUnreached ? sentinel : static_cast<float>(std::sqrt(static_cast<double>(sq[i])));
  return out;
}

namespace {

// Squared distance to the complement with the raster surrounded by one ring
// of background, cropped back to the original frame.
SquaredDistanceMap inner_distance(const BinaryMask& cell) {
  BinaryMask background(cell.width() + 2, cell.height() + 2, 1);
  for (int y = 0; y < cell.height(); ++y)
    for (int x = 0; x < cell.width(); ++x) background(x + 1, y + 1) = cell(x, y) ? 0 : 1;
  const auto padded = squared_distance_transform(background);
  return crop(padded, BoundingBox{1, 1, cell.width(), cell.height()});
}

}  // namespace

int max_inscribed_diameter(const BinaryMask& cell) {
  if (count_set(cell) == 0) throw std::invalid_argument("max_inscribed_diameter: empty mask");
  const auto d2 = inner_distance(cell);
  std::int64_t best = 0;
  for (std::size_t i = 0; i < cell.size(); ++i)
    if (cell[i]) best = std::max(best, d2[i]);
  // Largest D with D^2 < 4 * best.
  const std::int64_t target = 4 * best - 1;
  auto d = static_cast<std::int64_t>(std::sqrt(static_cast<double>(target)));
  while (d * d > target) --d;
  while ((d + 1) * (d + 1) <= target) ++d;
  return static_cast<int>(d);
}

std::size_t ultimate_erosion_point(const BinaryMask& cell) {
  if (count_set(cell) == 0) throw std::invalid_argument("ultimate_erosion_point: empty mask");
  const auto d2 = inner_distance(cell);
  std::size_t best = cell.size();
  for (std::size_t i = 0; i < cell.size(); ++i)
    if (cell[i] && (best == cell.size() || d2[i] > d2[best])) best = i;
  return best;
}

}  // namespace cellws

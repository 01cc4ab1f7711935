#pragma once

// Brute-force reference implementations used only by tests. Each one takes
// the most direct route to the definition and shares no code with the
// library paths it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "cellws/dataprep.hpp"
#include "cellws/random.hpp"
#include "cellws/raster.hpp"

namespace cellws::oracle {

inline std::vector<Offset> offsets(int connectivity) {
  std::vector<Offset> out;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      if (connectivity == 4 && dx != 0 && dy != 0) continue;
      out.push_back({dx, dy});
    }
  return out;
}

/// Union-find labeling, relabelled by first raster pixel.
inline LabelMap components(const BinaryMask& m, int connectivity) {
  const int w = m.width(), h = m.height();
  std::vector<int> parent(m.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!m(x, y)) continue;
      for (const auto& o : offsets(connectivity)) {
        const int nx = x + o.dx, ny = y + o.dy;
        if (m.contains(nx, ny) && m(nx, ny)) {
          const int a = find(static_cast<int>(m.index(x, y))), b = find(static_cast<int>(m.index(nx, ny)));
          parent[std::max(a, b)] = std::min(a, b);
        }
      }
    }
  LabelMap out(w, h, 0);
  std::map<int, int> ids;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i]) continue;
    const int root = find(static_cast<int>(i));
    auto [it, ins] = ids.try_emplace(root, static_cast<int>(ids.size()) + 1);
    out[i] = it->second;
  }
  return out;
}

/// Disk offsets by direct enumeration.
inline std::vector<Offset> disk(double diameter) {
  std::vector<Offset> out;
  const double r = diameter / 2.0;
  const int ri = static_cast<int>(std::ceil(r)) + 1;
  for (int dy = -ri; dy <= ri; ++dy)
    for (int dx = -ri; dx <= ri; ++dx)
      if (std::sqrt(double(dx * dx + dy * dy)) <= r + 1e-12) out.push_back({dx, dy});
  return out;
}

/// Grayscale erosion/dilation by scanning every offset; `outside` is the
/// value assumed beyond the domain (nullopt to ignore those samples).
inline GrayImage slide(const GrayImage& img, double diameter, bool take_min, double outside, bool use_outside) {
  GrayImage out(img.width(), img.height());
  const auto se = disk(diameter);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      double acc = take_min ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      for (const auto& o : se) {
        double v;
        if (img.contains(x + o.dx, y + o.dy)) v = img(x + o.dx, y + o.dy);
        else if (use_outside) v = outside;
        else continue;
        acc = take_min ? std::min(acc, v) : std::max(acc, v);
      }
      out(x, y) = static_cast<float>(acc);
    }
  return out;
}

inline GrayImage gray_open(const GrayImage& img, double d) {
  return slide(slide(img, d, true, 0, false), d, false, 0, false);
}

inline BinaryMask mask_erode(const BinaryMask& m, double d) {
  BinaryMask out(m.width(), m.height(), 0);
  const auto se = disk(d);
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      bool all = true;
      for (const auto& o : se)
        if (!m.contains(x + o.dx, y + o.dy) || !m(x + o.dx, y + o.dy)) {
          all = false;
          break;
        }
      out(x, y) = all ? 1 : 0;
    }
  return out;
}

/// Reconstruction by iterating r <- min(dilate_1(r), ceiling) to a fixed point.
inline GrayImage reconstruct(const GrayImage& marker, const GrayImage& ceiling, int connectivity) {
  GrayImage r = marker;
  const auto offs = offsets(connectivity);
  bool changed = true;
  while (changed) {
    changed = false;
    GrayImage next = r;
    for (int y = 0; y < r.height(); ++y)
      for (int x = 0; x < r.width(); ++x) {
        float m = r(x, y);
        for (const auto& o : offs)
          if (r.contains(x + o.dx, y + o.dy)) m = std::max(m, r(x + o.dx, y + o.dy));
        m = std::min(m, ceiling(x, y));
        if (m != next(x, y)) {
          next(x, y) = m;
          changed = true;
        }
      }
    r = next;
  }
  return r;
}

inline GrayImage hdome(const GrayImage& img, float h, int connectivity) {
  GrayImage lowered = img;
  const float lo = *std::min_element(img.begin(), img.end());
  for (auto& v : lowered) v = std::max(v - h, lo);
  const GrayImage rec = reconstruct(lowered, img, connectivity);
  GrayImage out = img;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = img[i] - rec[i];
  return out;
}

/// Dynamics of the regional maximum containing pixel p: the smallest drop
/// needed on any path from p to a strictly higher pixel (image range for the
/// global maximum). Integer-valued images only.
inline int dynamics(const GrayImage& img, std::size_t p, int connectivity) {
  const int top = static_cast<int>(img[p]);
  const int lo = static_cast<int>(*std::min_element(img.begin(), img.end()));
  for (int level = top; level >= lo; --level) {
    // Component of {img >= level} containing p.
    std::vector<std::uint8_t> seen(img.size(), 0);
    std::vector<std::size_t> stack{p};
    seen[p] = 1;
    while (!stack.empty()) {
      const std::size_t q = stack.back();
      stack.pop_back();
      if (img[q] > top) return top - level;
      const int qx = static_cast<int>(q % img.width()), qy = static_cast<int>(q / img.width());
      for (const auto& o : offsets(connectivity)) {
        const int nx = qx + o.dx, ny = qy + o.dy;
        if (!img.contains(nx, ny)) continue;
        const std::size_t n = img.index(nx, ny);
        if (!seen[n] && img[n] >= level) {
          seen[n] = 1;
          stack.push_back(n);
        }
      }
    }
  }
  return top - lo;
}

/// Nearest set pixel by exhaustive scan; squared distance.
inline std::vector<std::int64_t> squared_distance(const BinaryMask& m) {
  std::vector<std::int64_t> out(m.size(), -1);
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      std::int64_t best = -1;
      for (int v = 0; v < m.height(); ++v)
        for (int u = 0; u < m.width(); ++u)
          if (m(u, v)) {
            const std::int64_t d = std::int64_t(u - x) * (u - x) + std::int64_t(v - y) * (v - y);
            if (best < 0 || d < best) best = d;
          }
      out[m.index(x, y)] = best;
    }
  return out;
}

/// Largest integer D such that disk(D) centred on some pixel lies inside the
/// cell (outside the raster is outside the cell).
inline int inscribed_diameter(const BinaryMask& cell) {
  int best = 0;
  const int limit = std::max(cell.width(), cell.height()) + 2;
  for (int d = 1; d <= limit; ++d) {
    const auto se = disk(d);
    bool fits_somewhere = false;
    for (int y = 0; y < cell.height() && !fits_somewhere; ++y)
      for (int x = 0; x < cell.width() && !fits_somewhere; ++x) {
        bool ok = true;
        for (const auto& o : se)
          if (!cell.contains(x + o.dx, y + o.dy) || !cell(x + o.dx, y + o.dy)) {
            ok = false;
            break;
          }
        fits_somewhere = ok;
      }
    if (!fits_somewhere) break;
    best = d;
  }
  return best;
}

/// Ordered flood with a flat list scanned for the minimum (priority,
/// insertion index) at every step.
inline LabelMap flood(const LabelMap& markers, const GrayImage& relief, const BinaryMask& region,
                      int connectivity) {
  struct Item {
    float pri;
    long order;
    std::size_t pixel;
    std::int32_t label;
  };
  LabelMap out(markers.width(), markers.height(), 0);
  std::vector<Item> pending;
  std::vector<bool> queued(markers.size(), false);
  long order = 0;
  for (std::size_t i = 0; i < markers.size(); ++i)
    if (markers[i] > 0 && region[i]) {
      pending.push_back({relief[i], order++, i, markers[i]});
      queued[i] = true;
    }
  while (!pending.empty()) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < pending.size(); ++j) {
      const auto& a = pending[j];
      const auto& b = pending[best];
      if (a.pri < b.pri || (a.pri == b.pri && a.order < b.order)) best = j;
    }
    const Item it = pending[best];
    pending.erase(pending.begin() + static_cast<long>(best));
    out[it.pixel] = it.label;
    const int x = static_cast<int>(it.pixel % markers.width()), y = static_cast<int>(it.pixel / markers.width());
    for (const auto& o : offsets(connectivity)) {
      const int nx = x + o.dx, ny = y + o.dy;
      if (!markers.contains(nx, ny)) continue;
      const std::size_t n = markers.index(nx, ny);
      if (!region[n] || queued[n]) continue;
      queued[n] = true;
      pending.push_back({std::max(relief[n], it.pri), order++, n, it.label});
    }
  }
  return out;
}

/// Label of the nearest marker pixel (region-clipped markers), ties to the
/// smaller label.
inline LabelMap nearest_marker(const LabelMap& markers, const BinaryMask& region) {
  LabelMap out(markers.width(), markers.height(), 0);
  for (int y = 0; y < markers.height(); ++y)
    for (int x = 0; x < markers.width(); ++x) {
      if (!region(x, y)) continue;
      std::int64_t best = -1;
      std::int32_t label = 0;
      for (int v = 0; v < markers.height(); ++v)
        for (int u = 0; u < markers.width(); ++u) {
          const auto l = markers(u, v);
          if (l <= 0 || !region(u, v)) continue;
          const std::int64_t d = std::int64_t(u - x) * (u - x) + std::int64_t(v - y) * (v - y);
          if (best < 0 || d < best || (d == best && l < label)) {
            best = d;
            label = l;
          }
        }
      out(x, y) = label;
    }
  return out;
}

/// AOGM-D events by enumerating every (reference, segment) pair.
struct DetOracle {
  long refs = 0;
  long fn = 0;
  long fp = 0;
  long ns = 0;
  double det() const {
    const double cost = 10.0 * fn + 1.0 * fp + 5.0 * ns;
    return std::max(0.0, 1.0 - cost / (10.0 * refs));
  }
};

inline DetOracle det_events(const LabelMap& refs, const LabelMap& segs) {
  std::set<int> rl, sl;
  for (auto v : refs)
    if (v > 0) rl.insert(v);
  for (auto v : segs)
    if (v > 0) sl.insert(v);
  DetOracle out;
  out.refs = static_cast<long>(rl.size());
  std::map<int, int> matches_per_seg;
  for (int r : rl) {
    long area = 0;
    for (auto v : refs) area += v == r;
    bool matched = false;
    for (int s : sl) {
      long inter = 0;
      for (std::size_t i = 0; i < refs.size(); ++i) inter += (refs[i] == r && segs[i] == s);
      if (2 * inter > area) {
        matched = true;
        ++matches_per_seg[s];
      }
    }
    if (!matched) ++out.fn;
  }
  for (int s : sl) {
    const int m = matches_per_seg.count(s) ? matches_per_seg[s] : 0;
    if (m == 0) ++out.fp;
    else out.ns += m - 1;
  }
  return out;
}

/// Sum of per-reference Jaccard scores and the reference count, by pair
/// enumeration. A reference scores 0 without a > 50% covering segment.
inline std::pair<double, long> seg_sum(const LabelMap& refs, const LabelMap& segs) {
  std::set<int> rl, sl;
  for (auto v : refs)
    if (v > 0) rl.insert(v);
  for (auto v : segs)
    if (v > 0) sl.insert(v);
  double sum = 0;
  for (int r : rl) {
    long area = 0;
    for (auto v : refs) area += v == r;
    for (int s : sl) {
      long inter = 0, sarea = 0;
      for (std::size_t i = 0; i < refs.size(); ++i) {
        inter += (refs[i] == r && segs[i] == s);
        sarea += segs[i] == s;
      }
      if (2 * inter > area) sum += static_cast<double>(inter) / static_cast<double>(area + sarea - inter);
    }
  }
  return {sum, static_cast<long>(rl.size())};
}

/// Threshold in 0..255 maximizing pooled |{q(fg) >= t} n ref| / |union|,
/// computed by thresholding every candidate directly; first maximum wins.
inline int best_threshold(const std::vector<GrayImage>& fgs, const std::vector<BinaryMask>& refs) {
  int best = 0;
  double best_j = -1;
  for (int t = 0; t < 256; ++t) {
    long inter = 0, uni = 0;
    for (std::size_t f = 0; f < fgs.size(); ++f)
      for (std::size_t i = 0; i < fgs[f].size(); ++i) {
        const bool s = std::lround(static_cast<double>(fgs[f][i]) * 255.0) >= t;
        const bool r = refs[f][i] != 0;
        inter += s && r;
        uni += s || r;
      }
    const double j = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    if (j > best_j) {
      best_j = j;
      best = t;
    }
  }
  return best;
}

// Direct per-pixel evaluation of the weight formula, cells in label order.
inline GrayImage weights(const LabelMap& labels, const WeightParams& p) {
  std::set<int> cells;
  for (auto v : labels)
    if (v > 0) cells.insert(v);
  std::size_t fg = 0;
  for (auto v : labels) fg += v > 0;
  GrayImage out(labels.width(), labels.height());
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x) {
      double sum = 0.0;
      for (int c : cells) {
        std::int64_t best = -1;
        for (int v = 0; v < labels.height(); ++v)
          for (int u = 0; u < labels.width(); ++u)
            if (labels(u, v) == c) {
              const std::int64_t d = std::int64_t(u - x) * (u - x) + std::int64_t(v - y) * (v - y);
              if (best < 0 || d < best) best = d;
            }
        sum += std::max(p.d - std::sqrt(static_cast<double>(best)), 0.0);
      }
      double b = 1.0;
      if (p.balance == BalanceMode::ClassFrequency) {
        const double n = static_cast<double>(labels.size());
        b = n / (2.0 * static_cast<double>(labels(x, y) > 0 ? fg : labels.size() - fg));
      }
      out(x, y) = static_cast<float>((1.0 + p.a * sum) * b);
    }
  return out;
}

// --- random fixtures ----------------------------------------------------------

inline BinaryMask random_mask(Rng& rng, int w, int h, double density) {
  BinaryMask m(w, h);
  for (auto& v : m) v = rng.bernoulli(density) ? 1 : 0;
  return m;
}

/// Blobby mask: random disks.
inline BinaryMask random_blobs(Rng& rng, int w, int h, int count, int rmin, int rmax) {
  BinaryMask m(w, h, 0);
  for (int i = 0; i < count; ++i) {
    const int cx = rng.uniform_int(0, w - 1), cy = rng.uniform_int(0, h - 1);
    const int r = rng.uniform_int(rmin, rmax);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m(x, y) = 1;
  }
  return m;
}

inline GrayImage random_levels(Rng& rng, int w, int h, int max_level) {
  GrayImage img(w, h);
  for (auto& v : img) v = static_cast<float>(rng.uniform_int(0, max_level));
  return img;
}

/// Smooth-ish random relief with integer levels.
inline GrayImage random_terrain(Rng& rng, int w, int h, int bumps, int max_level) {
  std::vector<double> acc(static_cast<std::size_t>(w) * h, 0.0);
  for (int b = 0; b < bumps; ++b) {
    const double cx = rng.uniform(0, w), cy = rng.uniform(0, h);
    const double s = rng.uniform(1.5, 5.0), a = rng.uniform(0.3, 1.0);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        acc[static_cast<std::size_t>(y) * w + x] += a * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * s * s));
  }
  const double top = *std::max_element(acc.begin(), acc.end());
  GrayImage img(w, h);
  for (std::size_t i = 0; i < img.size(); ++i)
    img[i] = static_cast<float>(std::round(acc[i] / (top > 0 ? top : 1.0) * max_level));
  return img;
}

/// Label map of up to `count` ellipses painted onto free pixels only, so
/// later cells may touch earlier ones. Labels are 1..count in paint order.
inline LabelMap random_cells(Rng& rng, int w, int h, int count, double rmin, double rmax) {
  LabelMap l(w, h, 0);
  for (int c = 1; c <= count; ++c) {
    const double cx = rng.uniform(0, w), cy = rng.uniform(0, h);
    const double a = rng.uniform(rmin, rmax), b = rng.uniform(rmin, rmax), t = rng.uniform(0, 3.14159);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double u = (x - cx) * std::cos(t) + (y - cy) * std::sin(t);
        const double v = -(x - cx) * std::sin(t) + (y - cy) * std::cos(t);
        if (l(x, y) == 0 && u * u / (a * a) + v * v / (b * b) <= 1.0) l(x, y) = c;
      }
  }
  return l;
}

/// True when two different positive labels are 8-adjacent.
inline bool labels_touch(const LabelMap& l) {
  for (int y = 0; y < l.height(); ++y)
    for (int x = 0; x < l.width(); ++x) {
      if (l(x, y) <= 0) continue;
      for (const auto& o : offsets(8))
        if (l.contains(x + o.dx, y + o.dy)) {
          const auto n = l(x + o.dx, y + o.dy);
          if (n > 0 && n != l(x, y)) return true;
        }
    }
  return false;
}

}  // namespace cellws::oracle

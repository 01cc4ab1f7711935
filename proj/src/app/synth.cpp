#include "cellws/app/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <vector>

#include "cellws/app/config.hpp"
#include "cellws/morphology.hpp"
#include "cellws/random.hpp"
#include "cellws/raster_io.hpp"

namespace cellws::app {
namespace {

struct Ellipse {
  double cx = 0, cy = 0, a = 1, b = 1, theta = 0;

  // Normalized radius; < 1 inside. `grow` widens both semi-axes.
  double rho(double x, double y, double grow = 0) const {
    const double dx = x - cx, dy = y - cy;
    const double c = std::cos(theta), s = std::sin(theta);
    const double u = (c * dx + s * dy) / (a + grow), v = (-s * dx + c * dy) / (b + grow);
    return u * u + v * v;
  }
  // Centre-to-boundary distance along the unit direction (ux, uy).
  double extent(double ux, double uy) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double u = (c * ux + s * uy) / a, v = (-s * ux + c * uy) / b;
    return 1.0 / std::sqrt(u * u + v * v);
  }
};

std::vector<std::size_t> ellipse_pixels(const Ellipse& e, int w, int h, double grow = 0) {
  std::vector<std::size_t> out;
  const int r = static_cast<int>(std::ceil(std::max(e.a, e.b) + grow)) + 1;
  for (int y = std::max(0, static_cast<int>(e.cy) - r); y <= std::min(h - 1, static_cast<int>(e.cy) + r); ++y)
    for (int x = std::max(0, static_cast<int>(e.cx) - r); x <= std::min(w - 1, static_cast<int>(e.cx) + r); ++x)
      if (e.rho(x, y, grow) < 1.0) out.push_back(static_cast<std::size_t>(y) * w + x);
  return out;
}

bool fits(const Ellipse& e, int w, int h) {
  const double r = std::max(e.a, e.b) + 2;
  return e.cx - r >= 0 && e.cy - r >= 0 && e.cx + r < w && e.cy + r < h;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void SynthSpec::validate() const {
  if (frames < 1 || width < 16 || height < 16) throw UsageError("synth: need >= 1 frame of at least 16x16");
  if (min_cells < 1 || max_cells < min_cells) throw UsageError("synth: bad cell count range");
  if (!(min_radius >= 3 && max_radius >= min_radius)) throw UsageError("synth: bad radius range");
  if (2 * (max_radius + 3) >= std::min(width, height)) throw UsageError("synth: cells do not fit the frame");
  if (!(touching_probability >= 0 && touching_probability <= 1)) throw UsageError("synth: bad touching probability");
  if (weak_radius < 0 || !(weak_offset >= 0 && weak_offset < 1)) throw UsageError("synth: bad weak marker shape");
}

SynthFrame synth_frame(const SynthSpec& spec, int index) {
  spec.validate();
  Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(index)));
  const int w = spec.width, h = spec.height;
  const int target = rng.uniform_int(spec.min_cells, spec.max_cells);
  const int min_diameter = static_cast<int>(std::floor(1.5 * spec.min_radius));

  SynthFrame f;
  f.labels = LabelMap(w, h, 0);
  std::vector<Ellipse> cells;
  for (int attempt = 0; attempt < 400 * target && static_cast<int>(cells.size()) < target; ++attempt) {
    Ellipse e;
    e.a = rng.uniform(spec.min_radius, spec.max_radius);
    e.b = std::max(spec.min_radius, e.a * rng.uniform(0.65, 1.0));
    e.theta = rng.uniform(0, std::numbers::pi);
    int partner = 0;
    if (!cells.empty() && rng.bernoulli(spec.touching_probability)) {
      partner = rng.uniform_int(1, static_cast<int>(cells.size()));
      const Ellipse& p = cells[static_cast<std::size_t>(partner - 1)];
      const double phi = rng.uniform(0, 2 * std::numbers::pi);
      const double ux = std::cos(phi), uy = std::sin(phi);
      const double dist = 0.92 * (p.extent(ux, uy) + e.extent(-ux, -uy));
      e.cx = p.cx + ux * dist;
      e.cy = p.cy + uy * dist;
    } else {
      e.cx = rng.uniform(0, w);
      e.cy = rng.uniform(0, h);
    }
    if (!fits(e, w, h)) continue;

    // Keep a 3 px gap to every cell except the partner.
    bool clear = true;
    for (std::size_t i : ellipse_pixels(e, w, h, 3.0)) {
      const std::int32_t l = f.labels[i];
      if (l != 0 && l != partner) {
        clear = false;
        break;
      }
    }
    if (!clear) continue;

    const auto body = ellipse_pixels(e, w, h);
    BinaryMask mask(w, h, 0);
    for (std::size_t i : body)
      if (f.labels[i] == 0) mask[i] = 1;
    if (count_set(mask) * 5 < body.size() * 4) continue;
    const LabelMap parts = connected_components(mask, Connectivity::Four);
    const auto areas = label_areas(parts);
    const auto largest = static_cast<std::int32_t>(std::max_element(areas.begin() + 1, areas.end()) - areas.begin());
    BinaryMask cell(w, h, 0);
    for (std::size_t i = 0; i < parts.size(); ++i) cell[i] = parts[i] == largest;
    if (max_inscribed_diameter(cell) < min_diameter) continue;

    cells.push_back(e);
    const auto label = static_cast<std::int32_t>(cells.size());
    for (std::size_t i = 0; i < cell.size(); ++i)
      if (cell[i]) f.labels[i] = label;
  }

  // Raw intensities: darker rims, per-cell brightness, blur and noise.
  GrayImage raw(w, h, 0.15f);
  std::vector<float> level(cells.size() + 1, 0.15f);
  for (std::size_t c = 1; c < level.size(); ++c) level[c] = static_cast<float>(rng.uniform(0.5, 0.8));
  std::vector<bool> touching(cells.size() + 1, false);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::int32_t l = f.labels(x, y);
      if (l == 0) continue;
      bool rim = false;
      for (const Offset& o : neighbor_offsets(Connectivity::Four)) {
        const int nx = x + o.dx, ny = y + o.dy;
        const std::int32_t n = f.labels.contains(nx, ny) ? f.labels(nx, ny) : 0;
        if (n != l) rim = true;
        if (n != 0 && n != l) touching[static_cast<std::size_t>(l)] = true;
      }
      raw(x, y) = rim ? 0.7f * level[static_cast<std::size_t>(l)] : level[static_cast<std::size_t>(l)];
    }
  f.touching_cells = static_cast<int>(std::count(touching.begin(), touching.end(), true));
  raw = gaussian_blur(raw, 1.0);
  for (auto& v : raw) v = std::clamp(static_cast<float>(v + 0.02 * rng.normal()), 0.0f, 1.0f);
  f.raw = std::move(raw);

  // Weak markers: small discs displaced from the ellipse centre.
  f.weak = LabelMap(w, h, 0);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto label = static_cast<std::int32_t>(c + 1);
    const Ellipse& e = cells[c];
    const double phi = rng.uniform(0, 2 * std::numbers::pi);
    const double ux = std::cos(phi), uy = std::sin(phi);
    const double off = rng.uniform(0, spec.weak_offset) * e.extent(ux, uy);
    int px = static_cast<int>(std::lround(e.cx + ux * off)), py = static_cast<int>(std::lround(e.cy + uy * off));
    if (!f.labels.contains(px, py) || f.labels(px, py) != label) {
      const std::size_t i = ultimate_erosion_point(label_mask(f.labels, label));
      px = static_cast<int>(i % static_cast<std::size_t>(w));
      py = static_cast<int>(i / static_cast<std::size_t>(w));
    }
    const int r = spec.weak_radius;
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx)
        if (dx * dx + dy * dy <= r * r && f.labels.contains(px + dx, py + dy) && f.labels(px + dx, py + dy) == label)
          f.weak(px + dx, py + dy) = label;
  }
  return f;
}

void write_synthetic_dataset(const std::filesystem::path& out, const SynthSpec& spec) {
  spec.validate();
  namespace fs = std::filesystem;
  const fs::path raw_dir = out / spec.sequence;
  const fs::path seg_dir = out / (spec.sequence + "_GT") / "SEG";
  const fs::path tra_dir = out / (spec.sequence + "_GT") / "TRA";
  for (const auto& d : {raw_dir, seg_dir, tra_dir}) fs::create_directories(d);
  for (int t = 0; t < spec.frames; ++t) {
    const SynthFrame f = synth_frame(spec, t);
    char digits[16];
    std::snprintf(digits, sizeof digits, "%03d", t);
    write_probability16(raw_dir / ("t" + std::string(digits) + ".tif"), f.raw);
    write_labels16(seg_dir / ("man_seg" + std::string(digits) + ".tif"), f.labels);
    write_labels16(tra_dir / ("man_track" + std::string(digits) + ".tif"), f.weak);
  }
  const std::string cfg = update_config_text(
      preset_text("synthetic"), {{"sequences", spec.sequence}, {"seed", std::to_string(spec.seed)}});
  std::ofstream(out / "synthetic.cfg", std::ios::binary) << cfg;
}

}  // namespace cellws::app

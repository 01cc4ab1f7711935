#include "cellws/app/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "cellws/dataprep.hpp"
#include "cellws/morphology.hpp"
#include "cellws/random.hpp"

namespace cellws::app {
namespace {

GrayImage to_gray(const BinaryMask& m) {
  GrayImage g(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) g[i] = m[i] ? 1.0f : 0.0f;
  return g;
}

void finish(GrayImage& img, double sigma, double noise, Rng& rng) {
  img = gaussian_blur(img, sigma);
  for (auto& v : img) {
    double x = v;
    if (noise > 0) x += rng.uniform(-noise, noise);
    v = static_cast<float>(std::clamp(x, 0.0, 1.0));
  }
}

}  // namespace

BinaryMask gapped_foreground(const LabelMap& labels, double gap) {
  BinaryMask fg = binarize(labels);
  if (gap <= 0) return fg;
  const int r = static_cast<int>(std::floor(gap));
  const double g2 = gap * gap;
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x) {
      const std::int32_t l = labels(x, y);
      if (l == 0) continue;
      for (int dy = -r; dy <= r && fg(x, y); ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          if (dx * dx + dy * dy > g2 || !labels.contains(x + dx, y + dy)) continue;
          const std::int32_t n = labels(x + dx, y + dy);
          if (n != 0 && n != l) {
            fg(x, y) = 0;
            break;
          }
        }
    }
  return fg;
}

Prediction oracle_predict(const LabelMap& full, const std::optional<LabelMap>& weak, const OraclePredictorSpec& spec,
                          std::uint64_t noise_seed) {
  spec.validate();
  if (weak) require_same_shape(full, *weak, "oracle_predict");
  Rng rng(noise_seed);
  Prediction p;
  p.marker = to_gray(weak ? markers_from_weak(WeakAnnotation{*weak}) : make_reference(FullAnnotation{full}, spec.k).markers);
  p.fg = to_gray(gapped_foreground(full, spec.boundary_gap));
  finish(p.marker, spec.sigma, spec.noise, rng);
  finish(p.fg, spec.sigma, spec.noise, rng);
  return p;
}

}  // namespace cellws::app

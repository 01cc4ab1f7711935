#include <cmath>
#include <stdexcept>

#include "cellws/dataprep.hpp"

namespace cellws {

void AugmentationSpec::validate() const {
  if (!(scale_min > 0.0) || !(scale_max >= scale_min))
    throw std::invalid_argument("augmentation: scale range must satisfy 0 < min <= max");
  if (!(angle_max >= angle_min)) throw std::invalid_argument("augmentation: empty angle range");
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0))
    throw std::invalid_argument("augmentation: flip probability must lie in [0, 1]");
  if (elastic && !(elastic->sigma > 0.0)) throw std::invalid_argument("augmentation: elastic sigma must be positive");
  if (elastic && elastic->alpha < 0.0) throw std::invalid_argument("augmentation: elastic alpha must be >= 0");
}

AugmentationDraw draw_augmentation(const AugmentationSpec& spec, int width, int height, Rng& rng) {
  spec.validate();
  AugmentationDraw draw;
  if (spec.rigid) {
    draw.scale = spec.scale_min == spec.scale_max ? spec.scale_min : rng.uniform(spec.scale_min, spec.scale_max);
    draw.angle = spec.angle_min == spec.angle_max ? spec.angle_min : rng.uniform(spec.angle_min, spec.angle_max);
    draw.flip = rng.bernoulli(spec.flip_probability);
  }
  if (spec.elastic) {
    GrayImage dx(width, height), dy(width, height);
    for (auto& v : dx) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (auto& v : dy) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    dx = gaussian_blur(dx, spec.elastic->sigma);
    dy = gaussian_blur(dy, spec.elastic->sigma);
    for (auto& v : dx) v = static_cast<float>(v * spec.elastic->alpha);
    for (auto& v : dy) v = static_cast<float>(v * spec.elastic->alpha);
    draw.dx = std::move(dx);
    draw.dy = std::move(dy);
  }
  return draw;
}

namespace {

// Rounding noise from cos/sin of exact right angles would otherwise turn an
// exact grid mapping into a blend.
double snap(double v) {
  const double r = std::nearbyint(v);
  return std::abs(v - r) < 1e-6 ? r : v;
}

float bilinear(const GrayImage& img, double x, double y) {
  const int w = img.width(), h = img.height();
  const double fx = std::floor(x), fy = std::floor(y);
  const double ax = x - fx, ay = y - fy;
  const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
  const auto at = [&](int xi, int yi) -> double { return img(mirror_index(xi, w), mirror_index(yi, h)); };
  const double top = (1.0 - ax) * at(x0, y0) + (ax > 0.0 ? ax * at(x0 + 1, y0) : 0.0);
  if (ay == 0.0) return static_cast<float>(top);
  const double bottom = (1.0 - ax) * at(x0, y0 + 1) + (ax > 0.0 ? ax * at(x0 + 1, y0 + 1) : 0.0);
  return static_cast<float>((1.0 - ay) * top + ay * bottom);
}

}  // namespace

Sample apply_augmentation(const Sample& sample, const AugmentationDraw& draw) {
  require_same_shape(sample.image, sample.labels, "augment");
  const int w = sample.image.width(), h = sample.image.height();
  const bool elastic = !draw.dx.empty();
  if (elastic) {
    require_same_shape(sample.image, draw.dx, "augment");
    require_same_shape(sample.image, draw.dy, "augment");
  }
  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  const double c = std::cos(draw.angle), s = std::sin(draw.angle);

  Sample out{GrayImage(w, h), LabelMap(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double u = x - cx, v = y - cy;
      if (elastic) {
        u += draw.dx(x, y);
        v += draw.dy(x, y);
      }
      if (draw.flip) u = -u;
      const double ru = c * u + s * v;
      const double rv = -s * u + c * v;
      const double sx = snap(ru / draw.scale + cx);
      const double sy = snap(rv / draw.scale + cy);
      out.image(x, y) = bilinear(sample.image, sx, sy);
      const int nx = mirror_index(static_cast<int>(std::lround(sx)), w);
      const int ny = mirror_index(static_cast<int>(std::lround(sy)), h);
      out.labels(x, y) = sample.labels(nx, ny);
    }
  }
  return out;
}

Sample augment(const Sample& sample, const AugmentationSpec& spec, Rng& rng) {
  return apply_augmentation(sample, draw_augmentation(spec, sample.image.width(), sample.image.height(), rng));
}

}  // namespace cellws

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cellws/dataprep.hpp"
#include "cellws/morphology.hpp"

namespace cellws {

BalanceMode parse_balance_mode(std::string_view name) {
  if (name == "none") return BalanceMode::None;
  if (name == "class_frequency") return BalanceMode::ClassFrequency;
  throw std::invalid_argument("unknown balance mode: " + std::string(name));
}

std::string_view to_string(BalanceMode m) noexcept {
  return m == BalanceMode::None ? "none" : "class_frequency";
}

void WeightParams::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("weight parameter a must be positive");
  if (!(d > 0.0)) throw std::invalid_argument("weight parameter d must be positive");
}

GrayImage weight_map(const FullAnnotation& full, const WeightParams& params) {
  params.validate();
  const LabelMap& labels = full.labels;
  const int w = labels.width(), h = labels.height();
  std::vector<double> band(labels.size(), 0.0);

  // Beyond distance d a cell contributes nothing, so each cell's distance
  // transform only needs its bounding box grown by ceil(d).
  const int margin = static_cast<int>(std::ceil(params.d));
  const auto boxes = label_boxes(labels);
  for (std::size_t l = 1; l < boxes.size(); ++l) {
    if (!boxes[l].valid()) continue;
    const BoundingBox box = boxes[l].grown(margin, w, h);
    const BinaryMask cell = label_mask(crop(labels, box), static_cast<std::int32_t>(l));
    const auto d2 = squared_distance_transform(cell);
    for (int y = 0; y < box.height(); ++y)
      for (int x = 0; x < box.width(); ++x) {
        const double dist = std::sqrt(static_cast<double>(d2(x, y)));
        band[labels.index(box.x0 + x, box.y0 + y)] += std::max(params.d - dist, 0.0);
      }
  }

  std::size_t fg = 0;
  for (auto v : labels) fg += v > 0 ? 1 : 0;
  const std::size_t total = labels.size();
  const std::size_t bg = total - fg;

  GrayImage out(w, h);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double b = 1.0;
    if (params.balance == BalanceMode::ClassFrequency) {
      const std::size_t cls = labels[i] > 0 ? fg : bg;
      b = static_cast<double>(total) / (2.0 * static_cast<double>(cls));
    }
    out[i] = static_cast<float>((1.0 + params.a * band[i]) * b);
  }
  return out;
}

double weighted_cross_entropy(const GrayImage& p, const BinaryMask& y, const GrayImage& w) {
  require_same_shape(p, y, "weighted_cross_entropy");
  require_same_shape(p, w, "weighted_cross_entropy");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (w[i] < 0.0f) throw std::invalid_argument("weighted_cross_entropy: negative weight");
    const double pi = std::clamp(static_cast<double>(p[i]), kLossEpsilon, 1.0 - kLossEpsilon);
    const double py = y[i] ? pi : 1.0 - pi;
    num += w[i] * std::log(py);
    den += w[i];
  }
  if (den == 0.0) throw std::invalid_argument("weighted_cross_entropy: weights sum to zero");
  return -num / den;
}

}  // namespace cellws

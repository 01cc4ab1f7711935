#include <algorithm>
#include <array>
#include <cmath>
#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>
#include <stdexcept>

#include "cellws/dataprep.hpp"

namespace cellws {

NormalizationMethod parse_normalization(std::string_view name) {
  if (name == "HE" || name == "he") return NormalizationMethod::HE;
  if (name == "CLAHE" || name == "clahe") return NormalizationMethod::CLAHE;
  if (name == "median") return NormalizationMethod::Median;
  throw std::invalid_argument("unknown normalization method: " + std::string(name));
}

std::string_view to_string(NormalizationMethod m) noexcept {
  switch (m) {
    case NormalizationMethod::HE: return "HE";
    case NormalizationMethod::CLAHE: return "CLAHE";
    case NormalizationMethod::Median: return "median";
  }
  return "?";
}

namespace {

// Min-max binning into 256 levels; nullopt for constant images.
std::optional<ByteImage> to_levels(const GrayImage& img) {
  if (img.empty()) return std::nullopt;
  const auto [lo_it, hi_it] = std::minmax_element(img.begin(), img.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) return std::nullopt;
  ByteImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i)
    out[i] = static_cast<std::uint8_t>(std::lround((img[i] - lo) / (hi - lo) * 255.0));
  return out;
}

GrayImage equalize(const GrayImage& img) {
  const auto levels = to_levels(img);
  if (!levels) return GrayImage(img.width(), img.height(), 0.0f);
  std::array<std::size_t, 256> hist{};
  for (auto v : *levels) ++hist[v];
  std::array<double, 256> cdf{};
  std::size_t acc = 0;
  for (int i = 0; i < 256; ++i) {
    acc += hist[i];
    cdf[i] = static_cast<double>(acc) / static_cast<double>(levels->size());
  }
  GrayImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = static_cast<float>(cdf[(*levels)[i]] - 0.5);
  return out;
}

GrayImage clahe(const GrayImage& img, const ClaheParams& params) {
  if (params.tiles_x < 1 || params.tiles_y < 1 || !(params.clip_limit > 0.0))
    throw std::invalid_argument("CLAHE: tiles must be >= 1 and clip limit positive");
  const auto levels = to_levels(img);
  if (!levels) return GrayImage(img.width(), img.height(), 0.0f);
  cv::Mat src(img.height(), img.width(), CV_8UC1);
  for (int y = 0; y < src.rows; ++y)
    for (int x = 0; x < src.cols; ++x) src.at<std::uint8_t>(y, x) = (*levels)(x, y);
  cv::Mat dst;
  auto op = cv::createCLAHE(params.clip_limit, cv::Size(params.tiles_x, params.tiles_y));
  op->apply(src, dst);
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < dst.rows; ++y)
    for (int x = 0; x < dst.cols; ++x)
      out(x, y) = static_cast<float>(dst.at<std::uint8_t>(y, x) / 255.0 - 0.5);
  return out;
}

double median_of(const GrayImage& img) {
  std::vector<float> v(img.begin(), img.end());
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

GrayImage median_scale(const GrayImage& img) {
  GrayImage out(img.width(), img.height(), 0.0f);
  if (img.empty()) return out;
  const double med = median_of(img);
  const double hi = *std::max_element(img.begin(), img.end());
  if (!(hi > med)) return out;
  for (std::size_t i = 0; i < img.size(); ++i)
    out[i] = static_cast<float>(std::clamp(0.5 * (img[i] - med) / (hi - med), -0.5, 0.5));
  return out;
}

}  // namespace

GrayImage normalize(const GrayImage& img, NormalizationMethod method, const ClaheParams& clahe_params) {
  switch (method) {
    case NormalizationMethod::HE: return equalize(img);
    case NormalizationMethod::CLAHE: return clahe(img, clahe_params);
    case NormalizationMethod::Median: return median_scale(img);
  }
  throw std::invalid_argument("normalize: unknown method");
}

}  // namespace cellws

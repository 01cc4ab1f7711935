#include "cellws/raster_io.hpp"

#include <algorithm>
#include <cmath>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace cellws {

namespace {

cv::Mat load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw IoError("cannot decode image: " + path.string());
  if (m.channels() != 1) throw IoError("expected a single-channel image: " + path.string());
  return m;
}

void store(const std::filesystem::path& path, const cv::Mat& m) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m);
  } catch (const cv::Exception& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw IoError("cannot write " + path.string());
}

template <class R, class F>
R convert(const cv::Mat& m, F&& f) {
  R out(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      switch (m.depth()) {
        case CV_8U: out(x, y) = f(static_cast<double>(m.at<std::uint8_t>(y, x)), 255.0); break;
        case CV_16U: out(x, y) = f(static_cast<double>(m.at<std::uint16_t>(y, x)), 65535.0); break;
        case CV_16S: out(x, y) = f(static_cast<double>(m.at<std::int16_t>(y, x)), 65535.0); break;
        case CV_32S: out(x, y) = f(static_cast<double>(m.at<std::int32_t>(y, x)), 1.0); break;
        case CV_32F: out(x, y) = f(static_cast<double>(m.at<float>(y, x)), 1.0); break;
        case CV_64F: out(x, y) = f(m.at<double>(y, x), 1.0); break;
        default: throw IoError("unsupported pixel depth");
      }
    }
  }
  return out;
}

}  // namespace

GrayImage read_gray(const std::filesystem::path& path) {
  return convert<GrayImage>(load(path), [](double v, double) { return static_cast<float>(v); });
}

GrayImage read_probability(const std::filesystem::path& path) {
  return convert<GrayImage>(load(path), [](double v, double scale) {
    return static_cast<float>(std::clamp(v / scale, 0.0, 1.0));
  });
}

void write_probability16(const std::filesystem::path& path, const GrayImage& probability) {
  require_probability(probability, "write_probability16");
  cv::Mat m(probability.height(), probability.width(), CV_16UC1);
  for (int y = 0; y < m.rows; ++y)
    for (int x = 0; x < m.cols; ++x)
      m.at<std::uint16_t>(y, x) = static_cast<std::uint16_t>(std::lround(probability(x, y) * 65535.0));
  store(path, m);
}

LabelMap read_labels(const std::filesystem::path& path) {
  const cv::Mat m = load(path);
  if (m.depth() == CV_32F || m.depth() == CV_64F) throw IoError("label image must be integer: " + path.string());
  return convert<LabelMap>(m, [](double v, double) { return static_cast<std::int32_t>(v); });
}

void write_labels16(const std::filesystem::path& path, const LabelMap& labels) {
  cv::Mat m(labels.height(), labels.width(), CV_16UC1);
  for (int y = 0; y < m.rows; ++y)
    for (int x = 0; x < m.cols; ++x) {
      const auto v = labels(x, y);
      if (v < 0 || v > 65535) throw IoError("label " + std::to_string(v) + " does not fit in 16 bits");
      m.at<std::uint16_t>(y, x) = static_cast<std::uint16_t>(v);
    }
  store(path, m);
}

BinaryMask read_mask(const std::filesystem::path& path) {
  return convert<BinaryMask>(load(path), [](double v, double) { return static_cast<std::uint8_t>(v != 0.0); });
}

void write_mask8(const std::filesystem::path& path, const BinaryMask& mask) {
  cv::Mat m(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < m.rows; ++y)
    for (int x = 0; x < m.cols; ++x) m.at<std::uint8_t>(y, x) = mask(x, y) ? 255 : 0;
  store(path, m);
}

void write_float(const std::filesystem::path& path, const GrayImage& img) {
  cv::Mat m(img.height(), img.width(), CV_32FC1);
  for (int y = 0; y < m.rows; ++y)
    for (int x = 0; x < m.cols; ++x) m.at<float>(y, x) = img(x, y);
  store(path, m);
}

void write_gray8(const std::filesystem::path& path, const ByteImage& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC1);
  for (int y = 0; y < m.rows; ++y)
    for (int x = 0; x < m.cols; ++x) m.at<std::uint8_t>(y, x) = img(x, y);
  store(path, m);
}

}  // namespace cellws

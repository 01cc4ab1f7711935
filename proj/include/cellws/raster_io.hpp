#pragma once

#include <filesystem>
#include <stdexcept>

#include "cellws/raster.hpp"

namespace cellws {

/// Unreadable, unwritable or malformed raster files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-channel 8/16-bit (or float) PNG/TIFF, values returned unscaled.
GrayImage read_gray(const std::filesystem::path& path);

/// 16-bit files are scaled by 1/65535, 8-bit by 1/255; float files as-is.
GrayImage read_probability(const std::filesystem::path& path);
/// Probability map written as 16-bit grayscale scaled by 65535.
void write_probability16(const std::filesystem::path& path, const GrayImage& probability);

/// 8- or 16-bit label image (CTC mask convention).
LabelMap read_labels(const std::filesystem::path& path);
/// Labels must fit in 16 bits.
void write_labels16(const std::filesystem::path& path, const LabelMap& labels);

/// Any non-zero pixel is set.
BinaryMask read_mask(const std::filesystem::path& path);
/// 8-bit, set pixels written as 255.
void write_mask8(const std::filesystem::path& path, const BinaryMask& mask);

/// 32-bit float TIFF (weight maps, normalized images).
void write_float(const std::filesystem::path& path, const GrayImage& img);
void write_gray8(const std::filesystem::path& path, const ByteImage& img);

}  // namespace cellws

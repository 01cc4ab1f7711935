#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cellws/app/config.hpp"
#include "cellws/raster.hpp"

namespace cellws::app {

namespace fs = std::filesystem;

/// Cell Tracking Challenge directory layout under one dataset root.
///   <seq>/t###.tif                raw frames
///   <seq>_GT/SEG/man_seg###.tif   full annotations
///   <seq>_GT/TRA/man_track###.tif weak (marker) annotations
///   <seq>_RES/mask###.tif         segmentation results
/// Predictions live in a separate tree: <pred>/<seq>/t###_{marker,fg}.tif.
class CtcLayout {
 public:
  explicit CtcLayout(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const noexcept { return root_; }

  fs::path raw(const std::string& seq, const std::string& frame) const;
  fs::path seg_gt(const std::string& seq, const std::string& frame) const;
  fs::path tra_gt(const std::string& seq, const std::string& frame) const;
  fs::path result(const std::string& seq, const std::string& frame) const;
  fs::path result_dir(const std::string& seq) const;

  /// Frame ids ("t000", ...) in lexical order.
  std::vector<std::string> raw_frames(const std::string& seq) const;
  std::vector<std::string> seg_frames(const std::string& seq) const;
  std::vector<std::string> tra_frames(const std::string& seq) const;
  std::vector<std::string> result_frames(const std::string& seq) const;

 private:
  fs::path root_;
};

fs::path marker_prediction(const fs::path& pred_root, const std::string& seq, const std::string& frame);
fs::path fg_prediction(const fs::path& pred_root, const std::string& seq, const std::string& frame);

/// "t007" -> "007". Throws DataError on malformed ids.
std::string frame_digits(const std::string& frame);

/// Sequences named by --seq, or all sequences of the config.
std::vector<std::string> selected_sequences(const DatasetConfig& config, const std::optional<std::string>& seq);

/// Reads a raster, turning I/O failures into DataError.
LabelMap load_labels(const fs::path& path);
GrayImage load_gray(const fs::path& path);
GrayImage load_probability(const fs::path& path);

}  // namespace cellws::app

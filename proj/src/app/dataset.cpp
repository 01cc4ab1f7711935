#include "cellws/app/dataset.hpp"

#include <algorithm>

#include "cellws/raster_io.hpp"

namespace cellws::app {
namespace {

// Frame ids of files `<prefix>###.tif` in `dir`, mapped to "t###".
std::vector<std::string> scan(const fs::path& dir, const std::string& prefix) {
  std::vector<std::string> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() <= prefix.size() + 4 || name.compare(0, prefix.size(), prefix) != 0) continue;
    if (name.compare(name.size() - 4, 4, ".tif") != 0) continue;
    const std::string digits = name.substr(prefix.size(), name.size() - prefix.size() - 4);
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
    out.push_back("t" + digits);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string frame_digits(const std::string& frame) {
  if (frame.size() < 2 || frame[0] != 't' ||
      !std::all_of(frame.begin() + 1, frame.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw DataError("malformed frame id: " + frame);
  return frame.substr(1);
}

fs::path CtcLayout::raw(const std::string& seq, const std::string& frame) const {
  return root_ / seq / (frame + ".tif");
}
fs::path CtcLayout::seg_gt(const std::string& seq, const std::string& frame) const {
  return root_ / (seq + "_GT") / "SEG" / ("man_seg" + frame_digits(frame) + ".tif");
}
fs::path CtcLayout::tra_gt(const std::string& seq, const std::string& frame) const {
  return root_ / (seq + "_GT") / "TRA" / ("man_track" + frame_digits(frame) + ".tif");
}
fs::path CtcLayout::result_dir(const std::string& seq) const { return root_ / (seq + "_RES"); }
fs::path CtcLayout::result(const std::string& seq, const std::string& frame) const {
  return result_dir(seq) / ("mask" + frame_digits(frame) + ".tif");
}

std::vector<std::string> CtcLayout::raw_frames(const std::string& seq) const { return scan(root_ / seq, "t"); }
std::vector<std::string> CtcLayout::seg_frames(const std::string& seq) const {
  return scan(root_ / (seq + "_GT") / "SEG", "man_seg");
}
std::vector<std::string> CtcLayout::tra_frames(const std::string& seq) const {
  return scan(root_ / (seq + "_GT") / "TRA", "man_track");
}
std::vector<std::string> CtcLayout::result_frames(const std::string& seq) const {
  return scan(result_dir(seq), "mask");
}

fs::path marker_prediction(const fs::path& pred_root, const std::string& seq, const std::string& frame) {
  return pred_root / seq / (frame + "_marker.tif");
}
fs::path fg_prediction(const fs::path& pred_root, const std::string& seq, const std::string& frame) {
  return pred_root / seq / (frame + "_fg.tif");
}

std::vector<std::string> selected_sequences(const DatasetConfig& config, const std::optional<std::string>& seq) {
  if (!seq) return config.sequences;
  if (std::find(config.sequences.begin(), config.sequences.end(), *seq) == config.sequences.end())
    throw UsageError("sequence " + *seq + " is not listed in the config");
  return {*seq};
}

LabelMap load_labels(const fs::path& path) {
  try {
    return read_labels(path);
  } catch (const IoError& e) {
    throw DataError(e.what());
  }
}

GrayImage load_gray(const fs::path& path) {
  try {
    return read_gray(path);
  } catch (const IoError& e) {
    throw DataError(e.what());
  }
}

GrayImage load_probability(const fs::path& path) {
  try {
    return read_probability(path);
  } catch (const IoError& e) {
    throw DataError(e.what());
  }
}

}  // namespace cellws::app

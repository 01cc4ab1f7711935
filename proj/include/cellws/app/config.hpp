#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cellws/dataprep.hpp"
#include "cellws/markerseg.hpp"

namespace cellws::app {

/// Bad flags, bad config values, unknown names. Exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Missing or inconsistent files. Exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class MarkerSource { ErodedFull, Weak };

MarkerSource parse_marker_source(std::string_view name);
std::string_view to_string(MarkerSource s) noexcept;

/// Stand-in predictor: blurred reference outputs.
struct OraclePredictorSpec {
  double sigma = 2.0;
  double k = 0.6;
  double noise = 0.0;
  /// Cell pixels within this distance of another cell are dropped from the
  /// foreground before blurring. 0 keeps touching cells flush.
  double boundary_gap = 0.0;

  void validate() const;
};

struct DatasetConfig {
  /// File the config was read from; empty for in-memory configs.
  std::filesystem::path source;
  std::filesystem::path root;
  std::vector<std::string> sequences{"01"};
  NormalizationMethod normalization = NormalizationMethod::HE;
  ClaheParams clahe;
  MarkerSource marker_source = MarkerSource::ErodedFull;
  PipelineParams pipeline;
  /// t_c / d_inf not yet known; `calibrate` resolves them.
  bool tc_pending = false;
  bool d_inf_pending = false;
  std::uint64_t seed = 0;
  OraclePredictorSpec oracle;
  WeightParams weights;
  int augment_copies = 0;
  bool augment_elastic = false;

  void validate() const;
};

/// Parses the flat `key = value` format; `#` starts a comment. Relative
/// `dataset_root` is taken relative to `base_dir`.
DatasetConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
DatasetConfig load_config(const std::filesystem::path& path);

/// Serializes every key; parse_config(format_config(c)) reproduces c.
std::string format_config(const DatasetConfig& config, const std::filesystem::path& base_dir);

/// Rewrites `key = ...` lines in place (appending missing keys), keeping
/// comments and ordering of the rest.
std::string update_config_text(std::string_view text, const std::vector<std::pair<std::string, std::string>>& values);

/// Built-in presets: dic-hela, fluo-sim, phc-psc, synthetic.
std::vector<std::string> preset_names();
std::string preset_text(std::string_view name);

}  // namespace cellws::app

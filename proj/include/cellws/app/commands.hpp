#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cellws/app/config.hpp"
#include "cellws/app/report.hpp"
#include "cellws/app/synth.hpp"
#include "cellws/markerseg.hpp"

namespace cellws::app {

namespace fs = std::filesystem;

struct RunOptions {
  std::optional<std::string> seq;
  int workers = 1;
  /// Overrides the config seed.
  std::optional<std::uint64_t> seed;
  /// Command-specific default when empty.
  fs::path out;
  Diagnostics* diag = nullptr;
};

/// Runs fn(0..n-1) on up to `workers` threads. Exceptions are rethrown for
/// the lowest failing index.
void for_each_index(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// FNV-1a, stable across platforms.
std::uint64_t stable_hash(std::string_view s) noexcept;

void cmd_synth(const fs::path& out, const SynthSpec& spec, const RunOptions& opt);

struct PrepareSummary {
  std::size_t prepared = 0;
  std::size_t skipped = 0;
  std::size_t augmented = 0;
  fs::path manifest;
};

/// Normalized images, y_m, y_c and weight maps for every annotated frame
/// under <out>/<seq>/, plus <out>/manifest.jsonl. Default out: <root>/prepared.
PrepareSummary cmd_prepare(const DatasetConfig& config, const RunOptions& opt);

struct OracleSummary {
  std::size_t written = 0;
  std::size_t skipped = 0;
};

/// Writes <out>/<seq>/t###_{marker,fg}.tif. Default out: <root>/pred.
OracleSummary cmd_oracle_predict(const DatasetConfig& config, const RunOptions& opt);

struct CalibrationResult {
  int t_c = 0;
  std::optional<double> d_inf;  // set when it was measured
  ThresholdCurve curve;
  std::size_t frames = 0;
};

/// Sweeps t_c over frames that have both a foreground prediction and a full
/// annotation; measures d_inf when the config asks for it. Writes the values
/// back into the config file and the curve to <out>/calibration_curve.csv
/// (default out: root).
CalibrationResult cmd_calibrate(const DatasetConfig& config, const fs::path& pred_root, const RunOptions& opt);

struct FrameRecord {
  std::string seq;
  std::string frame;
  std::size_t markers = 0;
  std::size_t dropped_markers = 0;
  std::size_t segments = 0;
  double seconds = 0.0;
};

struct SegmentSummary {
  std::vector<FrameRecord> frames;
};

/// Writes <out>/<seq>_RES/mask###.tif for every raw frame, the deterministic
/// run_log.jsonl and the wall-clock run_timing.jsonl. Default out: root.
SegmentSummary cmd_segment(const DatasetConfig& config, const fs::path& pred_root, const RunOptions& opt);

/// Scores <res_root>/<seq>_RES against the SEG annotations. Writes eval.json
/// and eval.csv to opt.out (default: res_root).
EvalSummary cmd_evaluate(const DatasetConfig& config, const fs::path& res_root, const RunOptions& opt);

inline const std::array<std::string, 3> kExperiments = {"augmentation", "segfunction", "markertype"};

/// Runs a comparison table on the oracle predictor and writes
/// <out>/experiment_<name>.csv (default out: root). Returns the CSV text.
std::string cmd_experiment(const std::string& name, const DatasetConfig& config, const RunOptions& opt);

/// Minimum max-inscribed diameter over all labels of all maps.
double min_inscribed_diameter(const std::vector<const LabelMap*>& maps);

}  // namespace cellws::app

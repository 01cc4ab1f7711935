#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "cellws/raster.hpp"

namespace cellws::app {

struct SynthSpec {
  int frames = 24;
  int width = 192;
  int height = 192;
  int min_cells = 3;
  int max_cells = 15;
  double min_radius = 8.0;
  double max_radius = 18.0;
  /// Chance that a new cell is placed flush against an existing one.
  double touching_probability = 0.4;
  /// Weak-marker disc radius and its maximum offset from the cell centre as
  /// a fraction of the centre-to-boundary distance.
  int weak_radius = 5;
  double weak_offset = 0.4;
  std::uint64_t seed = 7;
  std::string sequence = "01";

  void validate() const;
};

struct SynthFrame {
  /// Raw intensities in [0, 1]; written as 16-bit.
  GrayImage raw;
  /// Full annotation, labels 1..n in placement order.
  LabelMap labels;
  /// One compact marker per cell, same label as the cell.
  LabelMap weak;
  /// Number of cells sharing a boundary with another cell.
  int touching_cells = 0;
};

/// Frame `index` depends only on (spec, index).
SynthFrame synth_frame(const SynthSpec& spec, int index);

/// Writes the CTC tree and `synthetic.cfg` under `out`.
void write_synthetic_dataset(const std::filesystem::path& out, const SynthSpec& spec);

/// Mixes a seed with a stream id (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace cellws::app

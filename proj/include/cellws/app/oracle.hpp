#pragma once

#include <cstdint>
#include <optional>

#include "cellws/app/config.hpp"
#include "cellws/raster.hpp"

namespace cellws::app {

struct Prediction {
  GrayImage marker;
  GrayImage fg;
};

/// Cell pixels kept as foreground: every labelled pixel farther than `gap`
/// from any pixel of a different cell.
BinaryMask gapped_foreground(const LabelMap& labels, double gap);

/// Blurs the binary targets and adds uniform noise in [-noise, noise]; both
/// maps are clipped to [0, 1]. `weak` replaces the eroded-full markers when
/// given. `noise_seed` only matters when spec.noise > 0.
Prediction oracle_predict(const LabelMap& full, const std::optional<LabelMap>& weak, const OraclePredictorSpec& spec,
                          std::uint64_t noise_seed);

}  // namespace cellws::app

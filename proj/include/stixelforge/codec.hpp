#pragma once

#include "stixelforge/core.hpp"

namespace stixelforge::codec {

struct DecodeConfig {
  double t_occ = 0.5;
  double t_cut = 0.5;
  int min_run_cells = 1;

  void validate() const;
};

/// Rasterises object Stixels into occupancy and cut (top/bottom edge) grids.
/// A Stixel covers cells [floor(vTop/s), ceil(vBottom/s)) of its column; its
/// first and last cells are marked in the cut grid. Ground and sky are skipped.
TargetGrid encode_targets(const StixelWorld& world, const GridSpec& grid);

/// Independent per-map min-max scaling to [0, 1]; constant maps become zeros.
HeatmapPair normalize_heatmaps(const Matrix& raw_occ, const Matrix& raw_cut, const GridSpec& grid);

/// Occupied runs (occ >= t_occ) per column, split where the cut profile has a
/// local maximum >= t_cut. A lone split cell starts the lower segment; two
/// adjacent split cells mark the bottom of one segment and the top of the next.
StixelWorld decode_heatmaps(const HeatmapPair& heatmaps, const DecodeConfig& cfg);

/// Decoding an encoded target grid (cells exactly 0 or 1).
HeatmapPair targets_as_heatmaps(const TargetGrid& targets);

}  // namespace stixelforge::codec

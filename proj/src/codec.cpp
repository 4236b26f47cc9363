#include "stixelforge/codec.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace stixelforge::codec {
namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

Matrix min_max(const Matrix& m) {
  if (!m.allFinite()) raise(Errc::NonFiniteInput, "heat map contains NaN or Inf");
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  if (m.size() == 0) return out;
  const double lo = m.minCoeff();
  const double hi = m.maxCoeff();
  if (hi - lo <= 0.0) return out;
  out = (m.array() - lo) / (hi - lo);
  return out;
}

}  // namespace

void DecodeConfig::validate() const {
  if (!(t_occ >= 0.0 && t_occ <= 1.0) || !(t_cut >= 0.0 && t_cut <= 1.0)) {
    raise(Errc::InvalidArgument, "decode thresholds must lie in [0, 1]");
  }
  if (min_run_cells < 1) raise(Errc::InvalidArgument, "min run length must be >= 1");
}

TargetGrid encode_targets(const StixelWorld& world, const GridSpec& grid) {
  if (world.image_width() != grid.image_width() || world.image_height() != grid.image_height() ||
      world.stixel_width() != grid.stride()) {
    raise(Errc::GridMismatch, "world geometry does not match the grid");
  }
  BinaryMatrix occ = BinaryMatrix::Zero(grid.rows(), grid.cols());
  BinaryMatrix cut = BinaryMatrix::Zero(grid.rows(), grid.cols());
  const int s = grid.stride();
  for (const auto& st : world.stixels()) {
    if (!is_object(st.type())) continue;
    const int first = st.v_top() / s;
    const int last = ceil_div(st.v_bottom(), s) - 1;
    for (int r = first; r <= last; ++r) occ(r, st.column()) = 1;
    cut(first, st.column()) = 1;
    cut(last, st.column()) = 1;
  }
  return TargetGrid(std::move(occ), std::move(cut), grid);
}

HeatmapPair normalize_heatmaps(const Matrix& raw_occ, const Matrix& raw_cut, const GridSpec& grid) {
  return HeatmapPair(min_max(raw_occ), min_max(raw_cut), grid);
}

HeatmapPair targets_as_heatmaps(const TargetGrid& targets) {
  return HeatmapPair(targets.occ.cast<double>(), targets.cut.cast<double>(), targets.grid);
}

StixelWorld decode_heatmaps(const HeatmapPair& hm, const DecodeConfig& cfg) {
  cfg.validate();
  const GridSpec& grid = hm.grid;
  const int rows = grid.rows();
  const int s = grid.stride();
  std::vector<Stixel> stixels;

  for (int col = 0; col < grid.cols(); ++col) {
    auto cut_at = [&](int r) { return (r < 0 || r >= rows) ? -std::numeric_limits<double>::infinity() : hm.cut(r, col); };
    int r = 0;
    while (r < rows) {
      if (!(hm.occ(r, col) >= cfg.t_occ)) {
        ++r;
        continue;
      }
      const int start = r;
      while (r < rows && hm.occ(r, col) >= cfg.t_occ) ++r;
      const int end = r;  // exclusive
      if (end - start < cfg.min_run_cells) continue;

      std::vector<char> candidate(static_cast<std::size_t>(end - start), 0);
      for (int c = start + 1; c < end - 1; ++c) {
        const double v = hm.cut(c, col);
        if (v >= cfg.t_cut && v >= cut_at(c - 1) && v >= cut_at(c + 1)) candidate[c - start] = 1;
      }
      std::vector<int> bounds{start};
      for (int c = start + 1; c < end - 1; ++c) {
        if (!candidate[c - start]) continue;
        if (c + 1 < end - 1 && candidate[c + 1 - start]) {
          bounds.push_back(c + 1);
          ++c;
        } else {
          bounds.push_back(c);
        }
      }
      bounds.push_back(end);
      for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        stixels.emplace_back(col, bounds[k] * s, bounds[k + 1] * s, StixelType::GroundObject);
      }
    }
  }
  return StixelWorld(std::move(stixels), grid);
}

}  // namespace stixelforge::codec

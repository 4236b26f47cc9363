#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stixelforge/core.hpp"

namespace stixelforge::io {

using Bytes = std::vector<std::uint8_t>;

// KITTI velodyne scans: little-endian float32 (x, y, z, intensity) records.
PointCloud read_kitti_velodyne(std::span<const std::uint8_t> bytes);
/// Intensities default to zero.
Bytes write_kitti_velodyne(const PointCloud& cloud, std::span<const float> intensities = {});

inline constexpr int kKittiDefaultWidth = 1248;
inline constexpr int kKittiDefaultHeight = 376;

/// KITTI calibration text with keys P2, R0_rect and Tr_velo_to_cam.
///
/// Extrinsics are R0_rect * Tr_velo_to_cam; a non-zero fourth column of P2
/// is folded into the translation. An optional `image_size: W H` line sets the
/// image size (default 1248x376). Rotations off by less than 1e-4 from
/// orthonormal are projected onto the nearest rotation.
Calibration read_kitti_calib(std::string_view text);
std::string write_kitti_calib(const Calibration& calib);

struct StixelRecord {
  std::string frame_id;
  Stixel stixel;
};

inline constexpr std::string_view kStixelCsvHeader = "frame,column,vT,vB,type,distance";

std::string write_stixel_csv(const StixelWorld& world, std::string_view frame_id = "");
std::vector<StixelRecord> read_stixel_records(std::string_view text);
/// The CSV carries no image geometry; the caller supplies it.
StixelWorld read_stixel_csv(std::string_view text, const GridSpec& grid);

// Heat-map blob: "SXHM", u32 version (1), u32 rows, u32 cols, u32 stride,
// then rows*cols float32 occupancy values followed by the cut values.
inline constexpr std::uint32_t kHeatmapVersion = 1;
Bytes write_heatmap_blob(const HeatmapPair& hm);
HeatmapPair read_heatmap_blob(std::span<const std::uint8_t> bytes);

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

RgbImage read_ppm(std::span<const std::uint8_t> bytes);
Bytes write_ppm(const RgbImage& image);

/// Color of an object Stixel: linear red (0 m) to green (50 m), gray without distance.
std::array<std::uint8_t, 3> distance_color(const std::optional<double>& distance);

/// Object Stixels blended over the background (black when absent) with the given opacity.
Bytes render_overlay_ppm(const StixelWorld& world, int width, int height, const RgbImage* background = nullptr,
                         double alpha = 0.5);

/// `column,row` lines under a header; -1 marks a column without contact.
std::string write_contacts_csv(const std::vector<int>& contacts);
std::vector<int> read_contacts_csv(std::string_view text);

Bytes read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace stixelforge::io

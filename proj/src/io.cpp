#include "stixelforge/io.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace stixelforge::io {
namespace {

std::uint32_t load_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_u32(Bytes& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

float load_f32(const std::uint8_t* p) { return std::bit_cast<float>(load_u32(p)); }
void store_f32(Bytes& out, float v) { store_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto at = s.find(sep, pos);
    parts.push_back(s.substr(pos, at == std::string_view::npos ? std::string_view::npos : at - pos));
    if (at == std::string_view::npos) break;
    pos = at + 1;
  }
  return parts;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  T v{};
  if (s.empty()) return std::nullopt;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

[[noreturn]] void csv_error(std::size_t line, const std::string& what) {
  raise(Errc::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::vector<double> calib_numbers(std::string_view key, std::string_view value, std::size_t expected) {
  std::vector<double> v;
  std::size_t pos = 0;
  while (pos < value.size()) {
    const auto start = value.find_first_not_of(" \t\r", pos);
    if (start == std::string_view::npos) break;
    auto end = value.find_first_of(" \t\r", start);
    if (end == std::string_view::npos) end = value.size();
    const auto num = parse_number<double>(value.substr(start, end - start));
    if (!num || !std::isfinite(*num)) {
      raise(Errc::MalformedMatrix, std::string(key) + ": non-numeric entry '" +
                                       std::string(value.substr(start, end - start)) + "'");
    }
    v.push_back(*num);
    pos = end;
  }
  if (v.size() != expected) {
    raise(Errc::MalformedMatrix, std::string(key) + " needs " + std::to_string(expected) + " numbers, got " +
                                     std::to_string(v.size()));
  }
  return v;
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

Extrinsics make_extrinsics(const Mat3& r, const Vec3& t) {
  try {
    return Extrinsics(r, t);
  } catch (const Error&) {
  }
  const double err = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (err > 1e-4 || r.determinant() <= 0.0) raise(Errc::MalformedMatrix, "rotation part is not a rotation");
  return Extrinsics(nearest_rotation(r), t);
}

StixelType parse_type(std::string_view code, std::size_t line) {
  if (code == "G") return StixelType::Ground;
  if (code == "GO") return StixelType::GroundObject;
  if (code == "SO") return StixelType::SwibObject;
  csv_error(line, "unknown stixel type '" + std::string(code) + "'");
}

}  // namespace

PointCloud read_kitti_velodyne(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 16 != 0) {
    raise(Errc::TruncatedFile, "velodyne scan length " + std::to_string(bytes.size()) + " is not a multiple of 16");
  }
  std::vector<Point3> pts;
  pts.reserve(bytes.size() / 16);
  for (std::size_t off = 0; off < bytes.size(); off += 16) {
    const auto* p = bytes.data() + off;
    pts.emplace_back(load_f32(p), load_f32(p + 4), load_f32(p + 8));
  }
  return PointCloud(std::move(pts), Frame::Sensor);
}

Bytes write_kitti_velodyne(const PointCloud& cloud, std::span<const float> intensities) {
  if (!intensities.empty() && intensities.size() != cloud.size()) {
    raise(Errc::LengthMismatch, "one intensity per point required");
  }
  Bytes out;
  out.reserve(cloud.size() * 16);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud[i];
    store_f32(out, static_cast<float>(p.x()));
    store_f32(out, static_cast<float>(p.y()));
    store_f32(out, static_cast<float>(p.z()));
    store_f32(out, intensities.empty() ? 0.0f : intensities[i]);
  }
  return out;
}

Calibration read_kitti_calib(std::string_view text) {
  std::map<std::string, std::string_view, std::less<>> fields;
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      raise(Errc::ParseError, "line " + std::to_string(line_no) + ": expected 'KEY: values'");
    }
    fields[std::string(trim(line.substr(0, colon)))] = line.substr(colon + 1);
  }
  auto require = [&](std::string_view key) {
    const auto it = fields.find(key);
    if (it == fields.end()) raise(Errc::MissingKey, "calibration lacks " + std::string(key));
    return it->second;
  };
  const auto p2 = calib_numbers("P2", require("P2"), 12);
  const auto r0v = calib_numbers("R0_rect", require("R0_rect"), 9);
  const auto tr = calib_numbers("Tr_velo_to_cam", require("Tr_velo_to_cam"), 12);

  int width = kKittiDefaultWidth;
  int height = kKittiDefaultHeight;
  if (const auto it = fields.find("image_size"); it != fields.end()) {
    const auto wh = calib_numbers("image_size", it->second, 2);
    if (!(wh[0] >= 1 && wh[0] <= 1e6 && wh[1] >= 1 && wh[1] <= 1e6) || wh[0] != std::floor(wh[0]) ||
        wh[1] != std::floor(wh[1])) {
      raise(Errc::MalformedMatrix, "image_size must hold two positive integers");
    }
    width = static_cast<int>(wh[0]);
    height = static_cast<int>(wh[1]);
  }

  Mat3 k;
  k << p2[0], p2[1], p2[2], p2[4], p2[5], p2[6], p2[8], p2[9], p2[10];
  const Vec3 p4(p2[3], p2[7], p2[11]);
  if (k(1, 0) != 0.0 || k(2, 0) != 0.0 || k(2, 1) != 0.0 || k(2, 2) != 1.0 || k(0, 1) != 0.0) {
    raise(Errc::MalformedMatrix, "P2 must be [fx 0 cx tx; 0 fy cy ty; 0 0 1 tz]");
  }

  Mat3 r0;
  r0 << r0v[0], r0v[1], r0v[2], r0v[3], r0v[4], r0v[5], r0v[6], r0v[7], r0v[8];
  Mat3 r;
  r << tr[0], tr[1], tr[2], tr[4], tr[5], tr[6], tr[8], tr[9], tr[10];
  Vec3 t(tr[3], tr[7], tr[11]);
  if (r0 != Mat3::Identity()) {
    r = (r0 * r).eval();
    t = (r0 * t).eval();
  }
  if (!p4.isZero(0.0)) {
    // P2 = K [I | K^-1 p4]: the camera offset of the rectified frame.
    t += k.triangularView<Eigen::Upper>().solve(p4);
  }

  try {
    return Calibration{CameraIntrinsics(k(0, 0), k(1, 1), k(0, 2), k(1, 2), width, height), make_extrinsics(r, t)};
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidArgument) raise(Errc::MalformedMatrix, e.what());
    throw;
  }
}

std::string write_kitti_calib(const Calibration& calib) {
  const auto& in = calib.intrinsics;
  const auto& r = calib.extrinsics.rotation();
  const auto& t = calib.extrinsics.translation();
  auto row = [](std::initializer_list<double> vals) {
    std::string s;
    for (double v : vals) s += " " + format_double(v);
    return s;
  };
  std::string out;
  out += "P2:" + row({in.fx(), 0.0, in.cx(), 0.0, 0.0, in.fy(), in.cy(), 0.0, 0.0, 0.0, 1.0, 0.0}) + "\n";
  out += "R0_rect:" + row({1, 0, 0, 0, 1, 0, 0, 0, 1}) + "\n";
  out += "Tr_velo_to_cam:" +
         row({r(0, 0), r(0, 1), r(0, 2), t(0), r(1, 0), r(1, 1), r(1, 2), t(1), r(2, 0), r(2, 1), r(2, 2), t(2)}) +
         "\n";
  out += "image_size: " + std::to_string(in.width()) + " " + std::to_string(in.height()) + "\n";
  return out;
}

std::string write_stixel_csv(const StixelWorld& world, std::string_view frame_id) {
  if (frame_id.find_first_of(",\n\r") != std::string_view::npos) {
    raise(Errc::InvalidArgument, "frame id must not contain commas or newlines");
  }
  std::string out(kStixelCsvHeader);
  out += '\n';
  for (const auto& s : world.stixels()) {
    if (s.type() == StixelType::Sky) raise(Errc::InvalidArgument, "sky stixels have no CSV type code");
    out += frame_id;
    out += ',' + std::to_string(s.column()) + ',' + std::to_string(s.v_top()) + ',' + std::to_string(s.v_bottom()) +
           ',';
    out += stixel_type_code(s.type());
    out += ',' + (s.distance() ? format_double(*s.distance()) : std::string("-1")) + '\n';
  }
  return out;
}

std::vector<StixelRecord> read_stixel_records(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]) != kStixelCsvHeader) csv_error(1, "missing header");
  std::vector<StixelRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 6) csv_error(line_no, "expected 6 fields, got " + std::to_string(f.size()));
    const auto column = parse_number<int>(f[1]);
    const auto v_top = parse_number<int>(f[2]);
    const auto v_bottom = parse_number<int>(f[3]);
    const auto distance = parse_number<double>(f[5]);
    if (!column || !v_top || !v_bottom) csv_error(line_no, "non-integer column or row");
    if (!distance || !std::isfinite(*distance)) csv_error(line_no, "malformed distance");
    const StixelType type = parse_type(trim(f[4]), line_no);
    std::optional<double> dist;
    if (*distance != -1.0) {
      if (*distance < 0.0) csv_error(line_no, "negative distance");
      dist = *distance;
    }
    try {
      records.push_back(StixelRecord{std::string(trim(f[0])), Stixel(*column, *v_top, *v_bottom, type, dist)});
    } catch (const Error& e) {
      csv_error(line_no, e.what());
    }
  }
  return records;
}

StixelWorld read_stixel_csv(std::string_view text, const GridSpec& grid) {
  auto records = read_stixel_records(text);
  std::vector<Stixel> stixels;
  stixels.reserve(records.size());
  for (auto& r : records) stixels.push_back(std::move(r.stixel));
  try {
    return StixelWorld(std::move(stixels), grid);
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidArgument) raise(Errc::ParseError, e.what());
    throw;
  }
}

Bytes write_heatmap_blob(const HeatmapPair& hm) {
  const auto rows = static_cast<std::uint32_t>(hm.grid.rows());
  const auto cols = static_cast<std::uint32_t>(hm.grid.cols());
  Bytes out{'S', 'X', 'H', 'M'};
  out.reserve(20 + 8 * static_cast<std::size_t>(rows) * cols);
  store_u32(out, kHeatmapVersion);
  store_u32(out, rows);
  store_u32(out, cols);
  store_u32(out, static_cast<std::uint32_t>(hm.grid.stride()));
  for (const Matrix* m : {&hm.occ, &hm.cut}) {
    for (Eigen::Index r = 0; r < m->rows(); ++r) {
      for (Eigen::Index c = 0; c < m->cols(); ++c) store_f32(out, static_cast<float>((*m)(r, c)));
    }
  }
  return out;
}

HeatmapPair read_heatmap_blob(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) raise(Errc::TruncatedFile, "heat map blob shorter than its magic");
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "SXHM")) raise(Errc::BadMagic, "not an SXHM blob");
  if (bytes.size() < 20) raise(Errc::TruncatedFile, "heat map header is incomplete");
  const auto version = load_u32(bytes.data() + 4);
  if (version != kHeatmapVersion) raise(Errc::VersionUnsupported, "blob version " + std::to_string(version));
  const std::uint64_t rows = load_u32(bytes.data() + 8);
  const std::uint64_t cols = load_u32(bytes.data() + 12);
  const std::uint64_t stride = load_u32(bytes.data() + 16);
  constexpr std::uint64_t kMaxSide = 1u << 20;
  if (rows == 0 || cols == 0 || stride == 0 || rows * stride > kMaxSide || cols * stride > kMaxSide) {
    raise(Errc::ParseError, "implausible grid " + std::to_string(rows) + "x" + std::to_string(cols) + " stride " +
                                std::to_string(stride));
  }
  const std::uint64_t expected = 20 + 8 * rows * cols;
  if (bytes.size() < expected) raise(Errc::TruncatedFile, "heat map payload is incomplete");
  if (bytes.size() > expected) raise(Errc::ParseError, "trailing bytes after heat map payload");

  const GridSpec grid(static_cast<int>(rows * stride), static_cast<int>(cols * stride), static_cast<int>(stride));
  Matrix occ(rows, cols), cut(rows, cols);
  const std::uint8_t* p = bytes.data() + 20;
  for (Matrix* m : {&occ, &cut}) {
    for (Eigen::Index r = 0; r < m->rows(); ++r) {
      for (Eigen::Index c = 0; c < m->cols(); ++c, p += 4) (*m)(r, c) = load_f32(p);
    }
  }
  return HeatmapPair(std::move(occ), std::move(cut), grid);
}

RgbImage read_ppm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos]) && tok.size() < 16) tok += static_cast<char>(bytes[pos++]);
    return tok;
  };
  if (next_token() != "P6") raise(Errc::BadMagic, "not a binary PPM");
  const auto w = parse_number<int>(next_token());
  const auto h = parse_number<int>(next_token());
  const auto maxval = parse_number<int>(next_token());
  if (!w || !h || !maxval || *w <= 0 || *h <= 0 || *w > 65536 || *h > 65536) {
    raise(Errc::ParseError, "malformed PPM header");
  }
  if (*maxval != 255) raise(Errc::ParseError, "only 8-bit PPM is supported");
  ++pos;  // single whitespace after maxval
  const std::size_t need = static_cast<std::size_t>(*w) * static_cast<std::size_t>(*h) * 3;
  if (pos > bytes.size() || bytes.size() - pos < need) raise(Errc::TruncatedFile, "PPM pixel data is incomplete");
  RgbImage img{*w, *h, std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                                 bytes.begin() + static_cast<std::ptrdiff_t>(pos + need))};
  return img;
}

Bytes write_ppm(const RgbImage& image) {
  if (image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    raise(Errc::DimensionMismatch, "pixel buffer does not match image size");
  }
  const std::string header = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.insert(out.end(), image.rgb.begin(), image.rgb.end());
  return out;
}

std::array<std::uint8_t, 3> distance_color(const std::optional<double>& distance) {
  if (!distance) return {128, 128, 128};
  const double t = std::clamp(*distance / 50.0, 0.0, 1.0);
  return {static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t))), static_cast<std::uint8_t>(std::lround(255.0 * t)),
          0};
}

Bytes render_overlay_ppm(const StixelWorld& world, int width, int height, const RgbImage* background, double alpha) {
  if (world.image_width() != width || world.image_height() != height) {
    raise(Errc::DimensionMismatch, "world geometry differs from the requested image size");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) raise(Errc::InvalidArgument, "alpha must lie in [0, 1]");
  RgbImage img;
  if (background) {
    if (background->width != width || background->height != height) {
      raise(Errc::DimensionMismatch, "background size differs from the image size");
    }
    img = *background;
  } else {
    img = RgbImage{width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height * 3, 0)};
  }
  const int s = world.stixel_width();
  for (const auto& st : world.stixels()) {
    if (!is_object(st.type())) continue;
    const auto color = distance_color(st.distance());
    for (int v = st.v_top(); v < st.v_bottom(); ++v) {
      for (int u = st.column() * s; u < (st.column() + 1) * s; ++u) {
        auto* px = &img.rgb[(static_cast<std::size_t>(v) * width + u) * 3];
        for (int ch = 0; ch < 3; ++ch) {
          px[ch] = static_cast<std::uint8_t>(std::lround(alpha * color[ch] + (1.0 - alpha) * px[ch]));
        }
      }
    }
  }
  return write_ppm(img);
}

std::string write_contacts_csv(const std::vector<int>& contacts) {
  std::string out = "column,row\n";
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    out += std::to_string(i) + ',' + std::to_string(contacts[i]) + '\n';
  }
  return out;
}

std::vector<int> read_contacts_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]) != "column,row") csv_error(1, "missing header 'column,row'");
  std::vector<int> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 2) csv_error(i + 1, "expected 2 fields");
    const auto col = parse_number<int>(f[0]);
    const auto row = parse_number<int>(f[1]);
    if (!col || !row) csv_error(i + 1, "non-integer field");
    if (*col != static_cast<int>(out.size())) csv_error(i + 1, "columns must be consecutive from 0");
    out.push_back(*row);
  }
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::Io, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string read_text_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(rng() % 1000000007ULL);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::Io, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) raise(Errc::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    raise(Errc::Io, "cannot move output into place at " + path.string());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                                        text.size()));
}

}  // namespace stixelforge::io

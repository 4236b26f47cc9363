#include "stixelforge/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "stixelforge/io.hpp"
#include "stixelforge/metrics.hpp"
#include "stixelforge/synth.hpp"

namespace stixelforge::cli {
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

constexpr std::string_view kKnownSuffixes[] = {".stx.csv", ".contacts.csv", ".calib.txt", ".sxhm", ".bin",
                                               ".csv",     ".ppm",          ".txt"};

std::string frame_stem(const fs::path& p) {
  const std::string name = p.filename().string();
  for (auto suffix : kKnownSuffixes) {
    if (ends_with(name, suffix) && name.size() > suffix.size()) return name.substr(0, name.size() - suffix.size());
  }
  return p.stem().string();
}

struct Frame {
  std::string stem;
  fs::path path;
};

/// Files named directly, plus files with a matching suffix inside named
/// directories, ordered by stem. Duplicate stems are an error.
std::vector<Frame> collect_frames(const std::vector<std::string>& inputs, std::span<const std::string_view> suffixes) {
  std::vector<Frame> frames;
  auto accepts = [&](const std::string& name) {
    return std::any_of(suffixes.begin(), suffixes.end(), [&](std::string_view s) { return ends_with(name, s); });
  };
  for (const auto& in : inputs) {
    const fs::path p(in);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && accepts(entry.path().filename().string())) {
          frames.push_back(Frame{frame_stem(entry.path()), entry.path()});
        }
      }
    } else if (fs::is_regular_file(p, ec)) {
      frames.push_back(Frame{frame_stem(p), p});
    } else {
      raise(Errc::Io, "no such input: " + in);
    }
  }
  std::sort(frames.begin(), frames.end(), [](const Frame& a, const Frame& b) { return a.stem < b.stem; });
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].stem == frames[i - 1].stem) raise(Errc::InvalidArgument, "duplicate frame '" + frames[i].stem + "'");
  }
  return frames;
}

/// Pairs two frame lists by stem; the sets must be identical.
std::vector<std::pair<Frame, Frame>> pair_frames(const std::vector<Frame>& a, const std::vector<Frame>& b) {
  std::vector<std::pair<Frame, Frame>> out;
  std::set<std::string> sa, sb;
  for (const auto& f : a) sa.insert(f.stem);
  for (const auto& f : b) sb.insert(f.stem);
  if (sa != sb) {
    std::string missing;
    for (const auto& s : sa) {
      if (!sb.count(s)) missing += " " + s;
    }
    for (const auto& s : sb) {
      if (!sa.count(s)) missing += " " + s;
    }
    raise(Errc::LengthMismatch, "frame sets differ; unpaired:" + missing);
  }
  for (std::size_t i = 0; i < a.size(); ++i) out.emplace_back(a[i], b[i]);
  return out;
}

template <typename F>
void parallel_for(std::size_t n, int jobs, F&& body) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) body(i);
  };
  const std::size_t extra = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1))) - (n > 0 ? 1 : 0);
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < extra; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

/// Per-frame outcome, filled concurrently and reported in frame order.
struct FrameStatus {
  bool ok = false;
  bool skipped = false;
  std::string message;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) raise(Errc::Io, "cannot create output directory " + dir.string());
}

struct CommonFlags {
  std::string config;
  long long seed = 0;
  int jobs = 1;
  int stride = 8;
  int width = 0;
  int height = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
  CLI::Option* stride_opt = nullptr;
  CLI::Option* width_opt = nullptr;
  CLI::Option* height_opt = nullptr;

  void add_to(CLI::App* app, bool with_dims) {
    app->add_option("--config", config, "key = value config file (fallback: $STIXELFORGE_CONFIG)");
    seed_opt = app->add_option("--seed", seed, "random seed, overrides the config");
    jobs_opt = app->add_option("--jobs,-j", jobs, "worker threads");
    stride_opt = app->add_option("--stride", stride, "grid stride in pixels");
    if (with_dims) {
      width_opt = app->add_option("--width", width, "image width in pixels");
      height_opt = app->add_option("--height", height, "image height in pixels");
    }
  }

  /// Defaults, then the config file, then common flags, then `overrides` (subcommand flags).
  RunConfig resolve(const std::function<void(RunConfig&)>& overrides = {}) const {
    RunConfig cfg;
    std::string path = config;
    if (path.empty()) {
      if (const char* env = std::getenv(std::string(kConfigEnv).c_str()); env && *env) path = env;
    }
    if (!path.empty()) cfg.apply(kv::Document::parse(io::read_text_file(path)));
    if (seed_opt && seed_opt->count()) {
      if (seed < 0) raise(Errc::InvalidArgument, "seed must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(seed);
      cfg.agt.ransac.seed = cfg.seed;
    }
    if (jobs_opt && jobs_opt->count()) cfg.jobs = jobs;
    if (stride_opt && stride_opt->count()) cfg.agt.stride = stride;
    if (width_opt && width_opt->count()) cfg.image_width = width;
    if (height_opt && height_opt->count()) cfg.image_height = height;
    if (overrides) overrides(cfg);
    cfg.validate();
    return cfg;
  }
};

GridSpec grid_from(const RunConfig& cfg) {
  if (!cfg.image_width || !cfg.image_height) {
    raise(Errc::InvalidArgument, "image size unknown: pass --width and --height (or image_width/image_height)");
  }
  return GridSpec(*cfg.image_height, *cfg.image_width, cfg.agt.stride);
}

std::vector<double> parse_sweep(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = spec.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) raise(Errc::InvalidArgument, "sweep must be t0:t1:steps");
  const double t0 = kv::parse_double(spec.substr(0, a));
  const double t1 = kv::parse_double(spec.substr(a + 1, b - a - 1));
  const long long steps = kv::parse_int(spec.substr(b + 1));
  if (steps < 1 || steps > 100000) raise(Errc::InvalidArgument, "sweep steps must lie in [1, 100000]");
  if (!(t0 >= 0.0 && t0 <= 1.0 && t1 >= 0.0 && t1 <= 1.0)) raise(Errc::InvalidArgument, "sweep bounds must lie in [0, 1]");
  std::vector<double> ts;
  for (long long k = 0; k < steps; ++k) {
    const double t = steps == 1 ? t0 : t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(steps - 1);
    ts.push_back(std::round(t * 1e9) / 1e9);
  }
  return ts;
}

StixelWorld load_world(const fs::path& p, const GridSpec& grid) {
  return io::read_stixel_csv(io::read_text_file(p), grid);
}

// Subcommands ---------------------------------------------------------------

int cmd_generate(const CommonFlags& common, const std::vector<std::string>& inputs, const std::string& calib_path,
                 const std::string& out_dir, bool overlay, double alpha, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = common.resolve();
  const Calibration calib = io::read_kitti_calib(io::read_text_file(calib_path));
  const GridSpec grid(calib.intrinsics.height(), calib.intrinsics.width(), cfg.agt.stride);
  static constexpr std::string_view kSuffix[] = {".bin"};
  const auto frames = collect_frames(inputs, kSuffix);
  ensure_dir(out_dir);

  std::vector<FrameStatus> status(frames.size());
  parallel_for(frames.size(), cfg.jobs, [&](std::size_t i) {
    const auto& f = frames[i];
    try {
      const auto cloud = io::read_kitti_velodyne(io::read_file(f.path));
      const auto world = agt::generate_stixel_world(cloud, calib, cfg.agt);
      io::write_file_atomic(fs::path(out_dir) / (f.stem + ".stx.csv"), io::write_stixel_csv(world, f.stem));
      if (overlay) {
        const auto ppm = io::render_overlay_ppm(world, grid.image_width(), grid.image_height(), nullptr, alpha);
        io::write_file_atomic(fs::path(out_dir) / (f.stem + ".ppm"), ppm);
      }
      status[i].ok = true;
    } catch (const Error& e) {
      status[i].skipped = e.code() == Errc::GroundNotFound;
      status[i].message = e.what();
    } catch (const std::exception& e) {
      status[i].message = e.what();
    }
  });

  std::size_t ok = 0, skipped = 0, failed = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (status[i].ok) {
      ++ok;
    } else {
      (status[i].skipped ? skipped : failed) += 1;
      err << frames[i].stem << ": " << (status[i].skipped ? "skipped: " : "error: ") << status[i].message << "\n";
    }
  }
  out << "generate: " << frames.size() << " frames, " << ok << " written, " << skipped << " skipped, " << failed
      << " failed\n";
  if (failed > 0) return kError;
  return skipped > 0 ? kPartial : kOk;
}

int cmd_encode(const CommonFlags& common, const std::vector<std::string>& inputs, const std::string& calib_path,
               const std::string& out_dir, std::ostream& out, std::ostream& err) {
  RunConfig cfg = common.resolve();
  if (!calib_path.empty() && (!cfg.image_width || !cfg.image_height)) {
    const auto calib = io::read_kitti_calib(io::read_text_file(calib_path));
    cfg.image_width = calib.intrinsics.width();
    cfg.image_height = calib.intrinsics.height();
  }
  const GridSpec grid = grid_from(cfg);
  static constexpr std::string_view kSuffix[] = {".stx.csv"};
  const auto frames = collect_frames(inputs, kSuffix);
  ensure_dir(out_dir);
  std::vector<FrameStatus> status(frames.size());
  parallel_for(frames.size(), cfg.jobs, [&](std::size_t i) {
    try {
      const auto targets = codec::encode_targets(load_world(frames[i].path, grid), grid);
      io::write_file_atomic(fs::path(out_dir) / (frames[i].stem + ".sxhm"),
                            io::write_heatmap_blob(codec::targets_as_heatmaps(targets)));
      status[i].ok = true;
    } catch (const std::exception& e) {
      status[i].message = e.what();
    }
  });
  std::size_t failed = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!status[i].ok) {
      ++failed;
      err << frames[i].stem << ": error: " << status[i].message << "\n";
    }
  }
  out << "encode: " << frames.size() - failed << " of " << frames.size() << " frames written\n";
  return failed > 0 ? kError : kOk;
}

int cmd_decode(const CommonFlags& common, const std::vector<std::string>& inputs, const std::string& out_dir,
               std::optional<double> t_occ, std::optional<double> t_cut, std::optional<int> min_run,
               std::ostream& out, std::ostream& err) {
  const RunConfig cfg = common.resolve([&](RunConfig& c) {
    if (t_occ) c.decode.t_occ = *t_occ;
    if (t_cut) c.decode.t_cut = *t_cut;
    if (min_run) c.decode.min_run_cells = *min_run;
  });
  static constexpr std::string_view kSuffix[] = {".sxhm"};
  const auto frames = collect_frames(inputs, kSuffix);
  ensure_dir(out_dir);
  std::vector<FrameStatus> status(frames.size());
  parallel_for(frames.size(), cfg.jobs, [&](std::size_t i) {
    try {
      const auto hm = io::read_heatmap_blob(io::read_file(frames[i].path));
      const auto world = codec::decode_heatmaps(hm, cfg.decode);
      io::write_file_atomic(fs::path(out_dir) / (frames[i].stem + ".stx.csv"),
                            io::write_stixel_csv(world, frames[i].stem));
      status[i].ok = true;
    } catch (const std::exception& e) {
      status[i].message = e.what();
    }
  });
  std::size_t failed = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!status[i].ok) {
      ++failed;
      err << frames[i].stem << ": error: " << status[i].message << "\n";
    }
  }
  out << "decode: " << frames.size() - failed << " of " << frames.size() << " frames written\n";
  return failed > 0 ? kError : kOk;
}

std::string sweep_row(const metrics::SweepRecord& r, bool with_threshold) {
  return (with_threshold ? fmt(r.threshold) : std::string()) + "," + fmt(r.precision_micro) + "," +
         fmt(r.recall_micro) + "," + fmt(r.f1_micro) + "," + fmt(r.precision_macro) + "," + fmt(r.recall_macro) +
         "," + fmt(r.f1_macro);
}

int cmd_eval_stixel(const CommonFlags& common, const std::vector<std::string>& gt_in,
                    const std::vector<std::string>& pred_in, const std::vector<std::string>& heatmap_in,
                    std::optional<double> iou, const std::string& sweep, const std::string& report_path,
                    std::ostream& out) {
  const RunConfig cfg = common.resolve([&](RunConfig& c) {
    if (iou) c.iou_min = *iou;
  });
  if (pred_in.empty() == heatmap_in.empty()) raise(Errc::InvalidArgument, "pass exactly one of --pred or --heatmaps");

  static constexpr std::string_view kCsv[] = {".stx.csv"};
  static constexpr std::string_view kBlob[] = {".sxhm"};
  const auto gt_frames = collect_frames(gt_in, kCsv);
  std::string report = "t,precision_micro,recall_micro,f1_micro,precision_macro,recall_macro,f1_macro\n";

  if (!heatmap_in.empty()) {
    const auto pairs = pair_frames(gt_frames, collect_frames(heatmap_in, kBlob));
    std::vector<HeatmapPair> heatmaps;
    std::vector<StixelWorld> gts;
    for (const auto& [g, h] : pairs) {
      heatmaps.push_back(io::read_heatmap_blob(io::read_file(h.path)));
      if (!(heatmaps.back().grid == heatmaps.front().grid)) raise(Errc::GridMismatch, "heat maps differ in grid");
      gts.push_back(load_world(g.path, heatmaps.back().grid));
    }
    const auto thresholds = parse_sweep(sweep.empty() ? "0.1:0.9:9" : sweep);
    if (pairs.empty()) raise(Errc::InvalidArgument, "no frames to evaluate");
    const auto records = metrics::pr_sweep(gts, heatmaps, thresholds, cfg.decode, cfg.iou_min);
    for (const auto& r : records) report += sweep_row(r, true) + "\n";
    const auto& best = metrics::best_f1(records);
    report += "# operating point: t=" + fmt(best.threshold) + " f1_micro=" + fmt(best.f1_micro) + "\n";
  } else {
    const GridSpec grid = grid_from(cfg);
    const auto pairs = pair_frames(gt_frames, collect_frames(pred_in, kCsv));
    if (pairs.empty()) raise(Errc::InvalidArgument, "no frames to evaluate");
    std::vector<StixelWorld> gts, preds;
    for (const auto& [g, p] : pairs) {
      gts.push_back(load_world(g.path, grid));
      preds.push_back(load_world(p.path, grid));
    }
    const auto rec = metrics::aggregate_matches(gts, preds, cfg.iou_min, 0.0);
    report += sweep_row(rec, false) + "\n";
  }

  out << report;
  if (!report_path.empty()) io::write_file_atomic(report_path, report);
  return kOk;
}

std::vector<int> load_contacts(const Frame& f, const RunConfig& cfg) {
  if (ends_with(f.path.filename().string(), ".stx.csv")) {
    return metrics::bottom_contact_per_column(load_world(f.path, grid_from(cfg)));
  }
  return io::read_contacts_csv(io::read_text_file(f.path));
}

int cmd_eval_freespace(const CommonFlags& common, const std::vector<std::string>& gt_in,
                       const std::vector<std::string>& pred_in, const std::string& per_column_path,
                       std::ostream& out) {
  const RunConfig cfg = common.resolve();
  if (!cfg.image_height) raise(Errc::InvalidArgument, "image height unknown: pass --height (or image_height)");
  static constexpr std::string_view kSuffix[] = {".stx.csv", ".contacts.csv"};
  const auto pairs = pair_frames(collect_frames(gt_in, kSuffix), collect_frames(pred_in, kSuffix));
  if (pairs.empty()) raise(Errc::InvalidArgument, "no frames to evaluate");

  std::vector<metrics::FreespaceReport> reports;
  std::string dump = "frame,column,score\n";
  for (const auto& [g, p] : pairs) {
    const auto gt = load_contacts(g, cfg);
    const auto pred = load_contacts(p, cfg);
    reports.push_back(metrics::freespace_score(gt, pred, *cfg.image_height));
    std::size_t k = 0;
    for (std::size_t c = 0; c < gt.size(); ++c) {
      if (gt[c] == metrics::kNoContact || gt[c] == 0) continue;
      dump += g.stem + "," + std::to_string(c) + "," + fmt(reports.back().per_column[k++]) + "\n";
    }
  }
  const auto total = metrics::aggregate_freespace(reports);
  out << "frames,columns,score,sigma\n"
      << pairs.size() << "," << total.evaluated_columns() << "," << fmt(total.score) << "," << fmt(total.sigma)
      << "\n";
  if (!per_column_path.empty()) io::write_file_atomic(per_column_path, dump);
  return kOk;
}

int cmd_synth(const CommonFlags& common, const std::string& scene_path, const std::string& out_dir,
              std::string name, std::ostream& out) {
  const RunConfig cfg = common.resolve();
  auto spec = synth::parse_scene(io::read_text_file(scene_path));
  if (common.seed_opt && common.seed_opt->count()) spec.seed = cfg.seed;
  if (name.empty()) name = fs::path(scene_path).stem().string();
  const Calibration calib = spec.camera.calibration();
  const GridSpec grid(calib.intrinsics.height(), calib.intrinsics.width(), cfg.agt.stride);

  const auto cloud = synth::simulate_lidar(spec);
  const auto oracle = synth::oracle_stixel_world(spec, calib, grid, cfg.agt.ground_attach_delta,
                                                 cfg.agt.min_stixel_height);
  ensure_dir(out_dir);
  const fs::path dir(out_dir);
  io::write_file_atomic(dir / (name + ".bin"), io::write_kitti_velodyne(cloud));
  io::write_file_atomic(dir / (name + ".stx.csv"), io::write_stixel_csv(oracle, name));
  io::write_file_atomic(dir / (name + ".calib.txt"), io::write_kitti_calib(calib));
  out << "synth: " << cloud.size() << " points, " << oracle.object_stixels().size() << " object stixels -> "
      << (dir / name).string() << ".{bin,stx.csv,calib.txt}\n";
  return kOk;
}

}  // namespace

void RunConfig::apply(const kv::Document& doc) {
  for (const auto& e : doc.entries()) {
    const auto& k = e.key;
    auto d = [&] { return kv::parse_double(e.value, e.line); };
    auto i = [&] {
      const auto v = kv::parse_int(e.value, e.line);
      if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        raise(Errc::ParseError, "line " + std::to_string(e.line) + ": integer out of range");
      }
      return static_cast<int>(v);
    };
    if (k == "seed") {
      const auto v = kv::parse_int(e.value, e.line);
      if (v < 0) raise(Errc::ParseError, "line " + std::to_string(e.line) + ": seed must be >= 0");
      seed = static_cast<std::uint64_t>(v);
      agt.ransac.seed = seed;
    } else if (k == "jobs") {
      jobs = i();
    } else if (k == "stride") {
      agt.stride = i();
    } else if (k == "image_width") {
      image_width = i();
    } else if (k == "image_height") {
      image_height = i();
    } else if (k == "iou") {
      iou_min = d();
    } else if (k == "t_occ") {
      decode.t_occ = d();
    } else if (k == "t_cut") {
      decode.t_cut = d();
    } else if (k == "min_run") {
      decode.min_run_cells = i();
    } else if (k == "ransac.iterations") {
      agt.ransac.iterations = i();
    } else if (k == "ransac.inlier_threshold") {
      agt.ransac.inlier_threshold = d();
    } else if (k == "ransac.stage2_threshold") {
      agt.ransac.stage2_threshold = d();
    } else if (k == "ransac.height_prior") {
      agt.ransac.height_prior = d();
    } else if (k == "ransac.min_inlier_fraction") {
      agt.ransac.min_inlier_fraction = d();
    } else if (k == "dbscan.eps") {
      agt.dbscan.eps = d();
    } else if (k == "dbscan.min_pts") {
      agt.dbscan.min_pts = i();
    } else if (k == "agt.hpr_gamma") {
      agt.hpr_gamma = d();
    } else if (k == "agt.ground_attach_delta") {
      agt.ground_attach_delta = d();
    } else if (k == "agt.min_stixel_height") {
      agt.min_stixel_height = i();
    } else if (k == "loss.alpha") {
      weights.alpha = d();
    } else if (k == "loss.beta") {
      weights.beta = d();
    } else if (k == "loss.gamma") {
      weights.gamma = d();
    } else {
      raise(Errc::ParseError, "line " + std::to_string(e.line) + ": unknown config key '" + k + "'");
    }
  }
}

void RunConfig::validate() const {
  agt.validate();
  decode.validate();
  weights.validate();
  if (!(iou_min > 0.0 && iou_min <= 1.0)) raise(Errc::InvalidArgument, "iou must lie in (0, 1]");
  if (jobs < 1 || jobs > 1024) raise(Errc::InvalidArgument, "jobs must lie in [1, 1024]");
  if (image_width && *image_width <= 0) raise(Errc::InvalidArgument, "image width must be positive");
  if (image_height && *image_height <= 0) raise(Errc::InvalidArgument, "image height must be positive");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stixel ground truth, heat-map codec and evaluation tools", "stixelforge"};
  app.require_subcommand(1);

  std::function<int()> action;
  // One flag set per subcommand so option handles stay distinct.
  std::array<CommonFlags, 6> flags;

  std::vector<std::string> inputs;
  std::string calib_path, out_dir;
  bool overlay = false;
  double alpha = 0.5;
  auto* gen = app.add_subcommand("generate", "LiDAR scans + calibration -> Stixel CSV per frame");
  flags[0].add_to(gen, false);
  gen->add_option("inputs", inputs, "velodyne .bin files or directories")->required();
  gen->add_option("--calib", calib_path, "KITTI calibration file")->required();
  gen->add_option("--out,-o", out_dir, "output directory")->required();
  gen->add_flag("--overlay", overlay, "also write a PPM overlay per frame");
  gen->add_option("--alpha", alpha, "overlay opacity in [0, 1]");
  gen->callback([&] {
    action = [&] { return cmd_generate(flags[0], inputs, calib_path, out_dir, overlay, alpha, out, err); };
  });

  auto* enc = app.add_subcommand("encode", "Stixel CSV -> occupancy/cut heat-map blob");
  flags[1].add_to(enc, true);
  enc->add_option("inputs", inputs, ".stx.csv files or directories")->required();
  enc->add_option("--calib", calib_path, "take the image size from a calibration file");
  enc->add_option("--out,-o", out_dir, "output directory")->required();
  enc->callback([&] { action = [&] { return cmd_encode(flags[1], inputs, calib_path, out_dir, out, err); }; });

  double t_occ = 0.5, t_cut = 0.5;
  int min_run = 1;
  CLI::Option *t_occ_opt = nullptr, *t_cut_opt = nullptr, *min_run_opt = nullptr;
  auto* dec = app.add_subcommand("decode", "heat-map blob -> Stixel CSV");
  flags[2].add_to(dec, false);
  dec->add_option("inputs", inputs, ".sxhm files or directories")->required();
  dec->add_option("--out,-o", out_dir, "output directory")->required();
  t_occ_opt = dec->add_option("--t-occ", t_occ, "occupancy threshold (default 0.5)");
  t_cut_opt = dec->add_option("--t-cut", t_cut, "cut threshold (default 0.5)");
  min_run_opt = dec->add_option("--min-run", min_run, "shortest run kept, in cells (default 1)");
  dec->callback([&] {
    action = [&] {
      return cmd_decode(flags[2], inputs, out_dir, t_occ_opt->count() ? std::optional(t_occ) : std::nullopt,
                        t_cut_opt->count() ? std::optional(t_cut) : std::nullopt,
                        min_run_opt->count() ? std::optional(min_run) : std::nullopt, out, err);
    };
  });

  std::vector<std::string> gt_in, pred_in, heatmap_in;
  double iou = 0.5;
  std::string sweep, report_path;
  auto* evs = app.add_subcommand("eval-stixel", "precision / recall / F1 of Stixel predictions");
  flags[3].add_to(evs, true);
  evs->add_option("--gt", gt_in, "ground-truth .stx.csv files or directories")->required();
  evs->add_option("--pred", pred_in, "predicted .stx.csv files or directories");
  evs->add_option("--heatmaps", heatmap_in, "predicted .sxhm files or directories");
  auto* iou_opt = evs->add_option("--iou", iou, "IoU needed for a match (default 0.5)");
  evs->add_option("--sweep", sweep, "occupancy thresholds t0:t1:steps (default 0.1:0.9:9)");
  evs->add_option("--report", report_path, "also write the CSV report here");
  evs->callback([&] {
    action = [&] {
      return cmd_eval_stixel(flags[3], gt_in, pred_in, heatmap_in, iou_opt->count() ? std::optional(iou) : std::nullopt,
                             sweep, report_path, out);
    };
  });

  std::string per_column;
  auto* evf = app.add_subcommand("eval-freespace", "column-wise free-space score");
  flags[4].add_to(evf, true);
  evf->add_option("--gt", gt_in, "ground-truth contacts (.contacts.csv) or worlds (.stx.csv)")->required();
  evf->add_option("--pred", pred_in, "predicted contacts or worlds")->required();
  evf->add_option("--per-column", per_column, "write per-column scores to this CSV");
  evf->callback([&] { action = [&] { return cmd_eval_freespace(flags[4], gt_in, pred_in, per_column, out); }; });

  std::string scene_path, name;
  auto* syn = app.add_subcommand("synth", "scene file -> LiDAR scan, oracle Stixels and calibration");
  flags[5].add_to(syn, false);
  syn->add_option("--scene", scene_path, "scene description")->required();
  syn->add_option("--out,-o", out_dir, "output directory")->required();
  syn->add_option("--name", name, "output file stem (default: scene file stem)");
  syn->callback([&] { action = [&] { return cmd_synth(flags[5], scene_path, out_dir, name, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }

  try {
    return action ? action() : kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

}  // namespace stixelforge::cli

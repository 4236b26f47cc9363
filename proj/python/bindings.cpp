#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stixelforge/agt.hpp"
#include "stixelforge/cli.hpp"
#include "stixelforge/cluster.hpp"
#include "stixelforge/codec.hpp"
#include "stixelforge/geometry.hpp"
#include "stixelforge/ground.hpp"
#include "stixelforge/io.hpp"
#include "stixelforge/loss.hpp"
#include "stixelforge/metrics.hpp"
#include "stixelforge/synth.hpp"

namespace py = pybind11;
using namespace stixelforge;

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

std::vector<Point3> to_points(const Eigen::Ref<const Points>& m) {
  std::vector<Point3> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.emplace_back(m(i, 0), m(i, 1), m(i, 2));
  return out;
}

Points to_array(const std::vector<Point3>& pts) {
  Points m(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return m;
}

PointCloud cloud(const Eigen::Ref<const Points>& m, Frame frame) { return PointCloud(to_points(m), frame); }

py::bytes as_bytes(const io::Bytes& b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

io::Bytes from_bytes(const py::bytes& b) {
  const std::string s = b;
  return io::Bytes(s.begin(), s.end());
}

py::dict report_dict(const metrics::MatchReport& r) {
  py::dict d;
  d["true_positives"] = r.true_positives;
  d["false_positives"] = r.false_positives;
  d["false_negatives"] = r.false_negatives;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  return d;
}

py::dict sweep_dict(const metrics::SweepRecord& r) {
  py::dict d;
  d["threshold"] = r.threshold;
  d["precision_micro"] = r.precision_micro;
  d["recall_micro"] = r.recall_micro;
  d["f1_micro"] = r.f1_micro;
  d["precision_macro"] = r.precision_macro;
  d["recall_macro"] = r.recall_macro;
  d["f1_macro"] = r.f1_macro;
  return d;
}

metrics::SweepRecord sweep_from(const py::dict& d) {
  metrics::SweepRecord r;
  r.threshold = d["threshold"].cast<double>();
  r.precision_micro = d["precision_micro"].cast<double>();
  r.recall_micro = d["recall_micro"].cast<double>();
  r.f1_micro = d["f1_micro"].cast<double>();
  r.precision_macro = d["precision_macro"].cast<double>();
  r.recall_macro = d["recall_macro"].cast<double>();
  r.f1_macro = d["f1_macro"].cast<double>();
  return r;
}

}  // namespace

PYBIND11_MODULE(_stixelforge, m) {
  m.doc() = "Stixel-World ground truth, heat-map codec, losses and evaluation";

  static py::exception<Error> error_type(m, "StixelforgeError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(errc_name(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::enum_<StixelType>(m, "StixelType")
      .value("Ground", StixelType::Ground)
      .value("GroundObject", StixelType::GroundObject)
      .value("SwibObject", StixelType::SwibObject)
      .value("Sky", StixelType::Sky);

  py::class_<Stixel>(m, "Stixel")
      .def(py::init<int, int, int, StixelType, std::optional<double>>(), py::arg("column"), py::arg("v_top"),
           py::arg("v_bottom"), py::arg("type"), py::arg("distance") = std::nullopt)
      .def_property_readonly("column", &Stixel::column)
      .def_property_readonly("v_top", &Stixel::v_top)
      .def_property_readonly("v_bottom", &Stixel::v_bottom)
      .def_property_readonly("height", &Stixel::height)
      .def_property_readonly("type", &Stixel::type)
      .def_property_readonly("distance", &Stixel::distance)
      .def("__eq__", [](const Stixel& a, const Stixel& b) { return a == b; })
      .def("__repr__", [](const Stixel& s) {
        std::ostringstream os;
        os << "Stixel(column=" << s.column() << ", v_top=" << s.v_top() << ", v_bottom=" << s.v_bottom()
           << ", type=" << stixel_type_code(s.type()) << ")";
        return os.str();
      });

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<int, int, int>(), py::arg("image_height"), py::arg("image_width"), py::arg("stride"))
      .def_property_readonly("stride", &GridSpec::stride)
      .def_property_readonly("rows", &GridSpec::rows)
      .def_property_readonly("cols", &GridSpec::cols)
      .def_property_readonly("image_height", &GridSpec::image_height)
      .def_property_readonly("image_width", &GridSpec::image_width)
      .def_property_readonly("tensor_shape",
                             [](const GridSpec& g) {
                               const auto s = g.tensor_shape();
                               return py::make_tuple(s[0], s[1], s[2]);
                             })
      .def("__eq__", [](const GridSpec& a, const GridSpec& b) { return a == b; });

  py::class_<StixelWorld>(m, "StixelWorld")
      .def(py::init<std::vector<Stixel>, int, int, int>(), py::arg("stixels"), py::arg("image_width"),
           py::arg("image_height"), py::arg("stixel_width"))
      .def(py::init<std::vector<Stixel>, const GridSpec&>(), py::arg("stixels"), py::arg("grid"))
      .def_property_readonly("stixels", &StixelWorld::stixels)
      .def_property_readonly("image_width", &StixelWorld::image_width)
      .def_property_readonly("image_height", &StixelWorld::image_height)
      .def_property_readonly("stixel_width", &StixelWorld::stixel_width)
      .def_property_readonly("columns", &StixelWorld::columns)
      .def_property_readonly("grid", &StixelWorld::grid)
      .def("object_stixels", &StixelWorld::object_stixels)
      .def("column_stixels", &StixelWorld::column_stixels, py::arg("column"))
      .def("__eq__", [](const StixelWorld& a, const StixelWorld& b) { return a == b; })
      .def("__len__", [](const StixelWorld& w) { return w.stixels().size(); });

  py::class_<CameraIntrinsics>(m, "CameraIntrinsics")
      .def(py::init<double, double, double, double, int, int>(), py::arg("fx"), py::arg("fy"), py::arg("cx"),
           py::arg("cy"), py::arg("width"), py::arg("height"))
      .def_property_readonly("fx", &CameraIntrinsics::fx)
      .def_property_readonly("fy", &CameraIntrinsics::fy)
      .def_property_readonly("cx", &CameraIntrinsics::cx)
      .def_property_readonly("cy", &CameraIntrinsics::cy)
      .def_property_readonly("width", &CameraIntrinsics::width)
      .def_property_readonly("height", &CameraIntrinsics::height);

  py::class_<Extrinsics>(m, "Extrinsics")
      .def(py::init<>())
      .def(py::init<const Mat3&, const Vec3&>(), py::arg("rotation"), py::arg("translation"))
      .def_property_readonly("rotation", &Extrinsics::rotation)
      .def_property_readonly("translation", &Extrinsics::translation)
      .def("apply", &Extrinsics::apply)
      .def("inverse", &Extrinsics::inverse);

  py::class_<Calibration>(m, "Calibration")
      .def(py::init<CameraIntrinsics, Extrinsics>(), py::arg("intrinsics"), py::arg("extrinsics"))
      .def_readonly("intrinsics", &Calibration::intrinsics)
      .def_readonly("extrinsics", &Calibration::extrinsics);

  py::class_<Plane>(m, "Plane")
      .def(py::init<const Vec3&, double>(), py::arg("normal"), py::arg("offset"))
      .def_property_readonly("normal", &Plane::normal)
      .def_property_readonly("offset", &Plane::offset)
      .def("signed_distance", &Plane::signed_distance);

  py::class_<HeatmapPair>(m, "HeatmapPair")
      .def(py::init<Matrix, Matrix, const GridSpec&>(), py::arg("occ"), py::arg("cut"), py::arg("grid"))
      .def_readonly("occ", &HeatmapPair::occ)
      .def_readonly("cut", &HeatmapPair::cut)
      .def_readonly("grid", &HeatmapPair::grid);

  py::class_<TargetGrid>(m, "TargetGrid")
      .def_readonly("occ", &TargetGrid::occ)
      .def_readonly("cut", &TargetGrid::cut)
      .def_readonly("grid", &TargetGrid::grid);

  // geometry
  m.def(
      "transform_to_camera",
      [](const Eigen::Ref<const Points>& pts, const Extrinsics& ext) {
        return to_array(geometry::transform_to_camera(cloud(pts, Frame::Sensor), ext).points());
      },
      py::arg("points"), py::arg("extrinsics"));
  m.def(
      "project_point",
      [](const CameraIntrinsics& intr, const Vec3& p) {
        const auto px = geometry::project_point(intr, p);
        return py::make_tuple(px.u, px.v);
      },
      py::arg("intrinsics"), py::arg("point"));
  m.def(
      "horizon_row",
      [](const CameraIntrinsics& intr, const Plane& plane, double u) { return geometry::horizon_row(intr, plane, u); },
      py::arg("intrinsics"), py::arg("plane"), py::arg("u"));
  m.def(
      "remove_hidden_points",
      [](const Eigen::Ref<const Points>& pts, double gamma) {
        return geometry::remove_hidden_points(cloud(pts, Frame::Camera), gamma);
      },
      py::arg("points"), py::arg("gamma") = 1.0);

  // ground
  py::class_<ground::RansacConfig>(m, "RansacConfig")
      .def(py::init<>())
      .def_readwrite("iterations", &ground::RansacConfig::iterations)
      .def_readwrite("inlier_threshold", &ground::RansacConfig::inlier_threshold)
      .def_readwrite("stage2_threshold", &ground::RansacConfig::stage2_threshold)
      .def_readwrite("height_prior", &ground::RansacConfig::height_prior)
      .def_readwrite("min_inlier_fraction", &ground::RansacConfig::min_inlier_fraction)
      .def_readwrite("seed", &ground::RansacConfig::seed);
  m.def(
      "fit_plane_ransac",
      [](const Eigen::Ref<const Points>& pts, double threshold, int iterations, std::uint64_t seed) {
        const auto fit = ground::fit_plane_ransac(cloud(pts, Frame::Camera), threshold, iterations, seed);
        return py::make_tuple(fit.plane, fit.inliers);
      },
      py::arg("points"), py::arg("threshold"), py::arg("iterations"), py::arg("seed"));
  m.def(
      "two_stage_ground",
      [](const Eigen::Ref<const Points>& pts, const ground::RansacConfig& cfg) {
        const auto res = ground::two_stage_ground(cloud(pts, Frame::Camera), cfg);
        return py::make_tuple(res.plane, res.ground, res.stage1_inliers);
      },
      py::arg("points"), py::arg("config") = ground::RansacConfig{});

  // cluster
  py::class_<cluster::DbscanConfig>(m, "DbscanConfig")
      .def(py::init<>())
      .def_readwrite("eps", &cluster::DbscanConfig::eps)
      .def_readwrite("min_pts", &cluster::DbscanConfig::min_pts);
  m.def(
      "dbscan",
      [](const Eigen::Ref<const Points>& pts, double eps, int min_pts) {
        return cluster::dbscan(to_points(pts), cluster::DbscanConfig{eps, min_pts});
      },
      py::arg("points"), py::arg("eps"), py::arg("min_pts"));
  m.attr("NOISE") = cluster::kNoise;

  // agt
  py::class_<agt::AgtConfig>(m, "AgtConfig")
      .def(py::init<>())
      .def_readwrite("ransac", &agt::AgtConfig::ransac)
      .def_readwrite("dbscan", &agt::AgtConfig::dbscan)
      .def_readwrite("hpr_gamma", &agt::AgtConfig::hpr_gamma)
      .def_readwrite("ground_attach_delta", &agt::AgtConfig::ground_attach_delta)
      .def_readwrite("min_stixel_height", &agt::AgtConfig::min_stixel_height)
      .def_readwrite("stride", &agt::AgtConfig::stride);
  m.def(
      "generate_stixel_world",
      [](const Eigen::Ref<const Points>& pts, const Calibration& calib, const agt::AgtConfig& cfg) {
        return agt::generate_stixel_world(cloud(pts, Frame::Sensor), calib, cfg);
      },
      py::arg("points"), py::arg("calibration"), py::arg("config") = agt::AgtConfig{});

  // codec
  m.def("encode_targets", &codec::encode_targets, py::arg("world"), py::arg("grid"));
  m.def("targets_as_heatmaps", &codec::targets_as_heatmaps, py::arg("targets"));
  m.def("normalize_heatmaps", &codec::normalize_heatmaps, py::arg("raw_occ"), py::arg("raw_cut"), py::arg("grid"));
  m.def(
      "decode_heatmaps",
      [](const HeatmapPair& hm, double t_occ, double t_cut, int min_run_cells) {
        return codec::decode_heatmaps(hm, codec::DecodeConfig{t_occ, t_cut, min_run_cells});
      },
      py::arg("heatmaps"), py::arg("t_occ") = 0.5, py::arg("t_cut") = 0.5, py::arg("min_run_cells") = 1);

  // loss
  m.def("bce_loss", &loss::bce_loss, py::arg("target"), py::arg("prediction"));
  m.def("sum_loss", &loss::sum_loss, py::arg("prediction"));
  m.def(
      "total_loss",
      [](Matrix occ, Matrix cut, Matrix t_occ, Matrix t_cut, double alpha, double beta, double gamma) {
        return loss::total_loss(loss::PredictionPair(std::move(occ), std::move(cut), std::move(t_occ), std::move(t_cut)),
                                {alpha, beta, gamma});
      },
      py::arg("occ"), py::arg("cut"), py::arg("target_occ"), py::arg("target_cut"), py::arg("alpha") = 1.0,
      py::arg("beta") = 0.1, py::arg("gamma") = 1.0);
  m.def(
      "loss_gradient",
      [](Matrix occ, Matrix cut, Matrix t_occ, Matrix t_cut, double alpha, double beta, double gamma) {
        const auto g = loss::loss_gradient(
            loss::PredictionPair(std::move(occ), std::move(cut), std::move(t_occ), std::move(t_cut)),
            {alpha, beta, gamma});
        return py::make_tuple(g.occ, g.cut);
      },
      py::arg("occ"), py::arg("cut"), py::arg("target_occ"), py::arg("target_cut"), py::arg("alpha") = 1.0,
      py::arg("beta") = 0.1, py::arg("gamma") = 1.0);

  // metrics
  m.def("stixel_iou", &metrics::stixel_iou, py::arg("a"), py::arg("b"));
  m.def(
      "match_worlds",
      [](const StixelWorld& gt, const StixelWorld& pred, double iou_min) {
        return report_dict(metrics::match_worlds(gt, pred, iou_min));
      },
      py::arg("gt"), py::arg("pred"), py::arg("iou_min") = 0.5);
  m.def(
      "pr_sweep",
      [](const std::vector<StixelWorld>& gt, const std::vector<HeatmapPair>& hms, const std::vector<double>& ts,
         double iou_min) {
        py::list out;
        for (const auto& r : metrics::pr_sweep(gt, hms, ts, codec::DecodeConfig{}, iou_min)) out.append(sweep_dict(r));
        return out;
      },
      py::arg("gt"), py::arg("heatmaps"), py::arg("thresholds"), py::arg("iou_min") = 0.5);
  m.def(
      "best_f1",
      [](const std::vector<py::dict>& records) {
        std::vector<metrics::SweepRecord> rs;
        for (const auto& d : records) rs.push_back(sweep_from(d));
        return sweep_dict(metrics::best_f1(rs));
      },
      py::arg("records"));
  m.def("bottom_contact_per_column", &metrics::bottom_contact_per_column, py::arg("world"));
  m.def(
      "freespace_score",
      [](const std::vector<int>& gt, const std::vector<int>& pred, int image_height) {
        const auto r = metrics::freespace_score(gt, pred, image_height);
        return py::make_tuple(r.score, r.sigma, r.per_column);
      },
      py::arg("gt_contacts"), py::arg("pred_contacts"), py::arg("image_height"));
  m.attr("NO_CONTACT") = metrics::kNoContact;

  // synth
  py::class_<synth::SceneSpec>(m, "SceneSpec")
      .def_readwrite("seed", &synth::SceneSpec::seed)
      .def("calibration", [](const synth::SceneSpec& s) { return s.camera.calibration(); });
  m.def("parse_scene", &synth::parse_scene, py::arg("text"));
  m.def(
      "simulate_lidar", [](const synth::SceneSpec& spec) { return to_array(synth::simulate_lidar(spec).points()); },
      py::arg("scene"));
  m.def(
      "oracle_stixel_world",
      [](const synth::SceneSpec& spec, int stride) {
        const auto calib = spec.camera.calibration();
        return synth::oracle_stixel_world(spec, calib,
                                          GridSpec(calib.intrinsics.height(), calib.intrinsics.width(), stride));
      },
      py::arg("scene"), py::arg("stride") = 8);

  // io
  m.def(
      "read_kitti_velodyne", [](const py::bytes& b) { return to_array(io::read_kitti_velodyne(from_bytes(b)).points()); },
      py::arg("data"));
  m.def(
      "write_kitti_velodyne",
      [](const Eigen::Ref<const Points>& pts) { return as_bytes(io::write_kitti_velodyne(cloud(pts, Frame::Sensor))); },
      py::arg("points"));
  m.def("read_kitti_calib", &io::read_kitti_calib, py::arg("text"));
  m.def("write_kitti_calib", &io::write_kitti_calib, py::arg("calibration"));
  m.def("write_stixel_csv", &io::write_stixel_csv, py::arg("world"), py::arg("frame_id") = "");
  m.def("read_stixel_csv", &io::read_stixel_csv, py::arg("text"), py::arg("grid"));
  m.def(
      "write_heatmap_blob", [](const HeatmapPair& hm) { return as_bytes(io::write_heatmap_blob(hm)); },
      py::arg("heatmaps"));
  m.def(
      "read_heatmap_blob", [](const py::bytes& b) { return io::read_heatmap_blob(from_bytes(b)); }, py::arg("data"));

  // command line
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}

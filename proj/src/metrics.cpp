#include "stixelforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

namespace stixelforge::metrics {
namespace {

void require_same_geometry(const StixelWorld& a, const StixelWorld& b) {
  if (a.image_width() != b.image_width() || a.image_height() != b.image_height() ||
      a.stixel_width() != b.stixel_width()) {
    raise(Errc::GridMismatch, "worlds differ in image size or stride");
  }
}

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

Counts count_matches(const StixelWorld& gt, const StixelWorld& pred, double iou_min) {
  require_same_geometry(gt, pred);
  std::map<int, std::vector<Stixel>> gt_cols, pred_cols;
  for (const auto& s : gt.stixels()) {
    if (is_object(s.type())) gt_cols[s.column()].push_back(s);
  }
  for (const auto& s : pred.stixels()) {
    if (is_object(s.type())) pred_cols[s.column()].push_back(s);
  }

  Counts c;
  std::size_t total_pred = 0;
  for (const auto& [col, preds] : pred_cols) total_pred += preds.size();

  for (auto& [col, gts] : gt_cols) {
    std::sort(gts.begin(), gts.end(), [](const Stixel& a, const Stixel& b) { return a.v_top() < b.v_top(); });
    auto it = pred_cols.find(col);
    std::vector<Stixel> empty;
    const auto& preds = it == pred_cols.end() ? empty : it->second;
    std::vector<char> claimed(preds.size(), 0);
    for (const auto& g : gts) {
      std::size_t best = preds.size();
      double best_iou = -1.0;
      for (std::size_t k = 0; k < preds.size(); ++k) {
        if (claimed[k]) continue;
        const double iou = stixel_iou(g, preds[k]);
        if (iou > best_iou || (iou == best_iou && preds[k].v_top() < preds[best].v_top())) {
          best_iou = iou;
          best = k;
        }
      }
      if (best < preds.size() && best_iou >= iou_min) {
        claimed[best] = 1;
        ++c.tp;
      } else {
        ++c.fn;
      }
    }
  }
  c.fp = total_pred - c.tp;
  return c;
}

double population_stddev(const std::vector<double>& v, double mean) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

MatchReport MatchReport::from_counts(std::size_t tp, std::size_t fp, std::size_t fn, double threshold) {
  MatchReport r;
  r.true_positives = tp;
  r.false_positives = fp;
  r.false_negatives = fn;
  r.threshold = threshold;
  r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

double stixel_iou(const Stixel& a, const Stixel& b) {
  if (a.column() != b.column()) raise(Errc::ColumnMismatch, "IoU needs stixels of the same column");
  const int inter = std::max(0, std::min(a.v_bottom(), b.v_bottom()) - std::max(a.v_top(), b.v_top()));
  const int uni = a.height() + b.height() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

MatchReport match_worlds(const StixelWorld& gt, const StixelWorld& pred, double iou_min) {
  const auto c = count_matches(gt, pred, iou_min);
  return MatchReport::from_counts(c.tp, c.fp, c.fn);
}

SweepRecord aggregate_matches(const std::vector<StixelWorld>& gt, const std::vector<StixelWorld>& pred,
                              double iou_min, double threshold) {
  if (gt.size() != pred.size()) raise(Errc::LengthMismatch, "ground truth and predictions differ in frame count");
  Counts total;
  double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
  std::size_t frames = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const auto c = count_matches(gt[i], pred[i], iou_min);
    total.tp += c.tp;
    total.fp += c.fp;
    total.fn += c.fn;
    if (c.tp + c.fp + c.fn == 0) continue;
    const auto frame = MatchReport::from_counts(c.tp, c.fp, c.fn);
    p_sum += frame.precision;
    r_sum += frame.recall;
    f_sum += frame.f1;
    ++frames;
  }
  const auto micro = MatchReport::from_counts(total.tp, total.fp, total.fn);
  SweepRecord rec;
  rec.threshold = threshold;
  rec.precision_micro = micro.precision;
  rec.recall_micro = micro.recall;
  rec.f1_micro = micro.f1;
  if (frames > 0) {
    rec.precision_macro = p_sum / static_cast<double>(frames);
    rec.recall_macro = r_sum / static_cast<double>(frames);
    rec.f1_macro = f_sum / static_cast<double>(frames);
  }
  return rec;
}

std::vector<SweepRecord> pr_sweep(const std::vector<StixelWorld>& gt, const std::vector<HeatmapPair>& heatmaps,
                                  const std::vector<double>& thresholds, const codec::DecodeConfig& decode_cfg,
                                  double iou_min) {
  if (gt.size() != heatmaps.size()) raise(Errc::LengthMismatch, "ground truth and heat maps differ in frame count");
  std::vector<SweepRecord> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    codec::DecodeConfig cfg = decode_cfg;
    cfg.t_occ = t;
    std::vector<StixelWorld> decoded;
    decoded.reserve(heatmaps.size());
    for (const auto& hm : heatmaps) decoded.push_back(codec::decode_heatmaps(hm, cfg));
    out.push_back(aggregate_matches(gt, decoded, iou_min, t));
  }
  return out;
}

const SweepRecord& best_f1(const std::vector<SweepRecord>& records) {
  if (records.empty()) raise(Errc::InvalidArgument, "empty sweep");
  auto best = records.begin();
  for (auto it = records.begin(); it != records.end(); ++it) {
    if (it->f1_micro > best->f1_micro) best = it;
  }
  return *best;
}

std::vector<int> bottom_contact_per_column(const StixelWorld& world) {
  std::vector<int> contacts(static_cast<std::size_t>(world.image_width()), kNoContact);
  const int s = world.stixel_width();
  for (const auto& st : world.stixels()) {
    if (!is_object(st.type())) continue;
    for (int u = st.column() * s; u < (st.column() + 1) * s; ++u) {
      contacts[static_cast<std::size_t>(u)] = std::max(contacts[static_cast<std::size_t>(u)], st.v_bottom());
    }
  }
  return contacts;
}

FreespaceReport freespace_score(const std::vector<int>& gt_contacts, const std::vector<int>& pred_contacts,
                                int image_height) {
  if (gt_contacts.size() != pred_contacts.size()) {
    raise(Errc::LengthMismatch, "contact lists differ in length (" + std::to_string(gt_contacts.size()) + " vs " +
                                    std::to_string(pred_contacts.size()) + ")");
  }
  auto valid = [image_height](int row) { return row == kNoContact || (row >= 0 && row <= image_height); };
  FreespaceReport report;
  for (std::size_t i = 0; i < gt_contacts.size(); ++i) {
    const int gt = gt_contacts[i];
    const int pred = pred_contacts[i];
    if (!valid(gt) || !valid(pred)) raise(Errc::InvalidArgument, "contact row outside the image");
    if (gt == kNoContact || gt == 0) continue;
    const double points = gt;
    const double penalty = pred == kNoContact ? points : std::min(points, static_cast<double>(std::abs(pred - gt)));
    report.per_column.push_back(std::max(0.0, points - penalty) / points * 100.0);
  }
  if (!report.per_column.empty()) {
    double sum = 0.0;
    for (double v : report.per_column) sum += v;
    report.score = sum / static_cast<double>(report.per_column.size());
    report.sigma = population_stddev(report.per_column, report.score);
  }
  return report;
}

FreespaceReport aggregate_freespace(const std::vector<FreespaceReport>& frames) {
  FreespaceReport out;
  std::size_t used = 0;
  for (const auto& f : frames) {
    if (f.per_column.empty()) continue;
    out.score += f.score;
    out.sigma += f.sigma;
    out.per_column.insert(out.per_column.end(), f.per_column.begin(), f.per_column.end());
    ++used;
  }
  if (used > 0) {
    out.score /= static_cast<double>(used);
    out.sigma /= static_cast<double>(used);
  }
  return out;
}

}  // namespace stixelforge::metrics

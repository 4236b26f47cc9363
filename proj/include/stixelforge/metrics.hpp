#pragma once

#include <vector>

#include "stixelforge/codec.hpp"
#include "stixelforge/core.hpp"

namespace stixelforge::metrics {

struct MatchReport {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double threshold = 0.0;

  /// Fills precision/recall/f1 from the counts (0 for empty denominators).
  static MatchReport from_counts(std::size_t tp, std::size_t fp, std::size_t fn, double threshold = 0.0);
};

/// 1D intersection over union of two Stixels in the same column.
/// Throws Errc::ColumnMismatch for different columns.
double stixel_iou(const Stixel& a, const Stixel& b);

/// Column-wise greedy matching: each ground-truth object Stixel (top to
/// bottom) claims the unclaimed prediction with the highest IoU, ties going to
/// the smaller vTop. Claims below `iou_min` are rejected.
MatchReport match_worlds(const StixelWorld& gt, const StixelWorld& pred, double iou_min = 0.5);

struct SweepRecord {
  double threshold = 0.0;
  double precision_micro = 0.0;
  double recall_micro = 0.0;
  double f1_micro = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
};

/// Decodes every frame at t_occ = t for each threshold and aggregates the
/// matches. Micro: pooled counts. Macro: mean of per-frame scores over frames
/// holding at least one ground-truth or predicted Stixel.
std::vector<SweepRecord> pr_sweep(const std::vector<StixelWorld>& gt, const std::vector<HeatmapPair>& heatmaps,
                                  const std::vector<double>& thresholds, const codec::DecodeConfig& decode_cfg,
                                  double iou_min = 0.5);

/// Aggregates already-decoded predictions the same way pr_sweep does for one threshold.
SweepRecord aggregate_matches(const std::vector<StixelWorld>& gt, const std::vector<StixelWorld>& pred,
                              double iou_min, double threshold);

/// Operating point: the record with the highest micro F1 (first on ties).
const SweepRecord& best_f1(const std::vector<SweepRecord>& records);

inline constexpr int kNoContact = -1;

/// Per image-pixel column: the lowest object-Stixel bottom covering it, or kNoContact.
std::vector<int> bottom_contact_per_column(const StixelWorld& world);

struct FreespaceReport {
  double score = 0.0;  // mean of per_column, percent
  double sigma = 0.0;  // population standard deviation of per_column, percent
  std::vector<double> per_column;
  std::size_t evaluated_columns() const noexcept { return per_column.size(); }
};

/// Each evaluated column earns gtRow points; the prediction loses one point per
/// pixel of |pred - gt| (a missing prediction loses all of them).
FreespaceReport freespace_score(const std::vector<int>& gt_contacts, const std::vector<int>& pred_contacts,
                                int image_height);

/// Multi-frame summary: mean of frame scores and mean of frame sigmas over
/// frames with at least one evaluated column.
FreespaceReport aggregate_freespace(const std::vector<FreespaceReport>& frames);

}  // namespace stixelforge::metrics

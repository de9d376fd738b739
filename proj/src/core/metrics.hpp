#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grid.hpp"

namespace spa {

inline constexpr double kSegThreshold = 0.5;
inline constexpr double kDiceSmoothing = 1e-7;

enum class SegLossKind { Dice, Mse };

/// 1 where the pixel is strictly greater than `threshold`, else 0.
Image binarize(const Image& seg_prob, double threshold = kSegThreshold);

/// 1 - (2 sum(pred*gt) + eps) / (sum(pred) + sum(gt) + eps).
double dice_loss(const Image& pred, const Image& gt);

/// Mean squared error over the positive pixels of `mask`. Throws
/// ValidationError for an empty mask.
double mse_in_mask(const Image& pred, const Image& gt, const Image& mask);

/// Full-image mean squared error.
double plain_mse_loss(const Image& pred, const Image& gt);

/// 0.5 * segmentation loss + 0.5 * sO2 MSE restricted to the ground-truth
/// vessels. sO2 predictions outside seg_gt never enter the value.
double hybrid_loss(const Image& seg_pred, const Image& seg_gt, const Image& so2_pred, const Image& so2_gt,
                   SegLossKind kind = SegLossKind::Dice);

/// Elementwise product of the binarized segmentation and the sO2 estimate.
Image final_so2(const Image& seg_bin, const Image& so2_intermediate);

struct SegStats {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  double fpr = 0.0;
  double fnr = 0.0;
  double accuracy = 0.0;
  /// Set when gt has no negatives (fpr) or no positives (fnr); the undefined
  /// rate is then reported as 0.
  bool fpr_undefined = false;
  bool fnr_undefined = false;
};

SegStats seg_stats(const Image& pred_bin, const Image& gt_bin);

struct SampleMetrics {
  std::string id;
  double dice_loss = 0.0;
  double hybrid_loss = 0.0;
  double so2_mse_in_gt_mask = 0.0;
  SegStats seg;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation (n - 1); 0 for n < 2
};

struct EvalReport {
  std::vector<SampleMetrics> samples;

  MetricSummary dice_loss() const;
  MetricSummary hybrid_loss() const;
  MetricSummary so2_mse() const;
  MetricSummary fpr() const;
  MetricSummary fnr() const;
  MetricSummary accuracy() const;

  /// One row per sample followed by "mean" and "std" rows.
  std::string to_csv() const;
};

MetricSummary summarize(const std::vector<double>& values);

/// Metrics for one sample. The evaluator binarizes `seg_prob` itself, forms
/// the final sO2 image and scores it inside the ground-truth mask.
SampleMetrics evaluate_sample(std::string id, const Image& seg_prob, const Image& so2_intermediate,
                              const Image& gt_seg, const Image& gt_so2, SegLossKind kind = SegLossKind::Dice);

}  // namespace spa

#include "metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "error.hpp"

namespace spa {

Image binarize(const Image& seg_prob, double threshold) {
  Image out(seg_prob.rows(), seg_prob.cols());
  for (std::size_t i = 0; i < seg_prob.size(); ++i) out[i] = seg_prob[i] > threshold ? 1.0 : 0.0;
  return out;
}

double dice_loss(const Image& pred, const Image& gt) {
  require_same_shape(pred, gt, "dice_loss");
  double overlap = 0.0, sum_pred = 0.0, sum_gt = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    overlap += pred[i] * gt[i];
    sum_pred += pred[i];
    sum_gt += gt[i];
  }
  return 1.0 - (2.0 * overlap + kDiceSmoothing) / (sum_pred + sum_gt + kDiceSmoothing);
}

double mse_in_mask(const Image& pred, const Image& gt, const Image& mask) {
  require_same_shape(pred, gt, "mse_in_mask");
  require_same_shape(pred, mask, "mse_in_mask");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (mask[i] > 0.0) {
      const double d = pred[i] - gt[i];
      sum += d * d;
      ++count;
    }
  }
  if (count == 0) throw ValidationError("mse_in_mask: mask is empty");
  return sum / static_cast<double>(count);
}

double plain_mse_loss(const Image& pred, const Image& gt) {
  require_same_shape(pred, gt, "plain_mse_loss");
  if (pred.size() == 0) throw ValidationError("plain_mse_loss: empty image");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - gt[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

double hybrid_loss(const Image& seg_pred, const Image& seg_gt, const Image& so2_pred, const Image& so2_gt,
                   SegLossKind kind) {
  const double seg = kind == SegLossKind::Dice ? dice_loss(seg_pred, seg_gt) : plain_mse_loss(seg_pred, seg_gt);
  return 0.5 * seg + 0.5 * mse_in_mask(so2_pred, so2_gt, seg_gt);
}

Image final_so2(const Image& seg_bin, const Image& so2_intermediate) {
  require_same_shape(seg_bin, so2_intermediate, "final_so2");
  Image out(seg_bin.rows(), seg_bin.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = seg_bin[i] * so2_intermediate[i];
  return out;
}

SegStats seg_stats(const Image& pred_bin, const Image& gt_bin) {
  require_same_shape(pred_bin, gt_bin, "seg_stats");
  SegStats s;
  for (std::size_t i = 0; i < pred_bin.size(); ++i) {
    const bool p = pred_bin[i] > 0.5;
    const bool g = gt_bin[i] > 0.5;
    if (p && g) ++s.tp;
    else if (!p && !g) ++s.tn;
    else if (p) ++s.fp;
    else ++s.fn;
  }
  const auto total = static_cast<double>(pred_bin.size());
  s.fpr_undefined = s.fp + s.tn == 0;
  s.fnr_undefined = s.fn + s.tp == 0;
  s.fpr = s.fpr_undefined ? 0.0 : static_cast<double>(s.fp) / static_cast<double>(s.fp + s.tn);
  s.fnr = s.fnr_undefined ? 0.0 : static_cast<double>(s.fn) / static_cast<double>(s.fn + s.tp);
  s.accuracy = total > 0 ? static_cast<double>(s.tp + s.tn) / total : 0.0;
  return s;
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

namespace {

template <class Get>
MetricSummary summarize_field(const std::vector<SampleMetrics>& samples, Get get) {
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples) values.push_back(get(s));
  return summarize(values);
}

}  // namespace

MetricSummary EvalReport::dice_loss() const {
  return summarize_field(samples, [](const SampleMetrics& s) { return s.dice_loss; });
}
MetricSummary EvalReport::hybrid_loss() const {
  return summarize_field(samples, [](const SampleMetrics& s) { return s.hybrid_loss; });
}
MetricSummary EvalReport::so2_mse() const {
  return summarize_field(samples, [](const SampleMetrics& s) { return s.so2_mse_in_gt_mask; });
}
MetricSummary EvalReport::fpr() const {
  return summarize_field(samples, [](const SampleMetrics& s) { return s.seg.fpr; });
}
MetricSummary EvalReport::fnr() const {
  return summarize_field(samples, [](const SampleMetrics& s) { return s.seg.fnr; });
}
MetricSummary EvalReport::accuracy() const {
  return summarize_field(samples, [](const SampleMetrics& s) { return s.seg.accuracy; });
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "id,dice_loss,hybrid_loss,so2_mse_in_gt_mask,fpr,fnr,accuracy,tp,tn,fp,fn\n";
  for (const auto& s : samples) {
    out << s.id << ',' << s.dice_loss << ',' << s.hybrid_loss << ',' << s.so2_mse_in_gt_mask << ',' << s.seg.fpr
        << ',' << s.seg.fnr << ',' << s.seg.accuracy << ',' << s.seg.tp << ',' << s.seg.tn << ',' << s.seg.fp << ','
        << s.seg.fn << '\n';
  }
  const MetricSummary cols[] = {dice_loss(), hybrid_loss(), so2_mse(), fpr(), fnr(), accuracy()};
  out << "mean";
  for (const auto& c : cols) out << ',' << c.mean;
  out << ",,,,\n";
  out << "std";
  for (const auto& c : cols) out << ',' << c.stddev;
  out << ",,,,\n";
  return out.str();
}

SampleMetrics evaluate_sample(std::string id, const Image& seg_prob, const Image& so2_intermediate,
                              const Image& gt_seg, const Image& gt_so2, SegLossKind kind) {
  const Image seg_bin = binarize(seg_prob);
  SampleMetrics m;
  m.id = std::move(id);
  m.dice_loss = dice_loss(seg_bin, gt_seg);
  m.hybrid_loss = hybrid_loss(seg_prob, gt_seg, so2_intermediate, gt_so2, kind);
  m.so2_mse_in_gt_mask = mse_in_mask(final_so2(seg_bin, so2_intermediate), gt_so2, gt_seg);
  m.seg = seg_stats(seg_bin, gt_seg);
  return m;
}

}  // namespace spa

#include "trackrel/metrics.hpp"

#include <cmath>
#include <string>

namespace trackrel {
namespace {

void check_lengths(const std::vector<BBox>& pred, const std::vector<BBox>& gt) {
  if (pred.empty() || gt.empty()) throw Error("metrics need at least one frame");
  if (pred.size() != gt.size()) {
    throw ShapeError("metrics: " + std::to_string(pred.size()) + " predictions for " +
                     std::to_string(gt.size()) + " ground-truth boxes");
  }
}

double fraction(const std::vector<double>& v, auto keep) {
  if (v.empty()) return 0.0;
  std::size_t n = 0;
  for (double x : v) n += keep(x) ? 1 : 0;
  return double(n) / double(v.size());
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / double(v.size());
}

}  // namespace

CenterErrors center_error(const std::vector<BBox>& pred, const std::vector<BBox>& gt) {
  check_lengths(pred, gt);
  CenterErrors out;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    out.per_frame.push_back(std::hypot(pred[i].center_x() - gt[i].center_x(),
                                       pred[i].center_y() - gt[i].center_y()));
  }
  out.mean = mean(out.per_frame);
  return out;
}

double distance_precision(const std::vector<double>& errors, double t_c) {
  return fraction(errors, [t_c](double e) { return e <= t_c; });
}

std::vector<double> precision_plot(const std::vector<double>& errors) {
  std::vector<double> out;
  for (int t = 0; t < kPrecisionPoints; ++t) out.push_back(distance_precision(errors, t));
  return out;
}

double success_threshold(int i) { return i / double(kSuccessPoints - 1); }

std::vector<double> success_plot(const std::vector<double>& ious) {
  std::vector<double> out;
  for (int i = 0; i < kSuccessPoints; ++i) {
    const double t = success_threshold(i);
    out.push_back(fraction(ious, [t](double v) { return v > t; }));
  }
  return out;
}

MetricReport evaluate(const std::vector<BBox>& pred, const std::vector<BBox>& gt) {
  const CenterErrors ce = center_error(pred, gt);
  std::vector<double> ious;
  for (std::size_t i = 0; i < pred.size(); ++i) ious.push_back(iou(pred[i], gt[i]));
  MetricReport r;
  r.mean_center_error = ce.mean;
  r.distance_precision = distance_precision(ce.per_frame);
  r.precision_plot = precision_plot(ce.per_frame);
  r.mean_overlap = mean(ious);
  r.overlap_precision = fraction(ious, [](double v) { return v > 0.5; });
  r.success_plot = success_plot(ious);
  r.auc = mean(r.success_plot);
  return r;
}

MetricReport average(const std::vector<MetricReport>& reports) {
  MetricReport out;
  out.precision_plot.assign(kPrecisionPoints, 0.0);
  out.success_plot.assign(kSuccessPoints, 0.0);
  if (reports.empty()) return out;
  for (const auto& r : reports) {
    out.mean_center_error += r.mean_center_error;
    out.distance_precision += r.distance_precision;
    out.mean_overlap += r.mean_overlap;
    out.overlap_precision += r.overlap_precision;
    out.auc += r.auc;
    for (int i = 0; i < kPrecisionPoints; ++i) out.precision_plot[i] += r.precision_plot.at(i);
    for (int i = 0; i < kSuccessPoints; ++i) out.success_plot[i] += r.success_plot.at(i);
  }
  const double n = double(reports.size());
  for (double* v : {&out.mean_center_error, &out.distance_precision, &out.mean_overlap,
                    &out.overlap_precision, &out.auc})
    *v /= n;
  for (double& v : out.precision_plot) v /= n;
  for (double& v : out.success_plot) v /= n;
  return out;
}

}  // namespace trackrel

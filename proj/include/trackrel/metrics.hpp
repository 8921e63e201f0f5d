#pragma once

#include <vector>

#include "trackrel/geometry.hpp"

namespace trackrel {

inline constexpr int kPrecisionPoints = 51;
inline constexpr int kSuccessPoints = 21;

struct CenterErrors {
  std::vector<double> per_frame;
  double mean = 0.0;
};

/// Euclidean distance between box centers, per frame. Throws on empty or
/// unequal-length input.
CenterErrors center_error(const std::vector<BBox>& pred, const std::vector<BBox>& gt);

/// Fraction of frames with error <= t_c.
double distance_precision(const std::vector<double>& errors, double t_c = 20.0);

/// distance_precision at t_c = 0, 1, ..., 50.
std::vector<double> precision_plot(const std::vector<double>& errors);

/// Success threshold i of the 21-point plot: i / 20.
double success_threshold(int i);

/// Fraction of frames with IoU strictly above each of the 21 thresholds.
std::vector<double> success_plot(const std::vector<double>& ious);

struct MetricReport {
  double mean_center_error = 0.0;
  double distance_precision = 0.0;
  std::vector<double> precision_plot;
  double mean_overlap = 0.0;
  double overlap_precision = 0.0;
  std::vector<double> success_plot;
  /// Mean of the success plot.
  double auc = 0.0;

  bool operator==(const MetricReport&) const = default;
};

MetricReport evaluate(const std::vector<BBox>& pred, const std::vector<BBox>& gt);

/// Field-wise and point-wise arithmetic mean. Empty input gives a report of
/// zeros with full-length plots.
MetricReport average(const std::vector<MetricReport>& reports);

}  // namespace trackrel

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "trackrel/features.hpp"
#include "trackrel/filter_bank.hpp"
#include "trackrel/geometry.hpp"
#include "trackrel/srdcf.hpp"

namespace trackrel {

/// Object-size windows taken from one featurized region, all in cells.
struct SampleSet {
  ChannelPatch region;
  int object_h = 1;
  int object_w = 1;
  int stride = 1;
  std::vector<CellIndex> offsets;  // top-left corner of each window in the region

  int region_h() const { return region.height(); }
  int region_w() const { return region.width(); }
  int count() const { return static_cast<int>(offsets.size()); }
  int dims() const { return region.count() * object_h * object_w; }
  /// Offset of the window centered in the region.
  CellIndex center_offset() const;
  /// Channel-major flattening of window i.
  Eigen::VectorXd feature(int i) const;
  /// count() x dims() matrix of all windows.
  Eigen::MatrixXd design() const;
};

/// Window start positions along one axis of n = region - object + 1 slots:
/// k = floor((n - 1) / stride) + 1 positions, centered in the slot range.
std::vector<int> lattice_positions(int slots, int stride);

SampleSet sample_set_from_region(ChannelPatch region, int object_h, int object_w, int stride);

/// Object size in cells for a pixel box, at least one cell per axis.
int object_cells(double pixels, int cell);
/// Region size in cells: object + 2 * round((scale - 1) * object / 2), so the
/// object stays exactly centered.
int region_cells(int object, double scale);

/// Pixel region of region_w x region_h cells centered on `box`.
BBox region_box(const BBox& box, int region_h, int region_w, int cell);

SampleSet build_sample_set(const ImageFrame& frame, const BBox& box, double region_scale,
                           int stride, int cell = 4, FeatureKind kind = FeatureKind::hog);

/// Regression target per sample from the displacement to the centered window.
/// Gaussian kind uses `sigma` (cells); IoU kind uses the shared-size overlap.
std::vector<double> sample_labels(const SampleSet& set, LabelKind kind, double sigma);

/// Linear model over the region lattice; only the central object block is
/// nonzero.
struct StruckModel {
  FilterBank weights;  // region dims
  SpatialRegularizer regularizer;
  double lambda = 1.0;
  int object_h = 1;
  int object_w = 1;

  FilterBank central() const;
  Eigen::VectorXd central_vector() const;
  /// Score of every window of `set`, in offset order.
  Eigen::VectorXd scores(const SampleSet& set) const;
};

StruckModel make_struck_model(const Eigen::VectorXd& central, int channels, int region_h,
                              int region_w, int object_h, int object_w, double lambda);

/// Per-frame sufficient statistics of the square loss: A^T A, A^T g, alpha.
struct StruckGram {
  Eigen::MatrixXd ata;
  Eigen::VectorXd aty;
  double alpha = 1.0;
};

StruckGram struck_gram(const SampleSet& set, const std::vector<double>& labels,
                       const SampleWeights& weights);

/// argmin 1/2 ||w||^2 + lambda/2 sum_i alpha_i ||A_i w - g_i||^2 over the
/// object block, from cached per-frame statistics.
Eigen::VectorXd solve_struck_square(const std::vector<StruckGram>& frames, double lambda);

StruckModel solve_struck_square(const SampleSet& set, const std::vector<double>& labels,
                                double lambda, const SampleWeights& weights);

double struck_square_objective(const StruckModel& model, const SampleSet& set,
                               const std::vector<double>& labels, const SampleWeights& weights);

struct HingeResult {
  StruckModel model;
  double objective = 0.0;
  int epochs = 0;
  bool converged = false;
};

/// 1/2 ||w||^2 + lambda/(2N) sum_y max(0, (1 - g_y) - <w, phi(y_c) - phi(y)>)
/// with y_c the centered window, N the number of windows.
double struck_hinge_objective(const Eigen::VectorXd& w, const SampleSet& set,
                              const std::vector<double>& labels, double lambda);

/// Dual coordinate descent in seeded random order; stops when an epoch changes
/// the objective by at most `tolerance` relative, or after max_epochs.
HingeResult solve_struck_hinge_small(const SampleSet& set, const std::vector<double>& labels,
                                     double lambda, std::uint64_t seed = 1,
                                     double tolerance = 1e-6, int max_epochs = 20000);

struct LocateResult {
  BBox box;
  Grid2 response;
  CellIndex peak;
};

/// Scores every stride-1 window of `region` and returns the row-major first
/// maximum.
LocateResult locate_in_region(const StruckModel& model, const ChannelPatch& region);

/// Dense search over the region of the model's size centered on `search_center`.
LocateResult locate(const StruckModel& model, const ImageFrame& frame, const BBox& search_center,
                    int cell = 4, FeatureKind kind = FeatureKind::hog);

/// Fraction of region positions a w-wide window can occupy: (w_l - w + 1) / w_l.
double sample_ratio(int region, int object);

struct GapPoint {
  int multiple = 1;
  int region_w = 0;
  int region_h = 0;
  double ratio_w = 0.0;
  double ratio_h = 0.0;
  double gap = 0.0;
};

/// For each region multiple k: relative L2 distance between the stride-1
/// square-loss filter and the central block of the box-indicator SRDCF filter
/// trained on the same k-times-larger region.
std::vector<GapPoint> asymptotic_gap(const ImageFrame& frame, const BBox& box, double lambda,
                                     const std::vector<int>& multiples, int cell = 4,
                                     FeatureKind kind = FeatureKind::gray, double big = 1e4);

}  // namespace trackrel

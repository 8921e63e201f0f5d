#pragma once

#include <cstdint>

#include "trackrel/grid.hpp"

namespace trackrel {

/// Axis-aligned box in continuous pixel coordinates (0-indexed).
struct BBox {
  double left = 0.0;
  double top = 0.0;
  double width = 1.0;
  double height = 1.0;

  double center_x() const { return left + 0.5 * width; }
  double center_y() const { return top + 0.5 * height; }
  double right() const { return left + width; }
  double bottom() const { return top + height; }
  double area() const { return width * height; }

  static BBox from_center(double cx, double cy, double width, double height) {
    return {cx - 0.5 * width, cy - 0.5 * height, width, height};
  }

  bool valid() const { return width > 0.0 && height > 0.0; }
  bool operator==(const BBox&) const = default;
};

struct CellIndex {
  int row = 0;
  int col = 0;
  bool operator==(const CellIndex&) const = default;
};

/// Length of the intersection of [a, a + c] and [a_i, a_i + c], clamped at 0.
double clamped_overlap_len(double a, double a_i, double c);

/// Intersection-over-union of two boxes sharing the same width and height.
/// Throws ShapeError when the sizes differ.
double overlap_score(const BBox& y, const BBox& y_i);

/// 1 - overlap_score.
double delta_loss(const BBox& y, const BBox& y_i);

/// General rectangle IoU (boxes may differ in size).
double iou(const BBox& a, const BBox& b);

enum class LabelKind { gaussian, iou };

/// Regression target over a shift lattice, peaking at `center` with value 1.
struct LabelMap {
  Grid2 values;
  CellIndex center;
  LabelKind kind = LabelKind::gaussian;
};

/// exp(-(dr^2 + dc^2) / (2 sigma^2)) where (dr, dc) is the cyclic displacement
/// of each cell from `center`.
LabelMap gaussian_labels(int grid_h, int grid_w, CellIndex center, double sigma);

/// overlap_score between a box_w x box_h box displaced to each cell (cyclic
/// displacement) and the same box at `center`.
LabelMap iou_labels(int grid_h, int grid_w, CellIndex center, double box_w, double box_h);

/// Label bandwidth in cells: factor * sqrt(target_w * target_h).
double label_sigma(double target_w_cells, double target_h_cells, double factor = 1.0 / 16.0);

/// Loss weight of one training sample: alpha = impact / pair_count.
struct SampleWeights {
  double impact = 1.0;
  std::int64_t pair_count = 1;

  double alpha() const { return impact / static_cast<double>(pair_count); }

  static SampleWeights uniform() { return {}; }
  /// Dense sampling of a w x h object inside a w_l x h_l region.
  static SampleWeights dense(int region_w, int region_h, int object_w, int object_h,
                             double impact = 1.0);
};

}  // namespace trackrel

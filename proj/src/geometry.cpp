#include "trackrel/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace trackrel {
namespace {

int cyclic_offset(int i, int center, int n) {
  int d = Grid2::wrap(i - center, n);
  if (d > n / 2) d -= n;
  return d;
}

void check_center(int grid_h, int grid_w, CellIndex center) {
  if (center.row < 0 || center.row >= grid_h || center.col < 0 || center.col >= grid_w) {
    throw ShapeError("label center outside the grid");
  }
}

}  // namespace

double clamped_overlap_len(double a, double a_i, double c) {
  return std::max(0.0, 2.0 * c - std::max(a + c, a_i + c) + std::min(a, a_i));
}

double overlap_score(const BBox& y, const BBox& y_i) {
  if (std::abs(y.width - y_i.width) > 1e-9 || std::abs(y.height - y_i.height) > 1e-9) {
    throw ShapeError("overlap_score requires boxes of identical size");
  }
  const double w = y.width;
  const double h = y.height;
  const double p = clamped_overlap_len(y.left, y_i.left, w) * clamped_overlap_len(y.top, y_i.top, h);
  return p / (2.0 * w * h - p);
}

double delta_loss(const BBox& y, const BBox& y_i) { return 1.0 - overlap_score(y, y_i); }

double iou(const BBox& a, const BBox& b) {
  const double iw = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.left, b.left));
  const double ih = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top));
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

LabelMap gaussian_labels(int grid_h, int grid_w, CellIndex center, double sigma) {
  if (!(sigma > 0.0)) throw Error("gaussian_labels: sigma must be positive");
  check_center(grid_h, grid_w, center);
  LabelMap out{Grid2(grid_h, grid_w), center, LabelKind::gaussian};
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int r = 0; r < grid_h; ++r) {
    const int dr = cyclic_offset(r, center.row, grid_h);
    for (int c = 0; c < grid_w; ++c) {
      const int dc = cyclic_offset(c, center.col, grid_w);
      out.values(r, c) = std::exp(-(dr * dr + dc * dc) * inv);
    }
  }
  return out;
}

LabelMap iou_labels(int grid_h, int grid_w, CellIndex center, double box_w, double box_h) {
  if (box_w < 1.0 || box_h < 1.0) throw Error("iou_labels: box dimensions must be >= 1");
  check_center(grid_h, grid_w, center);
  LabelMap out{Grid2(grid_h, grid_w), center, LabelKind::iou};
  const BBox anchor{0.0, 0.0, box_w, box_h};
  for (int r = 0; r < grid_h; ++r) {
    const int dr = cyclic_offset(r, center.row, grid_h);
    for (int c = 0; c < grid_w; ++c) {
      const int dc = cyclic_offset(c, center.col, grid_w);
      out.values(r, c) = overlap_score(BBox{double(dc), double(dr), box_w, box_h}, anchor);
    }
  }
  return out;
}

double label_sigma(double target_w_cells, double target_h_cells, double factor) {
  return factor * std::sqrt(target_w_cells * target_h_cells);
}

SampleWeights SampleWeights::dense(int region_w, int region_h, int object_w, int object_h,
                                   double impact) {
  if (object_w > region_w || object_h > region_h) {
    throw ShapeError("dense sampling needs the object to fit inside the region");
  }
  return {impact, static_cast<std::int64_t>(region_w - object_w + 1) * (region_h - object_h + 1)};
}

}  // namespace trackrel

#pragma once

#include <vector>

#include "trackrel/grid.hpp"

namespace trackrel {

/// Per-channel spatial filter weights sharing one set of dims.
struct FilterBank {
  std::vector<Grid2> weights;

  FilterBank() = default;
  explicit FilterBank(std::vector<Grid2> w);
  FilterBank(int count, int height, int width);

  int height() const { return weights.empty() ? 0 : weights.front().height(); }
  int width() const { return weights.empty() ? 0 : weights.front().width(); }
  int count() const { return static_cast<int>(weights.size()); }

  double squared_norm() const;
  std::vector<SpectrumGrid2> spectra() const;

  /// (1 - rate) * this + rate * other.
  FilterBank blended(const FilterBank& other, double rate) const;

  bool operator==(const FilterBank&) const = default;
};

/// Row/column offset of a centered d-block inside a t-long axis.
inline int centered_offset(int t, int d) { return (t - d) / 2; }

/// Zero-pad `g` into the center of an h x w grid.
Grid2 pad_centered(const Grid2& g, int h, int w);

/// Central h x w block of `g`.
Grid2 crop_centered(const Grid2& g, int h, int w);

/// Relative L2 distance ||a - b|| / ||b||, 0 when both are zero.
double relative_error(const FilterBank& a, const FilterBank& b);

}  // namespace trackrel

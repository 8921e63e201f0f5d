#include "trackrel/filter_bank.hpp"

#include <cmath>

namespace trackrel {

FilterBank::FilterBank(std::vector<Grid2> w) : weights(std::move(w)) {
  for (const auto& g : weights) {
    if (!g.same_shape(weights.front())) throw ShapeError("filter channels differ in shape");
  }
}

FilterBank::FilterBank(int count, int height, int width)
    : weights(static_cast<std::size_t>(count), Grid2(height, width)) {}

double FilterBank::squared_norm() const {
  double s = 0.0;
  for (const auto& g : weights) s += trackrel::squared_norm(g);
  return s;
}

std::vector<SpectrumGrid2> FilterBank::spectra() const {
  std::vector<SpectrumGrid2> out;
  out.reserve(weights.size());
  for (const auto& g : weights) out.push_back(dft2(g));
  return out;
}

FilterBank FilterBank::blended(const FilterBank& other, double rate) const {
  if (other.count() != count()) throw ShapeError("blended: channel count mismatch");
  FilterBank out = *this;
  for (int l = 0; l < count(); ++l) {
    out.weights[l] = (1.0 - rate) * weights[l] + rate * other.weights[l];
  }
  return out;
}

Grid2 pad_centered(const Grid2& g, int h, int w) {
  if (g.height() > h || g.width() > w) {
    throw ShapeError("pad_centered: " + g.shape_string() + " does not fit in " +
                     std::to_string(h) + "x" + std::to_string(w));
  }
  Grid2 out(h, w);
  const int r0 = centered_offset(h, g.height());
  const int c0 = centered_offset(w, g.width());
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c) out(r0 + r, c0 + c) = g(r, c);
  return out;
}

Grid2 crop_centered(const Grid2& g, int h, int w) {
  if (h > g.height() || w > g.width()) {
    throw ShapeError("crop_centered: " + std::to_string(h) + "x" + std::to_string(w) +
                     " exceeds " + g.shape_string());
  }
  Grid2 out(h, w);
  const int r0 = centered_offset(g.height(), h);
  const int c0 = centered_offset(g.width(), w);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) out(r, c) = g(r0 + r, c0 + c);
  return out;
}

double relative_error(const FilterBank& a, const FilterBank& b) {
  if (a.count() != b.count()) throw ShapeError("relative_error: channel count mismatch");
  double diff = 0.0;
  for (int l = 0; l < a.count(); ++l) diff += squared_norm(a.weights[l] - b.weights[l]);
  const double ref = b.squared_norm();
  if (ref == 0.0) return diff == 0.0 ? 0.0 : std::sqrt(diff);
  return std::sqrt(diff / ref);
}

}  // namespace trackrel

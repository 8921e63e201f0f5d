#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "trackrel/error.hpp"

namespace trackrel {

using Complex = std::complex<double>;

/// Dense row-major 2-D grid. Shift arithmetic is cyclic with non-negative
/// representatives, so `wrapped(-1, 0)` addresses the last row.
template <typename T>
class Grid {
 public:
  Grid() = default;

  Grid(int height, int width, T fill = T{}) : height_(height), width_(width) {
    check_dims(height, width);
    data_.assign(static_cast<std::size_t>(height) * width, fill);
  }

  Grid(int height, int width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    check_dims(height, width);
    if (data_.size() != static_cast<std::size_t>(height) * width) {
      throw ShapeError("grid data length " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(height) + "x" +
                       std::to_string(width));
    }
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * width_ + c]; }
  const T& operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * width_ + c];
  }

  T& wrapped(int r, int c) { return (*this)(wrap(r, height_), wrap(c, width_)); }
  const T& wrapped(int r, int c) const { return (*this)(wrap(r, height_), wrap(c, width_)); }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return height_ == other.height() && width_ == other.width();
  }

  std::string shape_string() const {
    return std::to_string(height_) + "x" + std::to_string(width_);
  }

  Grid& operator+=(const Grid& o) {
    require_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Grid& operator-=(const Grid& o) {
    require_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Grid& operator*=(T s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend Grid operator+(Grid a, const Grid& b) { return a += b; }
  friend Grid operator-(Grid a, const Grid& b) { return a -= b; }
  friend Grid operator*(Grid a, T s) { return a *= s; }
  friend Grid operator*(T s, Grid a) { return a *= s; }

  bool operator==(const Grid&) const = default;

  static int wrap(int i, int n) {
    const int m = i % n;
    return m < 0 ? m + n : m;
  }

 private:
  static void check_dims(int h, int w) {
    if (h < 1 || w < 1) {
      throw ShapeError("grid dimensions must be >= 1, got " + std::to_string(h) + "x" +
                       std::to_string(w));
    }
  }
  void require_same(const Grid& o) const {
    if (!same_shape(o)) {
      throw ShapeError("grid shape mismatch: " + shape_string() + " vs " + o.shape_string());
    }
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

using Grid2 = Grid<double>;
using SpectrumGrid2 = Grid<Complex>;

double squared_norm(const Grid2& g);
double squared_norm(const SpectrumGrid2& s);
double max_abs(const Grid2& g);

/// Unitary 2-D DFT: each direction is scaled by 1/sqrt(n) so that
/// ||g||_2 == ||dft2(g)||_2.
SpectrumGrid2 dft2(const Grid2& g);
SpectrumGrid2 dft2(const SpectrumGrid2& g);

/// Inverse of dft2 for spectra of real grids. Throws NumericError when the
/// imaginary residual exceeds `tolerance` relative to the largest real part.
Grid2 idft2(const SpectrumGrid2& s, double tolerance = 1e-8);

/// Inverse transform that keeps the complex result.
SpectrumGrid2 idft2_complex(const SpectrumGrid2& s);

/// Inverse transform that discards the imaginary part without checking it.
Grid2 idft2_real(const SpectrumGrid2& s);

/// out[s] = <filter, base shifted cyclically by s>, i.e.
/// out(r, c) = sum_{i,j} filter(i, j) * base(i + r, j + c).
Grid2 circ_correlate(const Grid2& filter, const Grid2& base);

/// Spectrum of circ_correlate(filter, base) given unitary spectra of both.
SpectrumGrid2 correlate_spectra(const SpectrumGrid2& filter_hat, const SpectrumGrid2& base_hat);

/// Separable Hann window 0.5 * (1 - cos(2*pi*n / (N - 1))); a length-1 axis is 1.
Grid2 hann2(int height, int width);

enum class PointwiseOp { multiply, divide, conj_multiply };

/// Element-wise a*b, a/b, or a*conj(b). Division rejects denominators below
/// kDivisionGuard times the largest denominator magnitude.
SpectrumGrid2 pointwise(const SpectrumGrid2& a, const SpectrumGrid2& b, PointwiseOp op);

inline constexpr double kDivisionGuard = 1e-12;

Grid2 real_part(const SpectrumGrid2& s);
SpectrumGrid2 to_complex(const Grid2& g);

}  // namespace trackrel

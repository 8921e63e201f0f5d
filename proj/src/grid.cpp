#include "trackrel/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace trackrel {
namespace {

// FFTW's planner is not re-entrant; execution of an existing plan on new
// arrays is. Plans are created once per (height, width, direction) and kept
// for the lifetime of the process.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int h, int w, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(h, w, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<Complex> in(static_cast<std::size_t>(h) * w), out(in.size());
    fftw_plan plan = fftw_plan_dft_2d(h, w, reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

SpectrumGrid2 transform(const SpectrumGrid2& in, int sign) {
  SpectrumGrid2 out(in.height(), in.width());
  fftw_plan plan = PlanCache::instance().get(in.height(), in.width(), sign);
  // fftw_execute_dft does not write to the input for out-of-place plans.
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.storage().data())),
                   reinterpret_cast<fftw_complex*>(out.storage().data()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(in.size()));
  for (auto& v : out.storage()) v *= scale;
  return out;
}

void require_same_shape(const auto& a, const auto& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
}

}  // namespace

double squared_norm(const Grid2& g) {
  double s = 0.0;
  for (double v : g.values()) s += v * v;
  return s;
}

double squared_norm(const SpectrumGrid2& g) {
  double s = 0.0;
  for (const Complex& v : g.values()) s += std::norm(v);
  return s;
}

double max_abs(const Grid2& g) {
  double m = 0.0;
  for (double v : g.values()) m = std::max(m, std::abs(v));
  return m;
}

SpectrumGrid2 to_complex(const Grid2& g) {
  SpectrumGrid2 out(g.height(), g.width());
  for (std::size_t i = 0; i < g.size(); ++i) out.storage()[i] = g.storage()[i];
  return out;
}

Grid2 real_part(const SpectrumGrid2& s) {
  Grid2 out(s.height(), s.width());
  for (std::size_t i = 0; i < s.size(); ++i) out.storage()[i] = s.storage()[i].real();
  return out;
}

SpectrumGrid2 dft2(const Grid2& g) { return transform(to_complex(g), FFTW_FORWARD); }

SpectrumGrid2 dft2(const SpectrumGrid2& g) { return transform(g, FFTW_FORWARD); }

SpectrumGrid2 idft2_complex(const SpectrumGrid2& s) { return transform(s, FFTW_BACKWARD); }

Grid2 idft2_real(const SpectrumGrid2& s) { return real_part(idft2_complex(s)); }

Grid2 idft2(const SpectrumGrid2& s, double tolerance) {
  const SpectrumGrid2 full = idft2_complex(s);
  double max_real = 0.0;
  double max_imag = 0.0;
  for (const Complex& v : full.values()) {
    max_real = std::max(max_real, std::abs(v.real()));
    max_imag = std::max(max_imag, std::abs(v.imag()));
  }
  if (max_imag > tolerance * std::max(1.0, max_real)) {
    throw NumericError("idft2: spectrum is not conjugate-symmetric, imaginary residual " +
                       std::to_string(max_imag));
  }
  return real_part(full);
}

SpectrumGrid2 correlate_spectra(const SpectrumGrid2& filter_hat, const SpectrumGrid2& base_hat) {
  require_same_shape(filter_hat, base_hat, "correlate_spectra");
  SpectrumGrid2 out(filter_hat.height(), filter_hat.width());
  const double root_t = std::sqrt(static_cast<double>(filter_hat.size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.storage()[i] = root_t * std::conj(filter_hat.storage()[i]) * base_hat.storage()[i];
  }
  return out;
}

Grid2 circ_correlate(const Grid2& filter, const Grid2& base) {
  require_same_shape(filter, base, "circ_correlate");
  return idft2_real(correlate_spectra(dft2(filter), dft2(base)));
}

Grid2 hann2(int height, int width) {
  auto axis = [](int n) {
    std::vector<double> v(n, 1.0);
    if (n == 1) return v;
    for (int i = 0; i < n; ++i) {
      v[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
    }
    return v;
  };
  const auto rows = axis(height);
  const auto cols = axis(width);
  Grid2 out(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) out(r, c) = rows[r] * cols[c];
  return out;
}

SpectrumGrid2 pointwise(const SpectrumGrid2& a, const SpectrumGrid2& b, PointwiseOp op) {
  require_same_shape(a, b, "pointwise");
  SpectrumGrid2 out(a.height(), a.width());
  switch (op) {
    case PointwiseOp::multiply:
      for (std::size_t i = 0; i < a.size(); ++i) out.storage()[i] = a.storage()[i] * b.storage()[i];
      break;
    case PointwiseOp::conj_multiply:
      for (std::size_t i = 0; i < a.size(); ++i)
        out.storage()[i] = a.storage()[i] * std::conj(b.storage()[i]);
      break;
    case PointwiseOp::divide: {
      double largest = 0.0;
      for (const Complex& v : b.values()) largest = std::max(largest, std::abs(v));
      const double guard = kDivisionGuard * largest;
      for (int r = 0; r < a.height(); ++r) {
        for (int c = 0; c < a.width(); ++c) {
          const Complex d = b(r, c);
          if (largest == 0.0 || std::abs(d) < guard) {
            throw NumericError("pointwise divide: denominator below guard at frequency (" +
                               std::to_string(r) + ", " + std::to_string(c) + ")");
          }
          out(r, c) = a(r, c) / d;
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace trackrel

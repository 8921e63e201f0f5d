#include "trackrel/srdcf.hpp"

#include <cmath>

#include "trackrel/linalg.hpp"

namespace trackrel {
namespace {

void check_inputs(const ChannelPatch& base, const LabelMap& labels, const SpatialRegularizer& reg) {
  base.validate();
  reg.validate();
  if (!labels.values.same_shape(base.channels.front()) ||
      !reg.grid.same_shape(base.channels.front())) {
    throw ShapeError("srdcf: base " + base.channels.front().shape_string() + ", labels " +
                     labels.values.shape_string() + ", regularizer " + reg.grid.shape_string() +
                     " disagree");
  }
}

Eigen::VectorXd flatten(const FilterBank& f) {
  const std::size_t t = f.weights.front().size();
  Eigen::VectorXd v(t * f.weights.size());
  for (std::size_t l = 0; l < f.weights.size(); ++l)
    for (std::size_t p = 0; p < t; ++p) v[l * t + p] = f.weights[l].storage()[p];
  return v;
}

FilterBank unflatten(const Eigen::VectorXd& v, int channels, int h, int w) {
  FilterBank out(channels, h, w);
  const std::size_t t = static_cast<std::size_t>(h) * w;
  for (int l = 0; l < channels; ++l)
    for (std::size_t p = 0; p < t; ++p) out.weights[l].storage()[p] = v[l * t + p];
  return out;
}

// Normal equations (alpha X^T X + lambda diag(reg^2)) w = alpha X^T y, where
// X_l has row s equal to x_l cyclically shifted by s.
class NormalSystem {
 public:
  NormalSystem(const ChannelPatch& base, const LabelMap& labels, const Grid2& reg, double lambda,
               double alpha)
      : h_(base.height()), w_(base.width()), t_(base.channels.front().size()),
        channels_(base.count()), alpha_(alpha), lambda_(lambda), reg_(reg) {
    for (const auto& ch : base.channels) x_hat_.push_back(dft2(ch));
    const SpectrumGrid2 y_hat = dft2(labels.values);
    rhs_.resize(static_cast<Eigen::Index>(t_ * channels_));
    for (int l = 0; l < channels_; ++l) {
      const Grid2 xty = idft2_real(correlate_spectra(y_hat, x_hat_[l]));
      for (std::size_t p = 0; p < t_; ++p) rhs_[l * t_ + p] = alpha_ * xty.storage()[p];
    }
  }

  const Eigen::VectorXd& rhs() const { return rhs_; }
  Eigen::Index unknowns() const { return rhs_.size(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    const double root_t = std::sqrt(static_cast<double>(t_));
    SpectrumGrid2 r_hat(h_, w_);
    for (int m = 0; m < channels_; ++m) {
      Grid2 vm(h_, w_);
      for (std::size_t p = 0; p < t_; ++p) vm.storage()[p] = v[m * t_ + p];
      r_hat += correlate_spectra(dft2(vm), x_hat_[m]);
    }
    Eigen::VectorXd out(v.size());
    for (int l = 0; l < channels_; ++l) {
      SpectrumGrid2 s(h_, w_);
      for (std::size_t k = 0; k < t_; ++k) {
        s.storage()[k] = root_t * std::conj(r_hat.storage()[k]) * x_hat_[l].storage()[k];
      }
      const Grid2 back = idft2_real(s);
      for (std::size_t p = 0; p < t_; ++p) {
        const double q = reg_.storage()[p];
        out[l * t_ + p] = alpha_ * back.storage()[p] + lambda_ * q * q * v[l * t_ + p];
      }
    }
    return out;
  }

  Eigen::VectorXd diagonal() const {
    Eigen::VectorXd d(rhs_.size());
    for (int l = 0; l < channels_; ++l) {
      const double energy = squared_norm(x_hat_[l]);
      for (std::size_t p = 0; p < t_; ++p) {
        const double q = reg_.storage()[p];
        d[l * t_ + p] = alpha_ * energy + lambda_ * q * q;
      }
    }
    return d;
  }

  Eigen::MatrixXd dense() const {
    const auto n = unknowns();
    Eigen::MatrixXd g(n, n);
    for (int l = 0; l < channels_; ++l) {
      for (int m = 0; m < channels_; ++m) {
        // C(d) = sum_u x_l(u) x_m(u + d)
        const Grid2 c = idft2_real(correlate_spectra(x_hat_[l], x_hat_[m]));
        for (int pr = 0; pr < h_; ++pr)
          for (int pc = 0; pc < w_; ++pc)
            for (int qr = 0; qr < h_; ++qr)
              for (int qc = 0; qc < w_; ++qc)
                g(l * t_ + pr * w_ + pc, m * t_ + qr * w_ + qc) = alpha_ * c.wrapped(qr - pr, qc - pc);
      }
    }
    for (int l = 0; l < channels_; ++l) {
      for (std::size_t p = 0; p < t_; ++p) {
        const double q = reg_.storage()[p];
        g(l * t_ + p, l * t_ + p) += lambda_ * q * q;
      }
    }
    return g;
  }

 private:
  int h_;
  int w_;
  std::size_t t_;
  int channels_;
  double alpha_;
  double lambda_;
  Grid2 reg_;
  std::vector<SpectrumGrid2> x_hat_;
  Eigen::VectorXd rhs_;
};

}  // namespace

SpatialRegularizer SpatialRegularizer::constant(int height, int width, double value) {
  return {RegularizerKind::constant, Grid2(height, width, value)};
}

SpatialRegularizer SpatialRegularizer::quadratic(int height, int width, double target_h,
                                                 double target_w, double mu_reg, double eta) {
  SpatialRegularizer out{RegularizerKind::quadratic, Grid2(height, width)};
  const double cr = 0.5 * (height - 1);
  const double cc = 0.5 * (width - 1);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double dr = (r - cr) / target_h;
      const double dc = (c - cc) / target_w;
      out.grid(r, c) = mu_reg + eta * (dc * dc + dr * dr);
    }
  }
  return out;
}

SpatialRegularizer SpatialRegularizer::indicator_s0(const MaskSpec& mask, double big) {
  return indicator_st(mask.full_h, mask.full_w, mask.active_h, mask.active_w, big);
}

SpatialRegularizer SpatialRegularizer::indicator_st(int height, int width, int box_h, int box_w,
                                                    double big) {
  if (box_h < 1 || box_w < 1 || box_h > height || box_w > width) {
    throw ShapeError("indicator box must fit inside the regularizer grid");
  }
  SpatialRegularizer out{RegularizerKind::indicator_st, Grid2(height, width, big)};
  const int r0 = centered_offset(height, box_h);
  const int c0 = centered_offset(width, box_w);
  for (int r = 0; r < box_h; ++r)
    for (int c = 0; c < box_w; ++c) out.grid(r0 + r, c0 + c) = 1.0;
  return out;
}

void SpatialRegularizer::validate() const {
  if (grid.empty()) throw ShapeError("regularizer grid is empty");
  for (double v : grid.values()) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw NumericError("regularizer values must be positive and finite");
    }
  }
}

FilterBank solve_srdcf(const ChannelPatch& base, const LabelMap& labels,
                       const SpatialRegularizer& reg, double lambda, const SampleWeights& weights,
                       const SrdcfOptions& options, SrdcfSolveInfo* info) {
  check_inputs(base, labels, reg);
  if (!(lambda > 0.0)) throw Error("solve_srdcf: lambda must be positive");
  const NormalSystem system(base, labels, reg.grid, lambda, weights.alpha());
  SrdcfSolveInfo local;
  Eigen::VectorXd solution;
  if (system.unknowns() <= options.dense_limit) {
    local.dense = true;
    solution = solve_spd(system.dense(), system.rhs());
  } else {
    Eigen::VectorXd start;
    if (options.warm_start) start = flatten(*options.warm_start);
    CgResult cg = conjugate_gradient([&](const Eigen::VectorXd& v) { return system.apply(v); },
                                     system.rhs(), system.diagonal(), options.cg_tolerance,
                                     options.cg_max_iterations,
                                     options.warm_start ? &start : nullptr);
    local.iterations = cg.iterations;
    local.relative_residual = cg.relative_residual;
    solution = std::move(cg.x);
  }
  if (info) *info = local;
  return unflatten(solution, base.count(), base.height(), base.width());
}

double srdcf_objective(const ChannelPatch& base, const LabelMap& labels,
                       const SpatialRegularizer& reg, double lambda, const SampleWeights& weights,
                       const FilterBank& filter) {
  check_inputs(base, labels, reg);
  const Grid2 r = response_map(filter, base);
  double penalty = 0.0;
  for (const auto& w : filter.weights) {
    for (std::size_t p = 0; p < w.size(); ++p) {
      const double v = reg.grid.storage()[p] * w.storage()[p];
      penalty += v * v;
    }
  }
  return 0.5 * weights.alpha() * squared_norm(labels.values - r) + 0.5 * lambda * penalty;
}

FilterBank solve_cflb_dense(const ChannelPatch& base, const LabelMap& labels, const MaskSpec& mask,
                            double lambda) {
  base.validate();
  if (base.height() != mask.full_h || base.width() != mask.full_w ||
      !labels.values.same_shape(base.channels.front())) {
    throw ShapeError("solve_cflb_dense: shapes disagree with mask");
  }
  const int channels = base.count();
  const int dh = mask.active_h;
  const int dw = mask.active_w;
  const int d = dh * dw;
  const int r0 = mask.offset_r();
  const int c0 = mask.offset_c();

  std::vector<SpectrumGrid2> x_hat;
  for (const auto& ch : base.channels) x_hat.push_back(dft2(ch));
  const SpectrumGrid2 y_hat = dft2(labels.values);

  Eigen::MatrixXd g(channels * d, channels * d);
  Eigen::VectorXd rhs(channels * d);
  for (int l = 0; l < channels; ++l) {
    const Grid2 xty = idft2_real(correlate_spectra(y_hat, x_hat[l]));
    for (int pr = 0; pr < dh; ++pr)
      for (int pc = 0; pc < dw; ++pc) rhs[l * d + pr * dw + pc] = xty(r0 + pr, c0 + pc);
    for (int m = 0; m < channels; ++m) {
      const Grid2 c = idft2_real(correlate_spectra(x_hat[l], x_hat[m]));
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q)
          g(l * d + p, m * d + q) = c.wrapped(q / dw - p / dw, q % dw - p % dw);
    }
  }
  g.diagonal().array() += lambda;
  const Eigen::VectorXd w = solve_spd(std::move(g), rhs);
  return unflatten(w, channels, dh, dw);
}

RelationReport masked_relation_check(const ChannelPatch& base, const LabelMap& labels,
                                     const MaskSpec& mask, double big, double lambda) {
  const FilterBank wg = solve_cflb_dense(base, labels, mask, lambda);
  const FilterBank wd = solve_srdcf(base, labels, SpatialRegularizer::indicator_s0(mask, big),
                                    lambda, SampleWeights::uniform(), {.dense_limit = 1 << 30});
  RelationReport out;
  FilterBank central;
  const Grid2 inside = mask.indicator();
  double annulus = 0.0;
  for (const auto& w : wd.weights) {
    for (std::size_t p = 0; p < w.size(); ++p)
      if (inside.storage()[p] == 0.0) annulus += w.storage()[p] * w.storage()[p];
    central.weights.push_back(mask.crop(w));
  }
  out.annulus_energy = std::sqrt(annulus);
  out.relation_error = wg.squared_norm() == 0.0 && central.squared_norm() == 0.0
                           ? 0.0
                           : relative_error(central, wg);
  return out;
}

SubcellPeak subcell_refine(const Grid2& resp, CellIndex peak) {
  auto fit = [](double left, double mid, double right) {
    const double curvature = left - 2.0 * mid + right;
    if (!(curvature < 0.0)) return 0.0;
    const double off = 0.5 * (left - right) / curvature;
    return std::clamp(off, -0.999, 0.999);
  };
  SubcellPeak out{double(peak.row), double(peak.col)};
  const double mid = resp(peak.row, peak.col);
  out.row += fit(resp.wrapped(peak.row - 1, peak.col), mid, resp.wrapped(peak.row + 1, peak.col));
  out.col += fit(resp.wrapped(peak.row, peak.col - 1), mid, resp.wrapped(peak.row, peak.col + 1));
  return out;
}

CellIndex argmax(const Grid2& g) {
  CellIndex best;
  double value = g(0, 0);
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      if (g(r, c) > value) {
        value = g(r, c);
        best = {r, c};
      }
    }
  }
  return best;
}

}  // namespace trackrel

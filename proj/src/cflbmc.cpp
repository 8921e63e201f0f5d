#include "trackrel/cflbmc.hpp"

#include <cmath>

namespace trackrel {
namespace {

double root_size(const SpectrumGrid2& s) { return std::sqrt(static_cast<double>(s.size())); }

void require_finite(const Grid2& g, const char* what) {
  for (double v : g.values()) {
    if (!std::isfinite(v)) throw NumericError(std::string(what) + " contains non-finite values");
  }
}

}  // namespace

MaskSpec::MaskSpec(int th, int tw, int dh, int dw)
    : full_h(th), full_w(tw), active_h(dh), active_w(dw) {
  if (dh < 1 || dw < 1 || dh > th || dw > tw) {
    throw ShapeError("mask: active block " + std::to_string(dh) + "x" + std::to_string(dw) +
                     " must fit in " + std::to_string(th) + "x" + std::to_string(tw));
  }
}

Grid2 MaskSpec::pad(const Grid2& active) const {
  if (active.height() != active_h || active.width() != active_w) {
    throw ShapeError("mask pad: expected active block, got " + active.shape_string());
  }
  return pad_centered(active, full_h, full_w);
}

Grid2 MaskSpec::crop(const Grid2& full) const {
  if (full.height() != full_h || full.width() != full_w) {
    throw ShapeError("mask crop: expected full grid, got " + full.shape_string());
  }
  return crop_centered(full, active_h, active_w);
}

Grid2 MaskSpec::indicator() const { return pad(Grid2(active_h, active_w, 1.0)); }

void AlmConfig::validate() const {
  if (!(mu0 > 0.0) || !(mu_max >= mu0)) throw Error("alm config: need 0 < mu0 <= mu_max");
  if (!(beta > 1.0)) throw Error("alm config: beta must exceed 1");
  if (!(lambda > 0.0)) throw Error("alm config: lambda must be positive");
  if (iterations < 1) throw Error("alm config: iterations must be >= 1");
}

AlmState AlmState::zeros(const MaskSpec& mask, int channels, double mu0) {
  AlmState s;
  const SpectrumGrid2 zero(mask.full_h, mask.full_w);
  s.g_hat.assign(channels, zero);
  s.omega_hat.assign(channels, zero);
  s.zeta_hat.assign(channels, zero);
  s.omega.assign(channels, Grid2(mask.active_h, mask.active_w));
  s.mu.assign(channels, mu0);
  return s;
}

void AlmState::set_omega(int l, Grid2 w, const MaskSpec& mask) {
  omega_hat[l] = dft2(mask.pad(w));
  omega_hat[l] *= Complex(std::sqrt(static_cast<double>(mask.full_size())));
  omega[l] = std::move(w);
}

SpectrumGrid2 subproblem_g(const AlmState& state, const std::vector<SpectrumGrid2>& x_hat,
                           const SpectrumGrid2& y_hat, int l) {
  const int channels = static_cast<int>(x_hat.size());
  const double mu = state.mu[l];
  SpectrumGrid2 out(y_hat.height(), y_hat.width());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Complex xl = x_hat[l].storage()[k];
    Complex cross = 0.0;
    for (int i = 0; i < channels; ++i) {
      if (i != l) cross += std::conj(x_hat[i].storage()[k]) * state.g_hat[i].storage()[k];
    }
    const Complex num = std::conj(y_hat.storage()[k]) * xl + mu * state.omega_hat[l].storage()[k] -
                        state.zeta_hat[l].storage()[k] - xl * cross;
    out.storage()[k] = num / (std::norm(xl) + mu);
  }
  return out;
}

Grid2 subproblem_omega(const AlmState& state, const MaskSpec& mask, const AlmConfig& cfg, int l) {
  const double root_t = root_size(state.g_hat[l]);
  const Grid2 g = mask.crop(idft2_real(state.g_hat[l]));
  const Grid2 z = mask.crop(idft2_real(state.zeta_hat[l]));
  const double mu = state.mu[l];
  const double denom = (mu + cfg.lambda / mask.full_size()) * root_t;
  Grid2 out(mask.active_h, mask.active_w);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.storage()[i] = (mu * g.storage()[i] + z.storage()[i]) / denom;
  }
  return out;
}

void update_multipliers(AlmState& state) {
  for (std::size_t l = 0; l < state.zeta_hat.size(); ++l) {
    auto& z = state.zeta_hat[l].storage();
    const auto& g = state.g_hat[l].storage();
    const auto& w = state.omega_hat[l].storage();
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += state.mu[l] * (g[k] - w[k]);
  }
}

void update_mu(AlmState& state, const AlmConfig& cfg) {
  for (double& m : state.mu) m = std::min(cfg.mu_max, cfg.beta * m);
}

void alm_iteration(AlmState& state, const std::vector<SpectrumGrid2>& x_hat,
                   const SpectrumGrid2& y_hat, const MaskSpec& mask, const AlmConfig& cfg) {
  const int channels = static_cast<int>(x_hat.size());
  for (int l = 0; l < channels; ++l) state.g_hat[l] = subproblem_g(state, x_hat, y_hat, l);
  for (int l = 0; l < channels; ++l) state.set_omega(l, subproblem_omega(state, mask, cfg, l), mask);
  update_multipliers(state);
  update_mu(state, cfg);
  ++state.iteration;
}

FilterBank solve_cflbmc(const ChannelPatch& base, const LabelMap& labels, const MaskSpec& mask,
                        const AlmConfig& cfg, const AlmObserver& observer) {
  cfg.validate();
  base.validate();
  if (base.height() != mask.full_h || base.width() != mask.full_w ||
      !labels.values.same_shape(base.channels.front())) {
    throw ShapeError("solve_cflbmc: base " + base.channels.front().shape_string() + ", labels " +
                     labels.values.shape_string() + ", mask " + std::to_string(mask.full_h) +
                     "x" + std::to_string(mask.full_w) + " disagree");
  }
  for (const auto& ch : base.channels) require_finite(ch, "base sample");
  require_finite(labels.values, "labels");

  std::vector<SpectrumGrid2> x_hat;
  x_hat.reserve(base.channels.size());
  for (const auto& ch : base.channels) x_hat.push_back(dft2(ch));
  const SpectrumGrid2 y_hat = dft2(labels.values);

  AlmState state = AlmState::zeros(mask, base.count(), cfg.mu0);
  for (int it = 0; it < cfg.iterations; ++it) {
    alm_iteration(state, x_hat, y_hat, mask, cfg);
    if (observer) observer(state);
  }
  return FilterBank(state.omega);
}

double cflbmc_objective(const ChannelPatch& base, const LabelMap& labels, const MaskSpec& mask,
                        const FilterBank& filter, double lambda) {
  FilterBank padded;
  for (const auto& w : filter.weights) padded.weights.push_back(mask.pad(w));
  const Grid2 r = response_map(padded, base);
  return 0.5 * squared_norm(labels.values - r) + 0.5 * lambda * filter.squared_norm();
}

Grid2 response_map(const FilterBank& filter, const ChannelPatch& sample) {
  sample.validate();
  if (filter.count() != sample.count()) {
    throw ShapeError("response_map: filter has " + std::to_string(filter.count()) +
                     " channels, sample has " + std::to_string(sample.count()));
  }
  SpectrumGrid2 acc(sample.height(), sample.width());
  for (int l = 0; l < filter.count(); ++l) {
    if (!filter.weights[l].same_shape(sample.channels[l])) {
      throw ShapeError("response_map: filter " + filter.weights[l].shape_string() +
                       " vs sample " + sample.channels[l].shape_string());
    }
    acc += correlate_spectra(dft2(filter.weights[l]), dft2(sample.channels[l]));
  }
  return idft2_real(acc);
}

}  // namespace trackrel

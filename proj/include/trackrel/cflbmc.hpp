#pragma once

#include <functional>
#include <vector>

#include "trackrel/features.hpp"
#include "trackrel/filter_bank.hpp"
#include "trackrel/geometry.hpp"

namespace trackrel {

/// Centered D-block inside a T grid. P keeps the block and zeroes the rest.
struct MaskSpec {
  int full_h = 1;
  int full_w = 1;
  int active_h = 1;
  int active_w = 1;

  MaskSpec() = default;
  MaskSpec(int full_h, int full_w, int active_h, int active_w);

  int offset_r() const { return centered_offset(full_h, active_h); }
  int offset_c() const { return centered_offset(full_w, active_w); }
  int full_size() const { return full_h * full_w; }

  Grid2 pad(const Grid2& active) const;
  Grid2 crop(const Grid2& full) const;
  /// 1 inside the active block, 0 outside.
  Grid2 indicator() const;
};

struct AlmConfig {
  double mu0 = 0.01;
  double beta = 1.1;
  double mu_max = 20.0;
  double lambda = 10.0;
  int iterations = 6;

  void validate() const;
};

/// Iterates of the augmented Lagrangian. Spectra are unitary DFTs scaled by
/// sqrt(T), so omega_hat[l] is the plain (unnormalized) DFT of pad(omega[l]).
struct AlmState {
  std::vector<SpectrumGrid2> g_hat;
  std::vector<Grid2> omega;
  std::vector<SpectrumGrid2> omega_hat;
  std::vector<SpectrumGrid2> zeta_hat;
  std::vector<double> mu;
  int iteration = 0;

  static AlmState zeros(const MaskSpec& mask, int channels, double mu0);
  void set_omega(int l, Grid2 w, const MaskSpec& mask);
};

/// Minimizer of the g-subproblem for channel l with the other channels fixed
/// at their current state (Gauss-Seidel in ascending channel order).
SpectrumGrid2 subproblem_g(const AlmState& state, const std::vector<SpectrumGrid2>& x_hat,
                           const SpectrumGrid2& y_hat, int l);

/// Closed-form omega update for channel l: (mu g_l + zeta_l) / (mu + lambda / T).
Grid2 subproblem_omega(const AlmState& state, const MaskSpec& mask, const AlmConfig& cfg, int l);

/// zeta_hat += mu (g_hat - omega_hat) per channel.
void update_multipliers(AlmState& state);

/// mu = min(mu_max, beta mu) per channel.
void update_mu(AlmState& state, const AlmConfig& cfg);

/// One full iteration: g sweep, omega, multipliers, mu.
void alm_iteration(AlmState& state, const std::vector<SpectrumGrid2>& x_hat,
                   const SpectrumGrid2& y_hat, const MaskSpec& mask, const AlmConfig& cfg);

using AlmObserver = std::function<void(const AlmState&)>;

/// Filter of active-block dims minimizing
///   1/2 ||y - sum_l corr(P^T w_l, x_l)||^2 + lambda/2 sum_l ||w_l||^2.
FilterBank solve_cflbmc(const ChannelPatch& base, const LabelMap& labels, const MaskSpec& mask,
                        const AlmConfig& cfg, const AlmObserver& observer = {});

/// Objective above for a filter of active-block dims.
double cflbmc_objective(const ChannelPatch& base, const LabelMap& labels, const MaskSpec& mask,
                        const FilterBank& filter, double lambda);

/// Sum over channels of circ_correlate(filter_l, sample_l); filter and sample
/// share dims.
Grid2 response_map(const FilterBank& filter, const ChannelPatch& sample);

}  // namespace trackrel

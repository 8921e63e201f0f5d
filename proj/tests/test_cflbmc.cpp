#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "trackrel/cflbmc.hpp"

using namespace trackrel;

namespace {

struct Instance {
  ChannelPatch base;
  LabelMap labels;
  MaskSpec mask;
};

Instance make_instance(int channels, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  Instance in;
  for (int l = 0; l < channels; ++l) in.base.channels.push_back(oracle::random_grid(8, 8, rng, 0.0, scale));
  in.labels = gaussian_labels(8, 8, {0, 0}, label_sigma(4, 4));
  in.mask = MaskSpec(8, 8, 4, 4);
  return in;
}

FilterBank oracle_filter(const Instance& in, double lambda) {
  const auto a = oracle::circulant_design(in.base, 4, 4);
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(a.cols(), std::sqrt(lambda));
  return oracle::to_bank(oracle::ridge(a, oracle::flat(in.labels.values), q), in.base.count(), 4, 4);
}

}  // namespace

TEST_CASE("mask spec") {
  const MaskSpec m(8, 9, 4, 3);
  CHECK(m.offset_r() == 2);
  CHECK(m.offset_c() == 3);
  const Grid2 ind = m.indicator();
  CHECK(ind(2, 3) == 1.0);
  CHECK(ind(1, 3) == 0.0);
  CHECK(ind(5, 5) == 1.0);
  CHECK(ind(5, 6) == 0.0);
  CHECK_THROWS_AS(MaskSpec(4, 4, 5, 2), ShapeError);
}

TEST_CASE("zero base gives zero filter") {
  Instance in = make_instance(2, 1, 1.0);
  for (auto& ch : in.base.channels) ch = Grid2(8, 8);
  AlmConfig cfg;
  cfg.iterations = 20;
  const FilterBank f = solve_cflbmc(in.base, in.labels, in.mask, cfg);
  CHECK(f.squared_norm() == 0.0);
}

TEST_CASE("matches the masked ridge oracle") {
  AlmConfig cfg;
  cfg.iterations = 50;
  for (int channels : {1, 2}) {
    const Instance in = make_instance(channels, 100 + channels, 0.1);
    const FilterBank f = solve_cflbmc(in.base, in.labels, in.mask, cfg);
    const FilterBank ref = oracle_filter(in, cfg.lambda);
    CHECK(relative_error(f, ref) <= 1e-3);
    const double ours = cflbmc_objective(in.base, in.labels, in.mask, f, cfg.lambda);
    const double best = cflbmc_objective(in.base, in.labels, in.mask, ref, cfg.lambda);
    CHECK(ours <= best * 1.001);
  }
}

TEST_CASE("objective is non-increasing and the constraint residual shrinks") {
  const Instance in = make_instance(3, 7, 0.1);
  AlmConfig cfg;
  cfg.iterations = 50;
  std::vector<double> objective;
  std::vector<double> residual;
  solve_cflbmc(in.base, in.labels, in.mask, cfg, [&](const AlmState& s) {
    objective.push_back(cflbmc_objective(in.base, in.labels, in.mask, FilterBank(s.omega), cfg.lambda));
    double num = 0.0, den = 0.0;
    for (std::size_t l = 0; l < s.g_hat.size(); ++l) {
      num += squared_norm(s.g_hat[l] - s.omega_hat[l]);
      den += squared_norm(s.g_hat[l]);
    }
    residual.push_back(std::sqrt(num / den));
  });
  for (std::size_t i = 1; i < objective.size(); ++i) CHECK(objective[i] <= objective[i - 1] * (1 + 1e-9));
  CHECK(residual.back() <= 1e-3);
}

TEST_CASE("mask support is exact") {
  const Instance in = make_instance(2, 3, 0.1);
  AlmConfig cfg;
  const FilterBank f = solve_cflbmc(in.base, in.labels, in.mask, cfg);
  for (const auto& w : f.weights) {
    const Grid2 full = in.mask.pad(w);
    const Grid2 ind = in.mask.indicator();
    for (std::size_t i = 0; i < full.size(); ++i)
      if (ind.storage()[i] == 0.0) CHECK(full.storage()[i] == 0.0);
  }
}

TEST_CASE("subproblem_g limits") {
  const Instance in = make_instance(1, 9, 1.0);
  std::vector<SpectrumGrid2> x_hat{dft2(in.base.channels[0])};
  const SpectrumGrid2 y_hat = dft2(in.labels.values);
  AlmState s = AlmState::zeros(in.mask, 1, 1e9);
  std::mt19937_64 rng(1);
  s.set_omega(0, oracle::random_grid(4, 4, rng), in.mask);
  const SpectrumGrid2 g = subproblem_g(s, x_hat, y_hat, 0);
  CHECK(std::sqrt(squared_norm(g - s.omega_hat[0]) / squared_norm(s.omega_hat[0])) < 1e-6);

  s.mu[0] = 0.5;
  s.zeta_hat[0] = dft2(oracle::random_grid(8, 8, rng));
  std::vector<SpectrumGrid2> zero{SpectrumGrid2(8, 8)};
  const SpectrumGrid2 g0 = subproblem_g(s, zero, y_hat, 0);
  const SpectrumGrid2 expect = s.omega_hat[0] - Complex(2.0) * s.zeta_hat[0];
  CHECK(squared_norm(g0 - expect) < 1e-20);
}

TEST_CASE("subproblem_g minimizes the per-frequency quadratic") {
  // With the others fixed, the g-subproblem at frequency k is
  //   1/2 |y_k - conj(g) x_k - c_k|^2 + Re(conj(z_k)(g - o_k)) + mu/2 |g - o_k|^2
  // with c_k = sum_{i != l} conj(g_i) x_i. Perturbing the solution must not lower it.
  std::mt19937_64 rng(21);
  const MaskSpec mask(4, 4, 2, 2);
  std::vector<SpectrumGrid2> x_hat;
  for (int l = 0; l < 2; ++l) x_hat.push_back(dft2(oracle::random_grid(4, 4, rng)));
  const SpectrumGrid2 y_hat = dft2(oracle::random_grid(4, 4, rng));
  AlmState s = AlmState::zeros(mask, 2, 0.3);
  s.g_hat[1] = dft2(oracle::random_grid(4, 4, rng));
  s.zeta_hat[0] = dft2(oracle::random_grid(4, 4, rng));
  s.set_omega(0, oracle::random_grid(2, 2, rng), mask);
  const SpectrumGrid2 g = subproblem_g(s, x_hat, y_hat, 0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    auto f = [&](Complex v) {
      const Complex c = std::conj(s.g_hat[1].storage()[k]) * x_hat[1].storage()[k];
      const Complex e = y_hat.storage()[k] - std::conj(v) * x_hat[0].storage()[k] - c;
      const Complex d = v - s.omega_hat[0].storage()[k];
      return 0.5 * std::norm(e) + std::real(std::conj(s.zeta_hat[0].storage()[k]) * d) + 0.15 * std::norm(d);
    };
    const double best = f(g.storage()[k]);
    for (int t = 0; t < 8; ++t) CHECK(f(g.storage()[k] + 1e-3 * Complex(u(rng), u(rng))) >= best);
  }
}

TEST_CASE("subproblem_omega is the Lagrangian stationary point") {
  // L(w) = lambda/2 ||w||^2 - <zeta, P^T w> + mu/2 ||g - P^T w||^2 in the
  // spatial domain, with g, zeta the (normalized) inverse transforms.
  std::mt19937_64 rng(17);
  const MaskSpec mask(6, 6, 3, 3);
  AlmConfig cfg;
  AlmState s = AlmState::zeros(mask, 1, 0.7);
  const Grid2 g_sp = oracle::random_grid(6, 6, rng);
  const Grid2 z_sp = oracle::random_grid(6, 6, rng);
  s.g_hat[0] = Complex(6.0) * dft2(g_sp);
  s.zeta_hat[0] = Complex(6.0) * dft2(z_sp);
  const Grid2 w = subproblem_omega(s, mask, cfg, 0);
  const double t = 36.0;
  auto lagrangian = [&](const Grid2& v) {
    const Grid2 full = mask.pad(v);
    double dot = 0.0;
    for (std::size_t i = 0; i < full.size(); ++i) dot += z_sp.storage()[i] * full.storage()[i];
    return 0.5 * cfg.lambda / t * squared_norm(v) - dot + 0.5 * 0.7 * squared_norm(g_sp - full);
  };
  for (int i = 0; i < 9; ++i) {
    Grid2 plus = w, minus = w;
    plus.storage()[i] += 1e-5;
    minus.storage()[i] -= 1e-5;
    CHECK(std::abs((lagrangian(plus) - lagrangian(minus)) / 2e-5) <= 1e-6);
  }

  AlmState zero = AlmState::zeros(mask, 1, 0.7);
  CHECK(max_abs(subproblem_omega(zero, mask, cfg, 0)) == 0.0);
}

TEST_CASE("update_multipliers") {
  const MaskSpec mask(4, 4, 2, 2);
  AlmState s = AlmState::zeros(mask, 1, 0.01);
  std::mt19937_64 rng(2);
  s.set_omega(0, oracle::random_grid(2, 2, rng), mask);
  s.g_hat[0] = s.omega_hat[0];
  update_multipliers(s);
  CHECK(squared_norm(s.zeta_hat[0]) == 0.0);

  const SpectrumGrid2 r = dft2(oracle::random_grid(4, 4, rng));
  s.g_hat[0] = s.omega_hat[0] + r;
  update_multipliers(s);
  CHECK(squared_norm(s.zeta_hat[0] - Complex(0.01) * r) < 1e-24);
  update_multipliers(s);
  CHECK(squared_norm(s.zeta_hat[0] - Complex(0.02) * r) < 1e-24);
}

TEST_CASE("update_mu") {
  AlmConfig cfg;
  AlmState s;
  s.mu = {0.01};
  update_mu(s, cfg);
  CHECK(s.mu[0] == doctest::Approx(0.011));
  s.mu = {20.0};
  update_mu(s, cfg);
  CHECK(s.mu[0] == 20.0);
  s.mu = {0.01};
  for (int i = 0; i < 100; ++i) update_mu(s, cfg);
  CHECK(s.mu[0] == doctest::Approx(std::min(20.0, 0.01 * std::pow(1.1, 100))));
}

TEST_CASE("config validation and shape errors") {
  AlmConfig bad;
  bad.beta = 1.0;
  CHECK_THROWS(bad.validate());
  const Instance in = make_instance(1, 1, 1.0);
  CHECK_THROWS_AS(solve_cflbmc(in.base, in.labels, MaskSpec(6, 6, 2, 2), AlmConfig{}), ShapeError);
  Instance nan = in;
  nan.base.channels[0](0, 0) = std::nan("");
  CHECK_THROWS_AS(solve_cflbmc(nan.base, nan.labels, nan.mask, AlmConfig{}), NumericError);
}

TEST_CASE("response_map equals brute force") {
  std::mt19937_64 rng(4);
  ChannelPatch x;
  FilterBank f;
  for (int l = 0; l < 3; ++l) {
    x.channels.push_back(oracle::random_grid(5, 7, rng));
    f.weights.push_back(oracle::random_grid(5, 7, rng));
  }
  Grid2 expect(5, 7);
  for (int l = 0; l < 3; ++l) expect += oracle::correlate(f.weights[l], x.channels[l]);
  CHECK(max_abs(response_map(f, x) - expect) <= 1e-9);
  CHECK(max_abs(response_map(FilterBank(3, 5, 7), x)) == 0.0);
}

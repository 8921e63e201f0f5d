#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "trackrel/grid.hpp"

using namespace trackrel;

TEST_CASE("grid construction validates dims") {
  CHECK_THROWS_AS(Grid2(0, 3), ShapeError);
  CHECK_THROWS_AS(Grid2(2, 2, std::vector<double>(3)), ShapeError);
  Grid2 g(3, 4);
  g(1, 2) = 5.0;
  CHECK(g.wrapped(-2, -2) == 5.0);
  CHECK(g.wrapped(4, 6) == 5.0);
}

TEST_CASE("dft2 basics") {
  const auto zero = dft2(Grid2(4, 5));
  CHECK(squared_norm(zero) == 0.0);

  const auto dc = dft2(Grid2(3, 5, 2.0));
  CHECK(std::abs(dc(0, 0) - Complex(2.0 * std::sqrt(15.0))) < 1e-12);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 5; ++c)
      if (r || c) CHECK(std::abs(dc(r, c)) < 1e-12);

  std::mt19937_64 rng(7);
  const Grid2 g = oracle::random_grid(8, 8, rng);
  CHECK(std::abs(std::sqrt(squared_norm(g)) - std::sqrt(squared_norm(dft2(g)))) < 1e-10);
}

TEST_CASE("dft2 matches the direct unitary sum") {
  std::mt19937_64 rng(3);
  const Grid2 g = oracle::random_grid(3, 4, rng);
  const auto s = dft2(g);
  for (int u = 0; u < 3; ++u)
    for (int v = 0; v < 4; ++v) {
      Complex acc = 0.0;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c)
          acc += g(r, c) * std::polar(1.0, -2.0 * std::numbers::pi * (u * r / 3.0 + v * c / 4.0));
      CHECK(std::abs(s(u, v) - acc / std::sqrt(12.0)) < 1e-12);
    }
}

TEST_CASE("dft2 spectra of real grids are conjugate symmetric") {
  std::mt19937_64 rng(11);
  const auto s = dft2(oracle::random_grid(5, 6, rng));
  for (int u = 0; u < 5; ++u)
    for (int v = 0; v < 6; ++v) CHECK(std::abs(s(u, v) - std::conj(s.wrapped(-u, -v))) < 1e-12);
}

TEST_CASE("idft2 round trip and errors") {
  std::mt19937_64 rng(1);
  const Grid2 g = oracle::random_grid(16, 16, rng);
  const Grid2 back = idft2(dft2(g));
  CHECK(max_abs(back - g) < 1e-10);

  CHECK(max_abs(idft2(SpectrumGrid2(4, 4))) == 0.0);
  SpectrumGrid2 dc(4, 4);
  dc(0, 0) = 8.0;
  const Grid2 flat = idft2(dc);
  for (double v : flat.values()) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));

  SpectrumGrid2 bad(4, 4);
  bad(0, 1) = Complex(1.0, 0.0);
  CHECK_THROWS_AS(idft2(bad), NumericError);
}

TEST_CASE("dft2 is linear") {
  std::mt19937_64 rng(5);
  const Grid2 a = oracle::random_grid(6, 7, rng);
  const Grid2 b = oracle::random_grid(6, 7, rng);
  const auto lhs = dft2(2.5 * a + (-1.5) * b);
  const auto rhs = Complex(2.5) * dft2(a) + Complex(-1.5) * dft2(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i)
    worst = std::max(worst, std::abs(lhs.storage()[i] - rhs.storage()[i]));
  CHECK(worst < 1e-10);
}

TEST_CASE("circ_correlate") {
  std::mt19937_64 rng(2);
  const Grid2 base = oracle::random_grid(6, 6, rng);
  Grid2 delta(6, 6);
  delta(0, 0) = 1.0;
  CHECK(max_abs(circ_correlate(delta, base) - base) < 1e-12);

  const Grid2 f = oracle::random_grid(6, 6, rng);
  CHECK(max_abs(circ_correlate(f, base) - oracle::correlate(f, base)) < 1e-9);

  const Grid2 self = circ_correlate(base, base);
  for (double v : self.values()) CHECK(v <= self(0, 0) + 1e-12);

  CHECK_THROWS_AS(circ_correlate(Grid2(2, 3), Grid2(3, 2)), ShapeError);
}

TEST_CASE("hann2") {
  CHECK(hann2(1, 1)(0, 0) == 1.0);
  const Grid2 w4 = hann2(4, 4);
  CHECK(w4(0, 0) == 0.0);
  CHECK(w4(3, 3) == doctest::Approx(0.0));
  const Grid2 w8 = hann2(8, 8);
  auto h = [](int n) { return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / 7.0)); };
  CHECK(w8(3, 4) == doctest::Approx(h(3) * h(4)).epsilon(1e-14));
  CHECK(w8(4, 3) == doctest::Approx(h(4) * h(3)).epsilon(1e-14));
  const Grid2 w = hann2(7, 10);
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 10; ++c) {
      CHECK(w(r, c) == doctest::Approx(w(6 - r, c)));
      CHECK(w(r, c) == doctest::Approx(w(r, 9 - c)));
      CHECK(w(r, c) >= 0.0);
      CHECK(w(r, c) <= w(3, 4) + 1e-15);
    }
}

TEST_CASE("pointwise") {
  std::mt19937_64 rng(9);
  const auto a = dft2(oracle::random_grid(5, 5, rng));
  const SpectrumGrid2 ones(5, 5, Complex(1.0));
  CHECK(pointwise(a, ones, PointwiseOp::multiply) == a);

  const auto power = pointwise(a, a, PointwiseOp::conj_multiply);
  for (const Complex& v : power.values()) {
    CHECK(v.imag() == 0.0);
    CHECK(v.real() >= 0.0);
  }

  SpectrumGrid2 b(5, 5);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (auto& v : b.storage()) v = std::polar(u(rng), u(rng));
  const auto back = pointwise(pointwise(a, b, PointwiseOp::multiply), b, PointwiseOp::divide);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(back.storage()[i] - a.storage()[i]) < 1e-10);

  b(2, 3) = 0.0;
  try {
    pointwise(a, b, PointwiseOp::divide);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("(2, 3)") != std::string::npos);
  }
  CHECK_THROWS_AS(pointwise(a, SpectrumGrid2(4, 5), PointwiseOp::multiply), ShapeError);
}

TEST_CASE("Parseval and correlation on every size up to 8x8") {
  std::mt19937_64 rng(42);
  for (int h = 1; h <= 8; ++h)
    for (int w = 1; w <= 8; ++w) {
      const Grid2 g = oracle::random_grid(h, w, rng);
      const double n = squared_norm(g);
      CHECK(std::abs(n - squared_norm(dft2(g))) <= 1e-9 * n);
      const Grid2 f = oracle::random_grid(h, w, rng);
      CHECK(max_abs(circ_correlate(f, g) - oracle::correlate(f, g)) <= 1e-9);
    }
}

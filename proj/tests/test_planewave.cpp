#include <doctest.h>

#include <cmath>
#include <random>

#include "fgt/planewave.hpp"
#include "oracles.hpp"

using namespace fgt;

TEST_CASE("cutoff and quadrature step") {
  const double d0 = gauss_cutoff(1e-6);
  CHECK(d0 == doctest::Approx(3.8619).epsilon(1e-4));
  const PwQuadrature q = pw_params(1e-6, 1.0, 2 * d0, 1);
  CHECK(q.n_modes == 30);
  CHECK(q.step == doctest::Approx(2 * M_PI / (3 * d0)).epsilon(1e-14));
  CHECK(q.step == doctest::Approx(0.54232).epsilon(1e-4));
  CHECK(q.weights.size() == 30);
  CHECK(q.total_modes() == 30);
  CHECK(pw_params(1e-6, 1.0, 2 * d0, 3).total_modes() == 27000);
}

TEST_CASE("mode counts by tolerance and range") {
  const int tab[3][6] = {{12, 20, 30, 38, 48, 56}, {16, 28, 38, 50, 62, 74}, {20, 34, 48, 64, 78, 92}};
  for (int r = 0; r < 3; ++r)
    for (int e = 0; e < 6; ++e) {
      const double eps = std::pow(10.0, -2.0 * (e + 1));
      const double range = (r + 2) * gauss_cutoff(eps);
      CAPTURE(eps);
      CAPTURE(r);
      CHECK(pw_params(eps, 1e-3, range, 1).n_modes == tab[r][e]);
    }
}

TEST_CASE("gauss_eval") {
  const double zero[2] = {0, 0};
  CHECK(gauss_eval({zero, 2}, 0.3) == 1.0);
  const double x[2] = {0.1, 0.2};
  CHECK(gauss_eval({x, 2}, 0.05) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  const double y = std::sqrt(0.2 * std::log(2.0));
  CHECK(gauss_eval({&y, 1}, 0.2) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("plane-wave kernel error") {
  std::mt19937_64 rng(3);
  for (double eps : {1e-4, 1e-10})
    for (int dim : {1, 2, 3}) {
      const double delta = 1e-3, d0 = gauss_cutoff(eps), range = 3 * d0;
      const PwQuadrature q = pw_params(eps, delta, range, dim);
      std::uniform_real_distribution<double> u(-range * std::sqrt(delta), range * std::sqrt(delta));
      double err = std::fabs(pw_kernel_eval(q, std::vector<double>(dim, 0.0)) - 1);
      for (int i = 0; i < 2000; ++i) {
        double x[3];
        for (int a = 0; a < dim; ++a) x[a] = u(rng);
        err = std::max(err, std::fabs(pw_kernel_eval(q, {x, std::size_t(dim)}) - gauss_eval({x, std::size_t(dim)}, delta)));
      }
      CAPTURE(dim);
      CHECK(err <= dim * eps);
    }
}

TEST_CASE("2D grid sweep") {
  const double eps = 1e-8, delta = 0.5, range = 2 * gauss_cutoff(eps);
  const PwQuadrature q = pw_params(eps, delta, range, 2);
  const double L = range * std::sqrt(delta);
  double err = 0;
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      const double x[2] = {-L + 2 * L * i / 99, -L + 2 * L * j / 99};
      err = std::max(err, std::fabs(pw_kernel_eval(q, x) - gauss_eval(x, delta)));
    }
  CHECK(err <= 2 * eps);
}

TEST_CASE("periodic series lengths") {
  const int tab[3][6] = {{3, 4, 4, 5, 5, 6}, {7, 10, 12, 14, 16, 17}, {22, 31, 38, 44, 49, 53}};
  const double deltas[3] = {1e-1, 1e-2, 1e-3};
  for (int r = 0; r < 3; ++r)
    for (int e = 0; e < 6; ++e) {
      const double eps = std::pow(10.0, -2.0 * (e + 1));
      CAPTURE(eps);
      CHECK(periodic_params(eps, deltas[r]).n_terms == tab[r][e]);
    }
  const PeriodicSeries s = periodic_params(1e-6, 1e-2);
  REQUIRE(s.coeffs.size() == 25);
  CHECK(s.coeffs[12] == doctest::Approx(std::sqrt(M_PI * 1e-2)));
}

TEST_CASE("periodic kernel against images") {
  for (double delta : {1e-3, 1e-2, 1e-1, 1.0})
    for (double x : {0.0, 0.1, -0.37, 0.5}) {
      const double ref = static_cast<double>(oracle::periodic_gauss(x, delta));
      CAPTURE(delta);
      CAPTURE(x);
      CHECK(std::fabs(periodic_gauss_1d(x, delta, 1e-12) - ref) <= 1e-12 * std::max(1.0, ref));
    }
  CHECK(periodic_gauss_1d(0.0, 1e-3, 1e-14) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(periodic_gauss_1d(0.5, 1e-2, 1e-16) == doctest::Approx(2 * std::exp(-25.0)).epsilon(1e-10));
  const double x[3] = {0.2, -0.4, 0.45};
  double prod = 1;
  for (double xi : x) prod *= static_cast<double>(oracle::periodic_gauss(xi, 0.05));
  CHECK(periodic_kernel_eval(x, 0.05, 1e-14) == doctest::Approx(prod).epsilon(1e-12));
}

TEST_CASE("expansion bases") {
  const PwQuadrature q = pw_params(1e-6, 1e-2, 10.0, 2);
  const PlaneWaveBasis b = make_basis(q);
  CHECK(b.n_modes == q.n_modes);
  CHECK(b.total_modes() == std::size_t(q.n_modes * q.n_modes));
  CHECK(b.spacing == doctest::Approx(q.step / std::sqrt(1e-2)));
  CHECK_FALSE(b.periodic_series);

  const PeriodicSeries s = periodic_params(1e-6, 1e-2);
  const PlaneWaveBasis p = make_basis(s, 3);
  CHECK(p.periodic_series);
  CHECK(p.n_modes == 2 * s.n_terms + 2);
  CHECK(p.spacing == doctest::Approx(2 * M_PI));
  CHECK(p.weights.front() < 1e-6);
  CHECK(p.mode(0) == -s.n_terms - 1);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "fgt/planewave.hpp"
#include "fgt/poly1d.hpp"
#include "oracles.hpp"

using namespace fgt;

TEST_CASE("small Gauss rules") {
  const QuadratureRule r2 = gauss_legendre(2);
  CHECK(r2.nodes[0] == doctest::Approx(-1 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
  const QuadratureRule r3 = gauss_legendre(3);
  CHECK(r3.nodes[0] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-15));
  CHECK(std::fabs(r3.nodes[1]) < 1e-16);
  CHECK(r3.weights[0] == doctest::Approx(5.0 / 9).epsilon(1e-15));
  CHECK(r3.weights[1] == doctest::Approx(8.0 / 9).epsilon(1e-15));
}

TEST_CASE("Gauss rules against the oracle and monomials") {
  for (int k = 2; k <= 24; ++k) {
    const QuadratureRule r = legendre_nodes_weights(k);
    const oracle::Rule& o = oracle::gl(k);
    for (int i = 0; i < k; ++i) {
      CHECK(std::fabs(r.nodes[i] - static_cast<double>(o.x[k - 1 - i])) < 1e-15);
      CHECK(std::fabs(r.weights[i] - static_cast<double>(o.w[k - 1 - i])) < 1e-15);
    }
    for (int p = 0; p <= 2 * k - 1; ++p) {
      double s = 0;
      for (int i = 0; i < k; ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      CHECK(std::fabs(s - exact) <= 1e-14);
    }
  }
  CHECK_THROWS(legendre_nodes_weights(1));
  CHECK_THROWS(legendre_nodes_weights(25));
}

TEST_CASE("tensor coefficient transforms") {
  const int k = 6;
  const LegendreBasis b(k);
  std::vector<double> ones(k * k, 3.0);
  const std::vector<double> c = vals_to_coeffs(ones, b, 2);
  CHECK(c[0] == doctest::Approx(3.0).epsilon(1e-14));
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(std::fabs(c[i]) < 1e-14);

  std::vector<double> v(k * k);
  double p[8];
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      legendre_values(b.rule.nodes[i], 2, p);
      const double px = p[2];
      legendre_values(b.rule.nodes[j], 2, p);
      v[j * k + i] = px * p[1];
    }
  const std::vector<double> c2 = vals_to_coeffs(v, b, 2);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) CHECK(std::fabs(c2[j * k + i] - (i == 2 && j == 1 ? 1.0 : 0.0)) < 1e-14);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int dim : {1, 2, 3}) {
    std::vector<double> r(ipow(k, dim));
    for (auto& x : r) x = u(rng);
    const std::vector<double> back = vals_to_coeffs(coeffs_to_vals(r, b, dim), b, dim);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::fabs(back[i] - r[i]) < 1e-13);
    const double at[3] = {0.3, -0.7, 0.1};
    double ref = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::size_t rem = i;
      double term = r[i];
      for (int a = 0; a < dim; ++a) {
        term *= static_cast<double>(oracle::legendre(static_cast<int>(rem % k), at[a]));
        rem /= k;
      }
      ref += term;
    }
    CHECK(eval_legendre_expansion(r, k, dim, {at, std::size_t(dim)}) == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("Gaussian moments") {
  CHECK(gauss_moment_J(0.125, 0, 0.0)[0] == doctest::Approx(std::sqrt(M_PI) * std::erf(8.0) / 8).epsilon(1e-14));
  const std::vector<double> odd = gauss_moment_J(0.3, 9, 0.0);
  for (int n = 1; n <= 9; n += 2) CHECK(std::fabs(odd[n]) < 1e-15);

  for (double lambda : {0.01, 0.05, 0.1, 0.125, 0.3, 1.0, 3.0})
    for (double t : {-3.0, -1.2, -1.0, -0.4, 0.0, 0.7, 1.0, 2.5}) {
      const std::vector<double> j = gauss_moment_J(lambda, 23, t);
      for (int n = 0; n <= 23; ++n) {
        const double ref = static_cast<double>(oracle::gauss_moment(lambda, n, t));
        const double scale = std::max(std::fabs(ref), 1e-16 * lambda);
        CAPTURE(lambda);
        CAPTURE(t);
        CAPTURE(n);
        CHECK(std::fabs(j[n] - ref) <= 1e-12 * std::max(scale, static_cast<double>(oracle::gauss_moment(lambda, 0, t))));
      }
    }
}

TEST_CASE("spherical Bessel and Fourier moments") {
  for (double t : {1e-3, 0.5, 3.0, 40.0}) {
    const std::vector<double> j = spherical_bessel(3, t);
    CHECK(j[0] == doctest::Approx(std::sin(t) / t).epsilon(1e-13));
    CHECK(j[1] == doctest::Approx(std::sin(t) / (t * t) - std::cos(t) / t).epsilon(1e-10));
  }
  CHECK(spherical_bessel(4, 0.0)[0] == 1.0);
  CHECK(fourier_moment_I(3, 0.0)[0].real() == doctest::Approx(2.0));
  CHECK(std::abs(fourier_moment_I(3, 0.0)[1]) < 1e-16);
  CHECK(fourier_moment_I(2, M_PI)[2].real() == doctest::Approx(-6 / (M_PI * M_PI)).epsilon(1e-13));

  for (double t : {-100.0, -17.3, -1.0, 0.01, 2.0, 9.5, 33.0, 100.0}) {
    const std::vector<cplx> v = fourier_moment_I(23, t);
    for (int n = 0; n <= 23; ++n) {
      const std::complex<long double> ref = oracle::fourier_moment(n, t);
      const double err = std::abs(v[n] - std::complex<double>(ref));
      CAPTURE(t);
      CAPTURE(n);
      CHECK(err <= 1e-12 * std::max(static_cast<double>(std::abs(ref)), 1e-4));
    }
  }
}

TEST_CASE("tail error") {
  const int k = 5;
  std::vector<double> c(k * k, 0.0);
  CHECK(tail_error(c, k, 2) == 0.0);
  c[(k - 1) * k + (k - 1)] = 1;
  int count = 0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) count += i * i + j * j >= k * k;
  CHECK(tail_error(c, k, 2) == doctest::Approx(1 / std::sqrt(double(count))));

  const int k16 = 16;
  const LegendreBasis b(k16);
  std::vector<double> v(k16 * k16);
  for (int j = 0; j < k16; ++j)
    for (int i = 0; i < k16; ++i) v[j * k16 + i] = std::exp(b.rule.nodes[i] + b.rule.nodes[j]);
  CHECK(tail_error(vals_to_coeffs(v, b, 2), k16, 2) <= 1e-12);
}

TEST_CASE("direct tables") {
  const int k = 8;
  const LegendreBasis b(k);
  const double delta = 2e-3, L = 0.125;
  CHECK(pol2pot_slot(1, -3) == 0);
  CHECK(pol2pot_slot(1, 3) == 3);
  CHECK(pol2pot_slot(-1, -1) == 5);
  CHECK(pol2pot_slot(0, -2) == 8);
  CHECK(pol2pot_slot(0, 0) == 9);
  CHECK(pol2pot_slot(0, 1) == -1);
  CHECK(pol2pot_slot(2, 0) == -1);

  const PlaneWaveBasis pw = make_basis(pw_params(1e-10, delta, 10.0, 1));
  const LevelTables lt = build_level_tables(3, L, delta, b, pw);
  const double offs[11] = {-0.75 * L, -0.25 * L, 0.25 * L, 0.75 * L, -1.5 * L, -0.5 * L, 0.5 * L, 1.5 * L, -L, 0, L};
  for (int s = 0; s < 11; ++s) {
    const double tside = s < 4 ? L / 2 : s < 8 ? 2 * L : L;
    for (int i = 0; i < k; ++i) {
      const double xi = offs[s] + tside / 2 * b.rule.nodes[i];
      for (int j = 0; j < k; ++j) {
        const double ref = static_cast<double>(L / 2 * oracle::gauss_moment(2 * std::sqrt(delta) / L, j, 2 * xi / L));
        CHECK(std::fabs(lt.pol2pot[s][i * k + j] - ref) <= 1e-12 * L);
      }
    }
  }
  for (int m = 0; m < pw.n_modes; m += 5)
    for (int j = 0; j < k; ++j) {
      const std::complex<double> ref =
          pw.weights[m] * (L / 2) * std::conj(std::complex<double>(oracle::fourier_moment(j, pw.wavenumber(m) * L / 2)));
      CHECK(std::abs(lt.pol2pw[m * k + j] - ref) <= 1e-13);
    }
  for (const cplx& z : lt.shift_out2in[1]) CHECK(z == cplx(1, 0));
  for (int m = 0; m < pw.n_modes; ++m) CHECK(std::abs(lt.shift_p2c[0][m] - std::conj(lt.shift_p2c[1][m])) < 1e-15);
}

#include <doctest.h>

#include <cmath>

#include "fgt/harness.hpp"
#include "oracles.hpp"

using namespace fgt;

TEST_CASE("generators are seeded and in the unit cube") {
  for (PointKind k : {PointKind::uniform_box, PointKind::curve_2d, PointKind::surface_3d, PointKind::perturbed_sphere})
    for (int dim : {2, 3}) {
      if ((k == PointKind::curve_2d && dim != 2) || (k == PointKind::surface_3d && dim != 3)) continue;
      const std::vector<double> a = gen_points(k, dim, 1000, 0), b = gen_points(k, dim, 1000, 0);
      CHECK(a == b);
      CHECK(a != gen_points(k, dim, 1000, 1));
      CHECK(a.size() == std::size_t(1000 * dim));
      for (double v : a) {
        CHECK(v >= 0);
        CHECK(v <= 1);
      }
    }
  CHECK(gen_points(PointKind::uniform_box, 3, 4, 0).size() == 12);
  CHECK(parse_point_kind("surface") == PointKind::surface_3d);
  CHECK(parse_point_kind(to_string(PointKind::curve_2d)) == PointKind::curve_2d);
  CHECK_THROWS(parse_point_kind("torus"));
  CHECK_THROWS(gen_points(PointKind::curve_2d, 3, 10, 0));

  const std::vector<double> s = gen_points(PointKind::surface_3d, 3, 200, 5);
  for (int i = 0; i < 200; ++i) {
    double r2 = 0;
    for (int a = 0; a < 3; ++a) r2 += (s[3 * i + a] - 0.5) * (s[3 * i + a] - 0.5);
    CHECK(std::sqrt(r2) == doctest::Approx(0.4).epsilon(1e-12));
  }
  const std::vector<double> q = gen_charges(100, 3);
  CHECK(q == gen_charges(100, 3));
  for (double v : q) CHECK((v >= 0 && v < 1));
}

TEST_CASE("reference Gaussians") {
  const GaussianMix m = reference_gaussians(3, 5, 1e-2);
  REQUIRE(m.centers.size() == 5);
  CHECK(m.centers[0] == Point{-0.3, -0.4, -0.06});
  CHECK(m.centers[4] == Point{-0.38, -0.05, -0.17});
  CHECK(m.alpha[2] == doctest::Approx(1e-2 / 3));
  const GaussianMix m2 = reference_gaussians(2, 2, 1e-4);
  CHECK(m2.centers[1][0] == -0.2);
  CHECK(m2.centers[1][1] == 0.0);
}

TEST_CASE("test densities") {
  const TestDensity p = density_sigma_p(2, 8, 1e-3);
  const double x[2] = {1.0 / 32, 0};
  CHECK(p.sigma_at(x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.boundary == Boundary::periodic);

  const TestDensity c = density_constant(3, 1e-2, Boundary::periodic);
  const double y[3] = {0.1, -0.2, 0.3};
  CHECK(c.sigma_at(y) == 1.0);
  CHECK(c.potential(y) == doctest::Approx(std::pow(M_PI * 1e-2, 1.5)).epsilon(1e-14));

  const double delta = 3e-3;
  const GaussianMix mix = reference_gaussians(2, 3, 2e-3);
  const TestDensity f = density_sigma_f(2, mix, delta);
  for (const auto& pt : {std::array<double, 2>{0.0, 0.0}, {-0.3, -0.4}, {0.49, 0.2}, {-0.5, -0.5}}) {
    long double ref = 0;
    for (int i = 0; i < 3; ++i)
      ref += oracle::gauss_conv(pt[0], mix.centers[i][0], mix.alpha[i], delta) *
             oracle::gauss_conv(pt[1], mix.centers[i][1], mix.alpha[i], delta);
    CHECK(f.potential(pt.data()) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
  }
  const double far[2] = {-0.3, -0.4};
  CHECK(f.sigma_at(far) >= 1.0);
}

TEST_CASE("error norms and grids") {
  const std::vector<double> a = {1, 2, 3}, b = {1, 2, 3.3};
  CHECK(relative_l2(a, a) == 0.0);
  CHECK(relative_l2(b, a) == doctest::Approx(0.3 / std::sqrt(14.0)));
  CHECK(max_abs_diff(a, b) == doctest::Approx(0.3));
  const std::vector<double> g = equispaced_points(2, 4);
  CHECK(g.size() == 32);
  CHECK(g[0] == -0.375);
  CHECK(g[g.size() - 1] == 0.375);
}

#include <doctest.h>

#include <cmath>
#include <map>

#include "fgt/box_fgt.hpp"
#include "fgt/output_tree.hpp"
#include "fgt/harness.hpp"
#include "fgt/planewave.hpp"
#include "oracles.hpp"

using namespace fgt;

namespace {

// Potential at every leaf node with the exact value from `exact`.
template <class F>
double leaf_error(const DensityTree& dt, const BoxFgtResult& r, F exact) {
  std::vector<double> a, e;
  for (std::int64_t b : dt.tree.leaves()) {
    const std::vector<double> p = box_nodes(dt.tree, b, dt.basis);
    auto s = r.potential.slot(dt.tree[b].grid_slot);
    for (std::size_t j = 0; j < s.size(); ++j) {
      a.push_back(s[j]);
      e.push_back(exact(&p[j * dt.tree.dim()]));
    }
  }
  return oracle::rel_l2(a, e);
}

DensityFn from_point(std::function<double(const double*)> f, int dim) {
  return [f, dim](std::span<const double> p, std::span<double> v) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(&p[i * dim]);
  };
}

}  // namespace

TEST_CASE("expansion pieces on a single leaf") {
  const int k = 8, dim = 2;
  const double eps = 1e-11, delta = 1e-3, L = 0.0625;
  const LegendreBasis b(k);
  const PlaneWaveBasis pw = make_basis(pw_params(eps, delta, 3 * gauss_cutoff(eps), dim));
  const LevelTables lt = build_level_tables(4, L, delta, b, pw);

  std::vector<double> c(k * k, 0.0);
  c[0] = 1;
  const std::vector<cplx> phi = leaf_to_pw(c, lt, dim);
  std::vector<cplx> psi;
  gather_add(phi, {0, 0, 0}, lt, dim, psi);
  const std::vector<double> u = eval_pw_leaf(psi, lt, dim);
  const double lam = 2 * std::sqrt(delta) / L;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      const double ref = static_cast<double>(L / 2 * oracle::gauss_moment(lam, 0, b.rule.nodes[i]) * L / 2 *
                                             oracle::gauss_moment(lam, 0, b.rule.nodes[j]));
      CHECK(std::fabs(u[j * k + i] - ref) <= 10 * eps);
    }

  std::vector<double> d(k * k, 0.0);
  const double* tabs[2] = {lt.pol2pot[9].data(), lt.pol2pot[9].data()};
  direct_add(c, tabs, k, dim, d);
  for (int i = 0; i < k * k; ++i) CHECK(std::fabs(d[i] - u[i]) <= 10 * eps);

  std::vector<double> odd(k * k, 0.0);
  odd[1] = 1;
  CHECK(std::abs(leaf_to_pw(odd, lt, dim)[pw.total_modes() / 2 + pw.n_modes / 2]) < 1e-16);
  std::vector<double> uo(k * k, 0.0);
  direct_add(odd, tabs, k, dim, uo);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) CHECK(std::fabs(uo[j * k + i] + uo[j * k + (k - 1 - i)]) < 1e-15);

  std::vector<cplx> unit(pw.total_modes(), cplx(0));
  unit[pw.total_modes() / 2 + pw.n_modes / 2] = 1;
  for (double v : eval_pw_leaf(unit, lt, dim)) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  for (double v : eval_pw_leaf(std::vector<cplx>(pw.total_modes()), lt, dim)) CHECK(v == 0.0);

  const LevelTables parent = build_level_tables(3, 2 * L, delta, b, pw);
  double scale = 0;
  for (const cplx& z : psi) scale = std::max(scale, std::abs(z));
  for (int ch = 0; ch < 4; ++ch) {
    const std::vector<cplx> kid = push_child(psi, ch, parent, dim);
    std::vector<cplx> back;
    merge_child(kid, ch, parent, dim, back);
    for (std::size_t m = 0; m < psi.size(); ++m) CHECK(std::abs(back[m] - psi[m]) <= 1e-15 * scale);
  }
  std::vector<cplx> one_child;
  merge_child(phi, 3, parent, dim, one_child);
  for (std::size_t m = 0; m < phi.size(); ++m) {
    const cplx ph = parent.shift_c2p[1][m % pw.n_modes] * parent.shift_c2p[1][m / pw.n_modes];
    CHECK(std::abs(one_child[m] - ph * phi[m]) < 1e-15);
  }
}

TEST_CASE("constant density, 1D closed form") {
  const double delta = 0.01, eps = 1e-12;
  const TestDensity td = density_constant(1, delta, Boundary::free_space);
  const DensityTree dt = build_density_tree(1, Boundary::free_space, td.sigma, 10, eps);
  CHECK(dt.tree.size() == 1);
  const BoxFgtResult r = fgt_box(dt, delta, eps);
  OutputOptions oo;
  oo.epsilon = eps;
  const OutputTree o = adapt_output(dt, make_box_plan(dt.tree, 10, delta, eps), r, oo);
  CHECK(o.tree.size() == 1);
  CHECK(std::fabs(std::sqrt(M_PI * delta) * std::erf(0.5 / std::sqrt(delta)) - 0.17724539) < 1e-8);
  auto exact = [&](const double* x) {
    return std::sqrt(M_PI * delta) / 2 * (std::erf((0.5 - x[0]) / std::sqrt(delta)) + std::erf((0.5 + x[0]) / std::sqrt(delta)));
  };
  CHECK(leaf_error(dt, r, exact) <= 10 * eps);
}

TEST_CASE("Gaussian bumps against quadrature") {
  for (int dim : {1, 2}) {
    const double delta = 2e-3, eps = 1e-10, alpha = 2e-3;
    const Point c0{-0.2, 0.1, 0}, c1{0.31, -0.05, 0};
    auto sigma = [&](const double* x) {
      double r0 = 0, r1 = 0;
      for (int a = 0; a < dim; ++a) r0 += (x[a] - c0[a]) * (x[a] - c0[a]), r1 += (x[a] - c1[a]) * (x[a] - c1[a]);
      return std::exp(-r0 / alpha) + 0.5 * std::exp(-r1 / alpha);
    };
    std::map<std::pair<int, double>, long double> cache;
    auto conv = [&](int which, int a, double x) {
      const auto key = std::make_pair(which * 3 + a, x);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
      return cache[key] = oracle::gauss_conv(x, which ? c1[a] : c0[a], alpha, delta);
    };
    auto exact = [&](const double* x) {
      long double g0 = 1, g1 = 0.5;
      for (int a = 0; a < dim; ++a) g0 *= conv(0, a, x[a]), g1 *= conv(1, a, x[a]);
      return static_cast<double>(g0 + g1);
    };
    const DensityTree dt = build_density_tree(dim, Boundary::free_space, from_point(sigma, dim), 8, eps);
    const BoxFgtResult r = fgt_box(dt, delta, eps);
    CAPTURE(dim);
    CHECK(dt.tree.size() > 1);
    CHECK(leaf_error(dt, r, exact) <= 10 * eps);
    const BoxFgtResult r2 = fgt_box(dt, delta, eps, 2);
    CHECK(r2.potential.data == r.potential.data);
  }
}

TEST_CASE("periodic eigenfunction") {
  const double delta = 1e-3, eps = 1e-9;
  const TestDensity td = density_sigma_p(2, 3, delta);
  const DensityTree dt = build_density_tree(2, Boundary::periodic, td.sigma, 8, eps);
  const BoxFgtResult r = fgt_box(dt, delta, eps);
  const double f = M_PI * delta * std::exp(-2 * M_PI * M_PI * delta * 9);
  CHECK(leaf_error(dt, r, [&](const double* x) { return f * td.sigma_at(x); }) <= 10 * eps);

  const double big = 0.2;
  const TestDensity tb = density_sigma_p(1, 2, big);
  const DensityTree db = build_density_tree(1, Boundary::periodic, tb.sigma, 12, 1e-12);
  const BoxFgtResult rb = fgt_box(db, big, 1e-12);
  CHECK(rb.stats.periodic_series);
  const double fb = std::sqrt(M_PI * big) * std::exp(-M_PI * M_PI * big * 4);
  CHECK(leaf_error(db, rb, [&](const double* x) { return fb * tb.sigma_at(x); }) <= 1e-10);
}

TEST_CASE("table lookup") {
  const TestDensity td = density_sigma_f(2, reference_gaussians(2, 2, 1e-3), 1e-3);
  const DensityTree dt = build_density_tree(2, Boundary::free_space, td.sigma, 6, 1e-6);
  const BoxPlan plan = make_box_plan(dt.tree, 6, 1e-3, 1e-6);
  CHECK(pol2pot_for(plan, 2, 2, 0.0) == plan.level(2).pol2pot[9].data());
  CHECK(pol2pot_for(plan, 2, 3, -3 * 0.0625) == plan.level(2).pol2pot[0].data());
  CHECK(pol2pot_for(plan, 3, 2, 0.5 * 0.125) == plan.level(3).pol2pot[6].data());
  CHECK_THROWS(pol2pot_for(plan, 2, 2, 0.5 * 0.25));
}

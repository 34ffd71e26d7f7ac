#include <doctest.h>

#include <cmath>

#include "fgt/box_fgt.hpp"
#include "fgt/harness.hpp"
#include "fgt/output_tree.hpp"
#include "oracles.hpp"

using namespace fgt;

namespace {

struct Problem {
  TestDensity td;
  DensityTree dt;
  BoxPlan plan;
  BoxFgtResult r;
};

Problem narrow_bumps(double eps) {
  const double delta = 4e-3;
  GaussianMix mix{{Point{-0.3, -0.4, 0}, Point{-0.2, 0, 0}}, {1e-3, 1e-3}};
  Problem p{density_sigma_f(2, mix, delta), {}, {}, {}};
  p.dt = build_density_tree(2, Boundary::free_space, p.td.sigma, 6, eps);
  p.plan = make_box_plan(p.dt.tree, 6, delta, eps);
  p.r = fgt_box(p.dt, p.plan);
  return p;
}

double interp_error(const Tree& t, const LeafGrids& g, const LegendreBasis& b, const TestDensity& td) {
  const std::vector<double> x = equispaced_points(2, 120);
  const std::vector<double> u = interp_at(t, g, b, x);
  std::vector<double> e(u.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = td.potential(&x[2 * i]);
  return oracle::rel_l2(u, e);
}

}  // namespace

TEST_CASE("interpolation basics") {
  const DensityFn poly = [](std::span<const double> p, std::span<double> v) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1 + p[2 * i] * p[2 * i] * p[2 * i + 1] - 3 * p[2 * i + 1];
  };
  DensityTreeOptions opt;
  opt.min_level = 2;
  const DensityTree dt = build_density_tree(2, Boundary::free_space, poly, 5, 1e-10, opt);
  const std::vector<double> nodes = box_nodes(dt.tree, dt.tree.leaves()[3], dt.basis);
  const std::vector<double> at = interp_at(dt.tree, dt.values, dt.basis, nodes);
  auto slot = dt.values.slot(dt.tree[dt.tree.leaves()[3]].grid_slot);
  for (std::size_t j = 0; j < at.size(); ++j) CHECK(at[j] == doctest::Approx(slot[j]).epsilon(1e-14));
  const std::vector<double> pts = equispaced_points(2, 17);
  const std::vector<double> v = interp_at(dt.tree, dt.values, dt.basis, pts);
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double x = pts[2 * j], y = pts[2 * j + 1];
    CHECK(v[j] == doctest::Approx(1 + x * x * y - 3 * y).epsilon(1e-13));
  }
  const double outside[2] = {0.7, 0};
  CHECK_THROWS(interp_at(dt.tree, dt.values, dt.basis, outside));
}

TEST_CASE("over-refined constant collapses") {
  const DensityFn one = [](std::span<const double>, std::span<double> v) { std::fill(v.begin(), v.end(), 2.5); };
  DensityTreeOptions opt;
  opt.min_level = 3;
  const DensityTree dt = build_density_tree(2, Boundary::free_space, one, 6, 1e-10, opt);
  BoxFgtResult fake;
  fake.potential = dt.values;
  OutputTree o = make_output_tree(dt, fake);
  CHECK(o.tree.size() == dt.tree.size());
  OutputOptions oo;
  oo.epsilon = 1e-10;
  coarsen_output(o, oo);
  CHECK(o.tree.size() == 1);
  CHECK(o.deleted == 84);
  for (double v : o.potential.slot(o.tree[0].grid_slot)) CHECK(v == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("refinement resolves the potential") {
  const double eps = 1e-10;
  Problem p = narrow_bumps(eps);
  const OutputTree same = make_output_tree(p.dt, p.r);
  CHECK(same.potential.data == p.r.potential.data);

  OutputOptions oo;
  oo.epsilon = eps;
  OutputTree o = make_output_tree(p.dt, p.r);
  refine_output(o, p.dt, p.plan, p.r, oo);
  CHECK(o.added > 0);
  CHECK(o.threshold > 0);
  double scale = 0;
  for (double v : p.r.potential.data) scale = std::max(scale, std::fabs(v));
  for (std::size_t b = 0; b < o.tree.size(); ++b) {
    if (!o.tree[b].is_leaf() || static_cast<std::int64_t>(b) < static_cast<std::int64_t>(p.dt.tree.size())) continue;
    const std::vector<double> x = box_nodes(o.tree, static_cast<std::int64_t>(b), o.basis);
    auto s = o.potential.slot(o.tree[b].grid_slot);
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(std::fabs(s[j] - p.td.potential(&x[2 * j])) <= 10 * eps * scale);
    if (b > p.dt.tree.size() + 40) break;
  }

  const double before = interp_error(p.dt.tree, p.r.potential, p.dt.basis, p.td);
  const OutputTree full = adapt_output(p.dt, p.plan, p.r, oo);
  const double after = interp_error(full.tree, full.potential, full.basis, p.td);
  CAPTURE(before);
  CAPTURE(after);
  CHECK(before > 1e-8);
  CHECK(after <= 10 * eps);
  CHECK(is_balanced(full.tree));
  CHECK(full.tree.size() == same.tree.size() + full.added - full.deleted + full.balance_added);

  OutputTree again = make_output_tree(p.dt, p.r);
  again.tree = full.tree;
  again.potential = full.potential;
  again.origin = full.origin;
  const std::size_t n0 = again.tree.size();
  oo.rebalance = false;
  coarsen_output(again, oo);
  CHECK(again.tree.size() <= n0);
  CHECK(interp_error(again.tree, again.potential, again.basis, p.td) <= 10 * eps);
}

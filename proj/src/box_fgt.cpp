#include "fgt/box_fgt.hpp"

#include <chrono>
#include <cmath>

#include "fgt/parallel.hpp"
#include "tensor.hpp"

namespace fgt {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<cplx> leaf_to_pw(std::span<const double> coeffs, const LevelTables& lt, int dim) {
  const int ext[kMaxDim] = {lt.k, lt.k, lt.k};
  const int rows[kMaxDim] = {lt.n_modes, lt.n_modes, lt.n_modes};
  const cplx* mats[kMaxDim] = {lt.pol2pw.data(), lt.pol2pw.data(), lt.pol2pw.data()};
  std::vector<cplx> c(coeffs.begin(), coeffs.end());
  return detail::apply_all<cplx>(c.data(), dim, ext, mats, rows);
}

void merge_child(const std::vector<cplx>& phi_child, int child, const LevelTables& parent, int dim,
                 std::vector<cplx>& phi_parent) {
  const cplx* v[kMaxDim];
  for (int i = 0; i < dim; ++i) v[i] = parent.shift_c2p[(child >> i) & 1].data();
  if (phi_parent.size() != phi_child.size()) phi_parent.assign(phi_child.size(), cplx(0));
  detail::add_phase(phi_child.data(), phi_parent.data(), dim, parent.n_modes, v);
}

std::vector<cplx> push_child(const std::vector<cplx>& psi_parent, int child, const LevelTables& parent, int dim) {
  const cplx* v[kMaxDim];
  for (int i = 0; i < dim; ++i) v[i] = parent.shift_p2c[(child >> i) & 1].data();
  std::vector<cplx> out(psi_parent.size(), cplx(0));
  detail::add_phase(psi_parent.data(), out.data(), dim, parent.n_modes, v);
  return out;
}

void gather_add(const std::vector<cplx>& phi, const std::array<int, kMaxDim>& offset, const LevelTables& lt, int dim,
                std::vector<cplx>& psi) {
  const cplx* v[kMaxDim];
  for (int i = 0; i < dim; ++i) v[i] = lt.shift_out2in[offset[i] + 1].data();
  if (psi.size() != phi.size()) psi.assign(phi.size(), cplx(0));
  detail::add_phase(phi.data(), psi.data(), dim, lt.n_modes, v);
}

std::vector<double> eval_pw_leaf(const std::vector<cplx>& psi, const LevelTables& lt, int dim) {
  const int ext[kMaxDim] = {lt.n_modes, lt.n_modes, lt.n_modes};
  const int rows[kMaxDim] = {lt.k, lt.k, lt.k};
  const cplx* mats[kMaxDim] = {lt.pw2pot.data(), lt.pw2pot.data(), lt.pw2pot.data()};
  const std::vector<cplx> u = detail::apply_all<cplx>(psi.data(), dim, ext, mats, rows, true);
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i].real();
  return out;
}

void direct_add(std::span<const double> coeffs, const double* const* tabs, int k, int dim, std::span<double> out) {
  const int ext[kMaxDim] = {k, k, k};
  const std::vector<double> u = detail::apply_all<double>(coeffs.data(), dim, ext, tabs, ext);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] += u[i];
}

const double* pol2pot_for(const BoxPlan& plan, int source_level, int target_level, double offset) {
  const double ls = std::ldexp(1.0, -source_level), lt = std::ldexp(1.0, -target_level);
  const double unit = std::min(ls, lt) / 2;
  const int units = static_cast<int>(std::lround(offset / unit));
  const int slot = pol2pot_slot(target_level - source_level, units);
  if (slot < 0) throw std::logic_error("pol2pot_for: boxes are not neighbours");
  return plan.tables.at(source_level).pol2pot[slot].data();
}

BoxPlan make_box_plan(const Tree& t, int k, double delta, double eps_in) {
  if (!(delta > 0) || !std::isfinite(delta)) throw std::invalid_argument("fgt_box: delta must be positive");
  if (t.root_side() != 1.0) throw std::invalid_argument("fgt_box: the density tree must live on the unit cube");
  const double eps = clamp_epsilon(eps_in);
  BoxPlan p;
  p.dim = t.dim();
  p.k = k;
  p.delta = delta;
  p.epsilon = eps;
  p.boundary = t.boundary();
  p.basis = LegendreBasis(k);
  const int lc = cutoff_level(delta, eps, 1.0);
  if (p.boundary == Boundary::periodic && lc <= 1) {
    p.periodic_series = true;
    p.cutoff_level = 0;
    p.pw = make_basis(periodic_params(eps, delta), p.dim);
    p.lists.colleagues = compute_colleagues(t);
    p.lists.fine.assign(t.size(), {});
    p.lists.coarse.assign(t.size(), {});
    p.lists.plist.assign(t.size(), {});
    p.lists.dlist.assign(t.size(), {});
    p.lists.pw_flag.assign(t.size(), 1);
    p.lists.plist[0].push_back(Neighbor{0, {}});
  } else {
    p.cutoff_level = lc;
    const double s = std::ldexp(1.0, -lc);
    p.range = std::max(2 * s / std::sqrt(delta), gauss_cutoff(eps));
    p.pw = make_basis(pw_params(eps, delta, p.range, p.dim));
    p.lists = neighbor_lists(t, ListMode::box, lc);
  }
  const int lmax = t.max_level();
  for (int l = 0; l <= lmax; ++l)
    p.tables.push_back(build_level_tables(l, std::ldexp(1.0, -l), delta, p.basis, p.pw, l >= p.cutoff_level));
  return p;
}

BoxFgtResult fgt_box(const DensityTree& dt, double delta, double eps, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const BoxPlan plan = make_box_plan(dt.tree, dt.k, delta, eps);
  const double tp = seconds_since(t0);
  BoxFgtResult r = fgt_box(dt, plan, threads);
  r.stats.t_plan = tp;
  return r;
}

BoxFgtResult fgt_box(const DensityTree& dt, const BoxPlan& plan, int threads) {
  const Tree& t = dt.tree;
  const int d = t.dim(), k = dt.k;
  if (plan.k != k || plan.dim != d || plan.lists.colleagues.size() != t.size())
    throw std::invalid_argument("fgt_box: plan does not match the tree");
  const int lc = plan.cutoff_level;
  const NeighborLists& nl = plan.lists;
  BoxFgtResult res;
  res.potential.per_leaf = dt.values.per_leaf;
  res.potential.data.assign(dt.values.data.size(), 0.0);
  res.stats.cutoff_level = lc;
  res.stats.n_modes = plan.pw.n_modes;
  res.stats.periodic_series = plan.periodic_series;
  for (char f : nl.pw_flag) res.stats.pw_boxes += f ? 1 : 0;

  std::vector<std::vector<double>> coeffs(t.size());
  const std::vector<std::int64_t> leaves = t.leaves();
  parallel_for(leaves.size(), threads, [&](std::size_t i) {
    const std::int64_t b = leaves[i];
    coeffs[b] = vals_to_coeffs(dt.values.slot(t[b].grid_slot), plan.basis, d);
  });

  std::vector<std::int64_t> cut_boxes;
  for (std::size_t b = 0; b < t.size(); ++b)
    if (t[b].level == lc && nl.pw_flag[b]) cut_boxes.push_back(static_cast<std::int64_t>(b));

  // Outgoing expansions, formed depth first below each cutoff box.
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<cplx>> phi(t.size());
  std::function<std::vector<cplx>(std::int64_t)> outgoing = [&](std::int64_t b) {
    const BoxNode& n = t[b];
    if (n.is_leaf()) return leaf_to_pw(coeffs[b], plan.level(n.level), d);
    std::vector<cplx> acc;
    for (int c = 0; c < t.children_per_box(); ++c)
      merge_child(outgoing(n.first_child + c), c, plan.level(n.level), d, acc);
    return acc;
  };
  parallel_for(cut_boxes.size(), threads, [&](std::size_t i) { phi[cut_boxes[i]] = outgoing(cut_boxes[i]); });
  res.stats.t_outgoing = seconds_since(t0);

  // Plane-wave interactions between cutoff-level colleagues, then push down.
  t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<cplx>> psi(cut_boxes.size());
  const double s = std::ldexp(1.0, -lc);
  parallel_for(cut_boxes.size(), threads, [&](std::size_t i) {
    const std::int64_t b = cut_boxes[i];
    const Point cb = t.center(b);
    psi[i].assign(plan.pw.total_modes(), cplx(0));
    for (const Neighbor& nb : nl.plist[b]) {
      const Point cs = neighbor_center(t, nb);
      std::array<int, kMaxDim> off{};
      for (int a = 0; a < d; ++a) off[a] = static_cast<int>(std::lround((cb[a] - cs[a]) / s));
      gather_add(phi[nb.box], off, plan.level(lc), d, psi[i]);
    }
  });
  phi.clear();
  phi.shrink_to_fit();
  std::function<void(std::int64_t, const std::vector<cplx>&)> push = [&](std::int64_t b, const std::vector<cplx>& in) {
    const BoxNode& n = t[b];
    if (n.is_leaf()) {
      const std::vector<double> u = eval_pw_leaf(in, plan.level(n.level), d);
      auto out = res.potential.slot(n.grid_slot);
      for (std::size_t j = 0; j < u.size(); ++j) out[j] += u[j];
      return;
    }
    for (int c = 0; c < t.children_per_box(); ++c)
      push(n.first_child + c, push_child(in, c, plan.level(n.level), d));
  };
  parallel_for(cut_boxes.size(), threads, [&](std::size_t i) { push(cut_boxes[i], psi[i]); });
  for (std::size_t i = 0; i < cut_boxes.size(); ++i) res.incoming.emplace(cut_boxes[i], std::move(psi[i]));
  res.stats.t_incoming = seconds_since(t0);

  // Direct interactions for leaves at or above the cutoff level.
  t0 = std::chrono::steady_clock::now();
  std::vector<std::size_t> pairs(leaves.size(), 0);
  parallel_for(leaves.size(), threads, [&](std::size_t i) {
    const std::int64_t b = leaves[i];
    const BoxNode& n = t[b];
    if (nl.dlist[b].empty()) return;
    const Point cb = t.center(b);
    auto out = res.potential.slot(n.grid_slot);
    for (const Neighbor& nb : nl.dlist[b]) {
      const Point cs = neighbor_center(t, nb);
      const int ls = t[nb.box].level;
      const double* tabs[kMaxDim];
      for (int a = 0; a < d; ++a) tabs[a] = pol2pot_for(plan, ls, n.level, cb[a] - cs[a]);
      direct_add(coeffs[nb.box], tabs, k, d, out);
    }
    pairs[i] = nl.dlist[b].size();
  });
  for (std::size_t p : pairs) res.stats.direct_pairs += p;
  res.stats.t_direct = seconds_since(t0);
  return res;
}

}  // namespace fgt

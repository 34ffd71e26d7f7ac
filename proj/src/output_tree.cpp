#include "fgt/output_tree.hpp"

#include <cmath>

#include "tensor.hpp"

namespace fgt {

namespace {

// Direct tables for arbitrary source/target levels, keyed by
// (source level, target level, offset in half-sides of the smaller box).
class DirectTables {
 public:
  DirectTables(double delta, const LegendreBasis& b) : delta_(delta), basis_(b) {}

  const double* get(int ls, int lt, double offset) {
    const double side_s = std::ldexp(1.0, -ls), side_t = std::ldexp(1.0, -lt);
    const double unit = std::min(side_s, side_t) / 2;
    const long units = std::lround(offset / unit);
    const auto key = std::make_tuple(ls, lt, units);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, make_pol2pot(side_s, side_t, units * unit, delta_, basis_)).first;
    return it->second.data();
  }

 private:
  double delta_;
  const LegendreBasis& basis_;
  std::map<std::tuple<int, int, long>, std::vector<double>> cache_;
};

std::vector<double> potential_impl(const Tree& t, std::int64_t box, const DensityTree& dt, std::int64_t origin,
                                   const BoxPlan& plan, const BoxFgtResult& r, DirectTables& tables,
                                   std::map<std::int64_t, std::vector<double>>& coeff_cache) {
  const int d = t.dim(), k = plan.k;
  const Point cc = t.center(box);
  const double side = t.side_of(box);
  std::vector<double> u(ipow(k, d), 0.0);
  const NeighborLists& nl = plan.lists;

  if (nl.pw_flag[origin]) {
    std::int64_t a = origin;
    while (dt.tree[a].level > plan.cutoff_level) a = dt.tree[a].parent;
    const Point ca = dt.tree.center(a);
    const std::vector<cplx>& psi = r.incoming.at(a);
    const int nf = plan.pw.n_modes;
    std::vector<cplx> mats[kMaxDim];
    const cplx* mp[kMaxDim];
    for (int i = 0; i < d; ++i) {
      mats[i].resize(static_cast<std::size_t>(k) * nf);
      for (int n = 0; n < k; ++n) {
        const double x = cc[i] - ca[i] + side / 2 * plan.basis.rule.nodes[n];
        for (int m = 0; m < nf; ++m) mats[i][n * nf + m] = std::polar(1.0, plan.pw.wavenumber(m) * x);
      }
      mp[i] = mats[i].data();
    }
    const int ext[kMaxDim] = {nf, nf, nf};
    const int rows[kMaxDim] = {k, k, k};
    const std::vector<cplx> v = detail::apply_all<cplx>(psi.data(), d, ext, mp, rows, true);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] += v[j].real();
  }

  const int lt = t[box].level;
  for (const Neighbor& nb : nl.dlist[origin]) {
    const Point cs = neighbor_center(dt.tree, nb);
    const int ls = dt.tree[nb.box].level;
    const double* tabs[kMaxDim];
    for (int i = 0; i < d; ++i) tabs[i] = tables.get(ls, lt, cc[i] - cs[i]);
    auto it = coeff_cache.find(nb.box);
    if (it == coeff_cache.end())
      it = coeff_cache.emplace(nb.box, vals_to_coeffs(dt.values.slot(dt.tree[nb.box].grid_slot), plan.basis, d)).first;
    direct_add(it->second, tabs, k, d, u);
  }
  return u;
}

// Potential at the grid nodes of `parent` from its leaf children.
std::vector<double> gather_from_children(const OutputTree& o, std::int64_t parent,
                                         std::map<std::int64_t, std::vector<double>>& coeffs) {
  const Tree& t = o.tree;
  const int d = t.dim(), k = o.k;
  const std::vector<double> pts = box_nodes(t, parent, o.basis);
  const int n = ipow(k, d);
  std::vector<double> v(n);
  for (int p = 0; p < n; ++p) {
    const double* x = &pts[p * d];
    const std::int64_t ch = t.child_containing(parent, x);
    auto it = coeffs.find(ch);
    if (it == coeffs.end()) it = coeffs.emplace(ch, vals_to_coeffs(o.potential.slot(t[ch].grid_slot), o.basis, d)).first;
    const Point c = t.center(ch);
    const double h = t.side_of(ch) / 2;
    std::array<double, kMaxDim> u{};
    for (int i = 0; i < d; ++i) u[i] = (x[i] - c[i]) / h;
    v[p] = eval_legendre_expansion(it->second, k, d, std::span<const double>(u.data(), d));
  }
  return v;
}

void interpolate_children(Tree& t, LeafGrids& g, const LegendreBasis& b, std::int64_t parent, std::int64_t first) {
  const int d = t.dim(), k = b.k, n = g.per_leaf;
  const std::vector<double> c = vals_to_coeffs(g.slot(t[parent].grid_slot), b, d);
  const Point pc = t.center(parent);
  const double ph = t.side_of(parent) / 2;
  for (int ci = 0; ci < t.children_per_box(); ++ci) {
    const std::int64_t ch = first + ci;
    const std::vector<double> pts = box_nodes(t, ch, b);
    const std::int64_t s = g.add();
    auto out = g.slot(s);
    std::array<double, kMaxDim> u{};
    for (int p = 0; p < n; ++p) {
      for (int i = 0; i < d; ++i) u[i] = (pts[p * d + i] - pc[i]) / ph;
      out[p] = eval_legendre_expansion(c, k, d, std::span<const double>(u.data(), d));
    }
    t.node(ch).grid_slot = s;
  }
  t.node(parent).grid_slot = -1;
}

void canonicalize_output(OutputTree& o) {
  const std::vector<std::int64_t> map = canonicalize_with_grids(o.tree, {&o.potential});
  std::vector<std::int64_t> origin(o.tree.size(), -1);
  for (std::size_t old = 0; old < map.size() && old < o.origin.size(); ++old)
    if (map[old] >= 0) origin[map[old]] = o.origin[old];
  o.origin = std::move(origin);
}

double output_threshold(const OutputTree& o, const OutputOptions& opt) {
  const double scale = opt.relative ? grid_l2_norm(o.tree, o.potential, o.basis) : 1.0;
  return opt.monitor_scale * opt.epsilon * scale;
}

}  // namespace

std::vector<double> potential_on_box(const Tree& t, std::int64_t box, const DensityTree& dt, std::int64_t origin,
                                     const BoxPlan& plan, const BoxFgtResult& r) {
  DirectTables tables(plan.delta, plan.basis);
  std::map<std::int64_t, std::vector<double>> cache;
  return potential_impl(t, box, dt, origin, plan, r, tables, cache);
}

OutputTree make_output_tree(const DensityTree& dt, const BoxFgtResult& r) {
  OutputTree o;
  o.tree = dt.tree;
  o.k = dt.k;
  o.basis = dt.basis;
  o.potential = r.potential;
  o.origin.assign(o.tree.size(), -1);
  for (std::size_t b = 0; b < o.tree.size(); ++b)
    if (o.tree[b].is_leaf()) o.origin[b] = static_cast<std::int64_t>(b);
  return o;
}

void refine_output(OutputTree& o, const DensityTree& dt, const BoxPlan& plan, const BoxFgtResult& r,
                   const OutputOptions& opt) {
  const int d = o.tree.dim();
  o.threshold = output_threshold(o, opt);
  const int cap = std::min(opt.max_level, dt.tree.max_level());
  DirectTables tables(plan.delta, plan.basis);
  std::map<std::int64_t, std::vector<double>> cache;
  std::vector<std::int64_t> queue = o.tree.leaves();
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const std::int64_t b = queue[qi];
    if (o.tree[b].level >= cap) continue;
    const std::vector<double> c = vals_to_coeffs(o.potential.slot(o.tree[b].grid_slot), o.basis, d);
    if (!(tail_error(c, o.k, d) > o.threshold)) continue;
    const std::int64_t first = o.tree.split(b);
    o.origin.resize(o.tree.size(), -1);
    for (int ci = 0; ci < o.tree.children_per_box(); ++ci) {
      const std::int64_t ch = first + ci;
      o.origin[ch] = o.origin[b];
      const std::vector<double> u = potential_impl(o.tree, ch, dt, o.origin[b], plan, r, tables, cache);
      const std::int64_t s = o.potential.add();
      std::copy(u.begin(), u.end(), o.potential.slot(s).begin());
      o.tree.node(ch).grid_slot = s;
      queue.push_back(ch);
    }
    o.tree.node(b).grid_slot = -1;
    o.added += o.tree.children_per_box();
  }
}

void coarsen_output(OutputTree& o, const OutputOptions& opt) {
  Tree& t = o.tree;
  const int d = t.dim();
  if (o.threshold <= 0) o.threshold = output_threshold(o, opt);
  std::map<std::int64_t, std::vector<double>> coeffs;
  for (int l = t.max_level() - 1; l >= 0; --l) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::int64_t b = static_cast<std::int64_t>(i);
      const BoxNode& n = t[b];
      if (n.level != l || n.is_leaf()) continue;
      bool all_leaves = true;
      for (int c = 0; c < t.children_per_box(); ++c) all_leaves = all_leaves && t[n.first_child + c].is_leaf();
      if (!all_leaves) continue;
      const std::vector<double> v = gather_from_children(o, b, coeffs);
      const std::vector<double> c = vals_to_coeffs(v, o.basis, d);
      if (tail_error(c, o.k, d) > o.threshold) continue;
      const std::int64_t s = o.potential.add();
      std::copy(v.begin(), v.end(), o.potential.slot(s).begin());
      for (int ch = 0; ch < t.children_per_box(); ++ch) t.node(n.first_child + ch).grid_slot = -1;
      t.node(b).first_child = -1;
      t.node(b).grid_slot = s;
      o.deleted += t.children_per_box();
    }
  }
  canonicalize_output(o);
}

void rebalance_output(OutputTree& o) {
  SplitCallback cb = [&](std::int64_t parent, std::int64_t first) {
    interpolate_children(o.tree, o.potential, o.basis, parent, first);
  };
  o.balance_added += balance_tree(o.tree, cb);
  canonicalize_output(o);
}

OutputTree adapt_output(const DensityTree& dt, const BoxPlan& plan, const BoxFgtResult& r, const OutputOptions& opt) {
  OutputTree o = make_output_tree(dt, r);
  refine_output(o, dt, plan, r, opt);
  coarsen_output(o, opt);
  if (opt.rebalance) rebalance_output(o);
  return o;
}

std::vector<double> interp_at(const Tree& t, const LeafGrids& g, const LegendreBasis& b,
                              std::span<const double> points) {
  const int d = t.dim(), k = b.k;
  if (points.size() % d) throw std::invalid_argument("interp_at: point array is not a multiple of dim");
  std::vector<std::vector<double>> coeffs(t.size());
  const std::size_t n = points.size() / d;
  std::vector<double> out(n);
  const Point rc = t.root_center();
  const double h0 = t.root_side() / 2;
  for (std::size_t j = 0; j < n; ++j) {
    double x[kMaxDim];
    for (int i = 0; i < d; ++i) {
      x[i] = points[j * d + i];
      if (t.boundary() == Boundary::periodic) {
        x[i] = rc[i] + (x[i] - rc[i]) - t.root_side() * std::floor((x[i] - rc[i]) / t.root_side() + 0.5);
      } else if (x[i] < rc[i] - h0 || x[i] > rc[i] + h0) {
        throw std::invalid_argument("interp_at: point outside the root box");
      }
    }
    const std::int64_t leaf = t.locate(x);
    if (coeffs[leaf].empty()) coeffs[leaf] = vals_to_coeffs(g.slot(t[leaf].grid_slot), b, d);
    const Point c = t.center(leaf);
    const double h = t.side_of(leaf) / 2;
    std::array<double, kMaxDim> u{};
    for (int i = 0; i < d; ++i) u[i] = (x[i] - c[i]) / h;
    out[j] = eval_legendre_expansion(coeffs[leaf], k, d, std::span<const double>(u.data(), d));
  }
  return out;
}

}  // namespace fgt

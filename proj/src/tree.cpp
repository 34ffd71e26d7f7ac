#include "fgt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fgt/planewave.hpp"

namespace fgt {

// ---------------------------------------------------------------------- Tree

Tree::Tree(int dim, const Point& root_center, double root_side, Boundary bc)
    : dim_(dim), bc_(bc), center_(root_center), side_(root_side) {
  check_dim(dim);
  if (!(root_side > 0)) throw std::invalid_argument("Tree: root side must be positive");
  nodes_.emplace_back();
}

double Tree::side(int level) const { return std::ldexp(side_, -level); }

Point Tree::center(std::int64_t box) const {
  const BoxNode& b = nodes_[box];
  const double s = side(b.level);
  Point c{};
  for (int i = 0; i < dim_; ++i) c[i] = center_[i] - side_ / 2 + (b.index[i] + 0.5) * s;
  return c;
}

int Tree::max_level() const {
  int m = 0;
  for (const BoxNode& b : nodes_) m = std::max(m, b.level);
  return m;
}

std::size_t Tree::leaf_count() const {
  return std::count_if(nodes_.begin(), nodes_.end(), [](const BoxNode& b) { return b.is_leaf(); });
}

std::vector<std::int64_t> Tree::leaves() const {
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].is_leaf()) out.push_back(static_cast<std::int64_t>(i));
  return out;
}

std::vector<std::vector<std::int64_t>> Tree::by_level() const {
  std::vector<std::vector<std::int64_t>> out(max_level() + 1);
  for (std::size_t i = 0; i < nodes_.size(); ++i) out[nodes_[i].level].push_back(static_cast<std::int64_t>(i));
  return out;
}

std::int64_t Tree::split(std::int64_t box) {
  if (!nodes_[box].is_leaf()) throw std::logic_error("Tree::split: box already has children");
  const std::int64_t first = static_cast<std::int64_t>(nodes_.size());
  const BoxNode parent = nodes_[box];
  for (int c = 0; c < children_per_box(); ++c) {
    BoxNode ch;
    ch.level = parent.level + 1;
    ch.parent = box;
    for (int i = 0; i < dim_; ++i) ch.index[i] = 2 * parent.index[i] + ((c >> i) & 1);
    nodes_.push_back(ch);
  }
  nodes_[box].first_child = first;
  return first;
}

std::int64_t Tree::child_containing(std::int64_t box, const double* x) const {
  const Point c = center(box);
  int bits = 0;
  for (int i = 0; i < dim_; ++i)
    if (x[i] >= c[i]) bits |= 1 << i;
  return nodes_[box].first_child + bits;
}

std::int64_t Tree::locate(const double* x, int max_level) const {
  std::int64_t b = 0;
  while (!nodes_[b].is_leaf() && nodes_[b].level < max_level) b = child_containing(b, x);
  return b;
}

std::int64_t Tree::find(int level, Index cell) const {
  const std::int64_t n = std::int64_t(1) << level;
  for (int i = 0; i < dim_; ++i) {
    if (bc_ == Boundary::periodic)
      cell[i] = ((cell[i] % n) + n) % n;
    else if (cell[i] < 0 || cell[i] >= n)
      return -1;
  }
  std::int64_t b = 0;
  while (!nodes_[b].is_leaf() && nodes_[b].level < level) {
    const int shift = level - nodes_[b].level - 1;
    int bits = 0;
    for (int i = 0; i < dim_; ++i)
      if ((cell[i] >> shift) & 1) bits |= 1 << i;
    b = nodes_[b].first_child + bits;
  }
  return b;
}

std::vector<std::int64_t> Tree::canonicalize() {
  std::vector<std::int64_t> map(nodes_.size(), -1);
  std::vector<BoxNode> out;
  out.reserve(nodes_.size());
  std::vector<std::int64_t> order{0};
  map[0] = 0;
  out.push_back(nodes_[0]);
  out[0].parent = -1;
  for (std::size_t q = 0; q < order.size(); ++q) {
    const BoxNode& old = nodes_[order[q]];
    if (old.is_leaf()) continue;
    const std::int64_t first = static_cast<std::int64_t>(out.size());
    out[q].first_child = first;
    for (int c = 0; c < children_per_box(); ++c) {
      const std::int64_t oc = old.first_child + c;
      map[oc] = static_cast<std::int64_t>(out.size());
      order.push_back(oc);
      out.push_back(nodes_[oc]);
      out.back().parent = static_cast<std::int64_t>(q);
    }
  }
  nodes_ = std::move(out);
  return map;
}

// ------------------------------------------------------------------- balance

std::int64_t ensure_box(Tree& t, int level, Index cell, const SplitCallback& on_split) {
  std::int64_t b = t.find(level, cell);
  if (b < 0) return -1;
  const std::int64_t n = std::int64_t(1) << level;
  if (t.boundary() == Boundary::periodic)
    for (int i = 0; i < t.dim(); ++i) cell[i] = ((cell[i] % n) + n) % n;
  while (t[b].level < level) {
    const std::int64_t first = t.split(b);
    if (on_split) on_split(b, first);
    b = t.find(level, cell);
  }
  return b;
}

namespace {

template <class F>
void for_each_offset(int dim, F&& f) {
  const int n = ipow(3, dim);
  for (int o = 0; o < n; ++o) {
    Index off{};
    int r = o;
    bool zero = true;
    for (int i = 0; i < dim; ++i) {
      off[i] = r % 3 - 1;
      r /= 3;
      zero = zero && off[i] == 0;
    }
    if (!zero) f(off);
  }
}

}  // namespace

std::int64_t balance_tree(Tree& t, const SplitCallback& on_split) {
  const std::size_t before = t.size();
  for (int m = t.max_level() - 1; m >= 0; --m) {
    std::vector<std::int64_t> work;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i].level == m && !t[i].is_leaf()) work.push_back(static_cast<std::int64_t>(i));
    for (std::int64_t x : work) {
      const Index base = t[x].index;
      for_each_offset(t.dim(), [&](const Index& off) {
        Index cell{};
        for (int i = 0; i < t.dim(); ++i) cell[i] = base[i] + off[i];
        ensure_box(t, m, cell, on_split);
      });
    }
  }
  return static_cast<std::int64_t>(t.size() - before);
}

bool is_balanced(const Tree& t) {
  // Equivalent check: every non-leaf box has all neighbouring cells present.
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].is_leaf()) continue;
    bool ok = true;
    for_each_offset(t.dim(), [&](const Index& off) {
      Index cell{};
      for (int d = 0; d < t.dim(); ++d) cell[d] = t[i].index[d] + off[d];
      const std::int64_t b = t.find(t[i].level, cell);
      if (b >= 0 && t[b].level < t[i].level) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

int cutoff_level(double delta, double eps, double root_side) {
  if (!(delta > 0)) throw std::invalid_argument("cutoff_level: delta must be positive");
  const double limit = 2 * gauss_cutoff(eps) * std::sqrt(delta);
  int l = 0;
  while (std::ldexp(root_side, -l) > limit && l < 60) ++l;
  return l;
}

// --------------------------------------------------------------- point trees

int default_max_per_box(int dim) { return dim <= 2 ? 80 : 128; }

namespace {

struct PointBins {
  std::vector<std::vector<std::int64_t>> src, trg;
};

void distribute(const Tree& t, std::int64_t parent, int dim, const std::vector<double>& sx,
                const std::vector<double>& tx, PointBins& bins) {
  bins.src.resize(t.size());
  bins.trg.resize(t.size());
  for (std::int64_t j : bins.src[parent]) bins.src[t.child_containing(parent, &sx[j * dim])].push_back(j);
  for (std::int64_t j : bins.trg[parent]) bins.trg[t.child_containing(parent, &tx[j * dim])].push_back(j);
  bins.src[parent].clear();
  bins.src[parent].shrink_to_fit();
  bins.trg[parent].clear();
  bins.trg[parent].shrink_to_fit();
}

}  // namespace

PointTree build_point_tree(int dim, std::span<const double> sources, std::span<const double> targets,
                           int max_per_box, double delta, double eps, Boundary bc) {
  check_dim(dim);
  if (sources.size() % dim || targets.size() % dim)
    throw std::invalid_argument("build_point_tree: coordinate arrays must have a multiple of dim entries");
  if (max_per_box < 1) throw std::invalid_argument("build_point_tree: max_per_box must be >= 1");
  if (!(delta > 0)) throw std::invalid_argument("build_point_tree: delta must be positive");
  for (double v : sources)
    if (!std::isfinite(v)) throw std::invalid_argument("build_point_tree: non-finite source coordinate");
  for (double v : targets)
    if (!std::isfinite(v)) throw std::invalid_argument("build_point_tree: non-finite target coordinate");

  const std::size_t ns = sources.size() / dim, nt = targets.size() / dim;
  std::vector<double> sx(sources.begin(), sources.end()), tx(targets.begin(), targets.end());
  const double cut = gauss_cutoff(eps) * std::sqrt(delta);

  PointTree pt;
  Point center{};
  double root = 1;
  if (bc == Boundary::periodic) {
    auto wrap = [](double v) { return v - std::floor(v + 0.5); };
    for (double& v : sx) v = wrap(v);
    for (double& v : tx) v = wrap(v);
    pt.cutoff_level = cutoff_level(delta, eps, 1.0);
    root = 1;
  } else {
    Point lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    auto grow = [&](const std::vector<double>& x, std::size_t n) {
      for (std::size_t j = 0; j < n; ++j)
        for (int i = 0; i < dim; ++i) {
          lo[i] = std::min(lo[i], x[j * dim + i]);
          hi[i] = std::max(hi[i], x[j * dim + i]);
        }
    };
    grow(sx, ns);
    grow(tx, nt);
    if (ns + nt == 0) lo.fill(0), hi.fill(0);
    double extent = 0;
    for (int i = 0; i < dim; ++i) {
      center[i] = (lo[i] + hi[i]) / 2;
      extent = std::max(extent, hi[i] - lo[i]);
    }
    int l = 0;
    while (std::ldexp(cut, l) < extent && l < 60) ++l;
    pt.cutoff_level = l;
    root = std::ldexp(cut, l);
  }
  pt.cutoff_side = std::ldexp(root, -pt.cutoff_level);

  Tree t(dim, center, root, bc);
  PointBins bins;
  bins.src.resize(1);
  bins.trg.resize(1);
  bins.src[0].resize(ns);
  bins.trg[0].resize(nt);
  std::iota(bins.src[0].begin(), bins.src[0].end(), 0);
  std::iota(bins.trg[0].begin(), bins.trg[0].end(), 0);
  SplitCallback cb = [&](std::int64_t parent, std::int64_t) { distribute(t, parent, dim, sx, tx, bins); };

  for (std::size_t b = 0; b < t.size(); ++b) {
    if (t[b].level >= pt.cutoff_level) continue;
    if (static_cast<int>(bins.src[b].size()) > max_per_box || static_cast<int>(bins.trg[b].size()) > max_per_box) {
      const std::int64_t first = t.split(static_cast<std::int64_t>(b));
      cb(static_cast<std::int64_t>(b), first);
    }
  }
  // Dense cutoff boxes interact by plane waves with all colleagues, so none of
  // their neighbours may be a coarser leaf.
  {
    std::vector<std::int64_t> dense;
    for (std::size_t b = 0; b < t.size(); ++b)
      if (t[b].level == pt.cutoff_level && static_cast<int>(bins.src[b].size()) > max_per_box)
        dense.push_back(static_cast<std::int64_t>(b));
    for (std::int64_t b : dense) {
      const Index base = t[b].index;
      for_each_offset(dim, [&](const Index& off) {
        Index cell{};
        for (int i = 0; i < dim; ++i) cell[i] = base[i] + off[i];
        ensure_box(t, pt.cutoff_level, cell, cb);
      });
    }
  }
  balance_tree(t, cb);

  const std::vector<std::int64_t> map = t.canonicalize();
  PointBins sorted;
  sorted.src.resize(t.size());
  sorted.trg.resize(t.size());
  for (std::size_t old = 0; old < map.size(); ++old) {
    if (map[old] < 0) continue;
    sorted.src[map[old]] = std::move(bins.src[old]);
    sorted.trg[map[old]] = std::move(bins.trg[old]);
  }

  // Depth-first ranges so every box owns a contiguous slice.
  pt.src_order.reserve(ns);
  pt.trg_order.reserve(nt);
  std::vector<std::pair<std::int64_t, bool>> stack{{0, false}};
  while (!stack.empty()) {
    auto [b, done] = stack.back();
    stack.pop_back();
    BoxNode& n = t.node(b);
    if (n.is_leaf()) {
      n.src_begin = static_cast<std::int64_t>(pt.src_order.size());
      n.trg_begin = static_cast<std::int64_t>(pt.trg_order.size());
      pt.src_order.insert(pt.src_order.end(), sorted.src[b].begin(), sorted.src[b].end());
      pt.trg_order.insert(pt.trg_order.end(), sorted.trg[b].begin(), sorted.trg[b].end());
      n.src_end = static_cast<std::int64_t>(pt.src_order.size());
      n.trg_end = static_cast<std::int64_t>(pt.trg_order.size());
    } else if (!done) {
      n.src_begin = static_cast<std::int64_t>(pt.src_order.size());
      n.trg_begin = static_cast<std::int64_t>(pt.trg_order.size());
      stack.push_back({b, true});
      for (int c = t.children_per_box() - 1; c >= 0; --c) stack.push_back({n.first_child + c, false});
    } else {
      n.src_end = static_cast<std::int64_t>(pt.src_order.size());
      n.trg_end = static_cast<std::int64_t>(pt.trg_order.size());
    }
  }
  pt.sources.resize(ns * dim);
  pt.targets.resize(nt * dim);
  for (std::size_t j = 0; j < ns; ++j)
    for (int i = 0; i < dim; ++i) pt.sources[j * dim + i] = sx[pt.src_order[j] * dim + i];
  for (std::size_t j = 0; j < nt; ++j)
    for (int i = 0; i < dim; ++i) pt.targets[j * dim + i] = tx[pt.trg_order[j] * dim + i];
  pt.tree = std::move(t);
  return pt;
}

// ------------------------------------------------------------- density trees

std::int64_t LeafGrids::add() {
  const std::int64_t s = static_cast<std::int64_t>(slots());
  data.resize(data.size() + per_leaf, 0.0);
  return s;
}

std::vector<double> box_nodes(const Tree& t, std::int64_t box, const LegendreBasis& b) {
  const int d = t.dim(), k = b.k;
  const int n = ipow(k, d);
  const Point c = t.center(box);
  const double half = t.side_of(box) / 2;
  std::vector<double> out(static_cast<std::size_t>(n) * d);
  for (int p = 0; p < n; ++p) {
    int r = p;
    for (int i = 0; i < d; ++i) {
      out[p * d + i] = c[i] + half * b.rule.nodes[r % k];
      r /= k;
    }
  }
  return out;
}

double grid_l2_norm(const Tree& t, const LeafGrids& g, const LegendreBasis& b) {
  const int d = t.dim(), k = b.k;
  const int n = ipow(k, d);
  std::vector<double> w(n);
  for (int p = 0; p < n; ++p) {
    int r = p;
    double v = 1;
    for (int i = 0; i < d; ++i) v *= b.rule.weights[r % k], r /= k;
    w[p] = v;
  }
  double s = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!t[i].is_leaf() || t[i].grid_slot < 0) continue;
    const double vol = std::pow(t.side_of(static_cast<std::int64_t>(i)) / 2, d);
    auto v = g.slot(t[i].grid_slot);
    for (int p = 0; p < n; ++p) s += vol * w[p] * v[p] * v[p];
  }
  return std::sqrt(s);
}

std::vector<std::int64_t> canonicalize_with_grids(Tree& t, std::vector<LeafGrids*> grids) {
  std::vector<std::int64_t> map = t.canonicalize();
  std::vector<LeafGrids> fresh;
  for (LeafGrids* g : grids) fresh.push_back(LeafGrids{g->per_leaf, {}});
  std::int64_t next = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    BoxNode& n = t.node(static_cast<std::int64_t>(i));
    if (!n.is_leaf() || n.grid_slot < 0) {
      n.grid_slot = -1;
      continue;
    }
    for (std::size_t gi = 0; gi < grids.size(); ++gi) {
      auto src = grids[gi]->slot(n.grid_slot);
      fresh[gi].data.insert(fresh[gi].data.end(), src.begin(), src.end());
    }
    n.grid_slot = next++;
  }
  for (std::size_t gi = 0; gi < grids.size(); ++gi) *grids[gi] = std::move(fresh[gi]);
  return map;
}

namespace {

// Squared L2 mass of each box's own grid, and of the leaves below it.
struct PassMass {
  std::vector<double> grid, fine;
};

// One build pass.  If fixed_norm <= 0 the norm is estimated on the fly; the
// estimate is returned.  With `ref` (an earlier pass), a box is also split
// when its grid disagrees with the finer leaves of the earlier tree, which
// catches features the coarse grid does not sample.
double density_pass(DensityTree& dt, const DensityFn& density, double eps, double fixed_norm, int min_level,
                    int max_level, PassMass* record, const Tree* ref, const PassMass* ref_mass) {
  Tree& t = dt.tree;
  const int d = t.dim(), k = dt.k;
  const int n = ipow(k, d);
  std::vector<double> wq(n);
  for (int p = 0; p < n; ++p) {
    int r = p;
    double v = 1;
    for (int i = 0; i < d; ++i) v *= dt.basis.rule.weights[r % k], r /= k;
    wq[p] = v;
  }
  double norm = fixed_norm;
  double settled = 0;  // squared-norm contribution of finished leaves
  std::vector<double> vals(n);
  std::size_t level_start = 0;
  while (level_start < t.size()) {
    const std::size_t level_end = t.size();
    std::vector<std::vector<double>> level_vals(level_end - level_start);
    double level_sq = 0;
    for (std::size_t b = level_start; b < level_end; ++b) {
      const std::vector<double> pts = box_nodes(t, static_cast<std::int64_t>(b), dt.basis);
      density(pts, vals);
      const double vol = std::pow(t.side_of(static_cast<std::int64_t>(b)) / 2, d);
      double box_sq = 0;
      for (int p = 0; p < n; ++p) {
        if (!std::isfinite(vals[p])) throw std::runtime_error("density returned a non-finite value");
        box_sq += vol * wq[p] * vals[p] * vals[p];
      }
      level_sq += box_sq;
      if (record) record->grid.push_back(box_sq);
      level_vals[b - level_start] = vals;
    }
    if (fixed_norm <= 0) norm = std::max(norm, std::sqrt(settled + level_sq));
    for (std::size_t b = level_start; b < level_end; ++b) {
      const std::vector<double>& v = level_vals[b - level_start];
      const std::vector<double> c = vals_to_coeffs(v, dt.basis, d);
      const double e = tail_error(c, k, d);
      const std::int64_t id = static_cast<std::int64_t>(b);
      bool split = e > eps * norm || t[id].level < min_level;
      if (!split && ref) {
        const std::int64_t rb = ref->find(t[id].level, t[id].index);
        if (rb >= 0 && (*ref)[rb].level == t[id].level && !(*ref)[rb].is_leaf())
          split = std::abs(std::sqrt(ref_mass->fine[rb]) - std::sqrt(ref_mass->grid[rb])) > eps * norm;
      }
      if (split) {
        if (t[id].level >= max_level)
          throw std::runtime_error("density is not resolved at the maximum refinement level");
        t.split(id);
      } else {
        const std::int64_t s = dt.values.add();
        std::copy(v.begin(), v.end(), dt.values.slot(s).begin());
        t.node(id).grid_slot = s;
        const double vol = std::pow(t.side_of(id) / 2, d);
        for (int p = 0; p < n; ++p) settled += vol * wq[p] * v[p] * v[p];
      }
    }
    level_start = level_end;
  }
  if (record) {
    record->fine.assign(t.size(), 0.0);
    for (std::size_t b = t.size(); b-- > 0;) {
      const BoxNode& nb = t[b];
      if (nb.is_leaf()) record->fine[b] += record->grid[b];
      if (nb.parent >= 0) record->fine[nb.parent] += record->fine[b];
    }
  }
  return norm;
}

}  // namespace

DensityTree build_density_tree(int dim, Boundary bc, const DensityFn& density, int k, double eps,
                               const DensityTreeOptions& opt) {
  check_dim(dim);
  if (!(eps > 0)) throw std::invalid_argument("build_density_tree: epsilon must be positive");
  auto fresh = [&] {
    DensityTree dt;
    dt.tree = Tree(dim, Point{}, 1.0, bc);
    dt.k = k;
    dt.basis = LegendreBasis(k);
    dt.values.per_leaf = ipow(k, dim);
    return dt;
  };
  DensityTree dt = fresh();
  double norm = opt.norm_estimate;
  DensityTree first;
  PassMass mass;
  bool done = false;
  if (norm <= 0) {
    norm = density_pass(dt, density, eps, 0, opt.min_level, opt.max_level, &mass, nullptr, nullptr);
    if (opt.second_pass) {
      first = std::move(dt);
      dt = fresh();
    } else {
      done = true;
    }
  }
  if (norm <= 0) norm = 1;  // zero density: any tolerance is met
  if (!done) {
    const bool have_ref = !first.tree.boxes().empty();
    density_pass(dt, density, eps, norm, opt.min_level, opt.max_level, nullptr, have_ref ? &first.tree : nullptr,
                 have_ref ? &mass : nullptr);
  }
  dt.norm = norm;

  if (opt.balance) {
    const int n = dt.values.per_leaf;
    SplitCallback fill = [&](std::int64_t parent, std::int64_t first) {
      Tree& t = dt.tree;
      std::vector<double> coeffs;
      if (opt.interpolate_balance) coeffs = vals_to_coeffs(dt.values.slot(t[parent].grid_slot), dt.basis, dim);
      const Point pc = t.center(parent);
      const double ph = t.side_of(parent) / 2;
      std::vector<double> v(n);
      for (int c = 0; c < t.children_per_box(); ++c) {
        const std::int64_t ch = first + c;
        const std::vector<double> pts = box_nodes(t, ch, dt.basis);
        if (opt.interpolate_balance) {
          std::array<double, kMaxDim> u{};
          for (int p = 0; p < n; ++p) {
            for (int i = 0; i < dim; ++i) u[i] = (pts[p * dim + i] - pc[i]) / ph;
            v[p] = eval_legendre_expansion(coeffs, k, dim, std::span<const double>(u.data(), dim));
          }
        } else {
          density(pts, v);
        }
        const std::int64_t s = dt.values.add();
        std::copy(v.begin(), v.end(), dt.values.slot(s).begin());
        t.node(ch).grid_slot = s;
      }
      t.node(parent).grid_slot = -1;
    };
    dt.balance_boxes = balance_tree(dt.tree, fill);
  }
  canonicalize_with_grids(dt.tree, {&dt.values});
  return dt;
}

// ------------------------------------------------------------ neighbor lists

Point neighbor_center(const Tree& t, const Neighbor& n) {
  Point c = t.center(n.box);
  for (int i = 0; i < t.dim(); ++i) c[i] += n.image[i] * t.root_side();
  return c;
}

namespace {

// Cell index of a neighbour at its own level, with the image applied.
Index shifted_cell(const Tree& t, const Neighbor& n) {
  const BoxNode& b = t[n.box];
  Index c = b.index;
  for (int i = 0; i < t.dim(); ++i) c[i] += static_cast<std::int64_t>(n.image[i]) << b.level;
  return c;
}

// Closed boxes [a, a+1]*2^-la and [b, b+1]*2^-lb intersect.
bool touches(int dim, const Index& a, int la, const Index& b, int lb) {
  const int lf = std::max(la, lb);
  for (int i = 0; i < dim; ++i) {
    const std::int64_t a0 = a[i] << (lf - la), a1 = (a[i] + 1) << (lf - la);
    const std::int64_t b0 = b[i] << (lf - lb), b1 = (b[i] + 1) << (lf - lb);
    if (a1 < b0 || b1 < a0) return false;
  }
  return true;
}

}  // namespace

std::vector<std::vector<Neighbor>> compute_colleagues(const Tree& t) {
  const int d = t.dim();
  std::vector<std::vector<Neighbor>> col(t.size());
  // Process parents before children, whatever the storage order.
  std::vector<std::int64_t> order{0};
  for (std::size_t q = 0; q < order.size(); ++q) {
    const BoxNode& b = t[order[q]];
    if (!b.is_leaf())
      for (int c = 0; c < t.children_per_box(); ++c) order.push_back(b.first_child + c);
  }
  if (t.boundary() == Boundary::periodic) {
    const int n = ipow(3, d);
    for (int o = 0; o < n; ++o) {
      Neighbor nb{0, {}};
      int r = o;
      for (int i = 0; i < d; ++i) nb.image[i] = r % 3 - 1, r /= 3;
      col[0].push_back(nb);
    }
  } else {
    col[0].push_back(Neighbor{0, {}});
  }
  for (std::size_t q = 1; q < order.size(); ++q) {
    const std::int64_t id = order[q];
    const BoxNode& b = t[id];
    for (const Neighbor& pn : col[b.parent]) {
      const BoxNode& p = t[pn.box];
      if (p.is_leaf()) continue;
      for (int c = 0; c < t.children_per_box(); ++c) {
        const Neighbor cand{p.first_child + c, pn.image};
        const Index cell = shifted_cell(t, cand);
        bool near = true;
        for (int i = 0; i < d; ++i) near = near && std::abs(cell[i] - b.index[i]) <= 1;
        if (near) col[id].push_back(cand);
      }
    }
  }
  return col;
}

NeighborLists neighbor_lists(const Tree& t, ListMode mode, int lc, int max_per_box) {
  const int d = t.dim();
  NeighborLists nl;
  nl.colleagues = compute_colleagues(t);
  const std::size_t nb = t.size();
  nl.fine.resize(nb);
  nl.coarse.resize(nb);
  nl.plist.resize(nb);
  nl.dlist.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const std::int64_t id = static_cast<std::int64_t>(i);
    const BoxNode& b = t[id];
    if (!b.is_leaf()) continue;
    for (const Neighbor& cn : nl.colleagues[id]) {
      const BoxNode& c = t[cn.box];
      if (c.is_leaf() || cn.box == id) continue;
      for (int ch = 0; ch < t.children_per_box(); ++ch) {
        const Neighbor f{c.first_child + ch, cn.image};
        if (t[f.box].is_leaf() && touches(d, b.index, b.level, shifted_cell(t, f), b.level + 1))
          nl.fine[id].push_back(f);
      }
    }
    if (b.parent >= 0)
      for (const Neighbor& pn : nl.colleagues[b.parent]) {
        if (pn.box == b.parent || !t[pn.box].is_leaf()) continue;
        if (touches(d, b.index, b.level, shifted_cell(t, pn), b.level - 1)) nl.coarse[id].push_back(pn);
      }
  }

  if (mode == ListMode::point) {
    for (std::size_t i = 0; i < nb; ++i) {
      const std::int64_t id = static_cast<std::int64_t>(i);
      const BoxNode& b = t[id];
      if (!b.is_leaf()) continue;
      for (const Neighbor& cn : nl.colleagues[id]) {
        const BoxNode& c = t[cn.box];
        if (!c.is_leaf() || c.n_src() == 0) continue;
        if (b.level == lc && c.n_src() > max_per_box)
          nl.plist[id].push_back(cn);
        else
          nl.dlist[id].push_back(cn);
      }
      for (const Neighbor& f : nl.fine[id])
        if (t[f.box].n_src() > 0) nl.dlist[id].push_back(f);
      for (const Neighbor& c : nl.coarse[id])
        if (t[c.box].n_src() > 0) nl.dlist[id].push_back(c);
    }
    return nl;
  }

  nl.pw_flag.assign(nb, 0);
  for (std::size_t i = 0; i < nb; ++i) {
    const BoxNode& b = t[i];
    if (b.level > lc) {
      nl.pw_flag[i] = 1;
    } else if (b.level == lc) {
      bool f = !b.is_leaf();
      for (const Neighbor& cn : nl.colleagues[i]) f = f || !t[cn.box].is_leaf();
      nl.pw_flag[i] = f;
    }
  }
  for (std::size_t i = 0; i < nb; ++i) {
    const std::int64_t id = static_cast<std::int64_t>(i);
    const BoxNode& b = t[id];
    if (b.level == lc && nl.pw_flag[id])
      for (const Neighbor& cn : nl.colleagues[id])
        if (nl.pw_flag[cn.box]) nl.plist[id].push_back(cn);
    if (!b.is_leaf() || b.level > lc) continue;
    for (const Neighbor& cn : nl.colleagues[id]) {
      if (!t[cn.box].is_leaf()) continue;
      if (b.level == lc && nl.pw_flag[id] && nl.pw_flag[cn.box]) continue;
      nl.dlist[id].push_back(cn);
    }
    for (const Neighbor& f : nl.fine[id])
      if (t[f.box].level <= lc) nl.dlist[id].push_back(f);
    for (const Neighbor& c : nl.coarse[id]) nl.dlist[id].push_back(c);
  }
  return nl;
}

}  // namespace fgt

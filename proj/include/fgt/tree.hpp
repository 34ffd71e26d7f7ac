#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fgt/poly1d.hpp"
#include "fgt/types.hpp"

namespace fgt {

struct BoxNode {
  int level = 0;
  Index index{};                  // cell coordinates at `level`, in [0, 2^level)
  std::int64_t parent = -1;
  std::int64_t first_child = -1;  // 2^d contiguous children; -1 for a leaf
  bool pw_flag = false;           // takes part in plane-wave interactions
  std::int64_t src_begin = 0, src_end = 0;
  std::int64_t trg_begin = 0, trg_end = 0;
  std::int64_t grid_slot = -1;

  bool is_leaf() const { return first_child < 0; }
  std::int64_t n_src() const { return src_end - src_begin; }
  std::int64_t n_trg() const { return trg_end - trg_begin; }
};

/// A neighbour box seen through a periodic image shift (in root-side units).
struct Neighbor {
  std::int64_t box = -1;
  std::array<int, kMaxDim> image{};
  bool operator==(const Neighbor&) const = default;
};

/// 2^d-tree over a cube.  Children of a box are stored contiguously; child c
/// has index 2*parent_index + bit_i(c) along axis i.
class Tree {
 public:
  Tree(int dim, const Point& root_center, double root_side, Boundary bc);
  Tree() = default;

  int dim() const { return dim_; }
  Boundary boundary() const { return bc_; }
  const Point& root_center() const { return center_; }
  double root_side() const { return side_; }
  int children_per_box() const { return 1 << dim_; }

  std::size_t size() const { return nodes_.size(); }
  const BoxNode& operator[](std::int64_t i) const { return nodes_[i]; }
  BoxNode& node(std::int64_t i) { return nodes_[i]; }
  std::span<const BoxNode> boxes() const { return nodes_; }

  double side(int level) const;
  double side_of(std::int64_t box) const { return side(nodes_[box].level); }
  Point center(std::int64_t box) const;
  int max_level() const;
  std::size_t leaf_count() const;
  std::vector<std::int64_t> leaves() const;
  std::vector<std::vector<std::int64_t>> by_level() const;

  /// Appends 2^d children, returns the first child id.
  std::int64_t split(std::int64_t box);
  /// Child of `box` containing point x (by comparison with the box centre).
  std::int64_t child_containing(std::int64_t box, const double* x) const;
  /// Deepest box at level <= max_level containing x (x must lie in the root).
  std::int64_t locate(const double* x, int max_level = 1 << 30) const;
  /// Deepest box at level <= `level` containing the given cell; periodic cells
  /// wrap, free-space cells outside the root give -1.
  std::int64_t find(int level, Index cell) const;

  /// Reorders boxes breadth first (children contiguous) and drops boxes not
  /// reachable from the root.  Returns old id -> new id (-1 if dropped).
  std::vector<std::int64_t> canonicalize();

  std::vector<BoxNode>& raw_nodes() { return nodes_; }

 private:
  int dim_ = 1;
  Boundary bc_ = Boundary::free_space;
  Point center_{};
  double side_ = 1;
  std::vector<BoxNode> nodes_;
};

using SplitCallback = std::function<void(std::int64_t parent, std::int64_t first_child)>;

/// Ensures a box exists at `level` covering `cell`, splitting leaves as needed.
/// Returns the box or -1 (free space, outside the root).
std::int64_t ensure_box(Tree& t, int level, Index cell, const SplitCallback& on_split);

/// Enforces: leaves that touch differ by at most one level.  Returns the number
/// of boxes added.
std::int64_t balance_tree(Tree& t, const SplitCallback& on_split);

/// True if every pair of touching leaves differs by at most one level.
bool is_balanced(const Tree& t);

/// Smallest l with 2^-l * root_side <= 2 D0 sqrt(delta) (never negative).
int cutoff_level(double delta, double eps, double root_side = 1.0);

// ---------------------------------------------------------------- point trees

struct PointTree {
  Tree tree;
  int cutoff_level = 0;
  double cutoff_side = 0;
  std::vector<std::int64_t> src_order;  // sorted position -> caller index
  std::vector<std::int64_t> trg_order;
  std::vector<double> sources;          // sorted (and wrapped) coordinates
  std::vector<double> targets;
};

/// Adaptive tree over sources and targets that stops at the cutoff level.
/// Periodic inputs are wrapped into [-1/2, 1/2)^d.
PointTree build_point_tree(int dim, std::span<const double> sources, std::span<const double> targets,
                           int max_per_box, double delta, double eps, Boundary bc);

int default_max_per_box(int dim);

// -------------------------------------------------------------- density trees

/// Values of the density at n points (n x d row-major).
using DensityFn = std::function<void(std::span<const double> points, std::span<double> values)>;

/// Per-leaf tensor grids stored contiguously by slot.
struct LeafGrids {
  int per_leaf = 0;
  std::vector<double> data;

  std::size_t slots() const { return per_leaf ? data.size() / per_leaf : 0; }
  std::int64_t add();
  std::span<double> slot(std::int64_t s) { return {data.data() + s * per_leaf, static_cast<std::size_t>(per_leaf)}; }
  std::span<const double> slot(std::int64_t s) const {
    return {data.data() + s * per_leaf, static_cast<std::size_t>(per_leaf)};
  }
};

struct DensityTreeOptions {
  int min_level = 0;                 // uniform refinement down to this level
  int max_level = 30;
  double norm_estimate = 0;          // <= 0: estimate while building
  bool second_pass = true;           // rebuild with the final norm estimate
  bool balance = true;
  bool interpolate_balance = false;  // fill balance boxes from the parent polynomial
};

struct DensityTree {
  Tree tree;
  int k = 0;
  LegendreBasis basis;
  LeafGrids values;  // density at leaf nodes, slot = BoxNode::grid_slot
  double norm = 0;
  std::int64_t balance_boxes = 0;  // boxes added by the level restriction
};

/// Tensor Gauss nodes of a box (k^d points, dimension 0 fastest).
std::vector<double> box_nodes(const Tree& t, std::int64_t box, const LegendreBasis& b);

/// L2 norm over the leaves estimated with each leaf's quadrature.
double grid_l2_norm(const Tree& t, const LeafGrids& g, const LegendreBasis& b);

DensityTree build_density_tree(int dim, Boundary bc, const DensityFn& density, int k, double eps,
                               const DensityTreeOptions& opt = {});

/// Reorders the tree canonically and compacts the grids into leaf order;
/// returns old id -> new id.
std::vector<std::int64_t> canonicalize_with_grids(Tree& t, std::vector<LeafGrids*> grids);

// ------------------------------------------------------------- neighbor lists

enum class ListMode { point, box };

struct NeighborLists {
  std::vector<std::vector<Neighbor>> colleagues;  // every box, including itself
  std::vector<std::vector<Neighbor>> fine;        // leaves: finer touching leaves
  std::vector<std::vector<Neighbor>> coarse;      // leaves: coarser touching leaves
  std::vector<std::vector<Neighbor>> plist;       // plane-wave sources
  std::vector<std::vector<Neighbor>> dlist;       // direct sources
  std::vector<char> pw_flag;                      // box mode only
};

std::vector<std::vector<Neighbor>> compute_colleagues(const Tree& t);

/// Point mode: max_per_box decides which cutoff boxes are dense.  Box mode:
/// computes the plane-wave flags from the cutoff level.
NeighborLists neighbor_lists(const Tree& t, ListMode mode, int cutoff_level, int max_per_box = 0);

/// Centre of neighbour n as seen from the original cell (image applied).
Point neighbor_center(const Tree& t, const Neighbor& n);

}  // namespace fgt

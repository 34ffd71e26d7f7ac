#pragma once

#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "fgt/poly1d.hpp"
#include "fgt/tree.hpp"

namespace fgt {

/// Everything derived from the tree and the kernel parameters.
struct BoxPlan {
  int dim = 1;
  int k = 0;
  double delta = 0;
  double epsilon = 0;
  Boundary boundary = Boundary::free_space;
  int cutoff_level = 0;
  bool periodic_series = false;  // whole-cell Fourier series on the root
  double range = 0;
  PlaneWaveBasis pw;
  LegendreBasis basis;
  std::vector<LevelTables> tables;  // by level
  NeighborLists lists;

  const LevelTables& level(int l) const { return tables.at(l); }
};

BoxPlan make_box_plan(const Tree& t, int k, double delta, double eps);

struct BoxFgtStats {
  int cutoff_level = 0;
  int n_modes = 0;
  bool periodic_series = false;
  std::size_t pw_boxes = 0;      // boxes with the plane-wave flag
  std::size_t direct_pairs = 0;  // leaf pairs handled by direct tables
  double t_plan = 0, t_outgoing = 0, t_incoming = 0, t_direct = 0;
};

struct BoxFgtResult {
  LeafGrids potential;  // same slots as the density values
  std::map<std::int64_t, std::vector<cplx>> incoming;  // cutoff-level boxes with plane-wave flag
  BoxFgtStats stats;
};

/// u(x) = int_B G(x - y) sigma(y) dy at every leaf grid node.
BoxFgtResult fgt_box(const DensityTree& dt, const BoxPlan& plan, int threads = 1);
BoxFgtResult fgt_box(const DensityTree& dt, double delta, double eps, int threads = 1);

// Building blocks (tensors are dimension 0 fastest).

/// Outgoing expansion of a leaf from its Legendre coefficients.
std::vector<cplx> leaf_to_pw(std::span<const double> coeffs, const LevelTables& lt, int dim);
/// phi_parent += child expansion shifted to the parent centre; `child` is the
/// child position bits.
void merge_child(const std::vector<cplx>& phi_child, int child, const LevelTables& parent, int dim,
                 std::vector<cplx>& phi_parent);
/// Incoming expansion of a child from its parent's.
std::vector<cplx> push_child(const std::vector<cplx>& psi_parent, int child, const LevelTables& parent, int dim);
/// psi_T += phi_S shifted by c_T - c_S = offset * side, offset in {-1,0,1}^d.
void gather_add(const std::vector<cplx>& phi, const std::array<int, kMaxDim>& offset, const LevelTables& lt,
                int dim, std::vector<cplx>& psi);
/// Potential of an incoming expansion at a leaf's grid nodes.
std::vector<double> eval_pw_leaf(const std::vector<cplx>& psi, const LevelTables& lt, int dim);
/// out += direct interaction of a source leaf; tabs[i] is the k x k table of axis i.
void direct_add(std::span<const double> coeffs, const double* const* tabs, int k, int dim, std::span<double> out);

/// Direct table lookup for a source/target pair; the pair must be a
/// neighbour pair (colleague, or levels differing by one).
const double* pol2pot_for(const BoxPlan& plan, int source_level, int target_level, double offset);

}  // namespace fgt

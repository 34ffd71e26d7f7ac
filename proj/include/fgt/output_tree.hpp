#pragma once

#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "fgt/box_fgt.hpp"
#include "fgt/tree.hpp"

namespace fgt {

/// Tree carrying the potential, adapted from the density tree.
struct OutputTree {
  Tree tree;
  int k = 0;
  LegendreBasis basis;
  LeafGrids potential;
  std::vector<std::int64_t> origin;  // per box: input leaf the box lies in (-1 above the input leaves)

  std::int64_t added = 0;          // boxes appended by refinement
  std::int64_t deleted = 0;        // boxes removed by coarsening
  std::int64_t balance_added = 0;  // boxes appended by the final level restriction
  double threshold = 0;            // tail-error threshold that was applied
};

struct OutputOptions {
  double epsilon = 1e-12;
  /// Scale the threshold by the estimated L2 norm of the potential (matching
  /// the density criterion); otherwise it is absolute.
  bool relative = true;
  /// The coefficient-tail monitor misses the top pure-axis coefficients and
  /// under-reports the interpolation error of smooth, nearly one-directional
  /// potentials; leaves must satisfy tail <= monitor_scale * epsilon * norm.
  double monitor_scale = 0.01;
  int max_level = 30;
  bool rebalance = true;
};

/// Wraps the input tree and its potential without changing it.
OutputTree make_output_tree(const DensityTree& dt, const BoxFgtResult& r);

/// Splits leaves whose potential is under-resolved, recomputing the potential
/// on the children from the retained cutoff-level expansions and the direct
/// lists of the originating input leaf.
void refine_output(OutputTree& out, const DensityTree& dt, const BoxPlan& plan, const BoxFgtResult& r,
                   const OutputOptions& opt);

/// Merges sibling leaves whose union is resolved, bottom up.
void coarsen_output(OutputTree& out, const OutputOptions& opt);

/// Enforces the level restriction, interpolating the potential on new leaves;
/// canonicalizes the tree.
void rebalance_output(OutputTree& out);

/// refine + coarsen + (optional) rebalance.
OutputTree adapt_output(const DensityTree& dt, const BoxPlan& plan, const BoxFgtResult& r, const OutputOptions& opt);

/// Evaluates the piecewise polynomial defined by leaf grids at points (n x d).
std::vector<double> interp_at(const Tree& t, const LeafGrids& g, const LegendreBasis& b,
                              std::span<const double> points);

/// Potential of the input problem at a box lying inside input leaf `origin`.
std::vector<double> potential_on_box(const Tree& t, std::int64_t box, const DensityTree& dt, std::int64_t origin,
                                     const BoxPlan& plan, const BoxFgtResult& r);

}  // namespace fgt

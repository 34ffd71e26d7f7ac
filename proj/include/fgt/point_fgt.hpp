#pragma once

#include <span>
#include <vector>

#include "fgt/nufft.hpp"
#include "fgt/planewave.hpp"
#include "fgt/tree.hpp"

namespace fgt {

struct PointFgtOptions {
  double delta = 1e-2;
  double epsilon = 1e-6;
  int max_per_box = 0;  // 0: 80 in 1D/2D, 128 in 3D
  Boundary boundary = Boundary::free_space;
  int threads = 1;
  NufftMethod nufft = NufftMethod::automatic;
};

struct PointFgtStats {
  int cutoff_level = 0;
  int levels = 0;
  std::size_t boxes = 0;
  std::size_t leaves = 0;
  int n_modes = 0;
  double range = 0;
  bool periodic_series = false;
  std::size_t outgoing = 0;      // expansions formed
  std::size_t incoming = 0;      // target boxes evaluated from plane waves
  std::size_t direct_pairs = 0;  // source-target pairs summed directly
  double max_imag = 0;           // largest |Im| of an evaluated expansion
  double t_tree = 0, t_outgoing = 0, t_incoming = 0, t_direct = 0;
};

struct PointFgtResult {
  std::vector<double> potentials;
  PointFgtStats stats;
};

/// u_i = sum_j q_j G(x_i - y_j) with the free-space or unit-cell periodic
/// Gaussian kernel; coordinates are n x d row-major.
PointFgtResult fgt_points(int dim, std::span<const double> sources, std::span<const double> charges,
                          std::span<const double> targets, const PointFgtOptions& opt);

/// phi_m = W_m sum_j q_j exp(-i k_m . (y_j - c)).
std::vector<cplx> form_outgoing(int dim, std::span<const double> sources, std::span<const double> charges,
                                const Point& center, const PlaneWaveBasis& pw, const NufftPlan& plan);

/// psi += exp(i k . shift) phi, shift = c_T - c_S.
void add_translated(const std::vector<cplx>& phi, const Point& shift, const PlaneWaveBasis& pw,
                    std::vector<cplx>& psi);

/// out_i += Re sum_m psi_m exp(i k_m . (x_i - c)); returns the largest |Im|.
double eval_incoming(int dim, const std::vector<cplx>& psi, std::span<const double> targets, const Point& center,
                     const PlaneWaveBasis& pw, const NufftPlan& plan, std::span<double> out);

/// Direct sums over all pairs (reference evaluator).  Periodic mode uses the
/// unit-cell periodized kernel.
std::vector<double> direct_transform(int dim, std::span<const double> sources, std::span<const double> charges,
                                     std::span<const double> targets, double delta, Boundary bc, int threads = 1);

}  // namespace fgt

#pragma once

#include <array>
#include <span>
#include <vector>

#include "fgt/planewave.hpp"
#include "fgt/types.hpp"

namespace fgt {

struct QuadratureRule {
  std::vector<double> nodes;    // increasing, on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes (any n >= 1).
QuadratureRule gauss_legendre(int n);

/// Leaf-grid rule; k is restricted to [2, 24].
QuadratureRule legendre_nodes_weights(int k);

/// P_0(x) .. P_nmax(x).
void legendre_values(double x, int nmax, double* out);

/// Order-k Legendre basis on [-1,1] sampled at the Gauss nodes.
struct LegendreBasis {
  int k = 0;
  QuadratureRule rule;
  std::vector<double> val_to_pol;  // k x k, row n = coefficient index, col j = node
  std::vector<double> pol_to_val;  // k x k, row j = node, col n = coefficient index

  explicit LegendreBasis(int order);
  LegendreBasis() = default;
};

/// Tensor transforms on k^d grids (dimension 0 fastest).
std::vector<double> vals_to_coeffs(std::span<const double> values, const LegendreBasis& b, int dim);
std::vector<double> coeffs_to_vals(std::span<const double> coeffs, const LegendreBasis& b, int dim);

/// Evaluates a Legendre expansion on [-1,1]^d at a reference point u.
double eval_legendre_expansion(std::span<const double> coeffs, int k, int dim, std::span<const double> u);

/// J_lambda[P_n](t) = int_{-1}^{1} exp(-(t-x)^2/lambda^2) P_n(x) dx for n = 0..n_max.
std::vector<double> gauss_moment_J(double lambda, int n_max, double t);

/// Spherical Bessel functions j_0(t) .. j_nmax(t).
std::vector<double> spherical_bessel(int n_max, double t);

/// I[P_n](t) = int_{-1}^{1} exp(i t x) P_n(x) dx = 2 i^n j_n(t).
std::vector<cplx> fourier_moment_I(int n_max, double t);

/// RMS of the high-order tail coefficients (indices with |alpha|_2 >= k; in
/// 1D the top two).
double tail_error(std::span<const double> coeffs, int k, int dim);

/// Direct interaction matrix (target node i, polynomial j), including the
/// source half-width factor: (Ls/2) J_lambda[P_j](2 xi_i / Ls),
/// xi_i = offset + (Lt/2) eta_i, lambda = 2 sqrt(delta)/Ls.
std::vector<double> make_pol2pot(double source_side, double target_side, double offset, double delta,
                                 const LegendreBasis& b);

/// exp(i k_m shift) for each 1D mode.
std::vector<cplx> make_phase(const PlaneWaveBasis& pw, double shift);

/// Per-level transform tables.  Index layout of pol2pot:
///   0..3  fine targets (side L/2) at offsets -3L/4, -L/4, L/4, 3L/4
///   4..7  coarse targets (side 2L) at offsets -3L/2, -L/2, L/2, 3L/2
///   8..10 colleague targets at offsets -L, 0, L
struct LevelTables {
  int level = 0;
  double side = 0;
  int k = 0;
  int n_modes = 0;
  std::array<std::vector<double>, 11> pol2pot;
  std::vector<cplx> pol2pw;   // n_modes x k, includes w_m and L/2
  std::vector<cplx> pw2pot;   // k x n_modes
  std::array<std::vector<cplx>, 2> shift_c2p;     // child offset -L/4, +L/4
  std::array<std::vector<cplx>, 2> shift_p2c;     // child offset -L/4, +L/4
  std::array<std::vector<cplx>, 3> shift_out2in;  // c_T - c_S = -L, 0, L
};

/// Slot of pol2pot for a target at level (source level + rel_level), rel in
/// {-1,0,1}, whose centre offset is `offset_units` half-sides of the smaller
/// of the two boxes.  Returns -1 if the pair is not a neighbour pair.
int pol2pot_slot(int rel_level, int offset_units);

LevelTables build_level_tables(int level, double side, double delta, const LegendreBasis& b,
                               const PlaneWaveBasis& pw, bool with_pw = true);

}  // namespace fgt

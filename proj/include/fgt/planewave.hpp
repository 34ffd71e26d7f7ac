#pragma once

#include <span>
#include <vector>

#include "fgt/types.hpp"

namespace fgt {

/// Truncated Fourier quadrature of the Gaussian kernel exp(-|x|^2/delta),
/// valid for |x_i| <= range * sqrt(delta).
struct PwQuadrature {
  int dim = 1;
  double epsilon = 0;
  double delta = 0;
  double cutoff = 0;  // D0 = sqrt(log(3/eps))
  double range = 0;   // R
  double step = 0;    // h
  int n_modes = 0;    // per dimension, even
  std::vector<double> weights;  // w_m for m = -n_modes/2 .. n_modes/2-1

  double wavenumber(int m) const;
  std::size_t total_modes() const;
};

double gauss_cutoff(double eps);

PwQuadrature pw_params(double eps, double delta, double range, int dim);

double gauss_eval(std::span<const double> x, double delta);

/// Real part of sum_l w_l exp(i k_l . x).  The sum factorizes over dimensions.
double pw_kernel_eval(const PwQuadrature& q, std::span<const double> x);

/// Fourier series of the periodized 1D Gaussian on the unit cell.
struct PeriodicSeries {
  double epsilon = 0;
  double delta = 0;
  int n_terms = 0;              // n_p
  std::vector<double> coeffs;   // sqrt(pi delta) exp(-pi^2 delta n^2), n = -n_p..n_p
};

PeriodicSeries periodic_params(double eps, double delta);

/// Periodized Gaussian on [-1/2,1/2)^d, accurate to about eps (eps may be
/// below machine precision to get a reference value).
double periodic_kernel_eval(std::span<const double> x, double delta, double eps);
double periodic_gauss_1d(double x, double delta, double eps);

/// Mode set used by expansions: frequencies m * spacing with per-mode 1D
/// weights, m = -n_modes/2 .. n_modes/2-1.  Lexicographic storage, dimension 0
/// fastest.
struct PlaneWaveBasis {
  int dim = 1;
  int n_modes = 0;
  double spacing = 0;
  std::vector<double> weights;
  bool periodic_series = false;

  int mode(int idx) const { return idx - n_modes / 2; }
  double wavenumber(int idx) const { return mode(idx) * spacing; }
  std::size_t total_modes() const;
};

PlaneWaveBasis make_basis(const PwQuadrature& q);
/// Root-box series; the extra mode -n_p-1 keeps the count even.
PlaneWaveBasis make_basis(const PeriodicSeries& s, int dim);

}  // namespace fgt

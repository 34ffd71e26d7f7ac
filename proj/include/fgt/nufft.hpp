#pragma once

#include <span>
#include <vector>

#include "fgt/fft.hpp"
#include "fgt/types.hpp"

namespace fgt {

/// Uniform mode set: n_modes per dimension (even), m = -n/2 .. n/2-1,
/// dimension 0 fastest.
struct ModeGrid {
  int dim = 1;
  int n_modes = 0;
  std::size_t total() const;
};

enum class NufftMethod { automatic, spread, direct };

/// Type-1 / type-2 nonuniform FFT on uniform mode grids, points in [-pi, pi)^d
/// (other values are folded periodically).  Spreading uses the
/// exponential-of-semicircle kernel on a 2x upsampled grid.
class NufftPlan {
 public:
  NufftPlan(const ModeGrid& modes, double eps, NufftMethod method = NufftMethod::automatic);

  const ModeGrid& modes() const { return modes_; }
  int kernel_width() const { return width_; }
  int fine_size() const { return fine_; }

  /// out[k] = sum_j c_j exp(sign i k . x_j).  points: M x d row-major.
  void type1(std::span<const double> points, std::span<const cplx> strengths, std::span<cplx> out,
             int sign) const;
  /// out[j] = sum_k f_k exp(sign i k . x_j).
  void type2(std::span<const double> points, std::span<const cplx> coeffs, std::span<cplx> out, int sign) const;

  bool uses_direct(std::size_t n_points) const;

 private:
  void spread_type1(std::span<const double> points, std::span<const cplx> strengths, std::span<cplx> out,
                    int sign) const;
  void interp_type2(std::span<const double> points, std::span<const cplx> coeffs, std::span<cplx> out,
                    int sign) const;
  int kernel_row(double x, double* vals) const;

  ModeGrid modes_;
  NufftMethod method_;
  int width_ = 0;
  double beta_ = 0;
  int fine_ = 0;
  FftPlan fft_;
  std::vector<double> correction_;  // per 1D mode
};

std::vector<cplx> nufft_type1(std::span<const double> points, std::span<const cplx> strengths,
                              const ModeGrid& modes, double eps, int sign);
std::vector<cplx> nufft_type2(std::span<const double> points, std::span<const cplx> coeffs,
                              const ModeGrid& modes, double eps, int sign);

/// Tensor-factored direct sums (exact up to rounding).
void dft_type1(std::span<const double> points, std::span<const cplx> strengths, const ModeGrid& modes,
               std::span<cplx> out, int sign);
void dft_type2(std::span<const double> points, std::span<const cplx> coeffs, const ModeGrid& modes,
               std::span<cplx> out, int sign);

}  // namespace fgt

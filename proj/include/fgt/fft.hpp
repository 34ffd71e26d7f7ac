#pragma once

#include <span>
#include <vector>

#include "fgt/types.hpp"

namespace fgt {

/// Smallest 2^a 3^b 5^c that is >= n.
int next_smooth_size(int n);

/// Mixed-radix (2, 3, 4, 5) complex FFT of a fixed length.  Unnormalized:
/// out[j] = sum_l in[l] exp(sign * 2 pi i j l / n).  Plans are immutable and
/// may be shared between threads.
class FftPlan {
 public:
  explicit FftPlan(int n);
  FftPlan() = default;

  int size() const { return n_; }
  void execute(cplx* data, int sign) const;
  /// Transforms every axis of a d-dimensional cube of side n (dimension 0 fastest).
  void execute_nd(cplx* data, int dim, int sign) const;

 private:
  void recurse(const cplx* in, cplx* out, int n, int stride, int fi, int sign) const;

  int n_ = 0;
  std::vector<int> factors_;
  std::vector<cplx> roots_;  // exp(-2 pi i j / n)
};

}  // namespace fgt

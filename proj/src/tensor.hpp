#pragma once

#include <vector>

#include "fgt/types.hpp"

namespace fgt::detail {

// Tensors are stored dimension 0 fastest.  apply_axis contracts axis `axis`
// (extent ext[axis]) with a row-major rows x ext[axis] matrix.
template <class TOut, class TIn, class TMat>
void apply_axis(const TIn* in, const int* ext, int dim, int axis, const TMat* mat, int rows, TOut* out) {
  std::size_t inner = 1, outer = 1;
  for (int i = 0; i < axis; ++i) inner *= ext[i];
  for (int i = axis + 1; i < dim; ++i) outer *= ext[i];
  const int n = ext[axis];
  for (std::size_t o = 0; o < outer; ++o)
    for (int r = 0; r < rows; ++r) {
      TOut* dst = out + (o * rows + r) * inner;
      for (std::size_t i = 0; i < inner; ++i) dst[i] = TOut(0);
      const TMat* mrow = mat + static_cast<std::size_t>(r) * n;
      for (int j = 0; j < n; ++j) {
        const TMat m = mrow[j];
        const TIn* src = in + (o * n + j) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += m * src[i];
      }
    }
}

// Applies per-axis matrices mats[i] (rows[i] x ext[i]) to every axis.  The
// slowest axis goes first when `outer_first` is set (cheaper when the
// matrices shrink the tensor).
template <class TOut, class TIn, class TMat>
std::vector<TOut> apply_all(const TIn* in, int dim, const int* ext_in, const TMat* const* mats, const int* rows,
                            bool outer_first = false) {
  int ext[kMaxDim];
  for (int i = 0; i < dim; ++i) ext[i] = ext_in[i];
  std::vector<TOut> a, b;
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= ext[i];
  a.assign(in, in + total);
  for (int step = 0; step < dim; ++step) {
    const int axis = outer_first ? dim - 1 - step : step;
    std::size_t out_total = total / ext[axis] * rows[axis];
    b.assign(out_total, TOut(0));
    apply_axis(a.data(), ext, dim, axis, mats[axis], rows[axis], b.data());
    ext[axis] = rows[axis];
    total = out_total;
    std::swap(a, b);
  }
  return a;
}

// out[m] += in[m] * prod_i v_i[m_i] on an n^d tensor.
inline void add_phase(const cplx* in, cplx* out, int dim, int n, const cplx* const* v) {
  if (dim == 1) {
    for (int a = 0; a < n; ++a) out[a] += in[a] * v[0][a];
  } else if (dim == 2) {
    for (int b = 0; b < n; ++b) {
      const cplx vb = v[1][b];
      const std::size_t off = static_cast<std::size_t>(b) * n;
      for (int a = 0; a < n; ++a) out[off + a] += in[off + a] * (vb * v[0][a]);
    }
  } else {
    for (int c = 0; c < n; ++c)
      for (int b = 0; b < n; ++b) {
        const cplx vbc = v[2][c] * v[1][b];
        const std::size_t off = (static_cast<std::size_t>(c) * n + b) * n;
        for (int a = 0; a < n; ++a) out[off + a] += in[off + a] * (vbc * v[0][a]);
      }
  }
}

// data[m] *= prod_i v_i[m_i]
inline void scale_tensor(cplx* data, int dim, int n, const double* const* v) {
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= n;
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t r = t;
    double s = 1;
    for (int i = 0; i < dim; ++i) s *= v[i][r % n], r /= n;
    data[t] *= s;
  }
}

}  // namespace fgt::detail

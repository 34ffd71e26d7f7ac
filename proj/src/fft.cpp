#include "fgt/fft.hpp"

#include <cmath>
#include <numbers>

namespace fgt {

int next_smooth_size(int n) {
  if (n <= 1) return 1;
  for (int m = n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

FftPlan::FftPlan(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("FftPlan: size must be positive");
  int r = n;
  while (r % 4 == 0) factors_.push_back(4), r /= 4;
  for (int p : {2, 3, 5})
    while (r % p == 0) factors_.push_back(p), r /= p;
  if (r != 1) throw std::invalid_argument("FftPlan: size must factor into 2, 3 and 5");
  roots_.resize(n);
  for (int j = 0; j < n; ++j) roots_[j] = std::polar(1.0, -2 * std::numbers::pi * j / n);
}

void FftPlan::recurse(const cplx* in, cplx* out, int n, int stride, int fi, int sign) const {
  if (n == 1) {
    out[0] = in[0];
    return;
  }
  const int p = factors_[fi];
  const int m = n / p;
  for (int r = 0; r < p; ++r) recurse(in + r * stride, out + r * m, m, stride * p, fi + 1, sign);
  const int tw = n_ / n;  // root index step for this level
  auto root = [&](long idx) {
    const cplx w = roots_[idx % n_];
    return sign > 0 ? std::conj(w) : w;
  };
  cplx t[5], res[5];
  for (int k = 0; k < m; ++k) {
    t[0] = out[k];
    for (int r = 1; r < p; ++r) t[r] = out[r * m + k] * root(static_cast<long>(tw) * r * k);
    for (int q = 0; q < p; ++q) {
      cplx s = t[0];
      for (int r = 1; r < p; ++r) s += t[r] * root(static_cast<long>(n_ / p) * ((r * q) % p));
      res[q] = s;
    }
    for (int q = 0; q < p; ++q) out[k + m * q] = res[q];
  }
}

void FftPlan::execute(cplx* data, int sign) const {
  if (n_ <= 1) return;
  std::vector<cplx> in(data, data + n_);
  recurse(in.data(), data, n_, 1, 0, sign);
}

void FftPlan::execute_nd(cplx* data, int dim, int sign) const {
  const std::size_t n = n_;
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= n;
  std::vector<cplx> line(n), tmp(n);
  std::size_t stride = 1;
  for (int axis = 0; axis < dim; ++axis) {
    const std::size_t block = stride * n;
    for (std::size_t base = 0; base < total; base += block)
      for (std::size_t i = 0; i < stride; ++i) {
        cplx* p = data + base + i;
        for (std::size_t j = 0; j < n; ++j) tmp[j] = p[j * stride];
        recurse(tmp.data(), line.data(), n_, 1, 0, sign);
        for (std::size_t j = 0; j < n; ++j) p[j * stride] = line[j];
      }
    stride *= n;
  }
}

}  // namespace fgt

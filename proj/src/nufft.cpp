#include "fgt/nufft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fgt/poly1d.hpp"

namespace fgt {

namespace {

constexpr double two_pi = 2 * std::numbers::pi;

void check_modes(const ModeGrid& m) {
  check_dim(m.dim);
  if (m.n_modes < 2 || m.n_modes % 2 != 0)
    throw std::invalid_argument("nufft: number of modes per dimension must be a positive even integer");
}

void check_points(std::span<const double> points, std::size_t count, int dim) {
  if (points.size() != count * static_cast<std::size_t>(dim))
    throw std::invalid_argument("nufft: point array size does not match strength count");
}

// Per-point 1D phase vectors exp(sign i k x_i), k = -n/2 .. n/2-1.
void phases(const double* x, int dim, int n, int sign, cplx* out) {
  for (int i = 0; i < dim; ++i)
    for (int m = 0; m < n; ++m) out[i * n + m] = std::polar(1.0, sign * (m - n / 2) * x[i]);
}

}  // namespace

std::size_t ModeGrid::total() const {
  std::size_t t = 1;
  for (int i = 0; i < dim; ++i) t *= static_cast<std::size_t>(n_modes);
  return t;
}

void dft_type1(std::span<const double> points, std::span<const cplx> strengths, const ModeGrid& modes,
               std::span<cplx> out, int sign) {
  check_modes(modes);
  check_points(points, strengths.size(), modes.dim);
  const int d = modes.dim, n = modes.n_modes;
  if (out.size() != modes.total()) throw std::invalid_argument("nufft: output size mismatch");
  std::fill(out.begin(), out.end(), cplx(0));
  std::vector<cplx> e(static_cast<std::size_t>(d) * n);
  for (std::size_t j = 0; j < strengths.size(); ++j) {
    phases(&points[j * d], d, n, sign, e.data());
    const cplx c = strengths[j];
    if (d == 1) {
      for (int a = 0; a < n; ++a) out[a] += c * e[a];
    } else if (d == 2) {
      for (int b = 0; b < n; ++b) {
        const cplx cb = c * e[n + b];
        cplx* row = &out[static_cast<std::size_t>(b) * n];
        for (int a = 0; a < n; ++a) row[a] += cb * e[a];
      }
    } else {
      for (int g = 0; g < n; ++g)
        for (int b = 0; b < n; ++b) {
          const cplx cb = c * e[2 * n + g] * e[n + b];
          cplx* row = &out[(static_cast<std::size_t>(g) * n + b) * n];
          for (int a = 0; a < n; ++a) row[a] += cb * e[a];
        }
    }
  }
}

void dft_type2(std::span<const double> points, std::span<const cplx> coeffs, const ModeGrid& modes,
               std::span<cplx> out, int sign) {
  check_modes(modes);
  check_points(points, out.size(), modes.dim);
  const int d = modes.dim, n = modes.n_modes;
  if (coeffs.size() != modes.total()) throw std::invalid_argument("nufft: coefficient size mismatch");
  std::vector<cplx> e(static_cast<std::size_t>(d) * n);
  for (std::size_t j = 0; j < out.size(); ++j) {
    phases(&points[j * d], d, n, sign, e.data());
    cplx s(0);
    if (d == 1) {
      for (int a = 0; a < n; ++a) s += coeffs[a] * e[a];
    } else if (d == 2) {
      for (int b = 0; b < n; ++b) {
        cplx r(0);
        const cplx* row = &coeffs[static_cast<std::size_t>(b) * n];
        for (int a = 0; a < n; ++a) r += row[a] * e[a];
        s += r * e[n + b];
      }
    } else {
      for (int g = 0; g < n; ++g) {
        cplx t(0);
        for (int b = 0; b < n; ++b) {
          cplx r(0);
          const cplx* row = &coeffs[(static_cast<std::size_t>(g) * n + b) * n];
          for (int a = 0; a < n; ++a) r += row[a] * e[a];
          t += r * e[n + b];
        }
        s += t * e[2 * n + g];
      }
    }
    out[j] = s;
  }
}

NufftPlan::NufftPlan(const ModeGrid& modes, double eps, NufftMethod method) : modes_(modes), method_(method) {
  check_modes(modes);
  if (!(eps > 0)) throw std::invalid_argument("nufft: epsilon must be positive");
  width_ = std::clamp(static_cast<int>(std::ceil(std::log10(1.0 / eps))) + 2, 2, 16);
  beta_ = 2.30 * width_;
  fine_ = next_smooth_size(std::max(2 * modes.n_modes, 2 * width_));
  fft_ = FftPlan(fine_);

  // Fourier transform of the kernel on [-1,1] by Gauss-Legendre on [0,1].
  const QuadratureRule r = gauss_legendre(2 * width_ + 60);
  const int n = modes.n_modes;
  correction_.resize(n);
  for (int m = 0; m < n; ++m) {
    const double xi = std::numbers::pi * width_ * (m - n / 2) / fine_;
    double phi_hat = 0;
    for (std::size_t q = 0; q < r.nodes.size(); ++q) {
      const double z = (r.nodes[q] + 1) / 2;
      phi_hat += r.weights[q] * std::exp(beta_ * (std::sqrt(1 - z * z) - 1)) * std::cos(xi * z);
    }
    correction_[m] = (2.0 / width_) / phi_hat;  // phi_hat = 2 * (1/2) * sum
  }
}

bool NufftPlan::uses_direct(std::size_t n_points) const {
  if (method_ == NufftMethod::direct) return true;
  if (method_ == NufftMethod::spread) return false;
  double fine_total = 1, wd = 1;
  for (int i = 0; i < modes_.dim; ++i) fine_total *= fine_, wd *= width_;
  const double direct_cost = static_cast<double>(n_points) * static_cast<double>(modes_.total());
  const double spread_cost = fine_total * std::log2(fine_total) + static_cast<double>(n_points) * wd;
  return direct_cost < 4 * spread_cost;
}

int NufftPlan::kernel_row(double x, double* vals) const {
  double xf = std::fmod(x, two_pi);
  if (xf < 0) xf += two_pi;
  const double g = xf * fine_ / two_pi;
  const double half = width_ / 2.0;
  const int l0 = static_cast<int>(std::ceil(g - half));
  for (int i = 0; i < width_; ++i) {
    const double z = (l0 + i - g) / half;
    vals[i] = std::abs(z) < 1 ? std::exp(beta_ * (std::sqrt(1 - z * z) - 1)) : 0.0;
  }
  return l0;
}

void NufftPlan::spread_type1(std::span<const double> points, std::span<const cplx> strengths,
                             std::span<cplx> out, int sign) const {
  const int d = modes_.dim, w = width_, nf = fine_;
  std::size_t fine_total = 1;
  for (int i = 0; i < d; ++i) fine_total *= nf;
  std::vector<cplx> grid(fine_total, cplx(0));
  double ker[kMaxDim][16];
  int idx[kMaxDim][16];
  for (std::size_t j = 0; j < strengths.size(); ++j) {
    for (int i = 0; i < d; ++i) {
      const int l0 = kernel_row(points[j * d + i], ker[i]);
      for (int a = 0; a < w; ++a) idx[i][a] = ((l0 + a) % nf + nf) % nf;
    }
    const cplx c = strengths[j];
    if (d == 1) {
      for (int a = 0; a < w; ++a) grid[idx[0][a]] += c * ker[0][a];
    } else if (d == 2) {
      for (int b = 0; b < w; ++b) {
        const cplx cb = c * ker[1][b];
        cplx* row = &grid[static_cast<std::size_t>(idx[1][b]) * nf];
        for (int a = 0; a < w; ++a) row[idx[0][a]] += cb * ker[0][a];
      }
    } else {
      for (int g = 0; g < w; ++g)
        for (int b = 0; b < w; ++b) {
          const cplx cb = c * (ker[2][g] * ker[1][b]);
          cplx* row = &grid[(static_cast<std::size_t>(idx[2][g]) * nf + idx[1][b]) * nf];
          for (int a = 0; a < w; ++a) row[idx[0][a]] += cb * ker[0][a];
        }
    }
  }
  fft_.execute_nd(grid.data(), d, sign);
  const int n = modes_.n_modes;
  auto wrap = [&](int m) { return ((m - n / 2) % nf + nf) % nf; };
  const std::size_t total = modes_.total();
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t r = t, gi = 0, gs = 1;
    double corr = 1;
    for (int i = 0; i < d; ++i) {
      const int m = static_cast<int>(r % n);
      r /= n;
      gi += static_cast<std::size_t>(wrap(m)) * gs;
      gs *= nf;
      corr *= correction_[m];
    }
    out[t] = grid[gi] * corr;
  }
}

void NufftPlan::interp_type2(std::span<const double> points, std::span<const cplx> coeffs, std::span<cplx> out,
                             int sign) const {
  const int d = modes_.dim, w = width_, nf = fine_;
  std::size_t fine_total = 1;
  for (int i = 0; i < d; ++i) fine_total *= nf;
  std::vector<cplx> grid(fine_total, cplx(0));
  const int n = modes_.n_modes;
  auto wrap = [&](int m) { return ((m - n / 2) % nf + nf) % nf; };
  const std::size_t total = modes_.total();
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t r = t, gi = 0, gs = 1;
    double corr = 1;
    for (int i = 0; i < d; ++i) {
      const int m = static_cast<int>(r % n);
      r /= n;
      gi += static_cast<std::size_t>(wrap(m)) * gs;
      gs *= nf;
      corr *= correction_[m];
    }
    grid[gi] = coeffs[t] * corr;
  }
  fft_.execute_nd(grid.data(), d, sign);
  double ker[kMaxDim][16];
  int idx[kMaxDim][16];
  for (std::size_t j = 0; j < out.size(); ++j) {
    for (int i = 0; i < d; ++i) {
      const int l0 = kernel_row(points[j * d + i], ker[i]);
      for (int a = 0; a < w; ++a) idx[i][a] = ((l0 + a) % nf + nf) % nf;
    }
    cplx s(0);
    if (d == 1) {
      for (int a = 0; a < w; ++a) s += grid[idx[0][a]] * ker[0][a];
    } else if (d == 2) {
      for (int b = 0; b < w; ++b) {
        cplx r(0);
        const cplx* row = &grid[static_cast<std::size_t>(idx[1][b]) * nf];
        for (int a = 0; a < w; ++a) r += row[idx[0][a]] * ker[0][a];
        s += r * ker[1][b];
      }
    } else {
      for (int g = 0; g < w; ++g)
        for (int b = 0; b < w; ++b) {
          cplx r(0);
          const cplx* row = &grid[(static_cast<std::size_t>(idx[2][g]) * nf + idx[1][b]) * nf];
          for (int a = 0; a < w; ++a) r += row[idx[0][a]] * ker[0][a];
          s += r * (ker[2][g] * ker[1][b]);
        }
    }
    out[j] = s;
  }
}

void NufftPlan::type1(std::span<const double> points, std::span<const cplx> strengths, std::span<cplx> out,
                      int sign) const {
  check_points(points, strengths.size(), modes_.dim);
  if (out.size() != modes_.total()) throw std::invalid_argument("nufft: output size mismatch");
  if (uses_direct(strengths.size()))
    dft_type1(points, strengths, modes_, out, sign);
  else
    spread_type1(points, strengths, out, sign);
}

void NufftPlan::type2(std::span<const double> points, std::span<const cplx> coeffs, std::span<cplx> out,
                      int sign) const {
  check_points(points, out.size(), modes_.dim);
  if (coeffs.size() != modes_.total()) throw std::invalid_argument("nufft: coefficient size mismatch");
  if (uses_direct(out.size()))
    dft_type2(points, coeffs, modes_, out, sign);
  else
    interp_type2(points, coeffs, out, sign);
}

std::vector<cplx> nufft_type1(std::span<const double> points, std::span<const cplx> strengths,
                              const ModeGrid& modes, double eps, int sign) {
  NufftPlan plan(modes, eps);
  std::vector<cplx> out(modes.total());
  plan.type1(points, strengths, out, sign);
  return out;
}

std::vector<cplx> nufft_type2(std::span<const double> points, std::span<const cplx> coeffs,
                              const ModeGrid& modes, double eps, int sign) {
  NufftPlan plan(modes, eps);
  std::vector<cplx> out(points.size() / modes.dim);
  plan.type2(points, coeffs, out, sign);
  return out;
}

}  // namespace fgt

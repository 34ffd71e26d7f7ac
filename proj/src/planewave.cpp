#include "fgt/planewave.hpp"

#include <cmath>
#include <numbers>

namespace fgt {

namespace {
constexpr double pi = std::numbers::pi;
}

double PwQuadrature::wavenumber(int m) const { return m * step / std::sqrt(delta); }

std::size_t PwQuadrature::total_modes() const {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(n_modes);
  return n;
}

std::size_t PlaneWaveBasis::total_modes() const {
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(n_modes);
  return n;
}

double gauss_cutoff(double eps) { return std::sqrt(std::log(3.0 / eps)); }

PwQuadrature pw_params(double eps, double delta, double range, int dim) {
  check_dim(dim);
  if (!(eps >= kMinEpsilon && eps < 0.1))
    throw std::invalid_argument("pw_params: epsilon must lie in [1e-14, 0.1)");
  if (!(delta > 0)) throw std::invalid_argument("pw_params: delta must be positive");
  PwQuadrature q;
  q.dim = dim;
  q.epsilon = eps;
  q.delta = delta;
  q.cutoff = gauss_cutoff(eps);
  if (!(range >= q.cutoff * (1 - 1e-12)))
    throw std::invalid_argument("pw_params: range must be at least the cutoff D0");
  q.range = range;
  q.step = 2 * pi / (range + q.cutoff);
  const int m = static_cast<int>(std::ceil(q.cutoff * (range + q.cutoff) / pi));
  q.n_modes = 2 * m;
  q.weights.resize(q.n_modes);
  const double scale = q.step / (2 * std::sqrt(pi));
  for (int i = 0; i < q.n_modes; ++i) {
    const double mh = (i - m) * q.step;
    q.weights[i] = scale * std::exp(-mh * mh / 4);
  }
  return q;
}

double gauss_eval(std::span<const double> x, double delta) {
  double r2 = 0;
  for (double v : x) r2 += v * v;
  return std::exp(-r2 / delta);
}

double pw_kernel_eval(const PwQuadrature& q, std::span<const double> x) {
  if (static_cast<int>(x.size()) != q.dim) throw std::invalid_argument("pw_kernel_eval: dimension mismatch");
  cplx prod(1.0, 0.0);
  const double kscale = q.step / std::sqrt(q.delta);
  for (double xi : x) {
    cplx s(0, 0);
    for (int i = 0; i < q.n_modes; ++i) {
      const double arg = (i - q.n_modes / 2) * kscale * xi;
      s += q.weights[i] * cplx(std::cos(arg), std::sin(arg));
    }
    prod *= s;
  }
  return prod.real();
}

PeriodicSeries periodic_params(double eps, double delta) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("periodic_params: epsilon must lie in (0, 1)");
  if (!(delta > 0)) throw std::invalid_argument("periodic_params: delta must be positive");
  PeriodicSeries s;
  s.epsilon = eps;
  s.delta = delta;
  s.n_terms = static_cast<int>(std::ceil(std::sqrt(std::log(1.0 / eps)) / (pi * std::sqrt(delta))));
  s.coeffs.resize(2 * s.n_terms + 1);
  const double c0 = std::sqrt(pi * delta);
  for (int n = -s.n_terms; n <= s.n_terms; ++n)
    s.coeffs[n + s.n_terms] = c0 * std::exp(-pi * pi * delta * n * n);
  return s;
}

double periodic_gauss_1d(double x, double delta, double eps) {
  x -= std::floor(x + 0.5);
  if (delta < 1.0 / 36) {
    double s = 0;
    for (int m = -1; m <= 1; ++m) s += std::exp(-(x - m) * (x - m) / delta);
    return s;
  }
  const int np = static_cast<int>(std::ceil(std::sqrt(std::log(1.0 / eps)) / (pi * std::sqrt(delta))));
  double s = 1;
  for (int n = 1; n <= np; ++n) s += 2 * std::exp(-pi * pi * delta * n * n) * std::cos(2 * pi * n * x);
  return std::sqrt(pi * delta) * s;
}

double periodic_kernel_eval(std::span<const double> x, double delta, double eps) {
  double p = 1;
  for (double v : x) p *= periodic_gauss_1d(v, delta, eps);
  return p;
}

PlaneWaveBasis make_basis(const PwQuadrature& q) {
  PlaneWaveBasis b;
  b.dim = q.dim;
  b.n_modes = q.n_modes;
  b.spacing = q.step / std::sqrt(q.delta);
  b.weights = q.weights;
  return b;
}

PlaneWaveBasis make_basis(const PeriodicSeries& s, int dim) {
  check_dim(dim);
  PlaneWaveBasis b;
  b.dim = dim;
  b.n_modes = 2 * s.n_terms + 2;
  b.spacing = 2 * pi;
  b.periodic_series = true;
  b.weights.resize(b.n_modes);
  const double c0 = std::sqrt(pi * s.delta);
  for (int i = 0; i < b.n_modes; ++i) {
    const double n = i - b.n_modes / 2;
    b.weights[i] = c0 * std::exp(-pi * pi * s.delta * n * n);
  }
  return b;
}

}  // namespace fgt

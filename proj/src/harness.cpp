#include "fgt/harness.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fgt {

namespace {

constexpr double kPi = std::numbers::pi;

const Point kCenters[5] = {{-0.3, -0.4, -0.06}, {-0.2, 0, -0.25}, {0.18, -0.1, -0.03},
                           {-0.09, 0.3, 0.17}, {-0.38, -0.05, -0.17}};

// Radius functions of the curves and surfaces, on directions.
double star_radius(double th) { return 0.3 * (1 + 0.3 * std::cos(5 * th)); }
double perturbed_radius_2d(double th) { return 0.3 * (1 + 0.2 * std::cos(3 * th) + 0.1 * std::sin(2 * th)); }
double perturbed_radius_3d(double th, double ph) {
  const double c = std::cos(th), s = std::sin(th);
  return 0.3 * (1 + 0.2 * 0.5 * (3 * c * c - 1) + 0.15 * s * s * std::cos(2 * ph) + 0.1 * s * c * std::sin(ph));
}

// Closed curve r(th): rejection on the arc-length density.
template <class R>
void sample_curve(R radius, std::size_t n, std::mt19937_64& g, std::vector<double>& out) {
  std::uniform_real_distribution<double> U(0, 1);
  const double hd = 1e-6;
  auto speed = [&](double th) {
    const double r = radius(th), dr = (radius(th + hd) - radius(th - hd)) / (2 * hd);
    return std::hypot(r, dr);
  };
  double bound = 0;
  for (int i = 0; i < 4096; ++i) bound = std::max(bound, speed(2 * kPi * i / 4096));
  bound *= 1.05;
  for (std::size_t j = 0; j < n;) {
    const double th = 2 * kPi * U(g);
    if (U(g) * bound > speed(th)) continue;
    const double r = radius(th);
    out.push_back(0.5 + r * std::cos(th));
    out.push_back(0.5 + r * std::sin(th));
    ++j;
  }
}

// Star-shaped surface r(th, ph): uniform directions, rejection on the
// ratio of the surface element to the solid-angle element.
template <class R>
void sample_surface(R radius, std::size_t n, std::mt19937_64& g, std::vector<double>& out) {
  std::uniform_real_distribution<double> U(0, 1);
  const double hd = 1e-6;
  auto pos = [&](double th, double ph) {
    const double r = radius(th, ph);
    return std::array<double, 3>{r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r * std::cos(th)};
  };
  auto ratio = [&](double th, double ph) {
    auto a = pos(th + hd, ph), b = pos(th - hd, ph), c = pos(th, ph + hd), e = pos(th, ph - hd);
    double xt[3], xp[3];
    for (int i = 0; i < 3; ++i) {
      xt[i] = (a[i] - b[i]) / (2 * hd);
      xp[i] = (c[i] - e[i]) / (2 * hd);
    }
    const double cx = xt[1] * xp[2] - xt[2] * xp[1], cy = xt[2] * xp[0] - xt[0] * xp[2],
                 cz = xt[0] * xp[1] - xt[1] * xp[0];
    return std::sqrt(cx * cx + cy * cy + cz * cz) / std::sin(th);
  };
  double bound = 0;
  for (int i = 1; i < 128; ++i)
    for (int j = 0; j < 256; ++j) bound = std::max(bound, ratio(kPi * i / 128, 2 * kPi * j / 256));
  bound *= 1.1;
  for (std::size_t j = 0; j < n;) {
    const double z = 2 * U(g) - 1, ph = 2 * kPi * U(g);
    const double th = std::acos(std::clamp(z, -1.0, 1.0));
    if (th < 1e-9 || th > kPi - 1e-9) continue;
    if (U(g) * bound > ratio(th, ph)) continue;
    const auto p = pos(th, ph);
    for (int i = 0; i < 3; ++i) out.push_back(0.5 + p[i]);
    ++j;
  }
}

// int_{-1/2}^{1/2} exp(-(y-c)^2/a) exp(-(x-y)^2/delta) dy
double gauss_conv_1d(double x, double c, double a, double delta) {
  const double s = a * delta / (a + delta), m = (c * delta + x * a) / (a + delta), rs = std::sqrt(s);
  const double lo = (-0.5 - m) / rs, hi = (0.5 - m) / rs;
  double w;
  if (lo > 0)
    w = std::erfc(lo) - std::erfc(hi);
  else if (hi < 0)
    w = std::erfc(-hi) - std::erfc(-lo);
  else
    w = std::erf(hi) - std::erf(lo);
  return std::exp(-(x - c) * (x - c) / (a + delta)) * std::sqrt(kPi * s) / 2 * w;
}

}  // namespace

PointKind parse_point_kind(const std::string& s) {
  if (s == "uniform-box" || s == "uniform") return PointKind::uniform_box;
  if (s == "curve-2d" || s == "curve") return PointKind::curve_2d;
  if (s == "surface-3d" || s == "surface") return PointKind::surface_3d;
  if (s == "perturbed-sphere") return PointKind::perturbed_sphere;
  throw std::invalid_argument("unknown point distribution: " + s);
}

std::string to_string(PointKind k) {
  switch (k) {
    case PointKind::uniform_box: return "uniform-box";
    case PointKind::curve_2d: return "curve-2d";
    case PointKind::surface_3d: return "surface-3d";
    case PointKind::perturbed_sphere: return "perturbed-sphere";
  }
  return "?";
}

std::vector<double> gen_points(PointKind kind, int dim, std::size_t n, std::uint64_t seed) {
  check_dim(dim);
  std::mt19937_64 g(seed);
  std::vector<double> out;
  out.reserve(n * dim);
  switch (kind) {
    case PointKind::uniform_box: {
      std::uniform_real_distribution<double> U(0, 1);
      for (std::size_t i = 0; i < n * dim; ++i) out.push_back(U(g));
      break;
    }
    case PointKind::curve_2d:
      if (dim != 2) throw std::invalid_argument("curve-2d needs dim 2");
      sample_curve(star_radius, n, g, out);
      break;
    case PointKind::surface_3d:
      if (dim != 3) throw std::invalid_argument("surface-3d needs dim 3");
      sample_surface([](double, double) { return 0.4; }, n, g, out);
      break;
    case PointKind::perturbed_sphere:
      if (dim == 2)
        sample_curve(perturbed_radius_2d, n, g, out);
      else if (dim == 3)
        sample_surface(perturbed_radius_3d, n, g, out);
      else
        throw std::invalid_argument("perturbed-sphere needs dim 2 or 3");
      break;
  }
  return out;
}

std::vector<double> gen_charges(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<double> q(n);
  for (double& v : q) v = U(g);
  return q;
}

GaussianMix reference_gaussians(int dim, int n_g, double alpha1) {
  check_dim(dim);
  if (n_g < 1 || n_g > 5) throw std::invalid_argument("reference_gaussians: n_g must be in [1, 5]");
  GaussianMix m;
  for (int i = 0; i < n_g; ++i) {
    Point c{};
    for (int a = 0; a < dim; ++a) c[a] = kCenters[i][a];
    m.centers.push_back(c);
    m.alpha.push_back(alpha1 / (i + 1));
  }
  return m;
}

namespace {

TestDensity pointwise(std::string name, int dim, Boundary bc, std::function<double(const double*)> s,
                      std::function<double(const double*)> u) {
  TestDensity t;
  t.name = std::move(name);
  t.dim = dim;
  t.boundary = bc;
  t.sigma_at = s;
  t.potential = std::move(u);
  t.sigma = [s, dim](std::span<const double> pts, std::span<double> vals) {
    for (std::size_t j = 0; j < vals.size(); ++j) vals[j] = s(&pts[j * dim]);
  };
  return t;
}

}  // namespace

TestDensity density_sigma_f(int dim, const GaussianMix& mix, double delta) {
  check_dim(dim);
  auto s = [dim, mix](const double* x) {
    double v = 0;
    for (std::size_t i = 0; i < mix.alpha.size(); ++i) {
      double r2 = 0;
      for (int a = 0; a < dim; ++a) r2 += (x[a] - mix.centers[i][a]) * (x[a] - mix.centers[i][a]);
      v += std::exp(-r2 / mix.alpha[i]);
    }
    return v;
  };
  auto u = [dim, mix, delta](const double* x) {
    double v = 0;
    for (std::size_t i = 0; i < mix.alpha.size(); ++i) {
      double p = 1;
      for (int j = 0; j < dim; ++j) p *= gauss_conv_1d(x[j], mix.centers[i][j], mix.alpha[i], delta);
      v += p;
    }
    return v;
  };
  return pointwise("sigma_f", dim, Boundary::free_space, s, u);
}

TestDensity density_sigma_p(int dim, int n_p, double delta) {
  check_dim(dim);
  auto s = [dim, n_p](const double* x) {
    double v = 1;
    for (int i = 0; i < dim; ++i) v *= (i % 2 == 0) ? std::sin(2 * kPi * n_p * x[i]) : std::cos(2 * kPi * n_p * x[i]);
    return v;
  };
  const double scale = std::pow(kPi * delta, 0.5 * dim) * std::exp(-dim * kPi * kPi * delta * n_p * n_p);
  auto u = [s, scale](const double* x) { return scale * s(x); };
  return pointwise("sigma_p", dim, Boundary::periodic, s, u);
}

TestDensity density_constant(int dim, double delta, Boundary bc) {
  check_dim(dim);
  auto s = [](const double*) { return 1.0; };
  std::function<double(const double*)> u;
  if (bc == Boundary::periodic) {
    const double c = std::pow(kPi * delta, 0.5 * dim);
    u = [c](const double*) { return c; };
  } else {
    const double sd = std::sqrt(delta);
    u = [dim, sd](const double* x) {
      double v = 1;
      for (int i = 0; i < dim; ++i) v *= sd * std::sqrt(kPi) / 2 * (std::erf((0.5 - x[i]) / sd) + std::erf((0.5 + x[i]) / sd));
      return v;
    };
  }
  return pointwise("constant", dim, bc, s, u);
}

double relative_l2(std::span<const double> approx, std::span<const double> exact) {
  if (approx.size() != exact.size()) throw std::invalid_argument("relative_l2: size mismatch");
  long double num = 0, den = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const long double e = approx[i] - exact[i];
    num += e * e;
    den += static_cast<long double>(exact[i]) * exact[i];
  }
  return den > 0 ? static_cast<double>(std::sqrt(num / den)) : static_cast<double>(std::sqrt(num));
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> equispaced_points(int dim, int n_per_dim) {
  check_dim(dim);
  const std::size_t total = ipow(n_per_dim, dim);
  std::vector<double> p(total * dim);
  for (std::size_t j = 0; j < total; ++j) {
    std::size_t r = j;
    for (int i = 0; i < dim; ++i) {
      p[j * dim + i] = -0.5 + (static_cast<double>(r % n_per_dim) + 0.5) / n_per_dim;
      r /= n_per_dim;
    }
  }
  return p;
}

}  // namespace fgt

#include "fgt/poly1d.hpp"

#include <cmath>
#include <numbers>

namespace fgt {

namespace {

constexpr double pi = std::numbers::pi;

// Moments by the five-term recurrence; used for |t| <= 1 and small lambda
// where forward recurrence is stable.  Long double buys the digits that the
// recurrence loses near |t| = 1.
std::vector<double> moments_recurrence(double lambda_d, int n_max, double t_d) {
  using R = long double;
  const R lam = lambda_d, t = t_d;
  const R a = (-1 - t) / lam, b = (1 - t) / lam;
  const R ea = std::exp(-a * a), eb = std::exp(-b * b);
  const R l2 = lam * lam / 2;
  std::vector<R> m(n_max + 3, 0);
  m[0] = lam * std::sqrt(std::numbers::pi_v<R>) / 2 * (std::erf(b) - std::erf(a));
  m[1] = t * m[0] - l2 * (eb - ea);
  m[2] = R(1.5) * (t * m[1] - l2 * (eb + ea) + l2 * m[0]) - m[0] / 2;
  for (int n = 1; n + 2 <= n_max; ++n) {
    const R prev2 = n >= 2 ? m[n - 2] : 0;
    const R rhs = t * (m[n + 1] - m[n - 1]) + R(n - 1) / (2 * n - 1) * prev2 +
                  R(2 * n + 1) * (l2 + R(1) / ((2 * n + 3) * (2 * n - 1))) * m[n];
    m[n + 2] = rhs * (2 * n + 3) / (n + 2);
  }
  std::vector<double> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n) out[n] = static_cast<double>(m[n]);
  return out;
}

const QuadratureRule& window_rule() {
  static const QuadratureRule r = gauss_legendre(96);
  return r;
}

// Quadrature restricted to the window where the Gaussian exceeds e^-81.
std::vector<double> moments_quadrature(double lambda, int n_max, double t) {
  std::vector<double> out(n_max + 1, 0.0);
  const double lo = std::max(-1.0, t - 9 * lambda);
  const double hi = std::min(1.0, t + 9 * lambda);
  if (!(hi > lo)) return out;
  const QuadratureRule& r = window_rule();
  const double half = (hi - lo) / 2, mid = (hi + lo) / 2;
  std::vector<double> p(n_max + 1);
  for (std::size_t q = 0; q < r.nodes.size(); ++q) {
    const double x = mid + half * r.nodes[q];
    const double g = r.weights[q] * half * std::exp(-(t - x) * (t - x) / (lambda * lambda));
    legendre_values(x, n_max, p.data());
    for (int n = 0; n <= n_max; ++n) out[n] += g * p[n];
  }
  return out;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        // refresh the derivative at the converged node
        p0 = 1, p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        break;
      }
    }
    const double w = 2 / ((1 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0;
  return r;
}

QuadratureRule legendre_nodes_weights(int k) {
  if (k < 2 || k > 24) throw std::invalid_argument("legendre_nodes_weights: k must lie in [2, 24]");
  return gauss_legendre(k);
}

void legendre_values(double x, int nmax, double* out) {
  out[0] = 1;
  if (nmax >= 1) out[1] = x;
  for (int n = 2; n <= nmax; ++n) out[n] = ((2 * n - 1) * x * out[n - 1] - (n - 1) * out[n - 2]) / n;
}

LegendreBasis::LegendreBasis(int order) : k(order), rule(legendre_nodes_weights(order)) {
  val_to_pol.assign(k * k, 0);
  pol_to_val.assign(k * k, 0);
  std::vector<double> p(k);
  for (int j = 0; j < k; ++j) {
    legendre_values(rule.nodes[j], k - 1, p.data());
    for (int n = 0; n < k; ++n) {
      pol_to_val[j * k + n] = p[n];
      val_to_pol[n * k + j] = (2 * n + 1) / 2.0 * rule.weights[j] * p[n];
    }
  }
}

namespace {

// Applies a k x k matrix along every axis of a k^d tensor.
std::vector<double> apply_all_axes(std::span<const double> in, const std::vector<double>& mat, int k, int dim) {
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= k;
  if (in.size() != total) throw std::invalid_argument("leaf grid size does not match k^d");
  std::vector<double> a(in.begin(), in.end()), b(total);
  std::size_t inner = 1;
  for (int axis = 0; axis < dim; ++axis) {
    const std::size_t outer = total / (inner * k);
    for (std::size_t o = 0; o < outer; ++o)
      for (int r = 0; r < k; ++r) {
        double* dst = &b[(o * k + r) * inner];
        for (std::size_t i = 0; i < inner; ++i) dst[i] = 0;
        for (int j = 0; j < k; ++j) {
          const double m = mat[r * k + j];
          const double* src = &a[(o * k + j) * inner];
          for (std::size_t i = 0; i < inner; ++i) dst[i] += m * src[i];
        }
      }
    std::swap(a, b);
    inner *= k;
  }
  return a;
}

}  // namespace

std::vector<double> vals_to_coeffs(std::span<const double> values, const LegendreBasis& b, int dim) {
  return apply_all_axes(values, b.val_to_pol, b.k, dim);
}

std::vector<double> coeffs_to_vals(std::span<const double> coeffs, const LegendreBasis& b, int dim) {
  return apply_all_axes(coeffs, b.pol_to_val, b.k, dim);
}

double eval_legendre_expansion(std::span<const double> coeffs, int k, int dim, std::span<const double> u) {
  std::array<std::array<double, 32>, kMaxDim> p{};
  for (int i = 0; i < dim; ++i) legendre_values(u[i], k - 1, p[i].data());
  double s = 0;
  if (dim == 1) {
    for (int a = 0; a < k; ++a) s += coeffs[a] * p[0][a];
  } else if (dim == 2) {
    for (int b = 0; b < k; ++b) {
      double r = 0;
      for (int a = 0; a < k; ++a) r += coeffs[b * k + a] * p[0][a];
      s += r * p[1][b];
    }
  } else {
    for (int c = 0; c < k; ++c) {
      double t = 0;
      for (int b = 0; b < k; ++b) {
        double r = 0;
        const double* row = &coeffs[(c * k + b) * k];
        for (int a = 0; a < k; ++a) r += row[a] * p[0][a];
        t += r * p[1][b];
      }
      s += t * p[2][c];
    }
  }
  return s;
}

std::vector<double> gauss_moment_J(double lambda, int n_max, double t) {
  if (!(lambda > 0)) throw std::invalid_argument("gauss_moment_J: lambda must be positive");
  if (n_max < 0) throw std::invalid_argument("gauss_moment_J: n_max must be >= 0");
  if (lambda <= 0.125 && std::abs(t) <= 1) {
    std::vector<double> v = moments_recurrence(lambda, std::max(n_max, 2), t);
    v.resize(n_max + 1);
    return v;
  }
  return moments_quadrature(lambda, n_max, t);
}

std::vector<double> spherical_bessel(int n_max, double t) {
  if (n_max < 0) throw std::invalid_argument("spherical_bessel: n_max must be >= 0");
  std::vector<double> j(n_max + 1, 0.0);
  const double x = std::abs(t);
  if (x == 0) {
    j[0] = 1;
    return j;
  }
  if (x <= 1) {
    // power series
    double lead = 1;  // x^n / (2n+1)!!
    const double y = -x * x / 2;
    for (int n = 0; n <= n_max; ++n) {
      if (n > 0) lead *= x / (2 * n + 1);
      double term = 1, sum = 1;
      for (int m = 1; m < 40; ++m) {
        term *= y / (m * (2 * n + 2 * m + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      }
      j[n] = lead * sum;
    }
  } else {
    const double j0 = std::sin(x) / x;
    const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
    if (x >= n_max) {
      j[0] = j0;
      if (n_max >= 1) j[1] = j1;
      for (int n = 1; n < n_max; ++n) j[n + 1] = (2 * n + 1) / x * j[n] - j[n - 1];
    } else {
      const int start = std::max(n_max, static_cast<int>(x)) + 30 + static_cast<int>(std::sqrt(40.0 * x));
      std::vector<double> f(start + 2, 0.0);
      f[start] = 1e-300;
      for (int n = start; n >= 1; --n) {
        f[n - 1] = (2 * n + 1) / x * f[n] - f[n + 1];
        if (std::abs(f[n - 1]) > 1e250) {
          for (int m = n - 1; m <= start; ++m) f[m] *= 1e-250;
        }
      }
      const double scale = std::abs(j0) >= std::abs(j1) ? j0 / f[0] : j1 / f[1];
      for (int n = 0; n <= n_max; ++n) j[n] = f[n] * scale;
    }
  }
  if (t < 0)
    for (int n = 1; n <= n_max; n += 2) j[n] = -j[n];
  return j;
}

std::vector<cplx> fourier_moment_I(int n_max, double t) {
  const std::vector<double> j = spherical_bessel(n_max, t);
  std::vector<cplx> out(n_max + 1);
  static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int n = 0; n <= n_max; ++n) out[n] = 2.0 * j[n] * ipow[n % 4];
  return out;
}

double tail_error(std::span<const double> coeffs, int k, int dim) {
  double s = 0;
  std::size_t count = 0;
  if (dim == 1) {
    for (int a = std::max(0, k - 2); a < k; ++a) s += coeffs[a] * coeffs[a], ++count;
  } else {
    const int n = ipow(k, dim);
    for (int idx = 0; idx < n; ++idx) {
      int r = idx, norm2 = 0;
      for (int i = 0; i < dim; ++i) {
        const int a = r % k;
        r /= k;
        norm2 += a * a;
      }
      if (norm2 >= k * k) s += coeffs[idx] * coeffs[idx], ++count;
    }
  }
  return count ? std::sqrt(s / count) : 0.0;
}

std::vector<double> make_pol2pot(double source_side, double target_side, double offset, double delta,
                                 const LegendreBasis& b) {
  const int k = b.k;
  const double lambda = 2 * std::sqrt(delta) / source_side;
  std::vector<double> tab(k * k);
  for (int i = 0; i < k; ++i) {
    const double xi = offset + target_side / 2 * b.rule.nodes[i];
    const std::vector<double> jv = gauss_moment_J(lambda, k - 1, 2 * xi / source_side);
    for (int j = 0; j < k; ++j) tab[i * k + j] = source_side / 2 * jv[j];
  }
  return tab;
}

std::vector<cplx> make_phase(const PlaneWaveBasis& pw, double shift) {
  std::vector<cplx> v(pw.n_modes);
  for (int m = 0; m < pw.n_modes; ++m) v[m] = std::polar(1.0, pw.wavenumber(m) * shift);
  return v;
}

int pol2pot_slot(int rel_level, int offset_units) {
  auto pick4 = [](int u) { return u == -3 ? 0 : u == -1 ? 1 : u == 1 ? 2 : u == 3 ? 3 : -1; };
  if (rel_level == 1) return pick4(offset_units);
  if (rel_level == -1) {
    const int s = pick4(offset_units);
    return s < 0 ? -1 : 4 + s;
  }
  if (rel_level == 0) return offset_units == -2 ? 8 : offset_units == 0 ? 9 : offset_units == 2 ? 10 : -1;
  return -1;
}

LevelTables build_level_tables(int level, double side, double delta, const LegendreBasis& b,
                               const PlaneWaveBasis& pw, bool with_pw) {
  LevelTables t;
  t.level = level;
  t.side = side;
  t.k = b.k;
  const double L = side;
  const double fine[4] = {-0.75 * L, -0.25 * L, 0.25 * L, 0.75 * L};
  const double coarse[4] = {-1.5 * L, -0.5 * L, 0.5 * L, 1.5 * L};
  for (int s = 0; s < 4; ++s) {
    t.pol2pot[s] = make_pol2pot(L, L / 2, fine[s], delta, b);
    t.pol2pot[4 + s] = make_pol2pot(L, 2 * L, coarse[s], delta, b);
  }
  for (int s = 0; s < 3; ++s) t.pol2pot[8 + s] = make_pol2pot(L, L, (s - 1) * L, delta, b);
  if (!with_pw) return t;

  const int k = b.k, nf = pw.n_modes;
  t.n_modes = nf;
  t.pol2pw.resize(static_cast<std::size_t>(nf) * k);
  t.pw2pot.resize(static_cast<std::size_t>(k) * nf);
  for (int m = 0; m < nf; ++m) {
    const double km = pw.wavenumber(m);
    const std::vector<cplx> iv = fourier_moment_I(k - 1, km * L / 2);
    for (int j = 0; j < k; ++j) t.pol2pw[m * k + j] = pw.weights[m] * (L / 2) * std::conj(iv[j]);
    for (int n = 0; n < k; ++n) t.pw2pot[n * nf + m] = std::polar(1.0, km * L / 2 * b.rule.nodes[n]);
  }
  for (int c = 0; c < 2; ++c) {
    const double off = (c == 0 ? -0.25 : 0.25) * L;
    t.shift_p2c[c] = make_phase(pw, off);
    t.shift_c2p[c] = make_phase(pw, -off);
  }
  for (int s = 0; s < 3; ++s) t.shift_out2in[s] = make_phase(pw, (s - 1) * L);
  return t;
}

}  // namespace fgt

#include <doctest.h>

#include <cmath>
#include <random>

#include "fgt/fft.hpp"
#include "fgt/nufft.hpp"
#include "oracles.hpp"

using namespace fgt;

namespace {

std::vector<cplx> random_complex(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<cplx> v(n);
  for (auto& z : v) z = {u(rng), u(rng)};
  return v;
}

std::vector<double> random_points(std::size_t n, int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-M_PI, M_PI);
  std::vector<double> x(n * dim);
  for (auto& v : x) v = u(rng);
  return x;
}

double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("smooth sizes") {
  CHECK(next_smooth_size(1) == 1);
  CHECK(next_smooth_size(7) == 8);
  CHECK(next_smooth_size(49) == 50);
  CHECK(next_smooth_size(121) == 125);
  CHECK(next_smooth_size(61) == 64);
}

TEST_CASE("FFT against a naive DFT") {
  std::mt19937_64 rng(2);
  for (int n : {1, 2, 3, 4, 5, 8, 12, 30, 45, 64, 100, 120}) {
    FftPlan p(n);
    for (int sign : {-1, 1}) {
      std::vector<cplx> x = random_complex(n, rng), ref(n);
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) ref[j] += x[l] * std::polar(1.0, sign * 2 * M_PI * j * l / n);
      p.execute(x.data(), sign);
      CAPTURE(n);
      CHECK(rel_l2(x, ref) < 1e-13);
    }
  }
  FftPlan p(6);
  std::vector<cplx> cube = random_complex(216, rng), copy = cube;
  p.execute_nd(cube.data(), 3, -1);
  p.execute_nd(cube.data(), 3, 1);
  for (std::size_t i = 0; i < copy.size(); ++i) CHECK(std::abs(cube[i] / 216.0 - copy[i]) < 1e-14);
}

TEST_CASE("type 1 trivial cases") {
  const double origin[2] = {0, 0};
  const cplx one[1] = {1};
  const std::vector<cplx> f = nufft_type1(origin, one, ModeGrid{2, 12}, 1e-10, -1);
  for (const cplx& z : f) CHECK(std::abs(z - 1.0) < 1e-10);

  const int n = 16;
  std::vector<double> grid(n);
  for (int j = 0; j < n; ++j) grid[j] = -M_PI + 2 * M_PI * j / n;
  std::mt19937_64 rng(4);
  const std::vector<cplx> c = random_complex(n, rng);
  NufftPlan plan(ModeGrid{1, n}, 1e-12, NufftMethod::spread);
  std::vector<cplx> out(n);
  plan.type1(grid, c, out, -1);
  std::vector<cplx> fft = c;
  FftPlan(n).execute(fft.data(), -1);
  for (int m = 0; m < n; ++m) {
    const int mode = m - n / 2;
    const cplx ref = fft[(mode + n) % n] * std::polar(1.0, M_PI * mode);
    CHECK(std::abs(out[m] - ref) < 1e-11);
  }
}

TEST_CASE("type 2 zero mode") {
  ModeGrid g{3, 12};
  std::vector<cplx> f(g.total());
  f[6 + 12 * 6 + 144 * 6] = 1;
  std::mt19937_64 rng(5);
  const std::vector<double> x = random_points(50, 3, rng);
  for (const cplx& z : nufft_type2(x, f, g, 1e-8, 1)) CHECK(std::abs(z - 1.0) < 1e-8);
}

TEST_CASE("NUFFT against direct sums") {
  std::mt19937_64 rng(6);
  for (int dim : {1, 2, 3})
    for (int nf : {12, 30, 56})
      for (std::size_t m : {1u, 10u, 1000u})
        for (double eps : {1e-4, 1e-8, 1e-12}) {
          if (dim == 3 && nf == 56 && m == 1000) continue;
          const ModeGrid g{dim, nf};
          const std::vector<double> x = random_points(m, dim, rng);
          const std::vector<cplx> c = random_complex(m, rng), f = random_complex(g.total(), rng);
          for (NufftMethod meth : {NufftMethod::spread, NufftMethod::automatic}) {
            NufftPlan plan(g, eps, meth);
            std::vector<cplx> o1(g.total()), o2(m);
            plan.type1(x, c, o1, -1);
            plan.type2(x, f, o2, 1);
            CAPTURE(dim);
            CAPTURE(nf);
            CAPTURE(m);
            CAPTURE(eps);
            CHECK(rel_l2(o1, oracle::dft1(dim, nf, x, c, -1)) <= eps);
            CHECK(rel_l2(o2, oracle::dft2(dim, nf, x, f, 1)) <= eps);
          }
        }
}

TEST_CASE("adjoint identity and linearity") {
  std::mt19937_64 rng(7);
  const ModeGrid g{2, 30};
  const std::vector<double> x = random_points(300, 2, rng);
  const std::vector<cplx> f = random_complex(300, rng), h = random_complex(g.total(), rng);
  const std::vector<cplx> a = nufft_type1(x, f, g, 1e-12, -1);
  const std::vector<cplx> b = nufft_type2(x, h, g, 1e-12, 1);
  cplx lhs = 0, rhs = 0;
  for (std::size_t k = 0; k < a.size(); ++k) lhs += a[k] * std::conj(h[k]);
  for (std::size_t j = 0; j < f.size(); ++j) rhs += f[j] * std::conj(b[j]);
  CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(lhs));

  const std::vector<cplx> f2 = random_complex(300, rng);
  std::vector<cplx> mix(300);
  const cplx s(0.3, -2.0), t(1.5, 0.25);
  for (int j = 0; j < 300; ++j) mix[j] = s * f[j] + t * f2[j];
  const std::vector<cplx> lin = nufft_type1(x, mix, g, 1e-12, -1), a2 = nufft_type1(x, f2, g, 1e-12, -1);
  double err = 0, scale = 0;
  for (std::size_t k = 0; k < lin.size(); ++k) {
    err = std::max(err, std::abs(lin[k] - s * a[k] - t * a2[k]));
    scale = std::max(scale, std::abs(lin[k]));
  }
  CHECK(err <= 1e-13 * scale);
}

TEST_CASE("direct path matches the tensor DFT") {
  std::mt19937_64 rng(8);
  const ModeGrid g{2, 20};
  const std::vector<double> x = random_points(40, 2, rng);
  const std::vector<cplx> c = random_complex(40, rng);
  std::vector<cplx> out(g.total());
  dft_type1(x, c, g, out, 1);
  CHECK(rel_l2(out, oracle::dft1(2, 20, x, c, 1)) < 1e-14);
  NufftPlan plan(g, 1e-6, NufftMethod::direct);
  CHECK(plan.uses_direct(1000));
}

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fgt {

inline constexpr int kMaxDim = 3;

using Point = std::array<double, kMaxDim>;
using Index = std::array<std::int64_t, kMaxDim>;
using cplx = std::complex<double>;

enum class Boundary { free_space, periodic };

inline Boundary parse_boundary(std::string_view s) {
  if (s == "free") return Boundary::free_space;
  if (s == "periodic") return Boundary::periodic;
  throw std::invalid_argument("unknown boundary '" + std::string(s) + "' (expected free|periodic)");
}

inline const char* to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "free";
}

inline void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be 1, 2 or 3");
}

// Tolerances below this are not attainable in double precision; above it the
// plane-wave truncation rule breaks down.
inline constexpr double kMinEpsilon = 1e-14;
inline constexpr double kMaxEpsilon = 0.099;

inline double clamp_epsilon(double eps) {
  if (!(eps > 0)) throw std::invalid_argument("epsilon must be positive");
  return eps < kMinEpsilon ? kMinEpsilon : (eps > kMaxEpsilon ? kMaxEpsilon : eps);
}

inline int ipow(int base, int e) {
  int r = 1;
  while (e-- > 0) r *= base;
  return r;
}

}  // namespace fgt

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fgt/tree.hpp"

namespace fgt {

enum class PointKind { uniform_box, curve_2d, surface_3d, perturbed_sphere };

PointKind parse_point_kind(const std::string& s);
std::string to_string(PointKind k);

/// Seeded point sets in [0,1]^d, row-major.
///   uniform-box       uniform in the cube
///   curve-2d          uniform in arc length on a five-armed star curve
///   surface-3d        uniform on the sphere of radius 0.4 about the centre
///   perturbed-sphere  uniform in area on r = 0.3 (1 + 0.2 Y) with Y a fixed
///                     low-order harmonic (a closed curve in 2D)
std::vector<double> gen_points(PointKind kind, int dim, std::size_t n, std::uint64_t seed);

/// Uniform [0,1) charges.
std::vector<double> gen_charges(std::size_t n, std::uint64_t seed);

/// Test density with its exact Gauss transform (unit cube centred at 0).
struct TestDensity {
  std::string name;
  int dim = 0;
  Boundary boundary = Boundary::free_space;
  DensityFn sigma;
  std::function<double(const double*)> sigma_at;
  std::function<double(const double*)> potential;  // exact; null if unknown
};

struct GaussianMix {
  std::vector<Point> centers;
  std::vector<double> alpha;
};

/// First n_g of the five reference centres (projected for d < 3), alpha_i = alpha_1 / i.
GaussianMix reference_gaussians(int dim, int n_g, double alpha1);

/// sum_i exp(-|x - x_i|^2 / alpha_i) restricted to the unit cube, free space;
/// the potential is the exact convolution over the cube.
TestDensity density_sigma_f(int dim, const GaussianMix& mix, double delta);
/// prod_{odd i} sin(2 pi n x_i) prod_{even i} cos(2 pi n x_i), periodic.
TestDensity density_sigma_p(int dim, int n_p, double delta);
/// sigma = 1 on the unit cube.
TestDensity density_constant(int dim, double delta, Boundary bc);

double relative_l2(std::span<const double> approx, std::span<const double> exact);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

/// Equispaced tensor points n_per_dim^d on [-1/2, 1/2)^d (cell centred).
std::vector<double> equispaced_points(int dim, int n_per_dim);

}  // namespace fgt

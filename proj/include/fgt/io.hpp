#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fgt/tree.hpp"

namespace fgt {

/// Binary point file: "FGTP", u32 version, u32 d, u32 has_charges, u64 N,
/// then N*d f64 coordinates (row-major), then N f64 charges if present.
/// All integers and floats little endian.
struct PointFile {
  int dim = 0;
  std::vector<double> coords;
  std::vector<double> charges;  // empty if absent
};

void write_points(std::ostream& os, const PointFile& p);
PointFile read_points(std::istream& is);
void write_points(const std::string& path, const PointFile& p);
PointFile read_points(const std::string& path);

/// Binary tree dump, see docs/formats.md.
struct TreeFile {
  enum Kind : std::uint32_t { point = 0, density = 1 };
  Kind kind = density;
  std::int64_t param = 0;  // k for density trees, n_s for point trees
  int cutoff_level = 0;
  Tree tree;
  LeafGrids grids;         // density trees: values per leaf slot
};

void dump_tree(std::ostream& os, const TreeFile& f);
TreeFile load_tree(std::istream& is);
void dump_tree(const std::string& path, const TreeFile& f);
TreeFile load_tree(const std::string& path);

/// Raw potentials: "FGTU", u32 version, u64 N, N f64.
void write_values(const std::string& path, const std::vector<double>& v);
std::vector<double> read_values(const std::string& path);

}  // namespace fgt

#include "fgt/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace fgt {

namespace {

constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_i64(std::ostream& os, std::int64_t v) { put_u64(os, static_cast<std::uint64_t>(v)); }
void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("unexpected end of file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("unexpected end of file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::int64_t get_i64(std::istream& is) { return static_cast<std::int64_t>(get_u64(is)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

void expect_magic(std::istream& is, const char* magic) {
  char m[4];
  if (!is.read(m, 4) || std::memcmp(m, magic, 4) != 0)
    throw std::runtime_error(std::string("bad magic, expected ") + magic);
  const std::uint32_t v = get_u32(is);
  if (v != kVersion) throw std::runtime_error("unsupported file version " + std::to_string(v));
}

template <class F>
void with_out(const std::string& path, F f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  f(os);
  if (!os) throw std::runtime_error("write failed: " + path);
}

template <class F>
auto with_in(const std::string& path, F f) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return f(is);
}

}  // namespace

void write_points(std::ostream& os, const PointFile& p) {
  check_dim(p.dim);
  if (p.coords.size() % p.dim) throw std::invalid_argument("write_points: coordinate count not a multiple of dim");
  const std::uint64_t n = p.coords.size() / p.dim;
  if (!p.charges.empty() && p.charges.size() != n)
    throw std::invalid_argument("write_points: charge count does not match point count");
  os.write("FGTP", 4);
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(p.dim));
  put_u32(os, p.charges.empty() ? 0 : 1);
  put_u64(os, n);
  for (double v : p.coords) put_f64(os, v);
  for (double v : p.charges) put_f64(os, v);
}

PointFile read_points(std::istream& is) {
  expect_magic(is, "FGTP");
  PointFile p;
  p.dim = static_cast<int>(get_u32(is));
  check_dim(p.dim);
  const bool has = get_u32(is) != 0;
  const std::uint64_t n = get_u64(is);
  p.coords.resize(n * p.dim);
  for (double& v : p.coords) v = get_f64(is);
  if (has) {
    p.charges.resize(n);
    for (double& v : p.charges) v = get_f64(is);
  }
  return p;
}

void write_points(const std::string& path, const PointFile& p) {
  with_out(path, [&](std::ostream& os) { write_points(os, p); });
}

PointFile read_points(const std::string& path) {
  return with_in(path, [](std::istream& is) { return read_points(is); });
}

void dump_tree(std::ostream& os, const TreeFile& f) {
  const Tree& t = f.tree;
  os.write("FGTT", 4);
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(t.dim()));
  put_u32(os, f.kind);
  put_i64(os, f.param);
  put_i64(os, t.max_level() + 1);
  put_i64(os, static_cast<std::int64_t>(t.size()));
  put_i64(os, f.cutoff_level);
  put_u32(os, t.boundary() == Boundary::periodic ? 1 : 0);
  put_u32(os, static_cast<std::uint32_t>(f.grids.per_leaf));
  for (int i = 0; i < kMaxDim; ++i) put_f64(os, t.root_center()[i]);
  put_f64(os, t.root_side());
  for (std::size_t b = 0; b < t.size(); ++b) {
    const BoxNode& n = t[b];
    put_i64(os, n.level);
    put_i64(os, n.parent);
    put_i64(os, n.first_child);
    put_i64(os, (n.is_leaf() ? 1 : 0) | (n.pw_flag ? 2 : 0));
    for (int i = 0; i < kMaxDim; ++i) put_i64(os, n.index[i]);
    put_i64(os, n.src_begin);
    put_i64(os, n.src_end);
    put_i64(os, n.trg_begin);
    put_i64(os, n.trg_end);
    put_i64(os, n.grid_slot);
    const Point c = t.center(static_cast<std::int64_t>(b));
    for (int i = 0; i < kMaxDim; ++i) put_f64(os, c[i]);
    put_f64(os, t.side_of(static_cast<std::int64_t>(b)));
  }
  for (double v : f.grids.data) put_f64(os, v);
}

TreeFile load_tree(std::istream& is) {
  expect_magic(is, "FGTT");
  TreeFile f;
  const int dim = static_cast<int>(get_u32(is));
  check_dim(dim);
  const std::uint32_t kind = get_u32(is);
  if (kind > 1) throw std::runtime_error("unknown tree kind");
  f.kind = static_cast<TreeFile::Kind>(kind);
  f.param = get_i64(is);
  get_i64(is);  // levels, derived
  const std::int64_t count = get_i64(is);
  f.cutoff_level = static_cast<int>(get_i64(is));
  const Boundary bc = get_u32(is) ? Boundary::periodic : Boundary::free_space;
  f.grids.per_leaf = static_cast<int>(get_u32(is));
  Point c{};
  for (int i = 0; i < kMaxDim; ++i) c[i] = get_f64(is);
  const double side = get_f64(is);
  if (count < 1) throw std::runtime_error("tree file holds no boxes");
  f.tree = Tree(dim, c, side, bc);
  std::vector<BoxNode>& nodes = f.tree.raw_nodes();
  nodes.resize(count);
  std::int64_t slots = 0;
  for (std::int64_t b = 0; b < count; ++b) {
    BoxNode& n = nodes[b];
    n.level = static_cast<int>(get_i64(is));
    n.parent = get_i64(is);
    n.first_child = get_i64(is);
    const std::int64_t flags = get_i64(is);
    n.pw_flag = (flags & 2) != 0;
    for (int i = 0; i < kMaxDim; ++i) n.index[i] = get_i64(is);
    n.src_begin = get_i64(is);
    n.src_end = get_i64(is);
    n.trg_begin = get_i64(is);
    n.trg_end = get_i64(is);
    n.grid_slot = get_i64(is);
    for (int i = 0; i < kMaxDim + 1; ++i) get_f64(is);  // centre and side, derived
    if (n.first_child >= count || n.parent >= count) throw std::runtime_error("corrupt tree file");
    if (n.grid_slot >= 0) slots = std::max(slots, n.grid_slot + 1);
  }
  f.grids.data.resize(static_cast<std::size_t>(slots) * f.grids.per_leaf);
  for (double& v : f.grids.data) v = get_f64(is);
  return f;
}

void dump_tree(const std::string& path, const TreeFile& f) {
  with_out(path, [&](std::ostream& os) { dump_tree(os, f); });
}

TreeFile load_tree(const std::string& path) {
  return with_in(path, [](std::istream& is) { return load_tree(is); });
}

void write_values(const std::string& path, const std::vector<double>& v) {
  with_out(path, [&](std::ostream& os) {
    os.write("FGTU", 4);
    put_u32(os, kVersion);
    put_u64(os, v.size());
    for (double x : v) put_f64(os, x);
  });
}

std::vector<double> read_values(const std::string& path) {
  return with_in(path, [](std::istream& is) {
    expect_magic(is, "FGTU");
    std::vector<double> v(get_u64(is));
    for (double& x : v) x = get_f64(is);
    return v;
  });
}

}  // namespace fgt

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fgt/box_fgt.hpp"
#include "fgt/harness.hpp"
#include "fgt/nufft.hpp"
#include "fgt/output_tree.hpp"
#include "fgt/planewave.hpp"
#include "fgt/point_fgt.hpp"

namespace py = pybind11;
using namespace fgt;

namespace {

using darray = py::array_t<double, py::array::c_style | py::array::forcecast>;

struct Coords {
  int dim;
  std::vector<double> data;
};

Coords coords_of(const darray& a) {
  if (a.ndim() == 1) return {1, std::vector<double>(a.data(), a.data() + a.size())};
  if (a.ndim() != 2) throw std::invalid_argument("points must be an (n, d) array");
  return {static_cast<int>(a.shape(1)), std::vector<double>(a.data(), a.data() + a.size())};
}

darray to_array(const std::vector<double>& v) {
  darray out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

darray to_points(const std::vector<double>& v, int dim) {
  darray out({static_cast<py::ssize_t>(v.size() / dim), static_cast<py::ssize_t>(dim)});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict point_stats(const PointFgtStats& s) {
  py::dict d;
  d["cutoff_level"] = s.cutoff_level;
  d["levels"] = s.levels;
  d["boxes"] = s.boxes;
  d["leaves"] = s.leaves;
  d["n_modes"] = s.n_modes;
  d["periodic_series"] = s.periodic_series;
  d["direct_pairs"] = s.direct_pairs;
  d["t_tree"] = s.t_tree;
  d["t_outgoing"] = s.t_outgoing;
  d["t_incoming"] = s.t_incoming;
  d["t_direct"] = s.t_direct;
  return d;
}

// Density given as a Python callable f(points: (n, d) array) -> (n,) array.
DensityFn wrap_density(py::function f, int dim) {
  return [f, dim](std::span<const double> pts, std::span<double> vals) {
    py::gil_scoped_acquire gil;
    darray p({static_cast<py::ssize_t>(vals.size()), static_cast<py::ssize_t>(dim)});
    std::copy(pts.begin(), pts.end(), p.mutable_data());
    darray r = f(p).cast<darray>();
    if (static_cast<std::size_t>(r.size()) != vals.size()) throw std::runtime_error("density returned the wrong number of values");
    std::copy(r.data(), r.data() + r.size(), vals.begin());
  };
}

// Result of a box transform, with the potential on the (possibly adapted) tree.
struct BoxSolution {
  Tree tree;
  LegendreBasis basis;
  LeafGrids potential;
  py::dict stats;

  darray evaluate(const darray& pts) const {
    const Coords c = coords_of(pts);
    if (c.dim != tree.dim()) throw std::invalid_argument("point dimension does not match the tree");
    return to_array(interp_at(tree, potential, basis, c.data));
  }
  darray nodes() const {
    std::vector<double> all;
    for (std::int64_t b : tree.leaves()) {
      const auto p = box_nodes(tree, b, basis);
      all.insert(all.end(), p.begin(), p.end());
    }
    return to_points(all, tree.dim());
  }
  darray values() const {
    std::vector<double> all;
    for (std::int64_t b : tree.leaves()) {
      auto s = potential.slot(tree[b].grid_slot);
      all.insert(all.end(), s.begin(), s.end());
    }
    return to_array(all);
  }
};

BoxSolution box_transform(py::function density, int dim, double delta, double eps, int k, const std::string& boundary,
                          bool adapt, int threads, int min_level) {
  const DensityFn fn = wrap_density(std::move(density), dim);
  DensityTree dt;
  BoxPlan plan;
  BoxFgtResult r;
  {
    py::gil_scoped_release nogil;
    DensityTreeOptions to;
    to.min_level = min_level;
    dt = build_density_tree(dim, parse_boundary(boundary), fn, k, eps, to);
    plan = make_box_plan(dt.tree, k, delta, eps);
    r = fgt_box(dt, plan, threads);
  }
  BoxSolution s;
  s.basis = dt.basis;
  s.stats["input_boxes"] = dt.tree.size();
  s.stats["input_leaves"] = dt.tree.leaf_count();
  s.stats["cutoff_level"] = r.stats.cutoff_level;
  s.stats["n_modes"] = r.stats.n_modes;
  if (adapt) {
    OutputOptions oo;
    oo.epsilon = eps;
    OutputTree o = adapt_output(dt, plan, r, oo);
    s.stats["added"] = o.added;
    s.stats["deleted"] = o.deleted;
    s.stats["balance_added"] = o.balance_added;
    s.tree = std::move(o.tree);
    s.potential = std::move(o.potential);
  } else {
    s.tree = std::move(dt.tree);
    s.potential = std::move(r.potential);
  }
  s.stats["boxes"] = s.tree.size();
  s.stats["leaves"] = s.tree.leaf_count();
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Plane-wave fast Gauss transform";

  py::class_<PwQuadrature>(m, "PwQuadrature")
      .def_readonly("dim", &PwQuadrature::dim)
      .def_readonly("epsilon", &PwQuadrature::epsilon)
      .def_readonly("delta", &PwQuadrature::delta)
      .def_readonly("cutoff", &PwQuadrature::cutoff)
      .def_readonly("range", &PwQuadrature::range)
      .def_readonly("step", &PwQuadrature::step)
      .def_readonly("n_modes", &PwQuadrature::n_modes)
      .def_readonly("weights", &PwQuadrature::weights);
  m.def("pw_params", &pw_params, py::arg("eps"), py::arg("delta"), py::arg("range"), py::arg("dim") = 1);
  m.def("gauss_cutoff", &gauss_cutoff, py::arg("eps"));
  m.def(
      "pw_kernel_eval",
      [](const PwQuadrature& q, std::vector<double> x) { return pw_kernel_eval(q, x); }, py::arg("quadrature"),
      py::arg("x"));

  py::class_<PeriodicSeries>(m, "PeriodicSeries")
      .def_readonly("n_terms", &PeriodicSeries::n_terms)
      .def_readonly("coeffs", &PeriodicSeries::coeffs);
  m.def("periodic_params", &periodic_params, py::arg("eps"), py::arg("delta"));

  m.def(
      "fgt_points",
      [](const darray& sources, const darray& charges, py::object targets, double delta, double eps,
         const std::string& boundary, int max_per_box, int threads) {
        const Coords s = coords_of(sources);
        const Coords t = targets.is_none() ? s : coords_of(targets.cast<darray>());
        if (t.dim != s.dim) throw std::invalid_argument("sources and targets differ in dimension");
        const std::vector<double> q(charges.data(), charges.data() + charges.size());
        PointFgtOptions o;
        o.delta = delta;
        o.epsilon = eps;
        o.boundary = parse_boundary(boundary);
        o.max_per_box = max_per_box;
        o.threads = threads;
        PointFgtResult r;
        {
          py::gil_scoped_release nogil;
          r = fgt_points(s.dim, s.data, q, t.data, o);
        }
        return py::make_tuple(to_array(r.potentials), point_stats(r.stats));
      },
      py::arg("sources"), py::arg("charges"), py::arg("targets") = py::none(), py::arg("delta"), py::arg("eps") = 1e-6,
      py::arg("boundary") = "free", py::arg("max_per_box") = 0, py::arg("threads") = 1,
      "Discrete Gauss transform; returns (potentials, stats).");

  m.def(
      "direct_transform",
      [](const darray& sources, const darray& charges, py::object targets, double delta, const std::string& boundary) {
        const Coords s = coords_of(sources);
        const Coords t = targets.is_none() ? s : coords_of(targets.cast<darray>());
        const std::vector<double> q(charges.data(), charges.data() + charges.size());
        return to_array(direct_transform(s.dim, s.data, q, t.data, delta, parse_boundary(boundary)));
      },
      py::arg("sources"), py::arg("charges"), py::arg("targets") = py::none(), py::arg("delta"),
      py::arg("boundary") = "free");

  py::class_<BoxSolution>(m, "BoxSolution")
      .def("evaluate", &BoxSolution::evaluate, py::arg("points"), "Interpolate the potential at (n, d) points.")
      .def("nodes", &BoxSolution::nodes, "Leaf grid nodes, (n, d).")
      .def("values", &BoxSolution::values, "Potential at the leaf grid nodes.")
      .def_readonly("stats", &BoxSolution::stats);
  m.def("box_transform", &box_transform, py::arg("density"), py::arg("dim"), py::arg("delta"), py::arg("eps") = 1e-8,
        py::arg("k") = 8, py::arg("boundary") = "free", py::arg("adapt") = false, py::arg("threads") = 1, py::arg("min_level") = 0,
        "Continuous Gauss transform of density(points) on the unit cube centred at 0.");

  m.def(
      "nufft_type1",
      [](const darray& points, py::array_t<cplx> strengths, int n_modes, double eps, int sign) {
        const Coords c = coords_of(points);
        ModeGrid g{c.dim, n_modes};
        std::vector<cplx> s(strengths.data(), strengths.data() + strengths.size());
        const std::vector<cplx> out = nufft_type1(c.data, s, g, eps, sign);
        return py::array_t<cplx>(static_cast<py::ssize_t>(out.size()), out.data());
      },
      py::arg("points"), py::arg("strengths"), py::arg("n_modes"), py::arg("eps") = 1e-12, py::arg("sign") = -1);
  m.def(
      "nufft_type2",
      [](const darray& points, py::array_t<cplx> coeffs, int n_modes, double eps, int sign) {
        const Coords c = coords_of(points);
        ModeGrid g{c.dim, n_modes};
        std::vector<cplx> s(coeffs.data(), coeffs.data() + coeffs.size());
        const std::vector<cplx> out = nufft_type2(c.data, s, g, eps, sign);
        return py::array_t<cplx>(static_cast<py::ssize_t>(out.size()), out.data());
      },
      py::arg("points"), py::arg("coeffs"), py::arg("n_modes"), py::arg("eps") = 1e-12, py::arg("sign") = 1);

  m.def(
      "gen_points",
      [](const std::string& kind, int dim, std::size_t n, std::uint64_t seed) {
        return to_points(gen_points(parse_point_kind(kind), dim, n, seed), dim);
      },
      py::arg("kind"), py::arg("dim"), py::arg("n"), py::arg("seed") = 1);
  m.def(
      "gen_charges", [](std::size_t n, std::uint64_t seed) { return to_array(gen_charges(n, seed)); }, py::arg("n"),
      py::arg("seed") = 1);
}

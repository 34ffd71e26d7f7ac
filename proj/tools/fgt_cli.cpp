#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "fgt/box_fgt.hpp"
#include "fgt/harness.hpp"
#include "fgt/io.hpp"
#include "fgt/output_tree.hpp"
#include "fgt/point_fgt.hpp"

using nlohmann::json;
using namespace fgt;

namespace {

struct Flags {
  int dim = 2;
  double eps = 1e-6;
  double delta = 1e-3;
  int ns = 0;
  int k = 8;
  std::string boundary = "free";
  std::uint64_t seed = 1;
  std::string in, out, report, targets;
  bool deterministic = false;
  int threads = 0;
  // point problems
  std::size_t n = 2000;
  std::string kind = "uniform-box";
  // densities
  std::string density = "sigma_f";
  int np = 8;
  int ng = 5;
  double alpha1 = 1e-3;
  int min_level = 0;
  bool adapt = false;
  // tree
  std::string dump, load;
  // bench
  std::string sweep = "delta";
  double from = 1e-6, to = 1e-1;
  int steps = 10;
};

int thread_count(const Flags& f) {
  if (f.deterministic) return 1;
  if (f.threads > 0) return f.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

void add_common(CLI::App* c, Flags& f) {
  c->add_option("--dim", f.dim, "dimension")->check(CLI::Range(1, 3));
  c->add_option("--eps", f.eps, "requested precision");
  c->add_option("--delta", f.delta, "Gaussian variance");
  c->add_option("--boundary", f.boundary, "free or periodic")->check(CLI::IsMember({"free", "periodic"}));
  c->add_option("--seed", f.seed, "random seed");
  c->add_option("--threads", f.threads, "worker threads (0: all cores)");
  c->add_flag("--deterministic", f.deterministic, "single-threaded library mode");
  c->add_option("--report", f.report, "write the JSON report here instead of stdout");
}

void add_points(CLI::App* c, Flags& f) {
  c->add_option("--in", f.in, "FGTP source file (default: generate)");
  c->add_option("--targets", f.targets, "FGTP target file (default: the sources)");
  c->add_option("--n", f.n, "number of generated points");
  c->add_option("--kind", f.kind, "uniform-box | curve-2d | surface-3d | perturbed-sphere");
  c->add_option("--ns", f.ns, "max points per box (0: default)");
  c->add_option("--out", f.out, "FGTU potential file");
}

void add_density(CLI::App* c, Flags& f) {
  c->add_option("--density", f.density, "sigma_f | sigma_p | constant")
      ->check(CLI::IsMember({"sigma_f", "sigma_p", "constant"}));
  c->add_option("--k", f.k, "polynomial order")->check(CLI::Range(2, 24));
  c->add_option("--np", f.np, "sigma_p frequency");
  c->add_option("--ng", f.ng, "number of Gaussians in sigma_f")->check(CLI::Range(1, 5));
  c->add_option("--alpha1", f.alpha1, "width of the first Gaussian in sigma_f");
  c->add_option("--min-level", f.min_level, "refine uniformly to this level first")->check(CLI::Range(0, 12));
}

DensityTreeOptions tree_options(const Flags& f) {
  DensityTreeOptions o;
  o.min_level = f.min_level;
  return o;
}

void emit(const Flags& f, const json& j) {
  if (f.report.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(f.report);
    if (!os) throw std::runtime_error("cannot open " + f.report);
    os << j.dump(2) << "\n";
  }
}

json params_json(const Flags& f) {
  return {{"dim", f.dim}, {"eps", f.eps}, {"delta", f.delta}, {"boundary", f.boundary}, {"seed", f.seed}};
}

// ------------------------------------------------------------ point problems

struct PointProblem {
  PointFile src, trg;
  bool same = true;
};

PointProblem load_point_problem(const Flags& f) {
  PointProblem p;
  if (!f.in.empty()) {
    p.src = read_points(f.in);
  } else {
    p.src.dim = f.dim;
    p.src.coords = gen_points(parse_point_kind(f.kind), f.dim, f.n, f.seed);
  }
  if (p.src.charges.empty()) p.src.charges = gen_charges(p.src.coords.size() / p.src.dim, f.seed);
  if (!f.targets.empty()) {
    p.trg = read_points(f.targets);
    if (p.trg.dim != p.src.dim) throw std::invalid_argument("targets and sources differ in dimension");
    p.same = false;
  }
  return p;
}

PointFgtOptions point_options(const Flags& f) {
  PointFgtOptions o;
  o.delta = f.delta;
  o.epsilon = f.eps;
  o.max_per_box = f.ns;
  o.boundary = parse_boundary(f.boundary);
  o.threads = thread_count(f);
  return o;
}

json point_stats_json(const PointFgtStats& s) {
  return {{"cutoff_level", s.cutoff_level},
          {"levels", s.levels},
          {"boxes", s.boxes},
          {"leaves", s.leaves},
          {"n_modes", s.n_modes},
          {"range", s.range},
          {"periodic_series", s.periodic_series},
          {"outgoing", s.outgoing},
          {"incoming", s.incoming},
          {"direct_pairs", s.direct_pairs},
          {"max_imag", s.max_imag},
          {"timings", {{"tree", s.t_tree}, {"outgoing", s.t_outgoing}, {"incoming", s.t_incoming}, {"direct", s.t_direct}}}};
}

struct PointRun {
  PointFgtResult r;
  double seconds = 0;
  std::size_t n_src = 0, n_trg = 0;
};

PointRun run_points(const Flags& f, const PointProblem& p) {
  PointRun run;
  const auto& tc = p.same ? p.src.coords : p.trg.coords;
  const double t0 = now_seconds();
  run.r = fgt_points(p.src.dim, p.src.coords, p.src.charges, tc, point_options(f));
  run.seconds = now_seconds() - t0;
  run.n_src = p.src.coords.size() / p.src.dim;
  run.n_trg = tc.size() / p.src.dim;
  return run;
}

int cmd_pointfgt(const Flags& f) {
  const PointProblem p = load_point_problem(f);
  const PointRun run = run_points(f, p);
  if (!f.out.empty()) write_values(f.out, run.r.potentials);
  json j = {{"command", "pointfgt"}, {"params", params_json(f)}};
  j["params"]["dim"] = p.src.dim;
  j["sources"] = run.n_src;
  j["targets"] = run.n_trg;
  j["stats"] = point_stats_json(run.r.stats);
  j["seconds"] = run.seconds;
  emit(f, j);
  return 0;
}

int verify_points(const Flags& f) {
  const PointProblem p = load_point_problem(f);
  const PointRun run = run_points(f, p);
  const auto& tc = p.same ? p.src.coords : p.trg.coords;
  const std::vector<double> exact =
      direct_transform(p.src.dim, p.src.coords, p.src.charges, tc, f.delta, parse_boundary(f.boundary), thread_count(f));
  const double err = relative_l2(run.r.potentials, exact);
  const double bound = 10 * f.eps;
  const bool pass = err <= bound;
  json j = {{"command", "verify pointfgt"}, {"params", params_json(f)}, {"sources", run.n_src}, {"targets", run.n_trg}};
  j["params"]["dim"] = p.src.dim;
  j["oracle"] = "direct summation";
  j["error"] = err;
  j["bound"] = bound;
  j["pass"] = pass;
  j["stats"] = point_stats_json(run.r.stats);
  j["seconds"] = run.seconds;
  emit(f, j);
  return pass ? 0 : 1;
}

// ---------------------------------------------------------- density problems

TestDensity make_density(const Flags& f) {
  const Boundary bc = parse_boundary(f.boundary);
  if (f.density == "sigma_f") {
    if (bc != Boundary::free_space) throw std::invalid_argument("sigma_f is a free-space density");
    return density_sigma_f(f.dim, reference_gaussians(f.dim, f.ng, f.alpha1), f.delta);
  }
  if (f.density == "sigma_p") {
    if (bc != Boundary::periodic) throw std::invalid_argument("sigma_p is a periodic density");
    return density_sigma_p(f.dim, f.np, f.delta);
  }
  return density_constant(f.dim, f.delta, bc);
}

json box_stats_json(const DensityTree& dt, const BoxFgtStats& s) {
  return {{"boxes", dt.tree.size()},
          {"leaves", dt.tree.leaf_count()},
          {"levels", dt.tree.max_level() + 1},
          {"grid_points", dt.values.data.size()},
          {"balance_boxes", dt.balance_boxes},
          {"density_norm", dt.norm},
          {"norm_estimator", "L2 over leaf grids (Gauss weights), running max over levels"},
          {"cutoff_level", s.cutoff_level},
          {"n_modes", s.n_modes},
          {"periodic_series", s.periodic_series},
          {"pw_boxes", s.pw_boxes},
          {"direct_pairs", s.direct_pairs},
          {"timings", {{"plan", s.t_plan}, {"outgoing", s.t_outgoing}, {"incoming", s.t_incoming}, {"direct", s.t_direct}}}};
}

json density_params(const Flags& f) {
  json j = params_json(f);
  j["k"] = f.k;
  j["density"] = f.density;
  if (f.density == "sigma_f") j["ng"] = f.ng, j["alpha1"] = f.alpha1;
  if (f.density == "sigma_p") j["np"] = f.np;
  if (f.min_level > 0) j["min_level"] = f.min_level;
  return j;
}

std::vector<double> leaf_nodes(const Tree& t, const LegendreBasis& b) {
  std::vector<double> pts;
  for (std::int64_t leaf : t.leaves()) {
    const std::vector<double> p = box_nodes(t, leaf, b);
    pts.insert(pts.end(), p.begin(), p.end());
  }
  return pts;
}

std::vector<double> leaf_values(const Tree& t, const LeafGrids& g) {
  std::vector<double> v;
  for (std::int64_t leaf : t.leaves()) {
    auto s = g.slot(t[leaf].grid_slot);
    v.insert(v.end(), s.begin(), s.end());
  }
  return v;
}

int run_box(const Flags& f, bool verify) {
  const TestDensity td = make_density(f);
  const double t0 = now_seconds();
  const DensityTree dt = build_density_tree(f.dim, td.boundary, td.sigma, f.k, f.eps, tree_options(f));
  const double t_tree = now_seconds() - t0;
  const BoxPlan plan = make_box_plan(dt.tree, f.k, f.delta, f.eps);
  BoxFgtResult r = fgt_box(dt, plan, thread_count(f));
  const double seconds = now_seconds() - t0;

  json j = {{"command", verify ? "verify boxfgt" : "boxfgt"}, {"params", density_params(f)}};
  j["stats"] = box_stats_json(dt, r.stats);
  j["stats"]["timings"]["tree"] = t_tree;
  j["seconds"] = seconds;

  const Tree* out_tree = &dt.tree;
  const LeafGrids* out_grid = &r.potential;
  OutputTree o;
  if (f.adapt) {
    o = adapt_output(dt, plan, r, OutputOptions{f.eps});
    out_tree = &o.tree;
    out_grid = &o.potential;
    j["output_tree"] = {{"boxes", o.tree.size()},        {"leaves", o.tree.leaf_count()},
                        {"added", o.added},              {"deleted", o.deleted},
                        {"balance_added", o.balance_added}, {"threshold", o.threshold}};
  }
  if (!f.out.empty()) {
    TreeFile tf;
    tf.kind = TreeFile::density;
    tf.param = f.k;
    tf.cutoff_level = plan.cutoff_level;
    tf.tree = *out_tree;
    tf.grids = *out_grid;
    dump_tree(f.out, tf);
  }
  int code = 0;
  if (verify) {
    const std::vector<double> pts = leaf_nodes(*out_tree, dt.basis);
    const std::vector<double> got = leaf_values(*out_tree, *out_grid);
    std::vector<double> exact(got.size());
    for (std::size_t i = 0; i < exact.size(); ++i) exact[i] = td.potential(&pts[i * f.dim]);
    const double err = relative_l2(got, exact);
    const double bound = 10 * f.eps;
    j["oracle"] = "closed form";
    j["error"] = err;
    j["bound"] = bound;
    j["pass"] = err <= bound;
    code = err <= bound ? 0 : 1;
  }
  emit(f, j);
  return code;
}

// ------------------------------------------------------------------- tree

int cmd_tree(const Flags& f) {
  if (f.load.empty() && f.dump.empty()) throw std::invalid_argument("tree: give --dump and/or --load");
  TreeFile tf;
  if (!f.load.empty()) {
    tf = load_tree(f.load);
  } else if (!f.in.empty()) {
    const PointFile p = read_points(f.in);
    const int ns = f.ns > 0 ? f.ns : default_max_per_box(p.dim);
    PointTree pt = build_point_tree(p.dim, p.coords, p.coords, ns, f.delta, f.eps, parse_boundary(f.boundary));
    tf.kind = TreeFile::point;
    tf.param = ns;
    tf.cutoff_level = pt.cutoff_level;
    tf.tree = std::move(pt.tree);
  } else {
    const TestDensity td = make_density(f);
    DensityTree dt = build_density_tree(f.dim, td.boundary, td.sigma, f.k, f.eps, tree_options(f));
    tf.kind = TreeFile::density;
    tf.param = f.k;
    tf.cutoff_level = cutoff_level(f.delta, clamp_epsilon(f.eps));
    tf.tree = std::move(dt.tree);
    tf.grids = std::move(dt.values);
  }
  if (!f.dump.empty()) dump_tree(f.dump, tf);
  const Tree& t = tf.tree;
  json j = {{"command", "tree"},
            {"kind", tf.kind == TreeFile::point ? "point" : "density"},
            {"dim", t.dim()},
            {"boundary", to_string(t.boundary())},
            {"param", tf.param},
            {"cutoff_level", tf.cutoff_level},
            {"boxes", t.size()},
            {"leaves", t.leaf_count()},
            {"levels", t.max_level() + 1},
            {"balanced", is_balanced(t)}};
  emit(f, j);
  return 0;
}

// ------------------------------------------------------------------ bench

std::vector<double> sweep_values(const Flags& f) {
  if (!(f.from > 0 && f.to > 0) || f.steps < 1) throw std::invalid_argument("bench: need positive --from/--to and --steps >= 1");
  std::vector<double> v;
  for (int i = 0; i < f.steps; ++i) {
    const double a = f.steps == 1 ? 0.0 : static_cast<double>(i) / (f.steps - 1);
    v.push_back(std::exp(std::log(f.from) + a * (std::log(f.to) - std::log(f.from))));
  }
  return v;
}

int bench_points(const Flags& f0) {
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!f0.out.empty()) {
    file.open(f0.out);
    os = &file;
  }
  *os << "delta,n,seconds,points_per_second,t_tree,t_outgoing,t_incoming,t_direct,cutoff_level,n_modes\n";
  for (double v : sweep_values(f0)) {
    Flags f = f0;
    if (f.sweep == "delta") {
      f.delta = v;
    } else {
      f.n = static_cast<std::size_t>(std::llround(v));
      if (f.kind == "curve-2d") f.delta = 400.0 / static_cast<double>(f.n);
    }
    const PointProblem p = load_point_problem(f);
    const PointRun run = run_points(f, p);
    const PointFgtStats& s = run.r.stats;
    char line[512];
    std::snprintf(line, sizeof line, "%.6g,%zu,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%d,%d\n", f.delta, run.n_src, run.seconds,
                  (run.n_src + run.n_trg) / run.seconds, s.t_tree, s.t_outgoing, s.t_incoming, s.t_direct,
                  s.cutoff_level, s.n_modes);
    *os << line << std::flush;
  }
  return 0;
}

int bench_box(const Flags& f0) {
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!f0.out.empty()) {
    file.open(f0.out);
    os = &file;
  }
  if (f0.sweep != "delta") throw std::invalid_argument("bench boxfgt: only --sweep delta is supported");
  *os << "delta,grid_points,seconds,points_per_second,t_outgoing,t_incoming,t_direct,cutoff_level,n_modes\n";
  const TestDensity td = make_density(f0);
  const DensityTree dt = build_density_tree(f0.dim, td.boundary, td.sigma, f0.k, f0.eps, tree_options(f0));
  for (double v : sweep_values(f0)) {
    const double t0 = now_seconds();
    const BoxFgtResult r = fgt_box(dt, v, f0.eps, thread_count(f0));
    const double sec = now_seconds() - t0;
    const BoxFgtStats& s = r.stats;
    char line[512];
    std::snprintf(line, sizeof line, "%.6g,%zu,%.6g,%.6g,%.6g,%.6g,%.6g,%d,%d\n", v, dt.values.data.size(), sec,
                  dt.values.data.size() / sec, s.t_outgoing, s.t_incoming, s.t_direct, s.cutoff_level, s.n_modes);
    *os << line << std::flush;
  }
  return 0;
}

// ------------------------------------------------------------------- gen

int cmd_gen(const Flags& f) {
  if (f.out.empty()) throw std::invalid_argument("gen: --out is required");
  PointFile p;
  p.dim = f.dim;
  p.coords = gen_points(parse_point_kind(f.kind), f.dim, f.n, f.seed);
  p.charges = gen_charges(f.n, f.seed);
  write_points(f.out, p);
  emit(f, {{"command", "gen"}, {"kind", f.kind}, {"dim", f.dim}, {"n", f.n}, {"seed", f.seed}, {"file", f.out}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plane-wave fast Gauss transform"};
  app.require_subcommand(1);
  Flags f;

  auto* pf = app.add_subcommand("pointfgt", "discrete Gauss transform of point sources");
  add_common(pf, f);
  add_points(pf, f);

  auto* bf = app.add_subcommand("boxfgt", "continuous Gauss transform of a test density");
  add_common(bf, f);
  add_density(bf, f);
  bf->add_flag("--adapt", f.adapt, "refine and coarsen the output tree");
  bf->add_option("--out", f.out, "FGTT file with the potential on the output tree");

  auto* tr = app.add_subcommand("tree", "build, dump and reload trees");
  add_common(tr, f);
  add_density(tr, f);
  tr->add_option("--in", f.in, "FGTP file: build a point tree instead of a density tree");
  tr->add_option("--ns", f.ns, "max points per box");
  tr->add_option("--dump", f.dump, "write the tree to this FGTT file");
  tr->add_option("--load", f.load, "read an FGTT file (re-dumped with --dump)");

  auto* vf = app.add_subcommand("verify", "run a transform and compare with an oracle");
  vf->require_subcommand(1);
  auto* vp = vf->add_subcommand("pointfgt", "against direct summation");
  add_common(vp, f);
  add_points(vp, f);
  auto* vb = vf->add_subcommand("boxfgt", "against the closed-form potential");
  add_common(vb, f);
  add_density(vb, f);
  vb->add_flag("--adapt", f.adapt, "verify on the adapted output tree");
  vb->add_option("--out", f.out, "FGTT file with the potential");

  auto* bn = app.add_subcommand("bench", "sweep delta or N and print CSV");
  bn->require_subcommand(1);
  auto* bp = bn->add_subcommand("pointfgt", "point transform throughput");
  auto* bb = bn->add_subcommand("boxfgt", "box transform throughput");
  for (auto* c : {bp, bb}) {
    add_common(c, f);
    c->add_option("--sweep", f.sweep, "delta or n")->check(CLI::IsMember({"delta", "n"}));
    c->add_option("--from", f.from, "first sweep value");
    c->add_option("--to", f.to, "last sweep value");
    c->add_option("--steps", f.steps, "log-spaced sweep points");
  }
  add_points(bp, f);
  add_density(bb, f);
  bb->add_option("--out", f.out, "CSV file (default stdout)");

  auto* gn = app.add_subcommand("gen", "write a generated FGTP point file");
  add_common(gn, f);
  gn->add_option("--n", f.n, "number of points");
  gn->add_option("--kind", f.kind, "uniform-box | curve-2d | surface-3d | perturbed-sphere");
  gn->add_option("--out", f.out, "FGTP file")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (pf->parsed()) return cmd_pointfgt(f);
    if (bf->parsed()) return run_box(f, false);
    if (tr->parsed()) return cmd_tree(f);
    if (vp->parsed()) return verify_points(f);
    if (vb->parsed()) return run_box(f, true);
    if (bp->parsed()) return bench_points(f);
    if (bb->parsed()) return bench_box(f);
    if (gn->parsed()) return cmd_gen(f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

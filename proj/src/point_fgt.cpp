#include "fgt/point_fgt.hpp"

#include <chrono>
#include <cmath>
#include <memory>

#include "fgt/parallel.hpp"
#include "tensor.hpp"

namespace fgt {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check_inputs(int dim, std::span<const double> sources, std::span<const double> charges,
                  std::span<const double> targets) {
  check_dim(dim);
  if (sources.size() != charges.size() * dim)
    throw std::invalid_argument("fgt_points: sources must hold dim coordinates per charge");
  if (targets.size() % dim) throw std::invalid_argument("fgt_points: target array is not a multiple of dim");
  for (double q : charges)
    if (!std::isfinite(q)) throw std::invalid_argument("fgt_points: non-finite charge");
}

void weight_tensor(std::vector<cplx>& phi, const PlaneWaveBasis& pw) {
  const double* w[kMaxDim] = {pw.weights.data(), pw.weights.data(), pw.weights.data()};
  detail::scale_tensor(phi.data(), pw.dim, pw.n_modes, w);
}

std::vector<double> scaled(int dim, std::span<const double> x, const Point& c, double spacing) {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size() / dim; ++j)
    for (int i = 0; i < dim; ++i) out[j * dim + i] = (x[j * dim + i] - c[i]) * spacing;
  return out;
}

}  // namespace

std::vector<cplx> form_outgoing(int dim, std::span<const double> sources, std::span<const double> charges,
                                const Point& center, const PlaneWaveBasis& pw, const NufftPlan& plan) {
  const std::vector<double> x = scaled(dim, sources, center, pw.spacing);
  std::vector<cplx> q(charges.begin(), charges.end());
  std::vector<cplx> phi(pw.total_modes());
  plan.type1(x, q, phi, -1);
  weight_tensor(phi, pw);
  return phi;
}

void add_translated(const std::vector<cplx>& phi, const Point& shift, const PlaneWaveBasis& pw,
                    std::vector<cplx>& psi) {
  std::vector<cplx> v[kMaxDim];
  const cplx* vp[kMaxDim];
  for (int i = 0; i < pw.dim; ++i) {
    v[i] = make_phase(pw, shift[i]);
    vp[i] = v[i].data();
  }
  if (psi.size() != phi.size()) psi.assign(phi.size(), cplx(0));
  detail::add_phase(phi.data(), psi.data(), pw.dim, pw.n_modes, vp);
}

double eval_incoming(int dim, const std::vector<cplx>& psi, std::span<const double> targets, const Point& center,
                     const PlaneWaveBasis& pw, const NufftPlan& plan, std::span<double> out) {
  const std::vector<double> x = scaled(dim, targets, center, pw.spacing);
  std::vector<cplx> u(targets.size() / dim);
  plan.type2(x, psi, u, +1);
  double imag = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] += u[i].real();
    imag = std::max(imag, std::abs(u[i].imag()));
  }
  return imag;
}

std::vector<double> direct_transform(int dim, std::span<const double> sources, std::span<const double> charges,
                                     std::span<const double> targets, double delta, Boundary bc, int threads) {
  check_inputs(dim, sources, charges, targets);
  const std::size_t nt = targets.size() / dim, ns = charges.size();
  std::vector<double> u(nt, 0.0);
  parallel_for(nt, threads, [&](std::size_t i) {
    double s = 0;
    for (std::size_t j = 0; j < ns; ++j) {
      if (bc == Boundary::periodic) {
        double g = 1;
        for (int d = 0; d < dim; ++d) g *= periodic_gauss_1d(targets[i * dim + d] - sources[j * dim + d], delta, 1e-18);
        s += charges[j] * g;
      } else {
        double r2 = 0;
        for (int d = 0; d < dim; ++d) {
          const double df = targets[i * dim + d] - sources[j * dim + d];
          r2 += df * df;
        }
        s += charges[j] * std::exp(-r2 / delta);
      }
    }
    u[i] = s;
  });
  return u;
}

PointFgtResult fgt_points(int dim, std::span<const double> sources, std::span<const double> charges,
                          std::span<const double> targets, const PointFgtOptions& opt) {
  check_inputs(dim, sources, charges, targets);
  if (!(opt.delta > 0) || !std::isfinite(opt.delta)) throw std::invalid_argument("fgt_points: delta must be positive");
  const double eps = clamp_epsilon(opt.epsilon);
  const double delta = opt.delta;
  const int ns_max = opt.max_per_box > 0 ? opt.max_per_box : default_max_per_box(dim);
  const std::size_t nt = targets.size() / dim;
  const double nufft_eps = std::max(eps / 10, 1e-15);

  PointFgtResult res;
  res.potentials.assign(nt, 0.0);
  PointFgtStats& st = res.stats;
  auto t0 = std::chrono::steady_clock::now();

  if (opt.boundary == Boundary::periodic && cutoff_level(delta, eps, 1.0) <= 1) {
    // Whole-cell Fourier series: one outgoing and one incoming expansion.
    const PeriodicSeries ser = periodic_params(eps, delta);
    const PlaneWaveBasis pw = make_basis(ser, dim);
    const NufftPlan plan(ModeGrid{dim, pw.n_modes}, nufft_eps, opt.nufft);
    auto wrap = [](std::span<const double> x) {
      std::vector<double> w(x.begin(), x.end());
      for (double& v : w) v -= std::floor(v + 0.5);
      return w;
    };
    const std::vector<double> ys = wrap(sources), xs = wrap(targets);
    st.periodic_series = true;
    st.n_modes = pw.n_modes;
    st.boxes = st.leaves = 1;
    st.levels = 1;
    st.t_tree = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const std::vector<cplx> phi = form_outgoing(dim, ys, charges, Point{}, pw, plan);
    st.outgoing = 1;
    st.t_outgoing = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    st.max_imag = eval_incoming(dim, phi, xs, Point{}, pw, plan, res.potentials);
    st.incoming = 1;
    st.t_incoming = seconds_since(t0);
    return res;
  }

  PointTree pt = build_point_tree(dim, sources, targets, ns_max, delta, eps, opt.boundary);
  const Tree& t = pt.tree;
  const NeighborLists nl = neighbor_lists(t, ListMode::point, pt.cutoff_level, ns_max);
  const double range = 2 * pt.cutoff_side / std::sqrt(delta);
  const PwQuadrature q = pw_params(eps, delta, std::max(range, gauss_cutoff(eps)), dim);
  const PlaneWaveBasis pw = make_basis(q);
  st.cutoff_level = pt.cutoff_level;
  st.levels = t.max_level() + 1;
  st.boxes = t.size();
  st.leaves = t.leaf_count();
  st.n_modes = pw.n_modes;
  st.range = q.range;
  st.t_tree = seconds_since(t0);

  // Outgoing expansions of boxes that act as plane-wave sources.
  t0 = std::chrono::steady_clock::now();
  std::vector<char> needed(t.size(), 0);
  for (std::size_t b = 0; b < t.size(); ++b)
    if (t[b].n_trg() > 0 && t[b].is_leaf())
      for (const Neighbor& n : nl.plist[b]) needed[n.box] = 1;
  std::vector<std::int64_t> sources_pw;
  for (std::size_t b = 0; b < t.size(); ++b)
    if (needed[b]) sources_pw.push_back(static_cast<std::int64_t>(b));
  std::vector<std::vector<cplx>> phi(t.size());
  std::vector<double> sorted_q(charges.size());
  for (std::size_t j = 0; j < charges.size(); ++j) sorted_q[j] = charges[pt.src_order[j]];
  std::unique_ptr<NufftPlan> plan;
  if (!sources_pw.empty()) plan = std::make_unique<NufftPlan>(ModeGrid{dim, pw.n_modes}, nufft_eps, opt.nufft);
  parallel_for(sources_pw.size(), opt.threads, [&](std::size_t i) {
    const std::int64_t b = sources_pw[i];
    const BoxNode& n = t[b];
    phi[b] = form_outgoing(dim,
                           std::span<const double>(pt.sources).subspan(n.src_begin * dim, n.n_src() * dim),
                           std::span<const double>(sorted_q).subspan(n.src_begin, n.n_src()), t.center(b), pw,
                           *plan);
  });
  st.outgoing = sources_pw.size();
  st.t_outgoing = seconds_since(t0);

  // Incoming expansions and evaluation, then direct interactions, per target leaf.
  std::vector<std::int64_t> targets_leaf;
  for (std::size_t b = 0; b < t.size(); ++b)
    if (t[b].is_leaf() && t[b].n_trg() > 0) targets_leaf.push_back(static_cast<std::int64_t>(b));
  std::vector<double> u_sorted(nt, 0.0);
  std::vector<double> imag(targets_leaf.size(), 0.0);
  std::vector<std::size_t> pairs(targets_leaf.size(), 0);
  t0 = std::chrono::steady_clock::now();
  parallel_for(targets_leaf.size(), opt.threads, [&](std::size_t i) {
    const std::int64_t b = targets_leaf[i];
    const BoxNode& n = t[b];
    if (nl.plist[b].empty()) return;
    const Point cb = t.center(b);
    std::vector<cplx> psi(pw.total_modes(), cplx(0));
    for (const Neighbor& s : nl.plist[b]) {
      const Point cs = neighbor_center(t, s);
      Point shift{};
      for (int d = 0; d < dim; ++d) shift[d] = cb[d] - cs[d];
      add_translated(phi[s.box], shift, pw, psi);
    }
    imag[i] = eval_incoming(dim, psi, std::span<const double>(pt.targets).subspan(n.trg_begin * dim, n.n_trg() * dim),
                            cb, pw, *plan, std::span<double>(u_sorted).subspan(n.trg_begin, n.n_trg()));
  });
  st.t_incoming = seconds_since(t0);
  for (std::size_t i = 0; i < targets_leaf.size(); ++i)
    if (!nl.plist[targets_leaf[i]].empty()) ++st.incoming;

  t0 = std::chrono::steady_clock::now();
  const double cut2 = q.cutoff * q.cutoff * delta;
  parallel_for(targets_leaf.size(), opt.threads, [&](std::size_t i) {
    const std::int64_t b = targets_leaf[i];
    const BoxNode& n = t[b];
    std::size_t count = 0;
    for (const Neighbor& s : nl.dlist[b]) {
      const BoxNode& sn = t[s.box];
      double img[kMaxDim] = {0, 0, 0};
      for (int d = 0; d < dim; ++d) img[d] = s.image[d] * t.root_side();
      for (std::int64_t it = n.trg_begin; it < n.trg_end; ++it) {
        const double* x = &pt.targets[it * dim];
        double acc = 0;
        for (std::int64_t js = sn.src_begin; js < sn.src_end; ++js) {
          const double* y = &pt.sources[js * dim];
          double r2 = 0;
          for (int d = 0; d < dim; ++d) {
            const double df = x[d] - y[d] - img[d];
            r2 += df * df;
          }
          if (r2 <= cut2) acc += sorted_q[js] * std::exp(-r2 / delta);
        }
        u_sorted[it] += acc;
      }
      count += static_cast<std::size_t>(n.n_trg()) * sn.n_src();
    }
    pairs[i] = count;
  });
  st.t_direct = seconds_since(t0);
  for (std::size_t i = 0; i < targets_leaf.size(); ++i) {
    st.direct_pairs += pairs[i];
    st.max_imag = std::max(st.max_imag, imag[i]);
  }
  for (std::size_t j = 0; j < nt; ++j) res.potentials[pt.trg_order[j]] = u_sorted[j];
  return res;
}

}  // namespace fgt

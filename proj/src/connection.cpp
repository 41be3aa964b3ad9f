#include "gaugeforge/connection.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "gaugeforge/parallel.hpp"

namespace gaugeforge {

Connection::Connection(BundlePtr bundle, std::vector<SampledMap<AlgebraElement>> pieces)
    : bundle_(std::move(bundle)), pieces_(std::move(pieces)) {
  if (static_cast<int>(pieces_.size()) != bundle_->cover().size())
    throw CoverError("connection needs one local form per arc");
}

namespace {

template <class F>
std::vector<SampledMap<AlgebraElement>> map_charts(const Bundle& b, F&& f) {
  std::vector<SampledMap<AlgebraElement>> out;
  for (int i = 0; i < b.cover().size(); ++i) {
    SampleGrid grid = chart_grid(b, i);
    std::vector<AlgebraElement> v(grid.size());
    parallel_for(grid.size(), [&](std::size_t s) { v[s] = f(i, static_cast<int>(s), grid); });
    out.emplace_back(grid, std::move(v));
  }
  return out;
}

GroupElement transition_at(const Bundle& b, int i, int j, int global, double x) {
  if (i == j) return b.group().identity();
  if (const GroupElement* k = b.transition_sample(i, j, global)) return *k;
  return b.transition(i, j, x);
}

}  // namespace

AlgebraElement transition_log_derivative(const Bundle& b, int i, int j, int global) {
  if (i == j) return b.group().zero();
  for (const TransitionPiece& p : b.pieces()) {
    if (p.i != i || p.j != j) continue;
    const SampleGrid& grid = p.values.grid();
    auto k = grid.local_index(global);
    if (!k) continue;
    return left_log_derivative(b.group(), p.values.values(), grid.spacing(), *k, grid.periodic());
  }
  std::ostringstream os;
  os << "no transition k_" << i << j << " at grid point " << global;
  throw DomainError(os.str());
}

OverlapResidual compatibility(const Connection& a) {
  const Bundle& b = a.bundle();
  OverlapResidual worst;
  for (int i = 0; i < a.size(); ++i) {
    const SampleGrid& grid = a.piece(i).grid();
    for (int s = 0; s < grid.size(); ++s) {
      int g = grid.global_index(s);
      for (int j = i + 1; j < a.size(); ++j) {
        const AlgebraElement* aj = a.piece(j).at_global(g);
        if (!aj) continue;
        const GroupElement* kji = b.transition_sample(j, i, g);
        if (!kji) continue;
        AlgebraElement expect =
            b.group().ad(*kji, a.piece(i)[s]) + transition_log_derivative(b, i, j, g);
        double r = distance(*aj, expect);
        if (!(r <= worst.value))
          worst = {std::isnan(r) ? std::numeric_limits<double>::infinity() : r, i, j,
                   grid.position(s)};
      }
    }
  }
  return worst;
}

Connection make_connection(BundlePtr b, std::vector<SampledMap<AlgebraElement>> pieces,
                           double tol) {
  Connection a(std::move(b), std::move(pieces));
  OverlapResidual r = compatibility(a);
  if (!(r.value <= tol))
    throw InvariantViolation("incompatible connection forms: " + r.describe(), r.value);
  return a;
}

Connection zero_connection(const BundlePtr& b) {
  return make_connection(b, map_charts(*b, [&](int, int, const SampleGrid&) {
                           return b->group().zero();
                         }));
}

Connection patch_connection(const BundlePtr& b,
                            const std::function<AlgebraElement(int m, double x)>& local) {
  PartitionOfUnity pou(b->cover());
  const StructureGroup& group = b->group();
  int n = b->cover().size();
  auto pieces = map_charts(*b, [&](int i, int s, const SampleGrid& grid) {
    double x = grid.position(s);
    int g = grid.global_index(s);
    std::vector<double> f = pou.values(x);
    AlgebraElement acc = group.zero();
    for (int m = 0; m < n; ++m) {
      if (f[m] == 0.0) continue;
      AlgebraElement t = group.ad(transition_at(*b, i, m, g, x), local(m, x)) +
                         transition_log_derivative(*b, m, i, g);
      acc = acc + f[m] * t;
    }
    return acc;
  });
  return make_connection(b, std::move(pieces));
}

Connection constant_connection(const BundlePtr& b, const AlgebraElement& a) {
  return make_connection(b, map_charts(*b, [&](int, int, const SampleGrid&) { return a; }));
}

Connection random_connection(const BundlePtr& b, Rng& rng, double amplitude, int modes) {
  const StructureGroup& group = b->group();
  int n = b->cover().size();
  int dim = group.algebra_dim();
  std::vector<double> coeff(static_cast<std::size_t>(n) * dim * (modes + 1) * 2);
  for (double& c : coeff) c = rng.uniform(-1.0, 1.0);
  auto local = [&](int m, double x) {
    std::vector<double> c(dim, 0.0);
    for (int a = 0; a < dim; ++a)
      for (int q = 0; q <= modes; ++q) {
        std::size_t base = ((static_cast<std::size_t>(m) * dim + a) * (modes + 1) + q) * 2;
        c[a] += amplitude / (q + 1) *
                (coeff[base] * std::cos(kTwoPi * q * x) + coeff[base + 1] * std::sin(kTwoPi * q * x));
      }
    return group.from_coords(c);
  };
  return patch_connection(b, local);
}

Connection gauge_act(const LocalGaugeElement& gamma, const Connection& a) {
  if (gamma.bundle_ptr() != a.bundle_ptr()) throw GroupMismatch("gauge data on different bundles");
  const StructureGroup& group = a.bundle().group();
  const Bundle& b = a.bundle();
  auto direct = [&](int i, int s) {
    const SampledMap<GroupElement>& g = gamma.piece(i);
    const SampleGrid& grid = g.grid();
    AlgebraElement dl =
        left_log_derivative(group, g.values(), grid.spacing(), s, grid.periodic());
    return group.ad(g[s], a.piece(i)[s] - dl);
  };
  // Each point is differentiated in its canonical chart and carried to the
  // other charts by the transition rule.
  auto pieces = map_charts(b, [&](int i, int s, const SampleGrid& grid) {
    int global = grid.global_index(s);
    int c = b.cover().canonical_chart(grid.position(s));
    if (c == i) return direct(i, s);
    auto sc = gamma.piece(c).grid().local_index(global);
    const GroupElement* kic = b.transition_sample(i, c, global);
    if (!sc || !kic) return direct(i, s);
    return group.ad(*kic, direct(c, *sc)) + transition_log_derivative(b, c, i, global);
  });
  return make_connection(a.bundle_ptr(), std::move(pieces));
}

namespace {

// Pull-back of A along the inverse of the lift of piece m of the fragmentation.
Connection pull_piece(const Connection& a, const Fragmentation& fr, int m) {
  const Bundle& b = a.bundle();
  const StructureGroup& group = b.group();
  const SampledMap<AlgebraElement>& am = a.piece(m);
  const SampleGrid& gm = am.grid();
  std::vector<AlgebraElement> delta(gm.size());
  std::vector<char> moved(gm.size(), 0);
  parallel_for(gm.size(), [&](std::size_t s) {
    double x = gm.position(static_cast<int>(s));
    if (!fr.moves(m, x)) return;
    double y = fr.piece_inverse(m, x);
    double d = fr.partial_derivative(m + 1, x) / fr.partial_derivative(m, y);
    delta[s] = am(wrap01(y)) * d - am[static_cast<int>(s)];
    moved[s] = 1;
  });
  auto pieces = map_charts(b, [&](int j, int s, const SampleGrid& grid) {
    const AlgebraElement& v = a.piece(j)[s];
    int g = grid.global_index(s);
    auto k = gm.local_index(g);
    if (!k || !moved[*k]) return v;
    if (j == m) return v + delta[*k];
    return v + group.ad(transition_at(b, j, m, g, grid.position(s)), delta[*k]);
  });
  return Connection(a.bundle_ptr(), std::move(pieces));
}

}  // namespace

Connection aut_act(const BundleAutomorphism& f, const Connection& a) {
  if (f.bundle_ptr() != a.bundle_ptr()) throw GroupMismatch("automorphism of a different bundle");
  const Fragmentation& fr = f.section().fragmentation();
  Connection cur = a;
  for (int m = 0; m < fr.size(); ++m) cur = pull_piece(cur, fr, m);
  OverlapResidual r = compatibility(cur);
  if (!(r.value <= kConnectionTolerance))
    throw InvariantViolation("pulled back connection incompatible: " + r.describe(), r.value);
  return gauge_act(f.gauge(), cur);
}

GroupElement holonomy(const Connection& a, double x0, int steps) {
  const Bundle& b = a.bundle();
  const StructureGroup& group = b.group();
  auto segs = loop_schedule(b.cover(), x0);
  int c0 = b.cover().canonical_chart(wrap01(x0));
  GroupElement h = group.identity();
  int chart = c0;
  for (const LoopSegment& seg : segs) {
    if (seg.chart != chart) {
      h = h * b.transition(chart, seg.chart, wrap01(x0 + seg.from));
      chart = seg.chart;
    }
    int count = std::max(4, static_cast<int>(std::ceil(steps * (seg.to - seg.from) - 1e-9)));
    double dx = (seg.to - seg.from) / count;
    const SampledMap<AlgebraElement>& form = a.piece(chart);
    auto field = [&](double t) { return form(wrap01(x0 + t)).matrix(); };
    for (int q = 0; q < count; ++q) {
      double t = seg.from + q * dx;
      const Matrix& H = h.matrix();
      Matrix k1 = H * field(t);
      Matrix k2 = (H + 0.5 * dx * k1) * field(t + 0.5 * dx);
      Matrix k3 = (H + 0.5 * dx * k2) * field(t + 0.5 * dx);
      Matrix k4 = (H + dx * k3) * field(t + dx);
      Matrix next = H + dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      h = project_to_group(group.base(), next, h.cyclic_label(), h.cyclic_order());
    }
  }
  if (chart != c0) h = h * b.transition(chart, c0, wrap01(x0));
  return h;
}

Connection refine_connection(const Connection& a, const BundlePtr& refined,
                             const std::vector<int>& parent) {
  auto pieces = map_charts(*refined, [&](int r, int s, const SampleGrid& grid) {
    const auto& src = a.piece(parent.at(r));
    if (const AlgebraElement* v = src.at_global(grid.global_index(s))) return *v;
    return src(grid.position(s));
  });
  return make_connection(refined, std::move(pieces));
}

double sup_distance(const Connection& a, const Connection& b) {
  if (a.size() != b.size()) throw GroupMismatch("connections on different covers");
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    if (a.piece(i).size() != b.piece(i).size())
      throw GroupMismatch("connection pieces on different grids");
    for (int s = 0; s < a.piece(i).size(); ++s)
      m = std::max(m, distance(a.piece(i)[s], b.piece(i)[s]));
  }
  return m;
}

std::vector<Complex> eigenvalues(const GroupElement& k) {
  Eigen::ComplexEigenSolver<Matrix> solver(k.matrix(), false);
  std::vector<Complex> ev(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::sort(ev.begin(), ev.end(), [](Complex p, Complex q) {
    return std::arg(p) < std::arg(q) || (std::arg(p) == std::arg(q) && std::abs(p) < std::abs(q));
  });
  return ev;
}

double eigenvalue_distance(const GroupElement& a, const GroupElement& b) {
  std::vector<Complex> ea = eigenvalues(a), eb = eigenvalues(b);
  if (ea.size() != eb.size()) return std::numeric_limits<double>::infinity();
  std::vector<int> perm(eb.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t q = 0; q < ea.size(); ++q) worst = std::max(worst, std::abs(ea[q] - eb[perm[q]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (a.cyclic_label() != b.cyclic_label()) return std::numeric_limits<double>::infinity();
  return best;
}

}  // namespace gaugeforge

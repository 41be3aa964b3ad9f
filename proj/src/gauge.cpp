#include "gaugeforge/gauge.hpp"

#include <algorithm>
#include <limits>

#include "gaugeforge/parallel.hpp"

namespace gaugeforge {

std::string OverlapResidual::describe() const {
  std::ostringstream os;
  os << "overlap (" << i << "," << j << ") at x = " << x << ": residual " << value;
  return os.str();
}

LocalGaugeElement::LocalGaugeElement(BundlePtr bundle, std::vector<SampledMap<GroupElement>> pieces)
    : bundle_(std::move(bundle)), pieces_(std::move(pieces)) {
  if (static_cast<int>(pieces_.size()) != bundle_->cover().size())
    throw CoverError("gauge element needs one map per arc");
}

LocalGaugeAlgebraElement::LocalGaugeAlgebraElement(BundlePtr bundle,
                                                   std::vector<SampledMap<AlgebraElement>> pieces)
    : bundle_(std::move(bundle)), pieces_(std::move(pieces)) {
  if (static_cast<int>(pieces_.size()) != bundle_->cover().size())
    throw CoverError("gauge algebra element needs one map per arc");
}

namespace {

void require_same_bundle(const BundlePtr& a, const BundlePtr& b) {
  if (a != b) throw GroupMismatch("gauge data on different bundles");
}

template <class T, class F>
std::vector<SampledMap<T>> map_pieces(const Bundle& b, F&& f) {
  std::vector<SampledMap<T>> out;
  for (int i = 0; i < b.cover().size(); ++i) {
    SampleGrid grid = chart_grid(b, i);
    std::vector<T> v(grid.size());
    parallel_for(grid.size(), [&](std::size_t s) { v[s] = f(i, static_cast<int>(s), grid); });
    out.emplace_back(grid, std::move(v));
  }
  return out;
}

GroupElement transition_at(const Bundle& b, int i, int j, const SampleGrid& grid, int s) {
  if (i == j) return b.group().identity();
  if (const GroupElement* k = b.transition_sample(i, j, grid.global_index(s))) return *k;
  return b.transition(i, j, grid.position(s));
}

template <class Piece, class Residual>
OverlapResidual overlap_scan(const Bundle& b, const std::vector<const Piece*>& pieces,
                             Residual&& residual) {
  OverlapResidual worst;
  int n = static_cast<int>(pieces.size());
  for (int i = 0; i < n; ++i) {
    const SampleGrid& grid = pieces[i]->grid();
    for (int s = 0; s < grid.size(); ++s) {
      int g = grid.global_index(s);
      for (int j = i + 1; j < n; ++j) {
        auto* vj = pieces[j]->at_global(g);
        if (!vj) continue;
        const GroupElement* kij = b.transition_sample(i, j, g);
        const GroupElement* kji = b.transition_sample(j, i, g);
        if (!kij || !kji) continue;
        double r = residual((*pieces[i])[s], *vj, *kij, *kji);
        if (!(r <= worst.value)) {
          worst = {std::isnan(r) ? std::numeric_limits<double>::infinity() : r, i, j,
                   grid.position(s)};
        }
      }
    }
  }
  return worst;
}

}  // namespace

SampleGrid chart_grid(const Bundle& b, int i) {
  return SampleGrid::on_arc(b.cover().arc(i), b.resolution());
}

LocalGaugeElement tabulate_gauge(const BundlePtr& b,
                                 const std::function<GroupElement(int i, double x)>& f) {
  return LocalGaugeElement(b, map_pieces<GroupElement>(*b, [&](int i, int s, const SampleGrid& g) {
                             return f(i, g.position(s));
                           }));
}

LocalGaugeAlgebraElement tabulate_gauge_algebra(
    const BundlePtr& b, const std::function<AlgebraElement(int i, double x)>& f) {
  return LocalGaugeAlgebraElement(
      b, map_pieces<AlgebraElement>(*b, [&](int i, int s, const SampleGrid& g) {
        return f(i, g.position(s));
      }));
}

OverlapResidual compatibility(const LocalGaugeElement& g) {
  std::vector<const SampledMap<GroupElement>*> p;
  for (int i = 0; i < g.size(); ++i) p.push_back(&g.piece(i));
  return overlap_scan(g.bundle(), p,
                      [](const GroupElement& gi, const GroupElement& gj, const GroupElement& kij,
                         const GroupElement& kji) { return distance(gi, kij * gj * kji); });
}

OverlapResidual compatibility(const LocalGaugeAlgebraElement& eta) {
  std::vector<const SampledMap<AlgebraElement>*> p;
  for (int i = 0; i < eta.size(); ++i) p.push_back(&eta.piece(i));
  return overlap_scan(eta.bundle(), p,
                      [](const AlgebraElement& ei, const AlgebraElement& ej,
                         const GroupElement& kij, const GroupElement& kji) {
                        return op_norm(ei.matrix() - kij.matrix() * ej.matrix() * kji.matrix());
                      });
}

void require_compatible(const LocalGaugeElement& g, double tol) {
  OverlapResidual r = compatibility(g);
  if (!(r.value <= tol))
    throw InvariantViolation("gauge element not compatible: " + r.describe(), r.value);
}

void require_compatible(const LocalGaugeAlgebraElement& eta, double tol) {
  OverlapResidual r = compatibility(eta);
  if (!(r.value <= tol))
    throw InvariantViolation("gauge algebra element not compatible: " + r.describe(), r.value);
}

LocalGaugeElement make_gauge(BundlePtr b, std::vector<SampledMap<GroupElement>> pieces,
                             double tol) {
  LocalGaugeElement g(std::move(b), std::move(pieces));
  for (int i = 0; i < g.size(); ++i) {
    const Arc& arc = g.bundle().cover().arc(i);
    const SampleGrid& grid = g.piece(i).grid();
    SampleGrid expect = SampleGrid::on_arc(arc, g.bundle().resolution());
    if (grid.first() != expect.first() || grid.size() != expect.size())
      throw DomainError("gauge piece " + std::to_string(i) + " is not sampled on its arc");
  }
  require_compatible(g, tol);
  return g;
}

LocalGaugeAlgebraElement make_gauge_algebra(BundlePtr b,
                                            std::vector<SampledMap<AlgebraElement>> pieces,
                                            double tol) {
  LocalGaugeAlgebraElement eta(std::move(b), std::move(pieces));
  require_compatible(eta, tol);
  return eta;
}

LocalGaugeElement identity_gauge(const BundlePtr& b) {
  GroupElement e = b->group().identity();
  return tabulate_gauge(b, [&](int, double) { return e; });
}

LocalGaugeAlgebraElement zero_gauge_algebra(const BundlePtr& b) {
  AlgebraElement z = b->group().zero();
  return tabulate_gauge_algebra(b, [&](int, double) { return z; });
}

LocalGaugeAlgebraElement LocalGaugeAlgebraElement::operator+(
    const LocalGaugeAlgebraElement& o) const {
  require_same_bundle(bundle_, o.bundle_);
  auto pieces = pieces_;
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (int s = 0; s < pieces[i].size(); ++s) pieces[i][s] = pieces[i][s] + o.pieces_[i][s];
  return LocalGaugeAlgebraElement(bundle_, std::move(pieces));
}

LocalGaugeAlgebraElement LocalGaugeAlgebraElement::operator*(double t) const {
  auto pieces = pieces_;
  for (auto& p : pieces)
    for (int s = 0; s < p.size(); ++s) p[s] = p[s] * t;
  return LocalGaugeAlgebraElement(bundle_, std::move(pieces));
}

LocalGaugeAlgebraElement patch_gauge_algebra(
    const BundlePtr& b, const std::function<AlgebraElement(int m, double x)>& zeta) {
  PartitionOfUnity pou(b->cover());
  const StructureGroup& group = b->group();
  int n = b->cover().size();
  auto pieces = map_pieces<AlgebraElement>(*b, [&](int i, int s, const SampleGrid& grid) {
    double x = grid.position(s);
    std::vector<double> f = pou.values(x);
    AlgebraElement acc = group.zero();
    for (int m = 0; m < n; ++m) {
      if (f[m] == 0.0) continue;
      acc = acc + f[m] * group.ad(transition_at(*b, i, m, grid, s), zeta(m, x));
    }
    return acc;
  });
  return make_gauge_algebra(b, std::move(pieces));
}

LocalGaugeAlgebraElement random_gauge_algebra(const BundlePtr& b, Rng& rng, double amplitude,
                                              int modes) {
  const StructureGroup& group = b->group();
  int n = b->cover().size();
  int dim = group.algebra_dim();
  // coeff[m][a][q] = (cos, sin) amplitudes
  std::vector<std::vector<std::vector<std::pair<double, double>>>> coeff(
      n, std::vector<std::vector<std::pair<double, double>>>(dim));
  for (int m = 0; m < n; ++m)
    for (int a = 0; a < dim; ++a)
      for (int q = 0; q <= modes; ++q)
        coeff[m][a].push_back({rng.uniform(-1.0, 1.0) / (q + 1), rng.uniform(-1.0, 1.0) / (q + 1)});
  auto zeta = [&](int m, double x) {
    std::vector<double> c(dim, 0.0);
    for (int a = 0; a < dim; ++a)
      for (int q = 0; q <= modes; ++q)
        c[a] += coeff[m][a][q].first * std::cos(kTwoPi * q * x) +
                coeff[m][a][q].second * std::sin(kTwoPi * q * x);
    return group.from_coords(c);
  };
  LocalGaugeAlgebraElement eta = patch_gauge_algebra(b, zeta);
  double sup = 0.0;
  for (int i = 0; i < eta.size(); ++i)
    for (const auto& v : eta.piece(i).values()) sup = std::max(sup, norm(v));
  if (sup == 0.0) return eta;
  return eta * (amplitude / sup);
}

LocalGaugeElement operator*(const LocalGaugeElement& a, const LocalGaugeElement& b) {
  require_same_bundle(a.bundle_ptr(), b.bundle_ptr());
  auto pieces = map_pieces<GroupElement>(a.bundle(), [&](int i, int s, const SampleGrid&) {
    return a.piece(i)[s] * b.piece(i)[s];
  });
  LocalGaugeElement r(a.bundle_ptr(), std::move(pieces));
  require_compatible(r);
  return r;
}

LocalGaugeElement inverse(const LocalGaugeElement& a) {
  auto pieces = map_pieces<GroupElement>(
      a.bundle(), [&](int i, int s, const SampleGrid&) { return a.piece(i)[s].inverse(); });
  LocalGaugeElement r(a.bundle_ptr(), std::move(pieces));
  require_compatible(r);
  return r;
}

double sup_distance(const LocalGaugeElement& a, const LocalGaugeElement& b) {
  if (a.size() != b.size()) throw GroupMismatch("gauge elements on different covers");
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    if (a.piece(i).size() != b.piece(i).size()) throw GroupMismatch("gauge pieces on different grids");
    for (int s = 0; s < a.piece(i).size(); ++s)
      m = std::max(m, distance(a.piece(i)[s], b.piece(i)[s]));
  }
  return m;
}

double sup_distance(const LocalGaugeAlgebraElement& a, const LocalGaugeAlgebraElement& b) {
  if (a.size() != b.size()) throw GroupMismatch("gauge algebra elements on different covers");
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i)
    for (int s = 0; s < a.piece(i).size(); ++s)
      m = std::max(m, distance(a.piece(i)[s], b.piece(i)[s]));
  return m;
}

namespace {

// The point in a chart whose closed arc contains it.
BundlePoint in_closed_chart(const Bundle& b, const BundlePoint& p) {
  if (b.cover().arc(p.chart).contains(p.x)) return p;
  return b.canonical(p);
}

}  // namespace

GroupElement to_equivariant(const LocalGaugeElement& g, const BundlePoint& p) {
  BundlePoint q = in_closed_chart(g.bundle(), p);
  return q.k.inverse() * g.value(q.chart, q.x) * q.k;
}

BundlePoint apply_gauge(const LocalGaugeElement& g, const BundlePoint& p) {
  BundlePoint q = in_closed_chart(g.bundle(), p);
  return {q.chart, q.x, g.value(q.chart, q.x) * q.k};
}

LocalGaugeAlgebraElement chart_star(const LocalGaugeElement& g) {
  const StructureGroup& group = g.bundle().group();
  std::vector<SampledMap<AlgebraElement>> pieces;
  double worst = -1.0;
  int worst_i = -1;
  double worst_x = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    const auto& p = g.piece(i);
    std::vector<AlgebraElement> v(p.size());
    for (int s = 0; s < p.size(); ++s) {
      try {
        v[s] = group.log(p[s]);
      } catch (const OutOfChart&) {
        double d = distance(p[s], group.identity());
        if (d > worst) {
          worst = d;
          worst_i = i;
          worst_x = p.grid().position(s);
        }
      }
    }
    pieces.emplace_back(p.grid(), std::move(v));
  }
  if (worst_i >= 0) {
    std::ostringstream os;
    os << "gauge element leaves the chart domain: chart " << worst_i << " at x = " << worst_x
       << " (distance " << worst << " from e)";
    throw OutOfChart(os.str());
  }
  LocalGaugeAlgebraElement eta(g.bundle_ptr(), std::move(pieces));
  require_compatible(eta);
  return eta;
}

LocalGaugeElement chart_star_inv(const LocalGaugeAlgebraElement& eta) {
  const StructureGroup& group = eta.bundle().group();
  for (int i = 0; i < eta.size(); ++i) {
    const auto& p = eta.piece(i);
    for (int s = 0; s < p.size(); ++s) {
      if (!(norm(p[s]) < group.chart_radius())) {
        std::ostringstream os;
        os << "algebra element outside the chart image: chart " << i << " at x = "
           << p.grid().position(s) << " (norm " << norm(p[s]) << ")";
        throw OutOfChart(os.str());
      }
    }
  }
  return gauge_exp(eta);
}

LocalGaugeElement gauge_exp(const LocalGaugeAlgebraElement& eta) {
  const StructureGroup& group = eta.bundle().group();
  auto pieces = map_pieces<GroupElement>(
      eta.bundle(), [&](int i, int s, const SampleGrid&) { return group.exp(eta.piece(i)[s]); });
  LocalGaugeElement r(eta.bundle_ptr(), std::move(pieces));
  require_compatible(r);
  return r;
}

LocalGaugeElement contract_to_identity(const LocalGaugeElement& g, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("contraction parameter must lie in [0, 1]");
  LocalGaugeAlgebraElement eta = chart_star(g);
  if (t == 1.0) return g;
  return chart_star_inv(eta * t);
}

std::vector<LocalGaugeElement> evolve(
    const std::function<LocalGaugeAlgebraElement(double t)>& xi, const BundlePtr& b, int steps) {
  if (steps < 16) throw DomainError("evolve needs at least 16 steps");
  const StructureGroup& group = b->group();
  double h = 1.0 / steps;
  std::vector<LocalGaugeElement> path{identity_gauge(b)};
  path.reserve(steps + 1);
  LocalGaugeAlgebraElement x0 = xi(0.0);
  for (int step = 0; step < steps; ++step) {
    double t = step * h;
    LocalGaugeAlgebraElement xm = xi(t + 0.5 * h);
    LocalGaugeAlgebraElement x1 = xi(t + h);
    for (const auto* x : {&xm, &x1}) require_same_bundle(x->bundle_ptr(), b);
    const LocalGaugeElement& cur = path.back();
    auto pieces = map_pieces<GroupElement>(*b, [&](int i, int s, const SampleGrid&) {
      const GroupElement& g = cur.piece(i)[s];
      const Matrix& y = g.matrix();
      const Matrix& a0 = x0.piece(i)[s].matrix();
      const Matrix& am = xm.piece(i)[s].matrix();
      const Matrix& a1 = x1.piece(i)[s].matrix();
      Matrix k1 = y * a0;
      Matrix k2 = (y + 0.5 * h * k1) * am;
      Matrix k3 = (y + 0.5 * h * k2) * am;
      Matrix k4 = (y + h * k3) * a1;
      Matrix next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      return project_to_group(group.base(), next, g.cyclic_label(), g.cyclic_order());
    });
    LocalGaugeElement g(b, std::move(pieces));
    require_compatible(g, kEvolveTolerance);
    path.push_back(std::move(g));
    x0 = std::move(x1);
  }
  return path;
}

double product_rule_residual(const StructureGroup& group, const SampledMap<GroupElement>& h,
                             const SampledMap<AlgebraElement>& f, int k) {
  const SampleGrid& grid = h.grid();
  if (!grid.periodic() || !f.grid().periodic() || f.size() != h.size())
    throw DomainError("product rule check needs maps on the same full-circle grid");
  int n = grid.size();
  Stencil st = derivative_stencil(k, n, true);
  double inv_h = 1.0 / grid.spacing();
  Matrix d_ad = Matrix::Zero(group.matrix_dim(), group.matrix_dim());
  Matrix d_f = d_ad;
  for (int j = 0; j < 5; ++j) {
    int idx = positive_mod(k + st.offset + j, n);
    d_ad += st.weights[j] * group.ad(h[idx], f[idx]).matrix();
    d_f += st.weights[j] * f[idx].matrix();
  }
  d_ad *= inv_h;
  d_f *= inv_h;
  AlgebraElement dl = left_log_derivative(group, h.values(), grid.spacing(), k, true);
  const GroupElement& hk = h[k];
  Matrix rhs = group.ad(hk, AlgebraElement(d_f)).matrix() + group.ad(hk, bracket(dl, f[k])).matrix();
  return op_norm(d_ad - rhs);
}

double product_rule_residual(const StructureGroup& group, const SampledMap<GroupElement>& h,
                             const SampledMap<AlgebraElement>& f) {
  std::vector<double> r(h.size());
  parallel_for(h.size(), [&](std::size_t k) {
    r[k] = product_rule_residual(group, h, f, static_cast<int>(k));
  });
  return *std::max_element(r.begin(), r.end());
}

LocalGaugeElement refine_gauge(const LocalGaugeElement& g, const BundlePtr& refined,
                               const std::vector<int>& parent) {
  auto pieces = map_pieces<GroupElement>(*refined, [&](int a, int s, const SampleGrid& grid) {
    const auto& src = g.piece(parent.at(a));
    if (const GroupElement* v = src.at_global(grid.global_index(s))) return *v;
    return src(grid.position(s));
  });
  return make_gauge(refined, std::move(pieces));
}

LocalGaugeElement coarsen_gauge(const LocalGaugeElement& g, const BundlePtr& coarse,
                                const std::vector<int>& parent) {
  auto pieces = map_pieces<GroupElement>(*coarse, [&](int i, int s, const SampleGrid& grid) {
    int global = grid.global_index(s);
    int fallback = -1;
    for (int a = 0; a < g.size(); ++a) {
      if (parent.at(a) != i) continue;
      if (const GroupElement* v = g.piece(a).at_global(global)) return *v;
      if (g.bundle().cover().arc(a).contains(grid.position(s), 1e-9)) fallback = a;
    }
    if (fallback < 0) throw CoverError("refined pieces do not cover the coarse arc");
    return g.piece(fallback)(grid.position(s));
  });
  return make_gauge(coarse, std::move(pieces));
}

}  // namespace gaugeforge

#include "gaugeforge/diffauto.hpp"

#include <algorithm>
#include <sstream>

#include "gaugeforge/parallel.hpp"

namespace gaugeforge {

namespace {

double partial_slope(const Diffeo& g, const PartitionOfUnity& pou) {
  const SampledMap<double>& u = g.displacement();
  const SampleGrid& grid = u.grid();
  int n = pou.size();
  std::vector<double> worst(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t k) {
    double x = grid.position(static_cast<int>(k));
    double du = g.derivative(x) - 1.0;
    for (int m = 0; m < n; ++m) {
      double d = pou.tail_derivative(m, x) * u[static_cast<int>(k)] + pou.tail(m, x) * du;
      worst[k] = std::max(worst[k], std::abs(d));
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

}  // namespace

Admissibility admissibility(const Diffeo& g, const PartitionOfUnity& pou) {
  return {g.sup_displacement(), g.sup_slope(), partial_slope(g, pou)};
}

void require_admissible(const Diffeo& g, const PartitionOfUnity& pou,
                        const NeighbourhoodBounds& bounds) {
  Admissibility a = admissibility(g, pou);
  if (a.within(bounds)) return;
  std::ostringstream os;
  os << "diffeomorphism outside the admissible neighbourhood: sup|u| = " << a.sup_displacement
     << " (bound " << bounds.sup_displacement << "), sup|u'| = " << a.sup_slope << " (bound "
     << bounds.sup_slope << "), partial field slope " << a.partial_slope << " (bound "
     << bounds.partial_slope << "); shrink g";
  throw NeighbourhoodError(os.str());
}

Fragmentation::Fragmentation(const Diffeo& g, const PartitionOfUnity& pou,
                             double partial_slope_bound)
    : g_(g), pou_(pou) {
  double s = partial_slope(g, pou);
  if (s > partial_slope_bound) {
    std::ostringstream os;
    os << "fragmentation: partial field slope " << s << " exceeds " << partial_slope_bound
       << "; shrink g";
    throw NeighbourhoodError(os.str());
  }
}

double Fragmentation::partial(int m, double x) const {
  return x + pou_.tail(m, x) * g_.displacement()(x);
}

double Fragmentation::partial_derivative(int m, double x) const {
  return 1.0 + pou_.tail_derivative(m, x) * g_.displacement()(x) +
         pou_.tail(m, x) * (g_.derivative(x) - 1.0);
}

double Fragmentation::solve(int m, double target, double z) const {
  for (int it = 0; it < 60; ++it) {
    double r = partial(m, z) - target;
    if (r == 0.0) return z;
    double step = r / partial_derivative(m, z);
    z -= step;
    if (std::abs(step) < 1e-16) return z;
  }
  double r = partial(m, z) - target;
  if (std::abs(r) < 1e-13) return z;
  std::ostringstream os;
  os << "Newton inversion of a partial field failed at y = " << target << " (residual " << r
     << ")";
  throw NewtonFailure(os.str());
}

double Fragmentation::partial_inverse(int m, double y) const {
  return solve(m, y, y - pou_.tail(m, y) * g_.displacement()(y));
}

bool Fragmentation::moves(int i, double x) const { return pou_.value(i, x) != 0.0; }

double Fragmentation::piece(int i, double x) const {
  if (!moves(i, x)) return x;
  return solve(i + 1, partial(i, x), x);
}

double Fragmentation::piece_inverse(int i, double y) const {
  if (!moves(i, y)) return y;
  return solve(i, partial(i + 1, y), y);
}

double Fragmentation::recompose(double x) const {
  for (int i = 0; i < size(); ++i) x = piece(i, x);
  return x;
}

Diffeo Fragmentation::sampled_piece(int i) const {
  auto u = SampledMap<double>::tabulate(g_.displacement().grid(),
                                        [&](double x) { return piece(i, x) - x; });
  return Diffeo::orientation_preserving(std::move(u));
}

Fragmentation fragment(const Diffeo& g, const PartitionOfUnity& pou) { return Fragmentation(g, pou); }

BundlePoint local_lift(const Bundle& b, const Fragmentation& f, int i, const BundlePoint& p) {
  if (!b.cover().arc(i).contains_interior(p.x)) return p;
  BundlePoint q = b.change_chart(p, i);
  q.x = wrap01(f.piece(i, q.x));
  return q;
}

BundlePoint local_lift_inverse(const Bundle& b, const Fragmentation& f, int i,
                               const BundlePoint& p) {
  if (!b.cover().arc(i).contains_interior(p.x)) return p;
  BundlePoint q = b.change_chart(p, i);
  q.x = wrap01(f.piece_inverse(i, q.x));
  return q;
}

BundlePoint local_lift(const Bundle& b, const Diffeo& s, int i, const BundlePoint& p) {
  const Arc& arc = b.cover().arc(i);
  const SampledMap<double>& u = s.displacement();
  for (int k = 0; k < u.size(); ++k) {
    double x = u.grid().position(k);
    if (!arc.contains_interior(x) && u[k] != 0.0) {
      std::ostringstream os;
      os << "diffeomorphism moves x = " << x << " outside the interior of arc " << i;
      throw NeighbourhoodError(os.str());
    }
  }
  if (!arc.contains_interior(p.x)) return p;
  BundlePoint q = b.change_chart(p, i);
  q.x = wrap01(s(q.x));
  return q;
}

Section::Section(BundlePtr bundle, const Diffeo& g, const NeighbourhoodBounds& bounds)
    : bundle_(std::move(bundle)),
      frag_(g, PartitionOfUnity(bundle_->cover()), bounds.partial_slope) {
  Admissibility a{g.sup_displacement(), g.sup_slope(), 0.0};
  if (!a.within(bounds)) require_admissible(g, frag_.partition(), bounds);
}

BundlePoint Section::apply(const BundlePoint& p) const {
  BundlePoint q = p;
  for (int m = 0; m < frag_.size(); ++m) q = local_lift(*bundle_, frag_, m, q);
  return q;
}

BundlePoint Section::apply_inverse(const BundlePoint& p) const {
  BundlePoint q = p;
  for (int m = frag_.size() - 1; m >= 0; --m) q = local_lift_inverse(*bundle_, frag_, m, q);
  return q;
}

std::optional<BundlePoint> Section::chain(const BundlePoint& p) const {
  const Bundle& b = *bundle_;
  double y = frag_.partial(0, p.x);
  int prev = p.chart;
  GroupElement c = b.group().identity();
  for (int m = 0; m < frag_.size(); ++m) {
    double xm = m == 0 ? p.x : frag_.partial_inverse(m, y);
    if (!frag_.moves(m, xm)) continue;
    if (m != prev) {
      if (!b.cover().enlargement(m).contains_interior(xm) ||
          !b.cover().enlargement(prev).contains_interior(xm))
        return std::nullopt;
      c = b.transition(m, prev, xm) * c;
      prev = m;
    }
  }
  return BundlePoint{prev, wrap01(y), c * p.k};
}

BundleAutomorphism::BundleAutomorphism(LocalGaugeElement gauge, const Diffeo& base,
                                       const NeighbourhoodBounds& bounds)
    : gauge_(std::move(gauge)),
      section_(std::make_shared<const Section>(gauge_.bundle_ptr(), base, bounds)) {}

BundleAutomorphism BundleAutomorphism::identity(const BundlePtr& b) {
  return BundleAutomorphism(identity_gauge(b), Diffeo::identity(b->resolution()));
}

BundleAutomorphism BundleAutomorphism::pure_gauge(const LocalGaugeElement& gamma) {
  return BundleAutomorphism(gamma, Diffeo::identity(gamma.bundle().resolution()));
}

BundleAutomorphism BundleAutomorphism::section(const BundlePtr& b, const Diffeo& g) {
  return BundleAutomorphism(identity_gauge(b), g);
}

BundlePoint apply_aut(const BundleAutomorphism& f, const BundlePoint& p) {
  return apply_gauge(f.gauge(), f.section().apply(p));
}

BundlePoint apply_aut_inverse(const BundleAutomorphism& f, const BundlePoint& p) {
  const Bundle& b = f.section().bundle();
  BundlePoint q = b.cover().arc(p.chart).contains(p.x) ? p : b.canonical(p);
  q.k = f.gauge().value(q.chart, q.x).inverse() * q.k;
  return f.section().apply_inverse(q);
}

Diffeo project_Q(const BundleAutomorphism& f) { return f.base(); }

BundlePoint random_point(const Bundle& b, Rng& rng) {
  double x = rng.uniform();
  return {b.cover().canonical_chart(x), x, random_element(b.group(), rng)};
}

double projection_residual(const BundleAutomorphism& f, int probes, std::uint64_t seed) {
  Rng rng(seed);
  const Bundle& b = f.section().bundle();
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    BundlePoint p = random_point(b, rng);
    BundlePoint q = apply_aut(f, p);
    worst = std::max(worst, circle_distance(q.x, f.base()(p.x)));
  }
  return worst;
}

double point_distance(const Bundle& b, const BundlePoint& p, const BundlePoint& q) {
  double base = circle_distance(p.x, q.x);
  BundlePoint a = p, c = q;
  if (a.chart != c.chart) {
    const ClosedCover& cover = b.cover();
    if (cover.enlargement(a.chart).contains(c.x, 0.0)) {
      c = b.change_chart(c, a.chart);
    } else if (cover.enlargement(c.chart).contains(a.x, 0.0)) {
      a = b.change_chart(a, c.chart);
    } else {
      a = b.canonical(a);
      c = b.change_chart(c, a.chart);
    }
  }
  return std::max(base, distance(a.k, c.k));
}

double aut_distance(const BundleAutomorphism& f1, const BundleAutomorphism& f2, int probes,
                    std::uint64_t seed) {
  Rng rng(seed);
  const Bundle& b = f1.section().bundle();
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    BundlePoint p = random_point(b, rng);
    worst = std::max(worst, point_distance(b, apply_aut(f1, p), apply_aut(f2, p)));
  }
  return worst;
}

LocalGaugeElement outer_T(const LocalGaugeElement& gamma, const Section& s) {
  if (gamma.bundle_ptr() != s.bundle_ptr()) throw GroupMismatch("gauge data on different bundles");
  GroupElement e = gamma.bundle().group().identity();
  LocalGaugeElement t = tabulate_gauge(gamma.bundle_ptr(), [&](int i, double x) {
    return to_equivariant(gamma, s.apply_inverse({i, x, e}));
  });
  require_compatible(t);
  return t;
}

LocalGaugeElement outer_T(const LocalGaugeElement& gamma, const Diffeo& g) {
  return outer_T(gamma, Section(gamma.bundle_ptr(), g));
}

namespace {

// Vertical automorphism given pointwise, read off at sigma_i(x).
VerticalPart vertical_part(const BundlePtr& b,
                           const std::function<BundlePoint(const BundlePoint&)>& map) {
  GroupElement e = b->group().identity();
  std::vector<SampledMap<GroupElement>> pieces;
  double vert = 0.0;
  for (int i = 0; i < b->cover().size(); ++i) {
    SampleGrid grid = chart_grid(*b, i);
    std::vector<GroupElement> v(grid.size());
    std::vector<double> d(grid.size());
    parallel_for(grid.size(), [&](std::size_t s) {
      double x = grid.position(static_cast<int>(s));
      BundlePoint q = map({i, x, e});
      d[s] = circle_distance(q.x, x);
      v[s] = b->change_chart(q, i).k;
    });
    vert = std::max(vert, *std::max_element(d.begin(), d.end()));
    pieces.emplace_back(grid, std::move(v));
  }
  LocalGaugeElement w(b, std::move(pieces));
  require_compatible(w);
  return {std::move(w), vert};
}

}  // namespace

VerticalPart omega(const BundlePtr& b, const Diffeo& g, const Diffeo& g2) {
  Section s1(b, g), s2(b, g2), s12(b, compose(g, g2));
  return vertical_part(b, [&](const BundlePoint& p) {
    return s1.apply(s2.apply(s12.apply_inverse(p)));
  });
}

VerticalPart omega_conj(const BundleAutomorphism& f, const Diffeo& g2) {
  const BundlePtr& b = f.bundle_ptr();
  const Diffeo& g = f.base();
  Section s2(b, g2);
  Section sc(b, compose(compose(g, g2), invert(g)));
  return vertical_part(b, [&](const BundlePoint& p) {
    return apply_aut(f, s2.apply(apply_aut_inverse(f, sc.apply_inverse(p))));
  });
}

BundleAutomorphism aut_mul(const BundleAutomorphism& f1, const BundleAutomorphism& f2) {
  if (f1.bundle_ptr() != f2.bundle_ptr()) throw GroupMismatch("automorphisms of different bundles");
  const BundlePtr& b = f1.bundle_ptr();
  LocalGaugeElement gamma =
      f1.gauge() * outer_T(f2.gauge(), f1.section()) * omega(b, f1.base(), f2.base()).value;
  return BundleAutomorphism(std::move(gamma), compose(f1.base(), f2.base()));
}

BundleAutomorphism aut_inv(const BundleAutomorphism& f) {
  const BundlePtr& b = f.bundle_ptr();
  Diffeo gi = invert(f.base());
  LocalGaugeElement w = omega(b, f.base(), gi).value;
  LocalGaugeElement beta = inverse(w) * inverse(f.gauge());
  return BundleAutomorphism(outer_T(beta, Section(b, gi)), gi);
}

FactorResiduals factor_identities_residual(const BundlePtr& b, const Diffeo& g,
                                           const Diffeo& g2, const Diffeo& g3,
                                           const LocalGaugeElement& probe) {
  Diffeo g12 = compose(g, g2);
  Diffeo g23 = compose(g2, g3);
  LocalGaugeElement w12 = omega(b, g, g2).value;
  LocalGaugeElement lhs = w12 * omega(b, g12, g3).value;
  LocalGaugeElement rhs = outer_T(omega(b, g2, g3).value, g) * omega(b, g, g23).value;
  LocalGaugeElement conj_lhs = outer_T(outer_T(probe, g2), g);
  LocalGaugeElement conj_rhs = w12 * outer_T(probe, g12) * inverse(w12);
  return {sup_distance(lhs, rhs), sup_distance(conj_lhs, conj_rhs)};
}

Diffeo random_diffeo(int n, Rng& rng, double amplitude, int modes) {
  std::vector<double> a(modes + 1), c(modes + 1);
  for (int q = 0; q <= modes; ++q) {
    a[q] = rng.uniform(-1.0, 1.0) / (q + 1);
    c[q] = rng.uniform(-1.0, 1.0) / (q + 1);
  }
  auto u = SampledMap<double>::tabulate(SampleGrid::circle(n), [&](double x) {
    double v = a[0];
    for (int q = 1; q <= modes; ++q)
      v += a[q] * std::cos(kTwoPi * q * x) + c[q] * std::sin(kTwoPi * q * x);
    return v;
  });
  double sup = 0.0;
  for (double v : u.values()) sup = std::max(sup, std::abs(v));
  if (sup > 0.0)
    for (int k = 0; k < u.size(); ++k) u[k] *= amplitude / sup;
  return Diffeo::from_displacement(std::move(u));
}

Diffeo random_admissible_diffeo(const ClosedCover& cover, int n, Rng& rng, double amplitude,
                                const NeighbourhoodBounds& bounds) {
  PartitionOfUnity pou(cover);
  Diffeo g = random_diffeo(n, rng, amplitude);
  for (int attempt = 0; attempt < 30; ++attempt) {
    if (admissibility(g, pou).within(bounds)) return g;
    amplitude /= 2.0;
    SampledMap<double> u = g.displacement();
    for (int k = 0; k < u.size(); ++k) u[k] *= 0.5;
    g = Diffeo::from_displacement(std::move(u));
  }
  throw NeighbourhoodError("could not scale a random diffeomorphism into the neighbourhood");
}

}  // namespace gaugeforge

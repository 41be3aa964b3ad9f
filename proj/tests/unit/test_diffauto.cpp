#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gaugeforge/classify.hpp"
#include "gaugeforge/diffauto.hpp"
#include "gaugeforge/error.hpp"

using namespace gaugeforge;

namespace {

const double pi = std::numbers::pi;
constexpr int N = 512;

Diffeo sine_diffeo(int n, double amplitude, double phase = 0.0) {
  return Diffeo::from_displacement(SampledMap<double>::tabulate(
      SampleGrid::circle(n), [&](double x) { return amplitude * std::sin(2 * pi * (x + phase)); }));
}

BundlePtr flat_su2(std::uint64_t seed) {
  StructureGroup su2(BaseKind::SU2);
  Rng rng(seed);
  return share(make_flat_bundle(su2, su2.exp(random_algebra(su2, rng, 1.5)), build_cover(3, 0.6), N));
}

BundlePtr trivial_single(const StructureGroup& g) {
  return share(make_trivial_bundle(g, ClosedCover::single_chart(), N));
}

LocalGaugeElement smooth_gauge(const BundlePtr& b, Rng& rng, double amplitude) {
  return gauge_exp(random_twisted_gauge_algebra(b, rng, amplitude));
}

double sup_gauge_to_identity(const LocalGaugeElement& g) {
  return sup_distance(g, identity_gauge(g.bundle_ptr()));
}

}  // namespace

TEST_CASE("fragmentation of the identity") {
  Fragmentation f = fragment(Diffeo::identity(N), PartitionOfUnity(build_cover(3, 0.6)));
  for (int i = 0; i < f.size(); ++i)
    for (int k = 0; k < N; k += 7) {
      double x = static_cast<double>(k) / N;
      CHECK(f.piece(i, x) == doctest::Approx(x).epsilon(1e-15));
    }
}

TEST_CASE("single-arc cover: the only piece is g") {
  Diffeo g = sine_diffeo(N, 0.02);
  Fragmentation f = fragment(g, PartitionOfUnity(ClosedCover::single_chart()));
  REQUIRE(f.size() == 1);
  for (int k = 0; k < N; k += 5) {
    double x = (k + 0.3) / N;
    CHECK(circle_distance(f.piece(0, x), g(x)) <= 1e-9);
  }
}

TEST_CASE("fragmentation of x + 0.02 sin 2 pi x on three arcs") {
  ClosedCover c = build_cover(3, 0.6);
  Diffeo g = sine_diffeo(N, 0.02);
  Fragmentation f = fragment(g, PartitionOfUnity(c));
  double worst = 0.0;
  for (int k = 0; k < N; ++k) {
    double x = (k + 0.37) / N;
    worst = std::max(worst, circle_distance(f.recompose(x), g(x)));
  }
  CHECK(worst <= 1e-6);
  for (int i = 0; i < f.size(); ++i)
    for (int k = 0; k < N; ++k) {
      double x = static_cast<double>(k) / N;
      if (!c.arc(i).contains(x)) {
        CHECK(f.piece(i, x) == x);
        CHECK(!f.moves(i, x));
      }
    }
}

TEST_CASE("random admissible diffeomorphisms fragment with exact support") {
  ClosedCover c = build_cover(3, 0.6);
  PartitionOfUnity pou(c);
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    Diffeo g = random_admissible_diffeo(c, N, rng);
    Fragmentation f(g, pou);
    double outside = 0.0, worst = 0.0;
    for (int k = 0; k < N; ++k) {
      double x = static_cast<double>(k) / N;
      for (int i = 0; i < f.size(); ++i)
        if (!c.arc(i).contains(x)) outside = std::max(outside, std::abs(f.piece(i, x) - x));
      worst = std::max(worst, circle_distance(f.recompose(x + 0.5 / N), g(x + 0.5 / N)));
    }
    CHECK(outside == 0.0);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("large diffeomorphisms are rejected") {
  ClosedCover c = build_cover(3, 0.6);
  Diffeo big = sine_diffeo(N, 0.045);
  CHECK_THROWS_AS(require_admissible(big, PartitionOfUnity(c), NeighbourhoodBounds{0.05, 0.2, 0.5}),
                  NeighbourhoodError);
  CHECK_NOTHROW(require_admissible(sine_diffeo(N, 0.01), PartitionOfUnity(c)));
}

TEST_CASE("local lifts") {
  StructureGroup su2(BaseKind::SU2);
  Rng rng(4);
  BundlePtr t = share(make_trivial_bundle(su2, build_cover(3, 0.6), N));
  Diffeo g = sine_diffeo(N, 0.02);
  Fragmentation f(g, PartitionOfUnity(t->cover()));
  Fragmentation id(Diffeo::identity(N), PartitionOfUnity(t->cover()));
  for (int s = 0; s < 20; ++s) {
    BundlePoint p = random_point(*t, rng);
    BundlePoint q = local_lift(*t, id, p.chart, p);
    CHECK(point_distance(*t, p, q) <= 1e-14);
    BundlePoint r = local_lift(*t, f, p.chart, p);
    CHECK(circle_distance(r.x, f.piece(p.chart, p.x)) <= 1e-14);
    BundlePoint back = local_lift_inverse(*t, f, p.chart, r);
    CHECK(point_distance(*t, back, p) <= 1e-9);
  }

  // A lift through either chart of an overlap gives the same point.
  BundlePtr b = flat_su2(5);
  Fragmentation fb(g, PartitionOfUnity(b->cover()));
  for (const Overlap& ov : b->cover().overlaps()) {
    double x = wrap01(ov.components[0].start() + 0.5 * ov.components[0].length());
    BundlePoint p{ov.i, x, random_element(su2, rng)};
    BundlePoint a = local_lift(*b, fb, ov.i, p);
    BundlePoint c = local_lift(*b, fb, ov.i, b->change_chart(p, ov.j));
    CHECK(point_distance(*b, a, c) <= 1e-9);
  }

  Diffeo wide = Diffeo::rotation(N, 0.01);
  BundlePoint p{0, 0.0, su2.identity()};
  CHECK_THROWS_AS(local_lift(*t, wide, 0, p), NeighbourhoodError);
}

TEST_CASE("sections project to their base diffeomorphism") {
  StructureGroup su2(BaseKind::SU2);
  BundlePtr t = trivial_single(su2);
  Rng rng(6);
  CHECK(aut_distance(BundleAutomorphism::section(t, Diffeo::identity(N)), BundleAutomorphism::identity(t)) <= 1e-14);

  Diffeo g = sine_diffeo(N, 0.02);
  Section s(t, g);
  for (int k = 0; k < 20; ++k) {
    BundlePoint p = random_point(*t, rng);
    BundlePoint q = s.apply(p);
    CHECK(circle_distance(q.x, g(p.x)) <= 1e-9);
    CHECK(distance(q.k, p.k) <= 1e-14);
  }

  StructureGroup u1(BaseKind::U1);
  BundlePtr flat = share(make_flat_bundle(u1, u1.exp(u1.from_coords(std::vector<double>{2.0})),
                                          build_cover(3, 0.6), N));
  BundleAutomorphism rot(identity_gauge(flat), Diffeo::rotation(N, 0.1), NeighbourhoodBounds{0.15, 0.3, 0.9});
  CHECK(projection_residual(rot) <= 1e-6);
  CHECK(sup_distance(project_Q(rot), Diffeo::rotation(N, 0.1)) <= 1e-12);

  BundlePtr b = flat_su2(7);
  for (int t2 = 0; t2 < 20; ++t2) {
    Diffeo h = random_admissible_diffeo(b->cover(), N, rng);
    CHECK(projection_residual(BundleAutomorphism::section(b, h), 16, t2 + 1) <= 1e-6);
  }
}

TEST_CASE("apply_aut") {
  BundlePtr b = flat_su2(8);
  Rng rng(9);
  LocalGaugeElement gamma = smooth_gauge(b, rng, 0.7);
  BundleAutomorphism id = BundleAutomorphism::identity(b);
  BundleAutomorphism pure = BundleAutomorphism::pure_gauge(gamma);
  Diffeo g = random_admissible_diffeo(b->cover(), N, rng);
  BundleAutomorphism f(gamma, g);
  Section s(b, g);
  for (int t = 0; t < 32; ++t) {
    BundlePoint p = random_point(*b, rng);
    CHECK(point_distance(*b, apply_aut(id, p), p) <= 1e-14);
    CHECK(point_distance(*b, apply_aut(pure, p), apply_gauge(gamma, p)) <= 1e-9);
    CHECK(point_distance(*b, apply_aut(f, p), apply_gauge(gamma, s.apply(p))) <= 1e-8);
    CHECK(point_distance(*b, apply_aut_inverse(f, apply_aut(f, p)), p) <= 1e-8);
  }
}

TEST_CASE("project_Q") {
  BundlePtr b = flat_su2(10);
  Rng rng(11);
  LocalGaugeElement gamma = smooth_gauge(b, rng, 0.7);
  Diffeo g1 = random_admissible_diffeo(b->cover(), N, rng);
  Diffeo g2 = random_admissible_diffeo(b->cover(), N, rng);
  CHECK(sup_distance(project_Q(BundleAutomorphism::pure_gauge(gamma)), Diffeo::identity(N)) == 0.0);
  CHECK(sup_distance(project_Q(BundleAutomorphism::section(b, g1)), g1) == 0.0);
  BundleAutomorphism prod = aut_mul(BundleAutomorphism(gamma, g1), BundleAutomorphism::section(b, g2));
  CHECK(sup_distance(project_Q(prod), compose(g1, g2)) <= 1e-6);
}

TEST_CASE("outer action T") {
  StructureGroup su2(BaseKind::SU2);
  BundlePtr b = flat_su2(12);
  Rng rng(13);
  LocalGaugeElement gamma = smooth_gauge(b, rng, 0.7);
  Diffeo g = random_admissible_diffeo(b->cover(), N, rng);
  CHECK(sup_distance(outer_T(gamma, Diffeo::identity(N)), gamma) <= 1e-12);
  CHECK(sup_gauge_to_identity(outer_T(identity_gauge(b), g)) <= 1e-12);
  CHECK(compatibility(outer_T(gamma, g)).value <= 1e-8);

  // On the trivial single-chart bundle T(gamma, g) = gamma o g^-1.
  BundlePtr t = trivial_single(su2);
  LocalGaugeElement lg = gauge_exp(random_gauge_algebra(t, rng, 0.7));
  Diffeo h = sine_diffeo(N, 0.02, 0.2);
  LocalGaugeElement out = outer_T(lg, h);
  double worst = 0.0;
  for (int k = 0; k < N; ++k) {
    double x = static_cast<double>(k) / N;
    worst = std::max(worst, distance(out.piece(0)[k], lg.piece(0)(h.inverse_at(x))));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("omega") {
  BundlePtr b = flat_su2(14);
  Rng rng(15);
  Diffeo g1 = random_admissible_diffeo(b->cover(), N, rng);
  Diffeo g2 = random_admissible_diffeo(b->cover(), N, rng);
  Diffeo id = Diffeo::identity(N);
  CHECK(sup_gauge_to_identity(omega(b, id, g2).value) <= 1e-12);
  CHECK(sup_gauge_to_identity(omega(b, g1, id).value) <= 1e-12);
  VerticalPart w = omega(b, g1, g2);
  CHECK(w.verticality <= 1e-8);
  CHECK(compatibility(w.value).value <= 1e-8);

  StructureGroup su2(BaseKind::SU2);
  BundlePtr t = trivial_single(su2);
  CHECK(sup_gauge_to_identity(omega(t, sine_diffeo(N, 0.02), sine_diffeo(N, 0.015, 0.3)).value) <= 1e-9);
}

TEST_CASE("omega_conj") {
  BundlePtr b = flat_su2(16);
  Rng rng(17);
  Diffeo g = random_admissible_diffeo(b->cover(), N, rng);
  Diffeo g2 = random_admissible_diffeo(b->cover(), N, rng);
  CHECK(sup_gauge_to_identity(omega_conj(BundleAutomorphism::identity(b), g2).value) <= 1e-10);
  LocalGaugeElement gamma = smooth_gauge(b, rng, 0.7);
  CHECK(sup_gauge_to_identity(omega_conj(BundleAutomorphism::pure_gauge(gamma), Diffeo::identity(N)).value) <= 1e-10);
  VerticalPart w = omega_conj(BundleAutomorphism(gamma, g), g2);
  CHECK(w.verticality <= 1e-7);
}

TEST_CASE("aut_mul on special pairs") {
  BundlePtr b = flat_su2(18);
  Rng rng(19);
  LocalGaugeElement a = smooth_gauge(b, rng, 0.7), c = smooth_gauge(b, rng, 0.7);
  Diffeo g1 = random_admissible_diffeo(b->cover(), N, rng);
  Diffeo g2 = random_admissible_diffeo(b->cover(), N, rng);
  BundleAutomorphism e = BundleAutomorphism::identity(b);
  BundleAutomorphism f(a, g1);
  CHECK(aut_distance(aut_mul(e, f), f) <= 1e-8);
  CHECK(aut_distance(aut_mul(f, e), f) <= 1e-8);

  BundleAutomorphism pp = aut_mul(BundleAutomorphism::pure_gauge(a), BundleAutomorphism::pure_gauge(c));
  CHECK(sup_distance(pp.gauge(), a * c) <= 1e-12);
  CHECK(sup_distance(pp.base(), Diffeo::identity(N)) == 0.0);

  BundleAutomorphism ss = aut_mul(BundleAutomorphism::section(b, g1), BundleAutomorphism::section(b, g2));
  CHECK(sup_distance(ss.gauge(), omega(b, g1, g2).value) <= 1e-12);
  CHECK(sup_distance(ss.base(), compose(g1, g2)) <= 1e-12);
}

TEST_CASE("factor identities") {
  StructureGroup su2(BaseKind::SU2);
  Rng rng(20);
  Diffeo id = Diffeo::identity(N);

  BundlePtr t = trivial_single(su2);
  LocalGaugeElement probe_t = gauge_exp(random_gauge_algebra(t, rng, 0.7));
  FactorResiduals rt = factor_identities_residual(t, sine_diffeo(N, 0.01), sine_diffeo(N, 0.012, 0.4),
                                                  sine_diffeo(N, 0.008, 0.7), probe_t);
  CHECK(rt.cocycle <= 1e-6);
  CHECK(rt.conjugation <= 1e-6);

  BundlePtr b = flat_su2(21);
  LocalGaugeElement probe = smooth_gauge(b, rng, 0.7);
  Diffeo g = random_admissible_diffeo(b->cover(), N, rng);
  FactorResiduals r0 = factor_identities_residual(b, g, id, id, probe);
  CHECK(r0.cocycle <= 1e-10);
  CHECK(r0.conjugation <= 1e-6);
  for (int s = 0; s < 3; ++s) {
    Diffeo g1 = random_admissible_diffeo(b->cover(), N, rng);
    Diffeo g2 = random_admissible_diffeo(b->cover(), N, rng);
    Diffeo g3 = random_admissible_diffeo(b->cover(), N, rng);
    FactorResiduals r = factor_identities_residual(b, g1, g2, g3, probe);
    CHECK(r.cocycle <= 1e-6);
    CHECK(r.conjugation <= 1e-6);
  }
}

TEST_CASE("associativity and inverses") {
  BundlePtr b = flat_su2(22);
  Rng rng(23);
  std::vector<BundleAutomorphism> fs;
  for (int t = 0; t < 3; ++t)
    fs.emplace_back(smooth_gauge(b, rng, 0.7), random_admissible_diffeo(b->cover(), N, rng));
  BundleAutomorphism l = aut_mul(aut_mul(fs[0], fs[1]), fs[2]);
  BundleAutomorphism r = aut_mul(fs[0], aut_mul(fs[1], fs[2]));
  CHECK(aut_distance(l, r) <= 1e-6);
  BundleAutomorphism e = BundleAutomorphism::identity(b);
  CHECK(aut_distance(aut_mul(fs[0], aut_inv(fs[0])), e) <= 1e-6);
  CHECK(aut_distance(aut_mul(aut_inv(fs[0]), fs[0]), e) <= 1e-6);
}

TEST_CASE("chain formula agrees with sequential lifts") {
  BundlePtr b = flat_su2(24);
  Rng rng(25);
  int used = 0;
  for (int t = 0; t < 5; ++t) {
    Section s(b, random_admissible_diffeo(b->cover(), N, rng));
    for (int q = 0; q < 32; ++q) {
      BundlePoint p = random_point(*b, rng);
      auto c = s.chain(p);
      if (!c) continue;
      ++used;
      CHECK(point_distance(*b, *c, s.apply(p)) <= 1e-8);
    }
  }
  CHECK(used > 0);
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gaugeforge/classify.hpp"
#include "gaugeforge/error.hpp"

using namespace gaugeforge;

namespace {

const double pi = std::numbers::pi;
constexpr int N = 512;

std::string row(const HomotopyReport& r, const std::string& space, int n) {
  const HomotopyRow* p = r.find(space, n);
  return p ? p->group : "missing";
}

Bundle recharted(const Bundle& b, double amplitude) {
  const StructureGroup& g = b.group();
  return rechart(b, [&](int i, double x) {
    std::vector<double> c(g.algebra_dim());
    for (int q = 0; q < g.algebra_dim(); ++q) c[q] = amplitude * std::cos(2 * pi * (x + 0.23 * i + 0.4 * q));
    return g.exp(g.from_coords(c));
  });
}

}  // namespace

TEST_CASE("Diff(S1)_P") {
  StructureGroup o2(BaseKind::O2), su2(BaseKind::SU2), u1(BaseKind::U1);
  StructureGroup u1z3 = StructureGroup::parse("U1xZ3");
  ClosedCover c = build_cover(3, 0.6);

  Bundle refl = make_flat_bundle(o2, o2.reflection(), c, N);
  CHECK(diff_subgroup(refl) == DiffSubgroup::FullDiff);
  CHECK(diff_subgroup_by_pullback(refl) == DiffSubgroup::FullDiff);

  Bundle c1 = make_flat_bundle(u1z3, u1z3.cyclic_generator(), c, N);
  CHECK(diff_subgroup(c1) == DiffSubgroup::IdentityComponent);
  CHECK(diff_subgroup_by_pullback(c1) == DiffSubgroup::IdentityComponent);
  CHECK(classify_S1(pullback(c1, Reflection{})) == classify_S1(c1).inverse());

  for (const StructureGroup& g : {su2, u1, u1z3, o2}) {
    Bundle t = make_trivial_bundle(g, c, N);
    CHECK(diff_subgroup(t) == DiffSubgroup::FullDiff);
    CHECK(diff_subgroup_by_pullback(t) == DiffSubgroup::FullDiff);
  }
  Rng rng(1);
  Bundle s = make_flat_bundle(su2, su2.exp(random_algebra(su2, rng, 2.0)), c, N);
  CHECK(diff_subgroup(s) == DiffSubgroup::FullDiff);
  CHECK(to_string(DiffSubgroup::FullDiff) == "FullDiff");
  CHECK(to_string(DiffSubgroup::IdentityComponent) == "IdentityComponent");
}

TEST_CASE("flatness") {
  StructureGroup su2(BaseKind::SU2);
  Bundle b = make_flat_bundle(su2, su2.exp(su2.from_coords(std::vector<double>{0.3, 0.1, 0.0})),
                              build_cover(3, 0.6), N);
  CHECK(is_flat(b));
  CHECK(!is_flat(recharted(b, 0.3)));
  Rng rng(2);
  LocalGaugeAlgebraElement eta = random_gauge_algebra(share(recharted(b, 0.3)), rng, 1.0);
  CHECK_THROWS_AS(twisted_loop_eval(eta, 0.1), DomainError);
}

TEST_CASE("twisted loop: eta(x + n) = Ad(k)^-n eta(x)") {
  Rng rng(3);
  for (const StructureGroup& g : {StructureGroup(BaseKind::SU2), StructureGroup(BaseKind::SO3),
                                  StructureGroup(BaseKind::O2), StructureGroup::parse("U1xZ3")}) {
    GroupElement h = g.exp(random_algebra(g, rng, 1.5));
    if (g.has_reflection()) h = h * g.reflection();
    if (g.cyclic_order() > 1) h = h * g.cyclic_generator();
    BundlePtr b = share(make_flat_bundle(g, h, build_cover(3, 0.6), N));
    GroupElement k = twist_element(*b);
    CHECK(distance(k, loop_product(*b).inverse()) <= 1e-14);
    LocalGaugeAlgebraElement eta = random_gauge_algebra(b, rng, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 16; ++t) {
      double x = rng.uniform();
      AlgebraElement base = twisted_loop_eval(eta, x);
      for (int n = -2; n <= 2; ++n) {
        AlgebraElement expect = base;
        GroupElement step = n >= 0 ? k.inverse() : k;
        for (int q = 0; q < std::abs(n); ++q) expect = g.ad(step, expect);
        worst = std::max(worst, distance(twisted_loop_eval(eta, x + n), expect));
      }
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("twisted loops round trip through the gauge algebra") {
  StructureGroup su2(BaseKind::SU2);
  Rng rng(4);
  BundlePtr b = share(make_flat_bundle(su2, su2.exp(random_algebra(su2, rng, 1.5)), build_cover(3, 0.6), N));
  auto f = random_twisted_loop(*b, rng, 1.0);
  LocalGaugeAlgebraElement eta = from_twisted_loop(b, f);
  CHECK(compatibility(eta).value <= 1e-12);
  for (double x : {0.0, 0.13, 0.5, 0.77, 0.999})
    CHECK(distance(twisted_loop_eval(eta, x), f(x)) <= 1e-9);
  LocalGaugeAlgebraElement r = random_twisted_gauge_algebra(b, rng, 0.8);
  CHECK(compatibility(r).value <= 1e-12);
}

TEST_CASE("abelian group notation") {
  CHECK(AbelianGroup::trivial().to_string() == "0");
  CHECK(AbelianGroup::integers().to_string() == "Z");
  CHECK(AbelianGroup::cyclic(2).to_string() == "Z2");
  CHECK(AbelianGroup::cyclic(1) == AbelianGroup::trivial());
  CHECK((AbelianGroup::integers() + AbelianGroup::cyclic(3)).to_string() == "Z+Z3");
  CHECK((AbelianGroup::trivial() + AbelianGroup::integers()) == AbelianGroup::integers());
}

TEST_CASE("homotopy groups of K") {
  StructureGroup su2(BaseKind::SU2), so3(BaseKind::SO3), u1(BaseKind::U1), o2(BaseKind::O2);
  CHECK(homotopy_group(su2, 1).to_string() == "0");
  CHECK(homotopy_group(su2, 3).to_string() == "Z");
  CHECK(homotopy_group(so3, 1).to_string() == "Z2");
  CHECK(homotopy_group(u1, 1).to_string() == "Z");
  CHECK(homotopy_group(u1, 2).to_string() == "0");
  CHECK(homotopy_group(o2, 0).to_string() == "Z2");
  CHECK(homotopy_group(StructureGroup::parse("U1xZ3"), 0).to_string() == "Z3");
}

TEST_CASE("homotopy report of a flat SU2 bundle") {
  StructureGroup su2(BaseKind::SU2);
  Rng rng(5);
  Bundle b = make_flat_bundle(su2, su2.exp(random_algebra(su2, rng, 1.5)), build_cover(3, 0.6), N);
  HomotopyReport r = homotopy_report(b);
  CHECK(r.group == "SU2");
  CHECK(r.diff_subgroup == DiffSubgroup::FullDiff);
  CHECK(row(r, "Aut(P)", 1) == "Z");
  CHECK(row(r, "Diff(S1)", 0) == "Z2");
  CHECK(row(r, "Diff(S1)", 1) == "Z");
  CHECK(row(r, "Diff(S1)", 2) == "0");
  CHECK(row(r, "Gau(P)", 2) == "Z");
  CHECK(r.find("Aut(P)", 9) == nullptr);
  std::string text = r.to_text();
  CHECK(text.find("pi_1(Aut(P)) = Z") != std::string::npos);
  CHECK(!r.notes.empty());
}

TEST_CASE("homotopy report of the trivial U1 bundle") {
  StructureGroup u1(BaseKind::U1);
  HomotopyReport r = homotopy_report(make_trivial_bundle(u1, build_cover(3, 0.6), N));
  CHECK(row(r, "Aut(P)", 2) == "0");
  CHECK(row(r, "Gau(P)", 0) == "Z");
  CHECK(row(r, "Gau(P)", 1) == "Z");
  CHECK(row(r, "Aut(P)", 1) == "Z+Z");
}

TEST_CASE("homotopy reports of O2 and U1xZ3 bundles") {
  StructureGroup o2(BaseKind::O2);
  HomotopyReport refl = homotopy_report(make_flat_bundle(o2, o2.reflection(), build_cover(3, 0.6), N));
  CHECK(row(refl, "Diff(S1)_P", 0) == "Z2");
  CHECK(row(refl, "Gau(P)", 1) == "0");
  StructureGroup u1z3 = StructureGroup::parse("U1xZ3");
  HomotopyReport c1 = homotopy_report(make_flat_bundle(u1z3, u1z3.cyclic_generator(), build_cover(3, 0.6), N));
  CHECK(c1.diff_subgroup == DiffSubgroup::IdentityComponent);
  CHECK(row(c1, "Diff(S1)_P", 0) == "0");
  CHECK(row(c1, "Aut(P)", 0) == row(c1, "Gau(P)", 0));
}

TEST_CASE("reports agree on equivalent bundles") {
  Rng rng(6);
  for (const StructureGroup& g : {StructureGroup(BaseKind::SU2), StructureGroup(BaseKind::O2),
                                  StructureGroup::parse("U1xZ3")}) {
    GroupElement h = g.exp(random_algebra(g, rng, 1.0));
    if (g.has_reflection()) h = h * g.reflection();
    if (g.cyclic_order() > 1) h = h * g.cyclic_generator();
    Bundle b = make_flat_bundle(g, h, build_cover(3, 0.6), N);
    std::string ref = homotopy_report(b).to_text();
    CHECK(homotopy_report(recharted(b, 0.4)).to_text() == ref);
    CHECK(homotopy_report(make_flat_bundle(g, h, build_cover(4, 0.35), N)).to_text() == ref);
  }
}

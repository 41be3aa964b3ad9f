#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "gaugeforge/classify.hpp"
#include "gaugeforge/cli/commands.hpp"
#include "gaugeforge/connection.hpp"

using namespace gaugeforge;

namespace {

const double pi = std::numbers::pi;
constexpr int N = 512;

struct Result {
  bool pass;
  std::string summary;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::vector<StructureGroup> all_groups() {
  return {StructureGroup(BaseKind::U1), StructureGroup(BaseKind::SU2),
          StructureGroup(BaseKind::SO3), StructureGroup(BaseKind::O2),
          StructureGroup::parse("U1xZ3")};
}

GroupElement nontrivial_holonomy(const StructureGroup& g, Rng& rng) {
  GroupElement h = g.exp(random_algebra(g, rng, 1.0));
  if (g.has_reflection()) h = h * g.reflection();
  if (g.cyclic_order() > 1) h = h * g.cyclic_generator();
  return h;
}

// Flat bundle recharted so that transitions vary along the overlaps.
BundlePtr twisted_bundle(const StructureGroup& g, Rng& rng) {
  Bundle flat = make_flat_bundle(g, nontrivial_holonomy(g, rng), build_cover(3, 0.6), N);
  double phase = rng.uniform();
  return share(rechart(flat, [&](int i, double x) {
    std::vector<double> c(g.algebra_dim());
    for (int q = 0; q < g.algebra_dim(); ++q)
      c[q] = 0.3 * std::sin(2 * pi * (x + phase + 0.17 * (i + 1) + 0.31 * q));
    return g.exp(g.from_coords(c));
  }));
}

BundlePtr flat_su2(Rng& rng) {
  StructureGroup su2(BaseKind::SU2);
  return share(make_flat_bundle(su2, su2.exp(random_algebra(su2, rng, 1.5)), build_cover(3, 0.6), N));
}

Connection smooth_connection(const BundlePtr& b, Rng& rng, double amplitude) {
  LocalGaugeAlgebraElement eta = random_twisted_gauge_algebra(b, rng, amplitude);
  std::vector<SampledMap<AlgebraElement>> pieces;
  for (int i = 0; i < eta.size(); ++i) pieces.push_back(eta.piece(i));
  return make_connection(b, std::move(pieces));
}

// The longer arcs produce triple overlaps.
Result cocycle_suite() {
  Rng rng(101);
  double worst = 0.0, worst_rel = 0.0;
  for (const StructureGroup& g : all_groups()) {
    for (auto [arcs, len] : {std::pair{2, 0.6}, {3, 0.45}, {3, 0.7}, {4, 0.35}, {4, 0.55}}) {
      ClosedCover c = build_cover(arcs, len);
      worst = std::max(worst, check_cocycle(make_trivial_bundle(g, c, N)));
      Bundle flat = make_flat_bundle(g, nontrivial_holonomy(g, rng), c, N);
      worst = std::max(worst, check_cocycle(flat));
      double r = check_cocycle(inject_transition_error(flat, 1e-3));
      worst_rel = std::max(worst_rel, std::abs(r - 1e-3) / 1e-3);
    }
  }
  return {worst <= 1e-10 && worst_rel <= 0.1,
          "max residual " + sci(worst) + " (tol 1e-10), injected 1e-3 relative error " + sci(worst_rel) +
              " (tol 0.1)"};
}

Result property_sub() {
  Rng rng(202);
  double round = 0.0, compat = 0.0;
  for (const StructureGroup& g : all_groups()) {
    BundlePtr b = twisted_bundle(g, rng);
    for (int t = 0; t < 50; ++t) {
      LocalGaugeAlgebraElement x = random_gauge_algebra(b, rng, 0.5);
      LocalGaugeElement k = chart_star_inv(x);
      round = std::max(round, sup_distance(chart_star(k), x));
      LocalGaugeElement y = gauge_exp(random_gauge_algebra(b, rng, 0.5));
      LocalGaugeAlgebraElement ly = chart_star(y);
      round = std::max(round, sup_distance(chart_star_inv(ly), y));
      compat = std::max({compat, compatibility(k).value, compatibility(ly).value});
    }
  }
  return {round <= 1e-10 && compat <= 1e-9,
          "round trip " + sci(round) + " (tol 1e-10), compatibility " + sci(compat) + " (tol 1e-9)"};
}

Result gauge_exp_suite() {
  Rng rng(303);
  double hom = 0.0, ev = 0.0, drift = 0.0;
  for (const StructureGroup& g : all_groups()) {
    BundlePtr b = twisted_bundle(g, rng);
    LocalGaugeAlgebraElement eta = random_gauge_algebra(b, rng, 0.8);
    LocalGaugeAlgebraElement eta2 = random_gauge_algebra(b, rng, 0.6);
    hom = std::max(hom, sup_distance(gauge_exp(eta * 0.3) * gauge_exp(eta * 0.5), gauge_exp(eta * 0.8)));
    auto path = evolve([&](double) { return eta; }, b, 256);
    ev = std::max(ev, sup_distance(path.back(), gauge_exp(eta)));
    for (const auto& p : evolve([&](double t) { return eta + eta2 * t; }, b, 256))
      drift = std::max(drift, compatibility(p).value);
  }
  return {hom <= 1e-10 && ev <= 1e-7 && drift <= 1e-7,
          "homomorphism " + sci(hom) + " (tol 1e-10), evolve vs exp " + sci(ev) + " (tol 1e-7), drift " +
              sci(drift) + " (tol 1e-7)"};
}

Result fragmentation_suite() {
  Rng rng(404);
  ClosedCover c = build_cover(3, 0.6);
  PartitionOfUnity pou(c);
  double outside = 0.0, recomposition = 0.0;
  for (int t = 0; t < 20; ++t) {
    Diffeo g = random_admissible_diffeo(c, N, rng);
    Fragmentation f(g, pou);
    for (int k = 0; k < N; ++k) {
      double x = static_cast<double>(k) / N;
      for (int i = 0; i < f.size(); ++i)
        if (!c.arc(i).contains(x)) outside = std::max(outside, std::abs(f.piece(i, x) - x));
      double y = (k + 0.37) / N;
      recomposition = std::max(recomposition, circle_distance(f.recompose(y), g(y)));
    }
  }
  return {outside == 0.0 && recomposition <= 1e-6,
          "support leak " + sci(outside) + " (exact), recomposition " + sci(recomposition) + " (tol 1e-6)"};
}

Result extension_suite() {
  Rng rng(505);
  BundlePtr b = flat_su2(rng);
  auto diffeo = [&] { return random_admissible_diffeo(b->cover(), N, rng); };
  double proj = 0.0, vert = 0.0, fc = 0.0, fj = 0.0;
  LocalGaugeElement probe = gauge_exp(random_twisted_gauge_algebra(b, rng, 0.7));
  for (int t = 0; t < 10; ++t) {
    Diffeo g1 = diffeo(), g2 = diffeo(), g3 = diffeo();
    proj = std::max(proj, projection_residual(BundleAutomorphism::section(b, g1), 64, t + 1));
    vert = std::max(vert, omega(b, g1, g2).verticality);
    FactorResiduals r = factor_identities_residual(b, g1, g2, g3, probe);
    fc = std::max(fc, r.cocycle);
    fj = std::max(fj, r.conjugation);
  }
  std::vector<BundleAutomorphism> fs;
  for (int t = 0; t < 3; ++t) fs.emplace_back(gauge_exp(random_twisted_gauge_algebra(b, rng, 0.7)), diffeo());
  double assoc = aut_distance(aut_mul(aut_mul(fs[0], fs[1]), fs[2]), aut_mul(fs[0], aut_mul(fs[1], fs[2])), 64);
  return {proj <= 1e-6 && vert <= 1e-8 && fc <= 1e-6 && fj <= 1e-6 && assoc <= 1e-6,
          "Q o S " + sci(proj) + ", verticality " + sci(vert) + ", factor cocycle " + sci(fc) +
              ", factor conjugation " + sci(fj) + ", associativity " + sci(assoc)};
}

Result product_rule_order() {
  auto study = cli::product_rule_study(StructureGroup(BaseKind::SU2), {128, 256, 512, 1024});
  double order = cli::observed_order(study);
  std::string s = "observed order " + std::to_string(order) + " (min 3.5), residuals";
  for (auto [n, r] : study) s += " " + sci(r);
  return {order >= 3.5, s};
}

Result connection_suite() {
  Rng rng(707);
  StructureGroup u1(BaseKind::U1);
  double theta = 0.7;
  BundlePtr t = share(make_trivial_bundle(u1, build_cover(3, 0.6), N));
  Connection c = constant_connection(t, u1.from_coords(std::vector<double>{theta}));
  double hol = std::abs(holonomy(c).matrix()(0, 0) - std::polar(1.0, theta));

  BundlePtr b = flat_su2(rng);
  Connection a = smooth_connection(b, rng, 1.0);
  GroupElement h = holonomy(a);
  LocalGaugeElement gamma = gauge_exp(random_twisted_gauge_algebra(b, rng, 0.8, 1));
  double conj = eigenvalue_distance(holonomy(gauge_act(gamma, a)), h);

  Refinement r = subdivide(*b, {0, 1, 2});
  BundlePtr rb = share(r.bundle);
  double refine = distance(holonomy(refine_connection(a, rb, r.parent)), h);
  return {hol <= 1e-8 && conj <= 1e-7 && refine <= 1e-7,
          "U1 holonomy " + sci(hol) + " (tol 1e-8), conjugation " + sci(conj) + " (tol 1e-7), refinement " +
              sci(refine) + " (tol 1e-7)"};
}

Result classification_suite() {
  ClosedCover c = build_cover(3, 0.6);
  StructureGroup o2(BaseKind::O2), su2(BaseKind::SU2);
  StructureGroup u1z3 = StructureGroup::parse("U1xZ3");
  Bundle refl = make_flat_bundle(o2, o2.reflection(), c, N);
  Bundle c1 = make_flat_bundle(u1z3, u1z3.cyclic_generator(), c, N);
  std::vector<std::string> failures;
  if (diff_subgroup(refl) != DiffSubgroup::FullDiff) failures.push_back("O2 reflection");
  if (diff_subgroup(c1) != DiffSubgroup::IdentityComponent) failures.push_back("U1xZ3 class 1");
  if (classify_S1(pullback(c1, Reflection{})) != classify_S1(c1).inverse()) failures.push_back("pull-back");
  if (classify_S1(pullback(refl, Reflection{})) != classify_S1(refl).inverse()) failures.push_back("O2 pull-back");

  Rng rng(808);
  HomotopyReport rep = homotopy_report(make_flat_bundle(su2, su2.exp(random_algebra(su2, rng, 1.5)), c, N));
  auto row = [&](const std::string& space, int n) {
    const HomotopyRow* p = rep.find(space, n);
    return p ? p->group : std::string("missing");
  };
  if (row("Aut(P)", 1) != "Z") failures.push_back("pi_1(Aut)");
  if (row("Diff(S1)", 0) != "Z2" || row("Diff(S1)", 1) != "Z" || row("Diff(S1)", 2) != "0")
    failures.push_back("pi_n(Diff S1)");
  std::string s = failures.empty() ? "FullDiff, IdentityComponent, inverse class, pi_1(Aut) = Z, Diff table Z2 Z 0"
                                   : "mismatch:";
  for (const auto& f : failures) s += " " + f;
  return {failures.empty(), s};
}

Result contraction_suite() {
  Rng rng(909);
  double compat = 0.0, ends = 0.0;
  for (const StructureGroup& g : all_groups()) {
    BundlePtr b = twisted_bundle(g, rng);
    LocalGaugeElement gamma = gauge_exp(random_gauge_algebra(b, rng, 0.8));
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
      compat = std::max(compat, compatibility(contract_to_identity(gamma, t)).value);
    ends = std::max({ends, sup_distance(contract_to_identity(gamma, 0.0), identity_gauge(b)),
                     sup_distance(contract_to_identity(gamma, 1.0), gamma)});
  }
  return {compat <= 1e-9 && ends <= 1e-9,
          "compatibility " + sci(compat) + " (tol 1e-9), endpoints " + sci(ends)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Result()> run;
  };
  std::vector<Criterion> criteria = {
      {"1 cocycle", cocycle_suite},
      {"2 property-sub", property_sub},
      {"3 gauge-exp", gauge_exp_suite},
      {"4 fragmentation", fragmentation_suite},
      {"5 extension", extension_suite},
      {"6 product-rule-order", product_rule_order},
      {"7 connection", connection_suite},
      {"8 classification", classification_suite},
      {"9 contraction", contraction_suite},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!r.pass) ++failed;
    std::printf("%s  %-22s %s  [%.2f s]\n", r.pass ? "PASS" : "FAIL", c.name, r.summary.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

#include "gaugeforge/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "gaugeforge/classify.hpp"
#include "gaugeforge/connection.hpp"

namespace gaugeforge::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  double residual;
  std::string detail;
};

class Runner {
 public:
  Runner(Report& report) : report_(report) {}

  void check(const std::string& name, double tolerance, const std::function<Outcome()>& body,
             bool at_least = false) {
    Row row;
    row.name = name;
    row.tolerance = tolerance;
    row.at_least = at_least;
    auto start = std::chrono::steady_clock::now();
    try {
      Outcome o = body();
      row.residual = o.residual;
      row.detail = o.detail;
      row.pass = at_least ? o.residual >= tolerance : o.residual <= tolerance;
    } catch (const std::exception& e) {
      row.residual = kInf;
      row.detail = std::string("error: ") + e.what();
      row.pass = false;
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report_.rows.push_back(std::move(row));
  }

 private:
  Report& report_;
};

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

Bundle bundle_of(const RunConfig& config) {
  try {
    return build_bundle(config);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("bundle description rejected: ") + e.what());
  }
}

AlgebraElement unit_algebra(const StructureGroup& group) {
  std::vector<double> c(group.algebra_dim(), 0.0);
  c[0] = 1.0;
  AlgebraElement x = group.from_coords(c);
  return x * (1.0 / norm(x));
}

// Smooth frame change used to produce an equivalent bundle with different
// local data.
Bundle recharted(const Bundle& b, double amplitude) {
  const StructureGroup& group = b.group();
  int dim = group.algebra_dim();
  return rechart(b, [&](int i, double x) {
    std::vector<double> c(dim);
    for (int q = 0; q < dim; ++q) c[q] = amplitude * std::cos(kTwoPi * (x + 0.23 * i + 0.4 * q));
    return group.exp(group.from_coords(c));
  });
}

void verify_bundle(Runner& run, const RunConfig& config) {
  Bundle b = bundle_of(config);
  bool single = b.cover().is_single_chart();

  run.check("cocycle", config.tolerance("cocycle"), [&] {
    Bundle checked = config.inject.cocycle > 0.0 && !single
                         ? inject_transition_error(b, config.inject.cocycle)
                         : b;
    CocycleResidual r = cocycle_residual(checked);
    std::ostringstream os;
    if (r.i >= 0)
      os << "worst at (" << r.i << "," << r.j << "," << r.l << "), x = " << r.x;
    else if (checked.cover().enlarged_triples().empty())
      os << "no triple overlaps";
    else
      os << "exact at every triple overlap";
    return Outcome{r.value, os.str()};
  });

  run.check("cocycle_injection", config.tolerance("injection_relative"), [&] {
    if (single) return Outcome{0.0, "single chart: no transitions"};
    double m = 1e-3;
    double detected = check_cocycle(inject_transition_error(b, m));
    return Outcome{std::abs(detected - m) / m,
                   "injected " + sci(m) + ", detected " + sci(detected)};
  });

  run.check("refinement_spread", b.group().chart_radius(), [&] {
    Refinement r = refine_into_chart(b);
    double spread = transition_spread(r.bundle);
    std::ostringstream os;
    os << b.cover().size() << " arcs -> " << r.bundle.cover().size() << " arcs";
    return Outcome{spread, os.str()};
  });

  run.check("refinement_invariance", config.tolerance("cocycle"), [&] {
    if (single) return Outcome{0.0, "single chart: nothing to refine"};
    Refinement r = refine_into_chart(b);
    Refinement s = subdivide(b, {0});
    double c = std::max(check_cocycle(r.bundle), check_cocycle(s.bundle));
    bool same = classify_S1(r.bundle) == classify_S1(b) && classify_S1(s.bundle) == classify_S1(b);
    return Outcome{same ? c : kInf, same ? "class unchanged" : "class changed under refinement"};
  });

  run.check("classification", 0.0, [&] {
    Pi0Class c = classify_S1(b);
    int mismatches = 0;
    mismatches += classify_S1(recharted(b, 0.4)) == c ? 0 : 1;
    mismatches += classify_S1(pullback(b, Diffeo::rotation(config.grid, 0.1))) == c ? 0 : 1;
    return Outcome{static_cast<double>(mismatches), "class=" + c.to_string()};
  });

  run.check("diff_subgroup", 0.0, [&] {
    DiffSubgroup d = diff_subgroup(b);
    bool agree = d == diff_subgroup_by_pullback(b);
    return Outcome{agree ? 0.0 : 1.0, to_string(d)};
  });
}

// Twisted loop data on flat bundles, patched local data otherwise.
LocalGaugeAlgebraElement random_algebra_element(const BundlePtr& b, Rng& rng, double amplitude,
                                                int modes = 3) {
  if (is_flat(*b)) return random_twisted_gauge_algebra(b, rng, amplitude, modes);
  return random_gauge_algebra(b, rng, amplitude);
}

LocalGaugeElement random_gauge(const BundlePtr& b, Rng& rng, double amplitude, int modes = 3) {
  return gauge_exp(random_algebra_element(b, rng, amplitude, modes));
}

// On a flat bundle a connection transforms like a gauge algebra element, so
// smooth twisted loop data serves there as well.
Connection random_smooth_connection(const BundlePtr& b, Rng& rng, double amplitude) {
  if (!is_flat(*b)) return random_connection(b, rng, amplitude);
  LocalGaugeAlgebraElement eta = random_twisted_gauge_algebra(b, rng, amplitude);
  std::vector<SampledMap<AlgebraElement>> pieces;
  for (int i = 0; i < eta.size(); ++i) pieces.push_back(eta.piece(i));
  return make_connection(b, std::move(pieces));
}

std::vector<std::pair<int, double>> product_rule_pairs(const StructureGroup& group,
                                                       const std::vector<int>& sizes) {
  std::vector<std::pair<int, double>> out;
  int dim = group.algebra_dim();
  for (int n : sizes) {
    SampleGrid grid = SampleGrid::circle(n);
    auto h = SampledMap<GroupElement>::tabulate(grid, [&](double x) {
      std::vector<double> c(dim);
      for (int q = 0; q < dim; ++q) c[q] = 0.7 * std::sin(kTwoPi * (x + 0.3 * q)) + 0.3 * std::cos(2 * kTwoPi * x);
      return group.exp(group.from_coords(c));
    });
    auto f = SampledMap<AlgebraElement>::tabulate(grid, [&](double x) {
      std::vector<double> c(dim);
      for (int q = 0; q < dim; ++q) c[q] = std::cos(kTwoPi * (x + 0.1 * q)) + 0.5 * std::sin(2 * kTwoPi * x);
      return group.from_coords(c);
    });
    out.push_back({n, product_rule_residual(group, h, f)});
  }
  return out;
}

StructureGroup order_group(const StructureGroup& g) {
  return g.algebra_dim() == 1 ? StructureGroup(BaseKind::SU2) : StructureGroup(g.base());
}

void verify_gauge(Runner& run, const RunConfig& config, Report& report) {
  BundlePtr b = share(bundle_of(config));
  const StructureGroup& group = b->group();
  Rng rng(config.seed);
  LocalGaugeAlgebraElement eta = random_algebra_element(b, rng, 0.8);
  LocalGaugeAlgebraElement eta2 = random_algebra_element(b, rng, 0.6);
  LocalGaugeElement gamma = gauge_exp(eta);
  LocalGaugeElement gamma2 = gauge_exp(eta2);

  run.check("compatibility", config.tolerance("compatibility"), [&] {
    LocalGaugeElement g = gamma;
    if (config.inject.compatibility > 0.0) {
      const ClosedCover& cover = b->cover();
      bool placed = false;
      for (int s = 0; s < g.piece(0).size() && !placed; ++s) {
        int global = g.piece(0).grid().global_index(s);
        for (int j = 1; j < cover.size() && !placed; ++j) {
          if (!g.piece(j).at_global(global) || !b->transition_sample(0, j, global)) continue;
          g.piece(0)[s] = g.piece(0)[s] * group.exp(unit_algebra(group) * config.inject.compatibility);
          placed = true;
        }
      }
      if (!placed) return Outcome{0.0, "no overlap to inject into"};
    }
    OverlapResidual r = compatibility(g);
    return Outcome{r.value, r.i >= 0 ? r.describe() : "no overlaps"};
  });

  run.check("closure", config.tolerance("compatibility"), [&] {
    double r = std::max(compatibility(gamma * gamma2).value, compatibility(inverse(gamma)).value);
    return Outcome{r, "products and inverses"};
  });

  run.check("chart_roundtrip", config.tolerance("chart_roundtrip"), [&] {
    double worst = 0.0;
    Rng local(config.seed + 17);
    for (int t = 0; t < 10; ++t) {
      LocalGaugeAlgebraElement x = random_algebra_element(b, local, 1.5);
      worst = std::max(worst, sup_distance(chart_star(chart_star_inv(x)), x));
      LocalGaugeElement g = chart_star_inv(x);
      worst = std::max(worst, sup_distance(chart_star_inv(chart_star(g)), g));
    }
    return Outcome{worst, "10 random elements, both directions"};
  });

  run.check("glue_restrict", config.tolerance("glue"), [&] {
    std::vector<SampledMap<double>> pieces;
    for (int i = 0; i < eta.size(); ++i) {
      const auto& p = eta.piece(i);
      std::vector<double> v;
      for (const auto& a : p.values()) v.push_back(norm(a));
      pieces.emplace_back(p.grid(), std::move(v));
    }
    SampledMap<double> global = glue(b->cover(), pieces, config.grid);
    auto back = restrict_to(global, b->cover());
    double worst = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i)
      for (int s = 0; s < pieces[i].size(); ++s)
        worst = std::max(worst, std::abs(back[i][s] - pieces[i][s]));
    return Outcome{worst, "|eta| glued and restricted"};
  });

  run.check("exp_homomorphism", config.tolerance("exp_homomorphism"), [&] {
    double r = sup_distance(gauge_exp(eta * 0.3) * gauge_exp(eta * 0.5), gauge_exp(eta * 0.8));
    return Outcome{r, "exp(0.3 eta) exp(0.5 eta) = exp(0.8 eta)"};
  });

  run.check("evolve_vs_exp", config.tolerance("evolve"), [&] {
    auto path = evolve([&](double) { return eta; }, b, 256);
    return Outcome{sup_distance(path.back(), gamma), "constant xi, 256 steps"};
  });

  run.check("evolve_drift", config.tolerance("evolve_drift"), [&] {
    auto path = evolve([&](double t) { return eta + eta2 * t; }, b, 256);
    double worst = 0.0;
    for (const auto& g : path) worst = std::max(worst, compatibility(g).value);
    return Outcome{worst, "xi(t) = eta + t eta'"};
  });

  run.check("contraction", config.tolerance("contraction"), [&] {
    double worst = 0.0;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
      worst = std::max(worst, compatibility(contract_to_identity(gamma, t)).value);
    worst = std::max(worst, sup_distance(contract_to_identity(gamma, 0.0), identity_gauge(b)));
    worst = std::max(worst, sup_distance(contract_to_identity(gamma, 1.0), gamma));
    return Outcome{worst, "t in {0, 0.25, 0.5, 0.75, 1}"};
  });

  StructureGroup og = order_group(group);
  run.check("product_rule", config.tolerance("product_rule"), [&] {
    auto r = product_rule_pairs(og, {512});
    return Outcome{r[0].second, og.name() + ", N = 512"};
  });

  run.check("product_rule_order", config.tolerance("product_rule_order"), [&] {
    auto study = product_rule_pairs(og, {128, 256, 512, 1024});
    report.convergence = study;
    std::ostringstream os;
    os << og.name() << ", residuals";
    for (auto [n, r] : study) os << " " << sci(r);
    return Outcome{observed_order(study), os.str()};
  }, true);
}

void verify_extension(Runner& run, const RunConfig& config) {
  BundlePtr b = share(bundle_of(config));
  const ClosedCover& cover = b->cover();
  int n = config.grid;
  Rng rng(config.seed);
  std::vector<Diffeo> gs;
  for (int t = 0; t < 5; ++t) gs.push_back(random_admissible_diffeo(cover, n, rng));
  PartitionOfUnity pou(cover);

  run.check("fragmentation_support", 0.0, [&] {
    double worst = 0.0;
    for (const Diffeo& g : gs) {
      Fragmentation f(g, pou);
      for (int i = 0; i < f.size(); ++i)
        for (int k = 0; k < n; ++k) {
          double x = static_cast<double>(k) / n;
          if (cover.arc(i).contains(x)) continue;
          worst = std::max(worst, std::abs(f.piece(i, x) - x));
        }
    }
    return Outcome{worst, "pieces outside their arcs, 5 diffeomorphisms"};
  });

  run.check("recomposition", config.tolerance("recomposition"), [&] {
    double worst = 0.0;
    for (const Diffeo& g : gs) {
      Fragmentation f(g, pou);
      for (int k = 0; k < n; ++k) {
        double x = (k + 0.37) / n;
        worst = std::max(worst, circle_distance(f.recompose(x), g(x)));
      }
    }
    return Outcome{worst, "sup |s_n-1 ... s_0 - g|"};
  });

  run.check("section_projection", config.tolerance("section"), [&] {
    double worst = 0.0;
    for (const Diffeo& g : gs)
      worst = std::max(worst, projection_residual(BundleAutomorphism::section(b, g), 64, config.seed));
    return Outcome{worst, "Q(S(g)) = g, 64 probes"};
  });

  run.check("section_chain", config.tolerance("chain"), [&] {
    Section s(b, gs[0]);
    Rng local(config.seed + 5);
    double worst = 0.0;
    int used = 0;
    for (int t = 0; t < 64; ++t) {
      BundlePoint p = random_point(*b, local);
      auto c = s.chain(p);
      if (!c) continue;
      ++used;
      worst = std::max(worst, point_distance(*b, *c, s.apply(p)));
    }
    return Outcome{worst, std::to_string(used) + " chain points"};
  });

  run.check("verticality", config.tolerance("verticality"), [&] {
    double worst = 0.0;
    for (int t = 0; t + 1 < static_cast<int>(gs.size()); ++t)
      worst = std::max(worst, omega(b, gs[t], gs[t + 1]).verticality);
    return Outcome{worst, "S(g) S(g') S(gg')^-1 over the base"};
  });

  LocalGaugeElement probe = random_gauge(b, rng, 0.7);
  double fc = kInf, fj = kInf;
  std::string factor_error;
  try {
    fc = fj = 0.0;
    for (int t = 0; t + 2 < static_cast<int>(gs.size()); ++t) {
      FactorResiduals r = factor_identities_residual(b, gs[t], gs[t + 1], gs[t + 2], probe);
      fc = std::max(fc, r.cocycle);
      fj = std::max(fj, r.conjugation);
    }
  } catch (const std::exception& e) {
    fc = fj = kInf;
    factor_error = std::string("error: ") + e.what();
  }
  run.check("factor_cocycle", config.tolerance("factor_cocycle"),
            [&] { return Outcome{fc, factor_error.empty() ? "3 triples" : factor_error}; });
  run.check("factor_conjugation", config.tolerance("factor_conjugation"),
            [&] { return Outcome{fj, factor_error.empty() ? "3 triples" : factor_error}; });

  std::vector<BundleAutomorphism> fs;
  for (int t = 0; t < 3; ++t) fs.emplace_back(random_gauge(b, rng, 0.7), gs[t]);

  run.check("aut_mul_composition", config.tolerance("associativity"), [&] {
    BundleAutomorphism f12 = aut_mul(fs[0], fs[1]);
    Rng local(config.seed + 9);
    double worst = 0.0;
    for (int t = 0; t < 64; ++t) {
      BundlePoint p = random_point(*b, local);
      worst = std::max(worst, point_distance(*b, apply_aut(f12, p), apply_aut(fs[0], apply_aut(fs[1], p))));
    }
    return Outcome{worst, "F1 F2 against F1 o F2, 64 probes"};
  });

  run.check("associativity", config.tolerance("associativity"), [&] {
    BundleAutomorphism l = aut_mul(aut_mul(fs[0], fs[1]), fs[2]);
    BundleAutomorphism r = aut_mul(fs[0], aut_mul(fs[1], fs[2]));
    return Outcome{aut_distance(l, r, 64, config.seed), "64 probes"};
  });

  run.check("inverse", config.tolerance("inverse"), [&] {
    BundleAutomorphism id = BundleAutomorphism::identity(b);
    double r = std::max(aut_distance(aut_mul(fs[0], aut_inv(fs[0])), id, 64, config.seed),
                        aut_distance(aut_mul(aut_inv(fs[0]), fs[0]), id, 64, config.seed));
    return Outcome{r, "F F^-1 = F^-1 F = id"};
  });
}

void connections(Runner& run, const RunConfig& config) {
  BundlePtr b = share(bundle_of(config));
  const StructureGroup& group = b->group();
  Rng rng(config.seed);
  Connection a = random_smooth_connection(b, rng, 1.0);
  GroupElement hol = holonomy(a);

  run.check("compatibility", config.tolerance("connection"), [&] {
    OverlapResidual r = compatibility(a);
    return Outcome{r.value, r.i >= 0 ? r.describe() : "no overlaps"};
  });

  run.check("holonomy_constant_u1", config.tolerance("holonomy"), [&] {
    StructureGroup u1(BaseKind::U1);
    BundlePtr t = share(make_trivial_bundle(u1, b->cover(), config.grid));
    double theta = 0.7;
    Connection c = constant_connection(t, u1.from_coords(std::vector<double>{theta}));
    Matrix expect(1, 1);
    expect(0, 0) = std::polar(1.0, theta);
    return Outcome{op_norm(holonomy(c).matrix() - expect), "a = i 0.7 on the trivial U1 bundle"};
  });

  run.check("holonomy_class", 0.0, [&] {
    bool same = group.component_class(hol) == classify_S1(*b);
    return Outcome{same ? 0.0 : 1.0, "class " + group.component_class(hol).to_string()};
  });

  run.check("gauge_conjugation", config.tolerance("holonomy_conjugation"), [&] {
    LocalGaugeElement g = random_gauge(b, rng, 0.8, 1);
    GroupElement h2 = holonomy(gauge_act(g, a));
    GroupElement g0 = to_equivariant(g, {b->cover().canonical_chart(0.0), 0.0, group.identity()});
    double r = std::max(distance(h2, g0 * hol * g0.inverse()), eigenvalue_distance(h2, hol));
    return Outcome{r, "hol(gamma.A) = gamma(p0) hol(A) gamma(p0)^-1"};
  });

  run.check("holonomy_refinement", config.tolerance("holonomy_refinement"), [&] {
    if (b->cover().is_single_chart()) return Outcome{0.0, "single chart: nothing to refine"};
    std::vector<int> all(b->cover().size());
    for (int i = 0; i < b->cover().size(); ++i) all[i] = i;
    Refinement r = subdivide(*b, all);
    BundlePtr rb = share(r.bundle);
    GroupElement h2 = holonomy(refine_connection(a, rb, r.parent));
    return Outcome{distance(h2, hol), std::to_string(rb->cover().size()) + " arcs"};
  });

  Diffeo g1 = random_admissible_diffeo(b->cover(), config.grid, rng);
  Diffeo g2 = random_admissible_diffeo(b->cover(), config.grid, rng);

  run.check("aut_action", config.tolerance("aut_action"), [&] {
    BundleAutomorphism f1(random_gauge(b, rng, 0.6, 1), g1), f2(random_gauge(b, rng, 0.6, 1), g2);
    Connection lhs = aut_act(aut_mul(f1, f2), a);
    Connection rhs = aut_act(f1, aut_act(f2, a));
    return Outcome{sup_distance(lhs, rhs), "(F1 F2).A = F1.(F2.A)"};
  });

  run.check("aut_holonomy", config.tolerance("aut_holonomy"), [&] {
    Connection pushed = aut_act(BundleAutomorphism::section(b, g1), a);
    GroupElement h2 = holonomy(pushed, wrap01(g1(0.0)));
    return Outcome{eigenvalue_distance(h2, hol), "eigenvalues of hol at g(x0)"};
  });
}

void classify(Runner& run, const RunConfig& config, Report& report) {
  Bundle b = bundle_of(config);
  const StructureGroup& group = b.group();
  report.homotopy = homotopy_report(b);

  run.check("classification", 0.0, [&] {
    return Outcome{0.0, "class=" + classify_S1(b).to_string()};
  });

  run.check("diff_subgroup", 0.0, [&] {
    DiffSubgroup d = diff_subgroup(b);
    return Outcome{d == diff_subgroup_by_pullback(b) ? 0.0 : 1.0, to_string(d)};
  });

  run.check("homotopy_invariance", 0.0, [&] {
    std::string ref = report.homotopy->to_text();
    int differ = homotopy_report(recharted(b, 0.4)).to_text() == ref ? 0 : 1;
    if (!b.cover().is_single_chart())
      differ += homotopy_report(make_flat_bundle(group, loop_product(b), b.cover(), b.resolution()))
                            .to_text() == ref
                    ? 0
                    : 1;
    return Outcome{static_cast<double>(differ), "reports of equivalent bundles"};
  });

  BundlePtr flat = share(is_flat(b) ? b
                                    : make_flat_bundle(group, loop_product(b), b.cover(), b.resolution()));
  Rng rng(config.seed);
  LocalGaugeAlgebraElement eta = random_gauge_algebra(flat, rng, 1.0);

  run.check("twist", config.tolerance("twist"), [&] {
    GroupElement k = twist_element(*flat);
    Rng local(config.seed + 3);
    double worst = 0.0;
    for (int t = 0; t < 32; ++t) {
      double x = local.uniform();
      AlgebraElement base = twisted_loop_eval(eta, x);
      for (int m = -2; m <= 2; ++m) {
        AlgebraElement expect = base;
        GroupElement step = m >= 0 ? k.inverse() : k;
        for (int q = 0; q < std::abs(m); ++q) expect = group.ad(step, expect);
        worst = std::max(worst, distance(twisted_loop_eval(eta, x + m), expect));
      }
    }
    return Outcome{worst, "eta(x+n) = Ad(k)^-n eta(x), n = -2..2"};
  });

  run.check("twist_seam", config.tolerance("twist"), [&] {
    double worst = 0.0;
    for (int m = -2; m <= 2; ++m)
      worst = std::max(worst, distance(twisted_loop_eval(eta, m - 1e-12), twisted_loop_eval(eta, m + 1e-12)));
    return Outcome{worst, "continuity of the unrolled element at integers"};
  });
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"verify-bundle", "verify-gauge", "verify-extension",
                                                 "connections", "classify"};
  return names;
}

std::vector<std::pair<int, double>> product_rule_study(const StructureGroup& group,
                                                       const std::vector<int>& sizes) {
  return product_rule_pairs(group, sizes);
}

double observed_order(const std::vector<std::pair<int, double>>& study) {
  double order = kInf;
  for (std::size_t q = 0; q + 1 < study.size(); ++q) {
    double ratio = study[q].second / study[q + 1].second;
    double nr = static_cast<double>(study[q + 1].first) / study[q].first;
    order = std::min(order, std::log(ratio) / std::log(nr));
  }
  return order;
}

Report run_command(const std::string& command, const RunConfig& config, bool convergence) {
  Report report;
  report.command = command;
  report.config = config;
  Runner run(report);
  if (command == "verify-bundle") {
    verify_bundle(run, config);
  } else if (command == "verify-gauge") {
    verify_gauge(run, config, report);
  } else if (command == "verify-extension") {
    verify_extension(run, config);
  } else if (command == "connections") {
    connections(run, config);
  } else if (command == "classify") {
    classify(run, config, report);
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  if (convergence && report.convergence.empty())
    report.convergence = product_rule_pairs(order_group(config_group(config)), {128, 256, 512, 1024});
  return report;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"gaugeforge: verification suites for principal bundles over the circle"};
  std::string command, config_path, out;
  std::uint64_t seed = 0;
  int grid = 0;
  bool convergence = false;
  app.add_option("command", command, "verify-bundle | verify-gauge | verify-extension | connections | classify")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--config", config_path, "JSON configuration file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "seed for random probes (overrides the config)");
  auto* grid_opt = app.add_option("--grid", grid, "grid size N (overrides the config)");
  app.add_flag("--convergence", convergence, "write the product-rule convergence curve as CSV");
  app.add_option("--out", out, "write the JSON report here (text table next to it)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Report report;
  try {
    RunConfig config = load_config(config_path);
    if (*seed_opt) config.seed = seed;
    if (*grid_opt) {
      if (grid < kMinGrid || grid > kMaxGrid)
        throw ConfigError("--grid must lie in [" + std::to_string(kMinGrid) + ", " +
                          std::to_string(kMaxGrid) + "]");
      config.grid = grid;
    }
    report = run_command(command, config, convergence);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }

  std::string text = report.to_text();
  std::cout << text;
  try {
    if (!out.empty()) {
      std::filesystem::path json_path(out);
      write_file(json_path, report.to_json(false));
      std::filesystem::path text_path = json_path;
      text_path.replace_extension(".txt");
      if (text_path == json_path) text_path += ".txt";
      write_file(text_path, text);
    }
    if (convergence) {
      std::filesystem::path csv = out.empty() ? std::filesystem::path("convergence.csv")
                                              : std::filesystem::path(out).replace_extension("");
      if (!out.empty()) csv += "_convergence.csv";
      write_file(csv, report.convergence_csv());
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return report.all_pass() ? 0 : 1;
}

}  // namespace gaugeforge::cli

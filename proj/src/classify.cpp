#include "gaugeforge/classify.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include <Eigen/Geometry>

namespace gaugeforge {

std::string to_string(DiffSubgroup d) {
  return d == DiffSubgroup::FullDiff ? "FullDiff" : "IdentityComponent";
}

DiffSubgroup diff_subgroup(const Bundle& b) {
  Pi0Class c = classify_S1(b);
  return c == c.inverse() ? DiffSubgroup::FullDiff : DiffSubgroup::IdentityComponent;
}

DiffSubgroup diff_subgroup_by_pullback(const Bundle& b) {
  return equivalent(pullback(b, Reflection{}), b) ? DiffSubgroup::FullDiff
                                                  : DiffSubgroup::IdentityComponent;
}

bool is_flat(const Bundle& b, double tol) {
  for (const TransitionPiece& p : b.pieces())
    for (const GroupElement& k : p.values.values())
      if (!(distance(k, p.values[0]) <= tol)) return false;
  return true;
}

namespace {

struct Unrolling {
  std::vector<LoopSegment> segs;
  std::vector<GroupElement> frame;  // transport from the basepoint chart, per segment
  GroupElement loop;
};

Unrolling unroll(const Bundle& b) {
  if (!is_flat(b)) throw DomainError("twisted loop picture needs a flat bundle");
  Unrolling u;
  u.segs = loop_schedule(b.cover(), 0.0);
  int c0 = b.cover().canonical_chart(0.0);
  GroupElement h = b.group().identity();
  int chart = c0;
  for (const LoopSegment& seg : u.segs) {
    if (seg.chart != chart) {
      h = h * b.transition(chart, seg.chart, seg.from);
      chart = seg.chart;
    }
    u.frame.push_back(h);
  }
  if (chart != c0) h = h * b.transition(chart, c0, 0.0);
  u.loop = h;
  return u;
}

}  // namespace

GroupElement twist_element(const Bundle& b) { return unroll(b).loop.inverse(); }

AlgebraElement twisted_loop_eval(const LocalGaugeAlgebraElement& eta, double x) {
  const Bundle& b = eta.bundle();
  const StructureGroup& group = b.group();
  Unrolling u = unroll(b);
  double n = std::floor(x);
  double y = x - n;
  std::size_t s = 0;
  while (s + 1 < u.segs.size() && y >= u.segs[s].to) ++s;
  AlgebraElement v = group.ad(u.frame[s], eta.value(u.segs[s].chart, y));
  GroupElement step = n >= 0 ? u.loop : u.loop.inverse();
  for (long q = 0; q < static_cast<long>(std::abs(n)); ++q) v = group.ad(step, v);
  return v;
}

LocalGaugeAlgebraElement from_twisted_loop(const BundlePtr& b,
                                           const std::function<AlgebraElement(double)>& f) {
  const Bundle& bundle = *b;
  const StructureGroup& group = bundle.group();
  Unrolling u = unroll(bundle);
  return make_gauge_algebra(b, [&] {
    std::vector<SampledMap<AlgebraElement>> pieces;
    for (int i = 0; i < bundle.cover().size(); ++i) {
      SampleGrid grid = chart_grid(bundle, i);
      std::vector<AlgebraElement> v;
      for (int k = 0; k < grid.size(); ++k) {
        double x = grid.position(k);
        std::size_t s = 0;
        while (s + 1 < u.segs.size() && x >= u.segs[s].to) ++s;
        int c = u.segs[s].chart;
        AlgebraElement value = group.ad(u.frame[s].inverse(), f(x));
        if (c != i) {
          const GroupElement* kic = bundle.transition_sample(i, c, grid.global_index(k));
          value = group.ad(kic ? *kic : bundle.transition(i, c, x), value);
        }
        v.push_back(value);
      }
      pieces.emplace_back(grid, std::move(v));
    }
    return pieces;
  }());
}

namespace {

// X with Ad(exp X) = Ad(h) on the algebra; empty when Ad(h) is outer.
std::optional<AlgebraElement> inner_generator(const StructureGroup& group, const GroupElement& h) {
  switch (group.base()) {
    case BaseKind::U1:
      return group.zero();
    case BaseKind::O2:
      if (group.component_class(h).reflection() != 0) return std::nullopt;
      return group.zero();
    case BaseKind::SU2: {
      GroupElement m(BaseKind::SU2, h.matrix());
      try {
        return StructureGroup(BaseKind::SU2).log(m);
      } catch (const OutOfChart&) {
        return StructureGroup(BaseKind::SU2).log(GroupElement(BaseKind::SU2, -h.matrix()));
      }
    }
    case BaseKind::SO3: {
      Eigen::Matrix3d r;
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) r(a, c) = h.matrix()(a, c).real();
      Eigen::AngleAxisd aa(r);
      Eigen::Vector3d w = aa.angle() * aa.axis();
      return group.from_coords(std::vector<double>{w(0), w(1), w(2)});
    }
  }
  return std::nullopt;
}

}  // namespace

std::function<AlgebraElement(double)> random_twisted_loop(const Bundle& b, Rng& rng,
                                                          double amplitude, int modes) {
  StructureGroup group = b.group();
  GroupElement h = unroll(b).loop;
  std::optional<AlgebraElement> gen = inner_generator(group, h);
  int dim = group.algebra_dim();
  std::vector<double> coeff(static_cast<std::size_t>(dim) * (modes + 1) * 2);
  for (double& c : coeff) c = rng.uniform(-1.0, 1.0);
  // Half-integer frequencies for the reflection twist.
  double shift = gen ? 0.0 : 0.5;
  auto zeta = [=](double x) {
    std::vector<double> c(dim, 0.0);
    for (int a = 0; a < dim; ++a)
      for (int q = 0; q <= modes; ++q) {
        std::size_t at = (static_cast<std::size_t>(a) * (modes + 1) + q) * 2;
        double w = kTwoPi * (q + shift) * x;
        c[a] += (coeff[at] * std::cos(w) + coeff[at + 1] * std::sin(w)) / (q + 1);
      }
    return group.from_coords(c);
  };
  double sup = 0.0;
  for (int k = 0; k < 256; ++k) sup = std::max(sup, norm(zeta(k / 256.0)));
  double scale = sup > 0.0 ? amplitude / sup : 0.0;
  AlgebraElement x_gen = gen ? *gen : group.zero();
  return [=](double x) {
    AlgebraElement z = zeta(x) * scale;
    if (!gen) return z;
    return group.ad(group.exp(x_gen * x), z);
  };
}

LocalGaugeAlgebraElement random_twisted_gauge_algebra(const BundlePtr& b, Rng& rng,
                                                      double amplitude, int modes) {
  return from_twisted_loop(b, random_twisted_loop(*b, rng, amplitude, modes));
}

AbelianGroup AbelianGroup::operator+(const AbelianGroup& o) const {
  AbelianGroup r{factors};
  r.factors.insert(r.factors.end(), o.factors.begin(), o.factors.end());
  std::stable_sort(r.factors.begin(), r.factors.end());
  return r;
}

std::string AbelianGroup::to_string() const {
  if (factors.empty()) return "0";
  std::string s;
  for (std::size_t q = 0; q < factors.size(); ++q) {
    if (q) s += "+";
    s += factors[q] == 0 ? "Z" : "Z" + std::to_string(factors[q]);
  }
  return s;
}

AbelianGroup homotopy_group(const StructureGroup& group, int n) {
  if (n < 0 || n > 4) throw DomainError("homotopy facts are tabulated for n = 0..4");
  using G = AbelianGroup;
  // pi_0 .. pi_4 of U(1), SU(2), SO(3), O(2).
  static const G table[4][5] = {
      {G::trivial(), G::integers(), G::trivial(), G::trivial(), G::trivial()},
      {G::trivial(), G::trivial(), G::trivial(), G::integers(), G::cyclic(2)},
      {G::trivial(), G::cyclic(2), G::trivial(), G::integers(), G::cyclic(2)},
      {G::cyclic(2), G::integers(), G::trivial(), G::trivial(), G::trivial()},
  };
  G g = table[static_cast<int>(group.base())][n];
  if (n == 0) g = g + G::cyclic(group.cyclic_order());
  return g;
}

const HomotopyRow* HomotopyReport::find(const std::string& space, int n) const {
  for (const HomotopyRow& r : rows)
    if (r.space == space && r.n == n) return &r;
  return nullptr;
}

std::string HomotopyReport::to_text() const {
  std::ostringstream os;
  os << "group " << group << ", class " << bundle_class << ", pi_0(K) = " << pi0_structure
     << ", Diff(S1)_P = " << gaugeforge::to_string(diff_subgroup) << "\n";
  for (const HomotopyRow& r : rows)
    os << "pi_" << r.n << "(" << r.space << ") = " << r.group << "  [" << r.reason << "]\n";
  for (const std::string& n : notes) os << "note: " << n << "\n";
  return os.str();
}

HomotopyReport homotopy_report(const Bundle& b) {
  const StructureGroup& group = b.group();
  using G = AbelianGroup;
  HomotopyReport rep;
  Pi0Class cls = classify_S1(b);
  rep.group = group.name();
  rep.bundle_class = cls.to_string();
  rep.pi0_structure = homotopy_group(group, 0).to_string();
  rep.diff_subgroup = diff_subgroup(b);
  bool full = rep.diff_subgroup == DiffSubgroup::FullDiff;

  auto add = [&](std::string space, int n, std::string g, std::string reason) {
    rep.rows.push_back({std::move(space), n, std::move(g), std::move(reason)});
  };

  for (int n = 0; n <= 3; ++n) add("K", n, homotopy_group(group, n).to_string(), "fact table");

  add("Diff(S1)", 0, "Z2", "orientation");
  add("Diff(S1)", 1, "Z", "Diff(S1)_0 retracts onto the rotations");
  add("Diff(S1)", 2, "0", "n >= 2");

  add("Diff(S1)_P", 0, full ? "Z2" : "0",
      full ? "[k] = [k]^-1, reflections preserve P" : "[k] != [k]^-1, only Diff(S1)_0");
  add("Diff(S1)_P", 1, "Z", "same identity component as Diff(S1)");
  add("Diff(S1)_P", 2, "0", "n >= 2");

  // Ad(k) acts on K_0 by an inner automorphism except for the reflection
  // class of O(2), where it inverts SO(2).
  bool outer_twist = group.has_reflection() && cls.reflection() != 0;
  std::vector<std::optional<G>> gau(4);
  for (int n = 1; n <= 3; ++n)
    gau[n] = outer_twist ? G::trivial() : homotopy_group(group, n) + homotopy_group(group, n + 1);
  if (!group.has_reflection())
    gau[0] = homotopy_group(group, 1) + G::cyclic(group.cyclic_order());

  if (gau[0])
    add("Gau(P)", 0, gau[0]->to_string(), "pi_1(K_0) + pi_0(K), inner twist");
  else
    add("Gau(P)", 0, "not tabulated", "disconnected K with reflections");
  for (int n = 1; n <= 3; ++n)
    add("Gau(P)", n, gau[n]->to_string(),
        outer_twist ? "twisted loops in SO(2) under inversion" : "pi_n(K) + pi_n+1(K)");

  G diff0 = full ? G::cyclic(2) : G::trivial();
  if (!gau[0]) {
    add("Aut(P)", 0, "not tabulated", "pi_0(Gau(P)) not tabulated");
  } else if (diff0.factors.empty()) {
    add("Aut(P)", 0, gau[0]->to_string(), "pi_0(Diff(S1)_P) = 0");
  } else if (gau[0]->factors.empty()) {
    add("Aut(P)", 0, diff0.to_string(), "pi_0(Gau(P)) = 0");
  } else {
    add("Aut(P)", 0, "extension of " + diff0.to_string() + " by " + gau[0]->to_string(),
        "rotations lift, so pi_0(Gau(P)) injects");
  }
  add("Aut(P)", 1, (*gau[1] + G::integers()).to_string(),
      "rotation loop lifts to a generator, delta_1 vanishes");
  for (int n = 2; n <= 3; ++n)
    add("Aut(P)", n, gau[n]->to_string(), "Diff(S1)_0 is a K(Z,1)");

  rep.notes.push_back(
      "every automorphism of the twisted loop algebra arising from Aut(P_k) is an external "
      "result, stated as context and not computed");
  return rep;
}

}  // namespace gaugeforge

#include "gaugeforge/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace gaugeforge {

Bundle::Bundle(StructureGroup group, ClosedCover cover, int resolution,
               std::vector<TransitionPiece> pieces)
    : group_(group), cover_(std::move(cover)), resolution_(resolution), pieces_(std::move(pieces)) {
  int n = cover_.size();
  index_.assign(static_cast<std::size_t>(n) * n, {});
  for (std::size_t p = 0; p < pieces_.size(); ++p) {
    const auto& pc = pieces_[p];
    if (pc.i < 0 || pc.j < 0 || pc.i >= n || pc.j >= n || pc.i == pc.j)
      throw CoverError("transition piece with invalid chart indices");
    index_[static_cast<std::size_t>(pc.i) * n + pc.j].push_back(static_cast<int>(p));
  }
}

Bundle Bundle::assemble(StructureGroup group, ClosedCover cover, int resolution,
                        std::vector<TransitionPiece> pieces) {
  return Bundle(group, std::move(cover), resolution, std::move(pieces));
}

GroupElement Bundle::transition(int i, int j, double x) const {
  if (i == j) return group_.identity();
  for (int p : index_.at(static_cast<std::size_t>(i) * cover_.size() + j)) {
    const auto& pc = pieces_[p];
    if (pc.domain.contains(x, 1e-9)) return pc.values(x);
  }
  std::ostringstream os;
  os << "transition k_" << i << j << " is not defined at x = " << wrap01(x);
  throw DomainError(os.str());
}

const GroupElement* Bundle::transition_sample(int i, int j, int global) const {
  for (int p : index_.at(static_cast<std::size_t>(i) * cover_.size() + j))
    if (const GroupElement* v = pieces_[p].values.at_global(global)) return v;
  return nullptr;
}

BundlePoint Bundle::change_chart(const BundlePoint& p, int j) const {
  if (j == p.chart) return p;
  return {j, p.x, transition(j, p.chart, p.x) * p.k};
}

BundlePoint Bundle::canonical(const BundlePoint& p) const {
  return change_chart({p.chart, wrap01(p.x), p.k}, cover_.canonical_chart(p.x));
}

BundlePoint Bundle::section_point(double x) const {
  return {cover_.canonical_chart(x), wrap01(x), group_.identity()};
}

std::vector<TransitionPiece> tabulate_transitions(const StructureGroup& group,
                                                  const ClosedCover& cover, int resolution,
                                                  const TransitionFn& k) {
  std::vector<TransitionPiece> pieces;
  for (const auto& ov : cover.enlarged_overlaps()) {
    for (const Arc& c : ov.components) {
      SampleGrid grid = SampleGrid::on_arc(c, resolution);
      auto fwd = SampledMap<GroupElement>::tabulate(grid, [&](double x) {
        GroupElement v = k(ov.i, ov.j, c, x);
        if (!group.contains(v)) throw InvariantViolation("transition value outside the group");
        return v;
      });
      std::vector<GroupElement> back;
      back.reserve(fwd.size());
      for (const auto& v : fwd.values()) back.push_back(v.inverse());
      pieces.push_back({ov.i, ov.j, c, fwd});
      pieces.push_back({ov.j, ov.i, c, SampledMap<GroupElement>(grid, std::move(back))});
    }
  }
  return pieces;
}

CocycleResidual cocycle_residual(const Bundle& b) {
  CocycleResidual worst;
  int n = b.cover().size();
  for (const auto& pc : b.pieces()) {
    const SampleGrid& grid = pc.values.grid();
    for (int s = 0; s < grid.size(); ++s) {
      int g = grid.global_index(s);
      const GroupElement& kij = pc.values[s];
      auto consider = [&](double r, int l) {
        if (!(r <= worst.value)) {
          worst = {r, pc.i, pc.j, l, grid.position(s)};
          if (std::isnan(r)) worst.value = std::numeric_limits<double>::infinity();
        }
      };
      if (const GroupElement* kji = b.transition_sample(pc.j, pc.i, g))
        consider(distance(kij * *kji, b.group().identity()), pc.i);
      for (int l = 0; l < n; ++l) {
        if (l == pc.i || l == pc.j) continue;
        const GroupElement* kjl = b.transition_sample(pc.j, l, g);
        const GroupElement* kil = b.transition_sample(pc.i, l, g);
        if (kjl && kil) consider(distance(kij * *kjl, *kil), l);
      }
    }
  }
  return worst;
}

double check_cocycle(const Bundle& b) { return cocycle_residual(b).value; }

Bundle make_bundle(const StructureGroup& group, const ClosedCover& cover, int resolution,
                   std::vector<TransitionPiece> pieces) {
  Bundle b = Bundle::assemble(group, cover, resolution, std::move(pieces));
  for (const auto& ov : cover.enlarged_overlaps()) {
    for (const Arc& c : ov.components) {
      double mid = c.start() + c.length() / 2.0;
      for (auto [i, j] : {std::pair{ov.i, ov.j}, std::pair{ov.j, ov.i}}) {
        try {
          b.transition(i, j, mid);
        } catch (const DomainError&) {
          std::ostringstream os;
          os << "missing transition k_" << i << j << " near x = " << wrap01(mid);
          throw CoverError(os.str());
        }
      }
    }
  }
  CocycleResidual r = cocycle_residual(b);
  if (!(r.value <= kCocycleTolerance)) {
    std::ostringstream os;
    os << "cocycle condition violated: residual " << r.value << " for (" << r.i << "," << r.j
       << "," << r.l << ") at x = " << r.x;
    throw CocycleError(os.str(), r.value);
  }
  return b;
}

Bundle make_bundle(const StructureGroup& group, const ClosedCover& cover, int resolution,
                   const TransitionFn& k) {
  return make_bundle(group, cover, resolution, tabulate_transitions(group, cover, resolution, k));
}

Bundle make_trivial_bundle(const StructureGroup& group, const ClosedCover& cover, int resolution) {
  GroupElement e = group.identity();
  return make_bundle(group, cover, resolution,
                     [&](int, int, const Arc&, double) { return e; });
}

Bundle make_flat_bundle(const StructureGroup& group, const GroupElement& hol,
                        const ClosedCover& cover, int resolution) {
  if (!group.contains(hol)) throw GroupMismatch("holonomy is not an element of " + group.name());
  int n = cover.size();
  GroupElement e = group.identity();
  if (n == 1) {
    if (distance(hol, e) == 0.0) return make_trivial_bundle(group, cover, resolution);
    throw CoverError("a flat bundle with nontrivial holonomy needs at least two arcs");
  }
  // Each chart is lifted to an interval of R around its centre; a component
  // whose lifts in charts i and j differ by m carries hol^{-m}.
  std::vector<double> centre(n);
  for (int i = 0; i < n; ++i) {
    double c = wrap01(cover.arc(i).start() + cover.arc(i).length() / 2.0);
    centre[i] = c > 1.0 - 1e-9 ? 0.0 : c;
  }
  auto lift = [&](int i, double x) { return centre[i] + circle_delta(x, centre[i]); };
  GroupElement hinv = hol.inverse();
  return make_bundle(group, cover, resolution, [&](int i, int j, const Arc& c, double) {
    double mid = c.start() + c.length() / 2.0;
    long m = std::lround(lift(j, mid) - lift(i, mid));
    if (m == 0) return e;
    return m > 0 ? hinv : hol;
  });
}

Bundle rechart(const Bundle& b, const std::function<GroupElement(int i, double x)>& lambda) {
  std::vector<TransitionPiece> pieces;
  for (const auto& pc : b.pieces()) {
    const SampleGrid& grid = pc.values.grid();
    std::vector<GroupElement> v;
    v.reserve(grid.size());
    for (int s = 0; s < grid.size(); ++s) {
      double x = grid.position(s);
      v.push_back(lambda(pc.i, x).inverse() * pc.values[s] * lambda(pc.j, x));
    }
    pieces.push_back({pc.i, pc.j, pc.domain, SampledMap<GroupElement>(grid, std::move(v))});
  }
  return make_bundle(b.group(), b.cover(), b.resolution(), std::move(pieces));
}

namespace {

double component_spread(const Bundle& b, int i, int j, const Arc& c) {
  const StructureGroup& group = b.group();
  GroupElement centre_inv = b.transition(i, j, c.start() + c.length() / 2.0).inverse();
  double worst = 0.0;
  for (int g : grid_indices(c, b.resolution())) {
    const GroupElement* v = b.transition_sample(i, j, g);
    GroupElement k = v ? *v : b.transition(i, j, static_cast<double>(g) / b.resolution());
    try {
      worst = std::max(worst, norm(group.log(centre_inv * k)));
    } catch (const OutOfChart&) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

double enlargement_margin(const ClosedCover& cover, int i) {
  const Arc& v = cover.arc(i);
  const Arc& u = cover.enlargement(i);
  double left = u.offset(v.start());
  double right = u.length() - left - v.length();
  return std::min(left, right);
}

// Bundle on a cover whose arcs lie inside the arcs of b's cover, with
// transitions copied from the parents.
Bundle restrict_to_subcover(const Bundle& b, const std::vector<Arc>& arcs,
                            const std::vector<double>& margins, const std::vector<int>& parent) {
  std::vector<Arc> enlarged;
  for (std::size_t a = 0; a < arcs.size(); ++a) enlarged.push_back(arcs[a].enlarged(margins[a]));
  ClosedCover cover(arcs, enlarged);
  GroupElement e = b.group().identity();
  std::vector<TransitionPiece> pieces;
  for (const auto& ov : cover.enlarged_overlaps()) {
    for (const Arc& c : ov.components) {
      SampleGrid grid = SampleGrid::on_arc(c, b.resolution());
      for (auto [i, j] : {std::pair{ov.i, ov.j}, std::pair{ov.j, ov.i}}) {
        int p = parent[i], q = parent[j];
        std::vector<GroupElement> v;
        v.reserve(grid.size());
        for (int s = 0; s < grid.size(); ++s) {
          if (p == q) {
            v.push_back(e);
          } else if (const GroupElement* k = b.transition_sample(p, q, grid.global_index(s))) {
            v.push_back(*k);
          } else {
            v.push_back(b.transition(p, q, grid.position(s)));
          }
        }
        pieces.push_back({i, j, c, SampledMap<GroupElement>(grid, std::move(v))});
      }
    }
  }
  return make_bundle(b.group(), cover, b.resolution(), std::move(pieces));
}

}  // namespace

double transition_spread(const Bundle& b) {
  double worst = 0.0;
  for (const auto& ov : b.cover().overlaps())
    for (const Arc& c : ov.components) worst = std::max(worst, component_spread(b, ov.i, ov.j, c));
  return worst;
}

Refinement subdivide(const Bundle& b, const std::vector<int>& split) {
  const ClosedCover& cover = b.cover();
  if (cover.is_single_chart()) throw CoverError("the single-chart cover cannot be subdivided");
  std::vector<Arc> arcs;
  std::vector<double> margins;
  std::vector<int> parent;
  for (int a = 0; a < cover.size(); ++a) {
    double m = enlargement_margin(cover, a);
    if (std::find(split.begin(), split.end(), a) == split.end()) {
      arcs.push_back(cover.arc(a));
      margins.push_back(m);
      parent.push_back(a);
      continue;
    }
    // Each half keeps half of the overlap at the far end of the arc, so no
    // sliver overlaps appear next to the neighbours.
    double s = cover.arc(a).start(), len = cover.arc(a).length();
    double head = 0.0, tail = 0.0;
    for (const Overlap& ov : cover.overlaps()) {
      if (ov.i != a && ov.j != a) continue;
      for (const Arc& c : ov.components) {
        if (c.length() >= len) continue;
        if (circle_distance(c.start(), s) < 1e-12) head = std::max(head, c.length());
        if (circle_distance(c.end(), s + len) < 1e-12) tail = std::max(tail, c.length());
      }
    }
    if (head == 0.0) head = len / 4.0;
    if (tail == 0.0) tail = len / 4.0;
    arcs.emplace_back(s, len - tail / 2.0);
    arcs.emplace_back(s + head / 2.0, len - head / 2.0);
    for (int t = 0; t < 2; ++t) {
      margins.push_back(m);
      parent.push_back(a);
    }
  }
  return {restrict_to_subcover(b, arcs, margins, parent), parent};
}

Refinement refine_into_chart(const Bundle& b) {
  const ClosedCover& cover = b.cover();
  std::vector<int> parent(cover.size());
  std::iota(parent.begin(), parent.end(), 0);
  if (transition_spread(b) < b.group().chart_radius()) return {b, parent};

  std::vector<Arc> arcs = cover.arcs();
  std::vector<double> margins;
  for (int i = 0; i < cover.size(); ++i) margins.push_back(enlargement_margin(cover, i));
  double radius = b.group().chart_radius();
  for (int round = 0; round < 40; ++round) {
    Bundle current = restrict_to_subcover(b, arcs, margins, parent);
    std::vector<bool> split(arcs.size(), false);
    bool any = false;
    for (const auto& ov : current.cover().overlaps()) {
      for (const Arc& c : ov.components) {
        if (component_spread(current, ov.i, ov.j, c) >= radius) {
          int longer = arcs[ov.j].length() > arcs[ov.i].length() ? ov.j : ov.i;
          split[longer] = any = true;
        }
      }
    }
    if (!any) return {current, parent};
    std::vector<Arc> next_arcs;
    std::vector<double> next_margins;
    std::vector<int> next_parent;
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      if (!split[a]) {
        next_arcs.push_back(arcs[a]);
        next_margins.push_back(margins[a]);
        next_parent.push_back(parent[a]);
        continue;
      }
      double s = arcs[a].start(), len = arcs[a].length();
      double half = len / 2.0 + len / 8.0;
      next_arcs.emplace_back(s, half);
      next_arcs.emplace_back(s + len - half, half);
      for (int t = 0; t < 2; ++t) {
        next_margins.push_back(margins[a]);
        next_parent.push_back(parent[a]);
      }
    }
    arcs = std::move(next_arcs);
    margins = std::move(next_margins);
    parent = std::move(next_parent);
  }
  throw Error("refinement did not bring the transitions into the chart domain");
}

namespace {

// Bundle on `cover` with k'_ij(x) = k_ij(phi(x)).
Bundle pull_along(const Bundle& b, const ClosedCover& cover, const std::function<double(double)>& phi) {
  std::vector<TransitionPiece> pieces;
  for (const auto& ov : cover.enlarged_overlaps()) {
    for (const Arc& c : ov.components) {
      SampleGrid grid = SampleGrid::on_arc(c, b.resolution());
      for (auto [i, j] : {std::pair{ov.i, ov.j}, std::pair{ov.j, ov.i}}) {
        auto v = SampledMap<GroupElement>::tabulate(
            grid, [&, i = i, j = j](double x) { return b.transition(i, j, phi(x)); });
        pieces.push_back({i, j, c, std::move(v)});
      }
    }
  }
  return Bundle::assemble(b.group(), cover, b.resolution(), std::move(pieces));
}

}  // namespace

Bundle pullback(const Bundle& b, const Diffeo& g) {
  const ClosedCover& cover = b.cover();
  if (cover.is_single_chart()) return b;
  auto pull_arc = [&](const Arc& a) {
    double s = g.inverse_at(a.start());
    double e = g.inverse_at(a.end());
    return Arc(s, e - s);
  };
  std::vector<Arc> arcs, enlarged;
  for (int i = 0; i < cover.size(); ++i) {
    arcs.push_back(pull_arc(cover.arc(i)));
    enlarged.push_back(pull_arc(cover.enlargement(i)));
  }
  return pull_along(b, ClosedCover(arcs, enlarged), [&](double x) { return g(x); });
}

Bundle pullback(const Bundle& b, const Reflection& r) {
  const ClosedCover& cover = b.cover();
  if (cover.is_single_chart()) {
    std::vector<TransitionPiece> none;
    return Bundle::assemble(b.group(), cover, b.resolution(), none);
  }
  auto pull_arc = [](const Arc& a) { return Arc(-a.end(), a.length()); };
  std::vector<Arc> arcs, enlarged;
  for (int i = 0; i < cover.size(); ++i) {
    arcs.push_back(pull_arc(cover.arc(i)));
    enlarged.push_back(pull_arc(cover.enlargement(i)));
  }
  return pull_along(b, ClosedCover(arcs, enlarged), [&](double x) { return r(x); });
}

std::vector<LoopSegment> loop_schedule(const ClosedCover& cover, double x0) {
  if (cover.is_single_chart()) return {{0, 0.0, 1.0}};
  std::vector<double> cuts{0.0, 1.0};
  for (const Arc& a : cover.arcs()) {
    for (double e : {a.start(), a.end()}) {
      double t = wrap01(e - x0);
      if (t > 1e-12 && t < 1.0 - 1e-12) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<LoopSegment> segs;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double a = cuts[s], b = cuts[s + 1];
    if (b - a < 1e-12) continue;
    int chart = cover.canonical_chart(x0 + 0.5 * (a + b));
    if (!segs.empty() && segs.back().chart == chart) {
      segs.back().to = b;
    } else {
      segs.push_back({chart, a, b});
    }
  }
  return segs;
}

GroupElement loop_product(const Bundle& b, double x0) {
  auto segs = loop_schedule(b.cover(), x0);
  GroupElement h = b.group().identity();
  for (std::size_t s = 1; s < segs.size(); ++s)
    h = h * b.transition(segs[s - 1].chart, segs[s].chart, x0 + segs[s].from);
  if (segs.back().chart != segs.front().chart)
    h = h * b.transition(segs.back().chart, segs.front().chart, x0);
  return h;
}

Bundle inject_transition_error(const Bundle& b, double magnitude) {
  std::vector<TransitionPiece> pieces = b.pieces();
  if (pieces.empty()) throw CoverError("no transitions to perturb on a single-chart cover");
  const StructureGroup& group = b.group();
  std::vector<double> c(group.algebra_dim(), 0.0);
  c[0] = 1.0;
  AlgebraElement x = group.from_coords(c);
  x = x * (magnitude / norm(x));
  SampledMap<GroupElement>& v = pieces.front().values;
  int mid = v.size() / 2;
  v[mid] = v[mid] * group.exp(x);
  return Bundle::assemble(group, b.cover(), b.resolution(), std::move(pieces));
}

Pi0Class classify_S1(const Bundle& b) { return b.group().component_class(loop_product(b, 0.0)); }

bool equivalent(const Bundle& a, const Bundle& b) {
  return a.group() == b.group() && classify_S1(a) == classify_S1(b);
}

}  // namespace gaugeforge

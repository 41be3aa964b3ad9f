#pragma once

#include <functional>
#include <vector>

#include "gaugeforge/liegroup.hpp"
#include "gaugeforge/manifold.hpp"

namespace gaugeforge {

// Transition map k_ij sampled on one connected component of U_i n U_j.
struct TransitionPiece {
  int i;
  int j;
  Arc domain;
  SampledMap<GroupElement> values;
};

// Point of P written as sigma_i(x) . k.
struct BundlePoint {
  int chart;
  double x;
  GroupElement k;
};

// Principal K-bundle over the circle given by Cech data. Conventions:
// sigma_i . k_ij = sigma_j, so (i, x, k) and (j, x, k_ji(x) k) are the same
// point. Both k_ij and k_ji are stored.
class Bundle {
 public:
  // No validation; see make_bundle.
  static Bundle assemble(StructureGroup group, ClosedCover cover, int resolution,
                         std::vector<TransitionPiece> pieces);

  const StructureGroup& group() const { return group_; }
  const ClosedCover& cover() const { return cover_; }
  int resolution() const { return resolution_; }
  const std::vector<TransitionPiece>& pieces() const { return pieces_; }

  GroupElement transition(int i, int j, double x) const;
  // Sample of k_ij at a global grid index, or nullptr.
  const GroupElement* transition_sample(int i, int j, int global) const;

  BundlePoint change_chart(const BundlePoint& p, int j) const;
  BundlePoint canonical(const BundlePoint& p) const;
  BundlePoint section_point(double x) const;  // sigma_i(x) in the canonical chart

 private:
  Bundle(StructureGroup group, ClosedCover cover, int resolution,
         std::vector<TransitionPiece> pieces);

  StructureGroup group_;
  ClosedCover cover_;
  int resolution_;
  std::vector<TransitionPiece> pieces_;
  std::vector<std::vector<int>> index_;
};

inline constexpr double kCocycleTolerance = 1e-10;

// k_ij on a component of U_i n U_j, for i < j; k_ji is taken as the inverse.
using TransitionFn = std::function<GroupElement(int i, int j, const Arc& component, double x)>;

std::vector<TransitionPiece> tabulate_transitions(const StructureGroup& group,
                                                  const ClosedCover& cover, int resolution,
                                                  const TransitionFn& k);

// Validates the cocycle condition; throws CocycleError with the worst residual.
Bundle make_bundle(const StructureGroup& group, const ClosedCover& cover, int resolution,
                   std::vector<TransitionPiece> pieces);
Bundle make_bundle(const StructureGroup& group, const ClosedCover& cover, int resolution,
                   const TransitionFn& k);
Bundle make_trivial_bundle(const StructureGroup& group, const ClosedCover& cover, int resolution);

// Charts lifted to intervals of R around their centres; a component whose
// lifts in charts i and j differ by m carries k_ij = hol^{-m}. The loop
// product k_01 k_12 ... k_{n-1,0} equals hol.
Bundle make_flat_bundle(const StructureGroup& group, const GroupElement& hol,
                        const ClosedCover& cover, int resolution);

struct CocycleResidual {
  double value = 0.0;
  int i = -1;
  int j = -1;
  int l = -1;  // equals i for the inverse relation k_ij k_ji = e
  double x = 0.0;
};

// Worst of |k_ij k_ji - e| and |k_ij k_jl - k_il| over shared grid points.
CocycleResidual cocycle_residual(const Bundle& b);
double check_cocycle(const Bundle& b);

// k'_ij = lambda_i^{-1} k_ij lambda_j, the same bundle in new sections.
Bundle rechart(const Bundle& b, const std::function<GroupElement(int i, double x)>& lambda);

// Largest |log(k(c)^{-1} k(x))| over overlap components of the closed arcs,
// c the component midpoint; infinite when some value is outside the chart.
double transition_spread(const Bundle& b);

struct Refinement {
  Bundle bundle;
  std::vector<int> parent;  // refined arc -> original arc
};

// Bisects arcs until every transition maps each overlap component into a
// single translate k(c) exp(W') of the chart domain.
Refinement refine_into_chart(const Bundle& b);
// Splits each listed arc into two overlapping pieces: one drops the far half
// of the arc's trailing overlap, the other the near half of its leading one.
Refinement subdivide(const Bundle& b, const std::vector<int>& split);

Bundle pullback(const Bundle& b, const Diffeo& g);
Bundle pullback(const Bundle& b, const Reflection& r);

// Path through the cover starting at x0: pieces of [0, 1] (offsets from x0)
// on which the canonical chart is constant.
struct LoopSegment {
  int chart;
  double from;
  double to;
};
std::vector<LoopSegment> loop_schedule(const ClosedCover& cover, double x0);

// Ordered product of the transitions met along the loop from x0, expressed
// in the chart of the first segment.
GroupElement loop_product(const Bundle& b, double x0 = 0.0);

// Copy of b with k_ij multiplied by exp(magnitude X), |X| = 1, at the middle
// sample of the first transition piece (k_ji untouched). Not validated.
Bundle inject_transition_error(const Bundle& b, double magnitude);

Pi0Class classify_S1(const Bundle& b);
bool equivalent(const Bundle& a, const Bundle& b);

}  // namespace gaugeforge

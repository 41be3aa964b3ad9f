#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "gaugeforge/gauge.hpp"

namespace gaugeforge {

// Admissible neighbourhood of the identity in Diff(S^1) for base parts of
// automorphisms. `partial_slope` bounds |(W_m u)'| for every partial field of
// the fragmentation, W_m = f_m + ... + f_{n-1}.
struct NeighbourhoodBounds {
  double sup_displacement = 0.05;
  double sup_slope = 0.3;
  double partial_slope = 0.5;
};

struct Admissibility {
  double sup_displacement = 0.0;
  double sup_slope = 0.0;
  double partial_slope = 0.0;
  bool within(const NeighbourhoodBounds& b) const {
    return sup_displacement <= b.sup_displacement && sup_slope <= b.sup_slope &&
           partial_slope <= b.partial_slope;
  }
};

Admissibility admissibility(const Diffeo& g, const PartitionOfUnity& pou);
void require_admissible(const Diffeo& g, const PartitionOfUnity& pou,
                        const NeighbourhoodBounds& bounds = {});

// g = s_{n-1} o ... o s_0 with s_i = h_{i+1}^{-1} o h_i, h_m = id + W_m u.
// supp(s_i) lies in supp(f_i). All maps are evaluated from u directly.
class Fragmentation {
 public:
  // Throws NeighbourhoodError if some partial field violates the slope bound.
  Fragmentation(const Diffeo& g, const PartitionOfUnity& pou,
                double partial_slope_bound = NeighbourhoodBounds{}.partial_slope);

  int size() const { return pou_.size(); }
  const Diffeo& diffeo() const { return g_; }
  const PartitionOfUnity& partition() const { return pou_; }

  double partial(int m, double x) const;  // h_m(x), unwrapped
  double partial_derivative(int m, double x) const;
  double partial_inverse(int m, double y) const;

  double piece(int i, double x) const;  // s_i(x), unwrapped
  double piece_inverse(int i, double y) const;
  // Whether s_i can move x, i.e. f_i(x) != 0.
  bool moves(int i, double x) const;

  // s_{n-1}(...s_0(x)).
  double recompose(double x) const;
  // s_i tabulated on the grid of g.
  Diffeo sampled_piece(int i) const;

 private:
  double solve(int m, double target, double start) const;

  Diffeo g_;
  PartitionOfUnity pou_;
};

Fragmentation fragment(const Diffeo& g, const PartitionOfUnity& pou);

// Lift of the piece s_i to P: in chart i, (i, x, k) -> (i, s_i(x), k) over the
// interior of V_i, the identity elsewhere.
BundlePoint local_lift(const Bundle& b, const Fragmentation& f, int i, const BundlePoint& p);
BundlePoint local_lift_inverse(const Bundle& b, const Fragmentation& f, int i,
                               const BundlePoint& p);
// Lift of an arbitrary diffeomorphism supported in V_i; throws
// NeighbourhoodError if s moves a grid point outside V_i.
BundlePoint local_lift(const Bundle& b, const Diffeo& s, int i, const BundlePoint& p);

// The section S(g) = lift_{n-1} o ... o lift_0 of Q: Aut(P) -> Diff(S^1).
class Section {
 public:
  Section(BundlePtr bundle, const Diffeo& g, const NeighbourhoodBounds& bounds = {});

  const Bundle& bundle() const { return *bundle_; }
  const BundlePtr& bundle_ptr() const { return bundle_; }
  const Diffeo& base() const { return frag_.diffeo(); }
  const Fragmentation& fragmentation() const { return frag_; }

  BundlePoint apply(const BundlePoint& p) const;
  BundlePoint apply_inverse(const BundlePoint& p) const;

  // S(g)(sigma_i(x) k) from the product of transitions along the chart
  // chain j_1 < ... < j_l of pieces moving the point, with intermediate
  // points h_m^{-1}(g(x)). Empty when a chain point leaves U_{j_p} n U_{j_{p-1}}.
  std::optional<BundlePoint> chain(const BundlePoint& p) const;

 private:
  BundlePtr bundle_;
  Fragmentation frag_;
};

using SectionPtr = std::shared_ptr<const Section>;

// F = F_gamma o S(g).
class BundleAutomorphism {
 public:
  BundleAutomorphism(LocalGaugeElement gauge, const Diffeo& base,
                     const NeighbourhoodBounds& bounds = {});

  static BundleAutomorphism identity(const BundlePtr& b);
  static BundleAutomorphism pure_gauge(const LocalGaugeElement& gamma);
  static BundleAutomorphism section(const BundlePtr& b, const Diffeo& g);

  const LocalGaugeElement& gauge() const { return gauge_; }
  const Diffeo& base() const { return section_->base(); }
  const Section& section() const { return *section_; }
  const BundlePtr& bundle_ptr() const { return gauge_.bundle_ptr(); }

 private:
  LocalGaugeElement gauge_;
  SectionPtr section_;
};

BundlePoint apply_aut(const BundleAutomorphism& f, const BundlePoint& p);
BundlePoint apply_aut_inverse(const BundleAutomorphism& f, const BundlePoint& p);
Diffeo project_Q(const BundleAutomorphism& f);

// max |pi(F(p)) - Q(F)(pi(p))| over random points.
double projection_residual(const BundleAutomorphism& f, int probes = 64, std::uint64_t seed = 1);

// Distance of two points of P: base distance and fibre distance after moving
// to a common chart.
double point_distance(const Bundle& b, const BundlePoint& p, const BundlePoint& q);

BundlePoint random_point(const Bundle& b, Rng& rng);

// max point_distance(F1(p), F2(p)) over random points.
double aut_distance(const BundleAutomorphism& f1, const BundleAutomorphism& f2, int probes = 64,
                    std::uint64_t seed = 1);

// T(gamma, g) = gamma o S(g)^{-1} in the equivariant picture.
LocalGaugeElement outer_T(const LocalGaugeElement& gamma, const Section& s);
LocalGaugeElement outer_T(const LocalGaugeElement& gamma, const Diffeo& g);

struct VerticalPart {
  LocalGaugeElement value;
  double verticality;  // sup of the base displacement of the composite
};

// omega(g, g') = S(g) S(g') S(g g')^{-1}.
VerticalPart omega(const BundlePtr& b, const Diffeo& g, const Diffeo& g2);
// omega_F(g') = F S(g') F^{-1} S(g g' g^{-1})^{-1} for F covering g.
VerticalPart omega_conj(const BundleAutomorphism& f, const Diffeo& g2);

// (gamma1, g1)(gamma2, g2) = (gamma1 T(gamma2, g1) omega(g1, g2), g1 g2).
BundleAutomorphism aut_mul(const BundleAutomorphism& f1, const BundleAutomorphism& f2);
BundleAutomorphism aut_inv(const BundleAutomorphism& f);

struct FactorResiduals {
  // omega(g,g') omega(gg',g'') against T(omega(g',g''),g) omega(g,g'g'').
  double cocycle;
  // T(T(probe,g'),g) against omega(g,g') T(probe,gg') omega(g,g')^{-1}.
  double conjugation;
};

FactorResiduals factor_identities_residual(const BundlePtr& b, const Diffeo& g,
                                           const Diffeo& g2, const Diffeo& g3,
                                           const LocalGaugeElement& probe);

// Smooth random displacement with the given sup|u| (a few Fourier modes).
Diffeo random_diffeo(int n, Rng& rng, double amplitude, int modes = 3);
// random_diffeo with the amplitude halved until g is admissible for the cover.
Diffeo random_admissible_diffeo(const ClosedCover& cover, int n, Rng& rng, double amplitude = 0.01,
                                const NeighbourhoodBounds& bounds = {});

}  // namespace gaugeforge

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <vector>

#include "gaugeforge/bundle.hpp"

namespace gaugeforge {

using BundlePtr = std::shared_ptr<const Bundle>;

inline BundlePtr share(Bundle b) { return std::make_shared<const Bundle>(std::move(b)); }

inline constexpr double kCompatibilityTolerance = 1e-9;
inline constexpr double kEvolveTolerance = 1e-7;

struct OverlapResidual {
  double value = 0.0;
  int i = -1;
  int j = -1;
  double x = 0.0;
  std::string describe() const;
};

// Tuple (gamma_i) of K-valued maps on the closed arcs with
// gamma_i = k_ij gamma_j k_ji on overlaps.
class LocalGaugeElement {
 public:
  // No compatibility check; see make_gauge.
  LocalGaugeElement(BundlePtr bundle, std::vector<SampledMap<GroupElement>> pieces);

  const BundlePtr& bundle_ptr() const { return bundle_; }
  const Bundle& bundle() const { return *bundle_; }
  int size() const { return static_cast<int>(pieces_.size()); }
  const SampledMap<GroupElement>& piece(int i) const { return pieces_.at(i); }
  SampledMap<GroupElement>& piece(int i) { return pieces_.at(i); }
  GroupElement value(int i, double x) const { return pieces_.at(i)(x); }

 private:
  BundlePtr bundle_;
  std::vector<SampledMap<GroupElement>> pieces_;
};

// Tuple (eta_i) with eta_i = Ad(k_ij) eta_j on overlaps.
class LocalGaugeAlgebraElement {
 public:
  LocalGaugeAlgebraElement(BundlePtr bundle, std::vector<SampledMap<AlgebraElement>> pieces);

  const BundlePtr& bundle_ptr() const { return bundle_; }
  const Bundle& bundle() const { return *bundle_; }
  int size() const { return static_cast<int>(pieces_.size()); }
  const SampledMap<AlgebraElement>& piece(int i) const { return pieces_.at(i); }
  SampledMap<AlgebraElement>& piece(int i) { return pieces_.at(i); }
  AlgebraElement value(int i, double x) const { return pieces_.at(i)(x); }

  LocalGaugeAlgebraElement operator+(const LocalGaugeAlgebraElement& o) const;
  LocalGaugeAlgebraElement operator*(double s) const;

 private:
  BundlePtr bundle_;
  std::vector<SampledMap<AlgebraElement>> pieces_;
};

SampleGrid chart_grid(const Bundle& b, int i);

LocalGaugeElement tabulate_gauge(const BundlePtr& b,
                                 const std::function<GroupElement(int i, double x)>& f);
LocalGaugeAlgebraElement tabulate_gauge_algebra(
    const BundlePtr& b, const std::function<AlgebraElement(int i, double x)>& f);

OverlapResidual compatibility(const LocalGaugeElement& g);
OverlapResidual compatibility(const LocalGaugeAlgebraElement& eta);

// Throws InvariantViolation naming the worst overlap if above tol.
LocalGaugeElement make_gauge(BundlePtr b, std::vector<SampledMap<GroupElement>> pieces,
                             double tol = kCompatibilityTolerance);
LocalGaugeAlgebraElement make_gauge_algebra(BundlePtr b,
                                            std::vector<SampledMap<AlgebraElement>> pieces,
                                            double tol = kCompatibilityTolerance);
void require_compatible(const LocalGaugeElement& g, double tol = kCompatibilityTolerance);
void require_compatible(const LocalGaugeAlgebraElement& eta, double tol = kCompatibilityTolerance);

LocalGaugeElement identity_gauge(const BundlePtr& b);
LocalGaugeAlgebraElement zero_gauge_algebra(const BundlePtr& b);

// Compatible algebra element from arbitrary chart-local fields zeta_m:
// eta_i = sum_m f_m Ad(k_im) zeta_m.
LocalGaugeAlgebraElement patch_gauge_algebra(
    const BundlePtr& b, const std::function<AlgebraElement(int m, double x)>& zeta);

// Random smooth compatible algebra element, sup-norm roughly `amplitude`.
LocalGaugeAlgebraElement random_gauge_algebra(const BundlePtr& b, Rng& rng, double amplitude,
                                              int modes = 3);

LocalGaugeElement operator*(const LocalGaugeElement& a, const LocalGaugeElement& b);
LocalGaugeElement inverse(const LocalGaugeElement& a);

// Largest pointwise distance between two elements on the same bundle.
double sup_distance(const LocalGaugeElement& a, const LocalGaugeElement& b);
double sup_distance(const LocalGaugeAlgebraElement& a, const LocalGaugeAlgebraElement& b);

// Value of the equivariant map P -> K at p = sigma_i(x) k: k^{-1} gamma_i(x) k.
GroupElement to_equivariant(const LocalGaugeElement& g, const BundlePoint& p);
// The vertical automorphism p -> p . psi(gamma)(p).
BundlePoint apply_gauge(const LocalGaugeElement& g, const BundlePoint& p);

// Chart phi = log per sample; throws OutOfChart naming the worst sample.
LocalGaugeAlgebraElement chart_star(const LocalGaugeElement& g);
LocalGaugeElement chart_star_inv(const LocalGaugeAlgebraElement& eta);

LocalGaugeElement gauge_exp(const LocalGaugeAlgebraElement& eta);
LocalGaugeElement contract_to_identity(const LocalGaugeElement& g, double t);

// Solves gamma' = gamma xi(t), gamma(0) = e, per chart and sample by RK4
// with re-projection. Returns gamma at t = k / steps for k = 0..steps.
std::vector<LocalGaugeElement> evolve(
    const std::function<LocalGaugeAlgebraElement(double t)>& xi, const BundlePtr& b,
    int steps = 256);

// |d(Ad(h) f) - Ad(h) df - Ad(h) [delta^l h, f]| at grid sample k, every
// derivative by fourth-order central differences.
double product_rule_residual(const StructureGroup& group, const SampledMap<GroupElement>& h,
                             const SampledMap<AlgebraElement>& f, int k);
double product_rule_residual(const StructureGroup& group, const SampledMap<GroupElement>& h,
                             const SampledMap<AlgebraElement>& f);

// Transport between a bundle and its refinement (same grid points).
LocalGaugeElement refine_gauge(const LocalGaugeElement& g, const BundlePtr& refined,
                               const std::vector<int>& parent);
LocalGaugeElement coarsen_gauge(const LocalGaugeElement& g, const BundlePtr& coarse,
                                const std::vector<int>& parent);

inline double value_distance(double a, double b) { return std::abs(a - b); }
inline double value_distance(const AlgebraElement& a, const AlgebraElement& b) {
  return distance(a, b);
}
inline double value_distance(const GroupElement& a, const GroupElement& b) {
  return distance(a, b);
}

inline constexpr double kGlueTolerance = 1e-9;

// Global map from pieces on the closed arcs of `cover`. The value at a grid
// point is taken from the lowest-index arc containing it; all pieces must
// agree on shared grid points.
template <class T>
SampledMap<T> glue(const ClosedCover& cover, const std::vector<SampledMap<T>>& pieces, int n,
                   double tol = kGlueTolerance) {
  if (static_cast<int>(pieces.size()) != cover.size())
    throw CoverError("glue needs one piece per arc");
  std::vector<std::optional<T>> values(n);
  std::vector<int> owner(n, -1);
  for (int i = 0; i < cover.size(); ++i) {
    const SampleGrid& grid = pieces[i].grid();
    for (int s = 0; s < grid.size(); ++s) {
      int g = grid.global_index(s);
      if (owner[g] < 0) {
        owner[g] = i;
        values[g] = pieces[i][s];
        continue;
      }
      double d = value_distance(*values[g], pieces[i][s]);
      if (!(d <= tol)) {
        std::ostringstream os;
        os << "pieces " << owner[g] << " and " << i << " disagree by " << d
           << " on their overlap at x = " << grid.position(s);
        throw InvariantViolation(os.str(), d);
      }
    }
  }
  std::vector<T> out;
  out.reserve(n);
  for (int g = 0; g < n; ++g) {
    if (!values[g]) throw CoverError("glue: grid point not covered by any piece");
    out.push_back(*values[g]);
  }
  return SampledMap<T>(SampleGrid::circle(n), std::move(out));
}

template <class T>
SampledMap<T> restrict_to(const SampledMap<T>& global, const Arc& arc) {
  if (!global.grid().periodic()) throw DomainError("restrict needs a map on the whole circle");
  SampleGrid grid = SampleGrid::on_arc(arc, global.grid().resolution());
  std::vector<T> v;
  v.reserve(grid.size());
  for (int s = 0; s < grid.size(); ++s) v.push_back(global[grid.global_index(s)]);
  return SampledMap<T>(grid, std::move(v));
}

template <class T>
std::vector<SampledMap<T>> restrict_to(const SampledMap<T>& global, const ClosedCover& cover) {
  std::vector<SampledMap<T>> out;
  for (int i = 0; i < cover.size(); ++i) out.push_back(restrict_to(global, cover.arc(i)));
  return out;
}

}  // namespace gaugeforge

#pragma once

#include <functional>
#include <vector>

#include "gaugeforge/diffauto.hpp"

namespace gaugeforge {

inline constexpr double kConnectionTolerance = 1e-7;
inline constexpr int kHolonomySteps = 512;

// Local connection forms A_i = a_i dx on the closed arcs, with
// a_j = Ad(k_ij^{-1}) a_i + delta^l(k_ij) on overlaps.
class Connection {
 public:
  // No compatibility check; see make_connection.
  Connection(BundlePtr bundle, std::vector<SampledMap<AlgebraElement>> pieces);

  const BundlePtr& bundle_ptr() const { return bundle_; }
  const Bundle& bundle() const { return *bundle_; }
  int size() const { return static_cast<int>(pieces_.size()); }
  const SampledMap<AlgebraElement>& piece(int i) const { return pieces_.at(i); }
  SampledMap<AlgebraElement>& piece(int i) { return pieces_.at(i); }
  AlgebraElement value(int i, double x) const { return pieces_.at(i)(x); }

 private:
  BundlePtr bundle_;
  std::vector<SampledMap<AlgebraElement>> pieces_;
};

// k_ij^{-1} k_ij' at a global grid index of the closed overlap, by fourth
// order differences of the transition table.
AlgebraElement transition_log_derivative(const Bundle& b, int i, int j, int global);

OverlapResidual compatibility(const Connection& a);
Connection make_connection(BundlePtr b, std::vector<SampledMap<AlgebraElement>> pieces,
                           double tol = kConnectionTolerance);

Connection zero_connection(const BundlePtr& b);

// a_i = sum_m f_m (Ad(k_mi^{-1}) b_m + delta^l k_mi) from arbitrary chart-local
// fields b_m. Compatible for every choice of b.
Connection patch_connection(const BundlePtr& b,
                            const std::function<AlgebraElement(int m, double x)>& local);

// The same algebra element in every chart; compatible on bundles with
// constant transitions commuting with it (e.g. any U1 bundle).
Connection constant_connection(const BundlePtr& b, const AlgebraElement& a);

Connection random_connection(const BundlePtr& b, Rng& rng, double amplitude, int modes = 3);

// a -> Ad(gamma) a - gamma' gamma^{-1}, i.e. (F_gamma^{-1})^* A.
Connection gauge_act(const LocalGaugeElement& gamma, const Connection& a);

// (F^{-1})^* A for F = F_gamma o S(g): the pieces of g act by pull-back in
// their own chart, then the gauge part.
Connection aut_act(const BundleAutomorphism& f, const Connection& a);

// Path-ordered solution of h' = h a around the loop from the canonical point
// over x0, switching charts by right multiplication with k_ij.
GroupElement holonomy(const Connection& a, double x0 = 0.0, int steps = kHolonomySteps);

Connection refine_connection(const Connection& a, const BundlePtr& refined,
                             const std::vector<int>& parent);

double sup_distance(const Connection& a, const Connection& b);

// Eigenvalues sorted by argument, and the distance of two multisets under
// the best matching.
std::vector<Complex> eigenvalues(const GroupElement& k);
double eigenvalue_distance(const GroupElement& a, const GroupElement& b);

}  // namespace gaugeforge

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gaugeforge/gauge.hpp"

namespace gaugeforge {

enum class DiffSubgroup { FullDiff, IdentityComponent };

std::string to_string(DiffSubgroup d);

// Diff(S^1)_P: all of Diff(S^1) iff [k] = [k]^{-1} in pi_0(K).
DiffSubgroup diff_subgroup(const Bundle& b);
// The same answer from equivalent(pullback(b, reflection), b).
DiffSubgroup diff_subgroup_by_pullback(const Bundle& b);

// Whether every transition is locally constant (to `tol`).
bool is_flat(const Bundle& b, double tol = 1e-12);

// The element k with eta(x + n) = Ad(k)^{-n} eta(x) for the unrolled gauge
// algebra element of a flat bundle.
GroupElement twist_element(const Bundle& b);

// Unrolls eta on a flat bundle to a twisted periodic function on R, written
// in the chart of the basepoint 0. Throws DomainError on non-flat bundles.
AlgebraElement twisted_loop_eval(const LocalGaugeAlgebraElement& eta, double x);

// Inverse of the unrolling: the gauge algebra element of a flat bundle whose
// unrolled form is f, where f(x + 1) = Ad(k)^{-1} f(x) with k = twist_element(b).
LocalGaugeAlgebraElement from_twisted_loop(const BundlePtr& b,
                                           const std::function<AlgebraElement(double)>& f);

// Random smooth twisted periodic function for the flat bundle b, sup-norm
// `amplitude`: Ad(exp(x X)) zeta(x) with exp(X) inducing the twist and zeta
// periodic (odd half-integer modes for the O(2) reflection twist).
std::function<AlgebraElement(double)> random_twisted_loop(const Bundle& b, Rng& rng,
                                                          double amplitude, int modes = 3);
LocalGaugeAlgebraElement random_twisted_gauge_algebra(const BundlePtr& b, Rng& rng,
                                                      double amplitude, int modes = 3);

// Finitely generated abelian group as a list of cyclic factors (0 = Z).
struct AbelianGroup {
  std::vector<int> factors;
  static AbelianGroup trivial() { return {}; }
  static AbelianGroup integers() { return {{0}}; }
  static AbelianGroup cyclic(int m) { return m == 1 ? AbelianGroup{} : AbelianGroup{{m}}; }
  AbelianGroup operator+(const AbelianGroup& o) const;
  bool operator==(const AbelianGroup& o) const = default;
  std::string to_string() const;  // "0", "Z", "Z2", "Z+Z2", ...
};

// pi_n(K) for n = 0..4, literal data for the supported base groups.
AbelianGroup homotopy_group(const StructureGroup& group, int n);

struct HomotopyRow {
  std::string space;  // "K", "Gau(P)", "Diff(S1)", "Diff(S1)_P", "Aut(P)"
  int n;
  std::string group;
  std::string reason;
};

struct HomotopyReport {
  std::string group;
  std::string bundle_class;
  std::string pi0_structure;
  DiffSubgroup diff_subgroup;
  std::vector<HomotopyRow> rows;
  std::vector<std::string> notes;

  const HomotopyRow* find(const std::string& space, int n) const;
  std::string to_text() const;
};

HomotopyReport homotopy_report(const Bundle& b);

}  // namespace gaugeforge

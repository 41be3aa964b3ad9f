#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "gaugeforge/error.hpp"
#include "gaugeforge/liegroup.hpp"
#include "gaugeforge/numerics.hpp"

namespace gaugeforge {

// Closed arc [start, start + length] of the circle R/Z. A length of 1 denotes
// the whole circle (only used by the degenerate single-chart cover).
class Arc {
 public:
  Arc(double start, double length);

  double start() const { return start_; }
  double length() const { return length_; }
  double end() const { return start_ + length_; }  // not wrapped
  bool is_full() const { return length_ >= 1.0; }

  // (x - start) mod 1, in [0, 1).
  double offset(double x) const { return wrap01(x - start_); }
  bool contains(double x, double tol = 1e-12) const;
  bool contains_interior(double x) const;
  Arc enlarged(double margin) const;

 private:
  double start_;
  double length_;
};

// Connected components of the intersection of two arcs (0, 1 or 2 of them).
std::vector<Arc> intersect(const Arc& a, const Arc& b);

struct Overlap {
  int i;
  int j;
  std::vector<Arc> components;
};

struct TripleOverlap {
  int i;
  int j;
  int l;
  std::vector<Arc> components;
};

// Closed trivialising sets V_i together with open enlargements U_i.
class ClosedCover {
 public:
  ClosedCover(std::vector<Arc> arcs, std::vector<Arc> enlargements);

  static ClosedCover single_chart();

  int size() const { return static_cast<int>(arcs_.size()); }
  const Arc& arc(int i) const { return arcs_.at(i); }
  const Arc& enlargement(int i) const { return enlarged_.at(i); }
  const std::vector<Arc>& arcs() const { return arcs_; }

  // Pairwise overlaps (i < j) of the closed arcs and of the enlargements.
  const std::vector<Overlap>& overlaps() const { return overlaps_; }
  const std::vector<Overlap>& enlarged_overlaps() const { return enlarged_overlaps_; }
  const std::vector<TripleOverlap>& enlarged_triples() const { return triples_; }

  // Lowest index i with x in the closed arc V_i.
  int canonical_chart(double x) const;
  bool is_single_chart() const { return arcs_.size() == 1 && arcs_[0].is_full(); }

 private:
  std::vector<Arc> arcs_;
  std::vector<Arc> enlarged_;
  std::vector<Overlap> overlaps_;
  std::vector<Overlap> enlarged_overlaps_;
  std::vector<TripleOverlap> triples_;
};

inline constexpr double kDefaultMargin = 0.02;

// n equally spaced arcs of the given length, arc i centred at i/n. n = 1 with
// arc_length = 1 gives the single-chart cover.
ClosedCover build_cover(int n_arcs, double arc_length, double margin = kDefaultMargin);

// Uniform samples on the global grid {k/n}. An arc grid holds the global grid
// points inside the arc, so maps on overlapping arcs share sample points.
class SampleGrid {
 public:
  static SampleGrid circle(int n);
  static SampleGrid on_arc(const Arc& arc, int n);

  int resolution() const { return n_; }
  int first() const { return first_; }
  int size() const { return count_; }
  bool periodic() const { return periodic_; }
  double spacing() const { return 1.0 / n_; }

  double position(int k) const { return wrap01(static_cast<double>(first_ + k) / n_); }
  int global_index(int k) const { return positive_mod(first_ + k, n_); }
  std::optional<int> local_index(int global) const;

  // Position of x in units of samples relative to sample 0.
  double local_coordinate(double x) const;

 private:
  SampleGrid(int n, int first, int count, bool periodic)
      : n_(n), first_(first), count_(count), periodic_(periodic) {}

  int n_;
  int first_;
  int count_;
  bool periodic_;
};

// Global grid indices k (points k/n) lying in the closed arc.
std::vector<int> grid_indices(const Arc& arc, int n);

template <class T>
T interpolate_nodes(const std::array<double, 6>& w, const std::array<const T*, 6>& nodes, int m) {
  if constexpr (std::is_same_v<T, GroupElement>) {
    return interpolate_group(std::span<const double>(w.data(), m),
                             std::span<const GroupElement* const>(nodes.data(), m));
  } else {
    T acc = w[0] * *nodes[0];
    for (int j = 1; j < m; ++j) acc = acc + w[j] * *nodes[j];
    return acc;
  }
}

// Smooth map sampled on a SampleGrid with quintic (six-point Lagrange)
// interpolation between samples. Group-valued maps are re-projected.
template <class T>
class SampledMap {
 public:
  SampledMap() : grid_(SampleGrid::circle(32)) {}
  SampledMap(SampleGrid grid, std::vector<T> values) : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.size())
      throw DomainError("sample count does not match grid");
    if (grid_.size() < 5) throw DomainError("sampled maps need at least 5 samples");
  }

  template <class F>
  static SampledMap tabulate(const SampleGrid& grid, F&& f) {
    std::vector<T> v;
    v.reserve(grid.size());
    for (int k = 0; k < grid.size(); ++k) v.push_back(f(grid.position(k)));
    return SampledMap(grid, std::move(v));
  }

  const SampleGrid& grid() const { return grid_; }
  int size() const { return grid_.size(); }
  const T& operator[](int k) const { return values_[k]; }
  T& operator[](int k) { return values_[k]; }
  const std::vector<T>& values() const { return values_; }

  const T* at_global(int g) const {
    auto k = grid_.local_index(g);
    return k ? &values_[*k] : nullptr;
  }

  T operator()(double x) const {
    double p = grid_.local_coordinate(x);
    double r = std::round(p);
    int n = grid_.size();
    if (std::abs(p - r) < 1e-9) {
      int k = static_cast<int>(r);
      if (grid_.periodic()) return values_[positive_mod(k, n)];
      if (k >= 0 && k < n) return values_[k];
    }
    int m = n >= 6 ? 6 : 4;
    int base = static_cast<int>(std::floor(p)) - (m / 2 - 1);
    if (!grid_.periodic()) base = std::clamp(base, 0, n - m);
    auto w = lagrange_weights(p - base, m);
    std::array<const T*, 6> nodes{};
    for (int j = 0; j < m; ++j)
      nodes[j] = &values_[grid_.periodic() ? positive_mod(base + j, n) : base + j];
    return interpolate_nodes(w, nodes, m);
  }

 private:
  SampleGrid grid_;
  std::vector<T> values_;
};

// Fourth-order derivative of a real or algebra valued map at sample k.
template <class T>
T sample_derivative(const SampledMap<T>& f, int k) {
  const auto& g = f.grid();
  Stencil s = derivative_stencil(k, g.size(), g.periodic());
  T acc = s.weights[0] * f[positive_mod(k + s.offset, g.size())];
  for (int j = 1; j < 5; ++j) acc = acc + s.weights[j] * f[positive_mod(k + s.offset + j, g.size())];
  return acc * (1.0 / g.spacing());
}

// Smooth partition of unity subordinate to the open arcs of a cover, built
// from the exp(-1/t) plateau function and renormalised by the sum.
class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(const ClosedCover& cover);

  int size() const { return static_cast<int>(arcs_.size()); }
  double value(int i, double x) const;
  double derivative(int i, double x) const;
  std::vector<double> values(double x) const;

  // f_m + ... + f_{n-1}, accumulated from the top index down so that the
  // sum is unchanged bitwise wherever f_m vanishes.
  double tail(int m, double x) const;
  double tail_derivative(int m, double x) const;

  SampledMap<double> sampled(int i, int n) const;
  double ramp(int i) const { return ramps_.at(i); }

 private:
  void evaluate(double x, std::span<double> f, std::span<double> df) const;

  std::vector<Arc> arcs_;
  std::vector<double> ramps_;
};

// Smooth step built from exp(-1/t): 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);
double smooth_step_derivative(double t);

// Near-identity orientation preserving diffeomorphism x -> x + u(x) of the
// circle, stored by its periodic displacement u (the chart value of the flat
// exponential).
class Diffeo {
 public:
  static constexpr double kSlopeBound = 0.5;

  static Diffeo identity(int n);
  static Diffeo rotation(int n, double angle);
  // Throws NeighbourhoodError if sup|u'| exceeds `slope_bound`.
  static Diffeo from_displacement(SampledMap<double> u, double slope_bound = kSlopeBound);
  // Only requires 1 + u' > 0 at the samples.
  static Diffeo orientation_preserving(SampledMap<double> u);

  const SampledMap<double>& displacement() const { return u_; }
  int resolution() const { return u_.grid().resolution(); }

  // Unwrapped image x + u(x).
  double operator()(double x) const { return x + u_(x); }
  double derivative(double x) const { return 1.0 + du_(x); }
  double inverse_at(double y) const;

  double sup_displacement() const;
  double sup_slope() const;

 private:
  explicit Diffeo(SampledMap<double> u);

  SampledMap<double> u_;
  SampledMap<double> du_;
};

Diffeo compose(const Diffeo& g, const Diffeo& h);  // g o h
Diffeo invert(const Diffeo& g);
Diffeo diffeo_from_field(const SampledMap<double>& field);
SampledMap<double> field_from_diffeo(const Diffeo& g);

// Grid sup-norm of the circle distance between g(x_k) and h(x_k).
double sup_distance(const Diffeo& g, const Diffeo& h);

// The orientation reversing map x -> -x.
struct Reflection {
  double operator()(double x) const { return wrap01(-x); }
};

}  // namespace gaugeforge

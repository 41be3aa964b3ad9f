#include "gaugeforge/manifold.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace gaugeforge {

Arc::Arc(double start, double length) : start_(wrap01(start)), length_(length) {
  if (!(length > 0.0) || length > 1.0) throw CoverError("arc length must lie in (0, 1]");
  if (length_ >= 1.0) start_ = 0.0;
}

bool Arc::contains(double x, double tol) const {
  if (is_full()) return true;
  double o = offset(x);
  return o <= length_ + tol || o >= 1.0 - tol;
}

bool Arc::contains_interior(double x) const {
  if (is_full()) return true;
  double o = offset(x);
  return o > 0.0 && o < length_;
}

Arc Arc::enlarged(double margin) const {
  if (is_full()) return *this;
  return Arc(start_ - margin, std::min(1.0, length_ + 2.0 * margin));
}

std::vector<Arc> intersect(const Arc& a, const Arc& b) {
  if (a.is_full()) return {b};
  if (b.is_full()) return {a};
  std::vector<Arc> out;
  double sb = a.offset(b.start());
  for (double shift : {0.0, -1.0}) {
    double lo = std::max(0.0, sb + shift);
    double hi = std::min(a.length(), sb + shift + b.length());
    if (hi - lo > 1e-14) out.emplace_back(a.start() + lo, hi - lo);
  }
  return out;
}

ClosedCover::ClosedCover(std::vector<Arc> arcs, std::vector<Arc> enlargements)
    : arcs_(std::move(arcs)), enlarged_(std::move(enlargements)) {
  if (arcs_.empty()) throw CoverError("a cover needs at least one arc");
  if (arcs_.size() != enlarged_.size()) throw CoverError("every arc needs an enlargement");
  int n = size();
  for (int i = 0; i < n; ++i) {
    const Arc& v = arcs_[i];
    const Arc& u = enlarged_[i];
    if (v.is_full() != u.is_full()) throw CoverError("enlargement of a full arc must be full");
    if (v.is_full()) continue;
    double o = u.offset(v.start());
    if (!(o > 0.0) || !(o + v.length() < u.length()))
      throw CoverError("arc " + std::to_string(i) + " is not inside its enlargement");
  }
  if (n == 1) {
    if (!arcs_[0].is_full()) throw CoverError("a single arc does not cover the circle");
  } else {
    for (int i = 0; i < n; ++i) {
      if (arcs_[i].is_full()) throw CoverError("full arcs are only allowed in a single-chart cover");
      for (double e : {arcs_[i].start(), arcs_[i].end()}) {
        bool covered = false;
        for (int j = 0; j < n && !covered; ++j)
          covered = j != i && arcs_[j].contains_interior(e);
        if (!covered) {
          std::ostringstream os;
          os << "interiors of the arcs do not cover the circle near x = " << wrap01(e);
          throw CoverError(os.str());
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      auto c = intersect(arcs_[i], arcs_[j]);
      if (!c.empty()) overlaps_.push_back({i, j, std::move(c)});
      auto e = intersect(enlarged_[i], enlarged_[j]);
      if (!e.empty()) enlarged_overlaps_.push_back({i, j, std::move(e)});
    }
  }
  for (const auto& ov : enlarged_overlaps_) {
    for (int l = ov.j + 1; l < n; ++l) {
      std::vector<Arc> comps;
      for (const Arc& c : ov.components)
        for (Arc& d : intersect(c, enlarged_[l])) comps.push_back(d);
      if (!comps.empty()) triples_.push_back({ov.i, ov.j, l, std::move(comps)});
    }
  }
}

ClosedCover ClosedCover::single_chart() {
  return ClosedCover({Arc(0.0, 1.0)}, {Arc(0.0, 1.0)});
}

int ClosedCover::canonical_chart(double x) const {
  for (int i = 0; i < size(); ++i)
    if (arcs_[i].contains(x)) return i;
  throw CoverError("point outside every arc of the cover");
}

ClosedCover build_cover(int n_arcs, double arc_length, double margin) {
  if (n_arcs == 1) {
    if (arc_length >= 1.0) return ClosedCover::single_chart();
    throw CoverError("a single arc does not cover the circle");
  }
  if (n_arcs < 2) throw CoverError("need at least two arcs");
  if (!(arc_length > 0.0) || !(arc_length < 1.0))
    throw CoverError("arc length must lie in (0, 1)");
  if (n_arcs * arc_length <= 1.0 + 1e-12)
    throw CoverError("arcs of this length leave gaps: n * length must exceed 1");
  if (!(margin > 0.0)) throw CoverError("margin must be positive");
  if (arc_length + 2.0 * margin >= 1.0) throw CoverError("enlarged arcs must not wrap the circle");
  std::vector<Arc> arcs, enlarged;
  for (int i = 0; i < n_arcs; ++i) {
    double c = static_cast<double>(i) / n_arcs;
    arcs.emplace_back(c - arc_length / 2.0, arc_length);
    enlarged.push_back(arcs.back().enlarged(margin));
  }
  return ClosedCover(std::move(arcs), std::move(enlarged));
}

SampleGrid SampleGrid::circle(int n) {
  if (n < 32) throw DomainError("grid resolution must be at least 32");
  return SampleGrid(n, 0, n, true);
}

SampleGrid SampleGrid::on_arc(const Arc& arc, int n) {
  if (arc.is_full()) return circle(n);
  if (n < 32) throw DomainError("grid resolution must be at least 32");
  int first = static_cast<int>(std::ceil(arc.start() * n - 1e-9));
  int last = static_cast<int>(std::floor(arc.end() * n + 1e-9));
  int count = last - first + 1;
  if (count < 5) throw DomainError("arc too short for the grid resolution");
  return SampleGrid(n, first, count, false);
}

std::vector<int> grid_indices(const Arc& arc, int n) {
  std::vector<int> out;
  if (arc.is_full()) {
    for (int k = 0; k < n; ++k) out.push_back(k);
    return out;
  }
  int first = static_cast<int>(std::ceil(arc.start() * n - 1e-9));
  int last = static_cast<int>(std::floor(arc.end() * n + 1e-9));
  for (int k = first; k <= last; ++k) out.push_back(positive_mod(k, n));
  return out;
}

std::optional<int> SampleGrid::local_index(int global) const {
  int k = positive_mod(global - first_, n_);
  if (k < count_) return k;
  return std::nullopt;
}

double SampleGrid::local_coordinate(double x) const {
  if (periodic_) {
    double p = wrap01(x) * n_;
    return p >= n_ ? p - n_ : p;
  }
  double d = wrap01(x - static_cast<double>(first_) / n_) * n_;
  if (d > count_ + 2.0) d -= n_;
  if (d < -3.0 || d > count_ + 2.0) {
    std::ostringstream os;
    os << "point " << wrap01(x) << " outside sampled arc";
    throw DomainError(os.str());
  }
  return d;
}

namespace {
constexpr double kStepSharpness = 1.0;
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = std::exp(-kStepSharpness / t);
  double b = std::exp(-kStepSharpness / (1.0 - t));
  return a / (a + b);
}

double smooth_step_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  double a = std::exp(-kStepSharpness / t);
  double b = std::exp(-kStepSharpness / (1.0 - t));
  double s = a + b;
  if (s == 0.0) return 0.0;
  return kStepSharpness * a * b * (1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t))) / (s * s);
}

PartitionOfUnity::PartitionOfUnity(const ClosedCover& cover) : arcs_(cover.arcs()) {
  ramps_.resize(arcs_.size());
  for (std::size_t i = 0; i < arcs_.size(); ++i) ramps_[i] = arcs_[i].length() / 2.0;
  for (const auto& ov : cover.overlaps()) {
    for (const Arc& c : ov.components) {
      ramps_[ov.i] = std::min(ramps_[ov.i], c.length());
      ramps_[ov.j] = std::min(ramps_[ov.j], c.length());
    }
  }
}

void PartitionOfUnity::evaluate(double x, std::span<double> f, std::span<double> df) const {
  int n = size();
  double s = 0.0, ds = 0.0;
  for (int i = 0; i < n; ++i) {
    const Arc& a = arcs_[i];
    double rho = 0.0, drho = 0.0;
    if (a.is_full()) {
      rho = 1.0;
    } else {
      double t = a.offset(x);
      if (t < a.length()) {
        double r = ramps_[i];
        double p = t / r, q = (a.length() - t) / r;
        double sp = smooth_step(p), sq = smooth_step(q);
        rho = sp * sq;
        drho = (smooth_step_derivative(p) * sq - sp * smooth_step_derivative(q)) / r;
      }
    }
    f[i] = rho;
    df[i] = drho;
    s += rho;
    ds += drho;
  }
  if (!(s > 0.0)) throw CoverError("partition of unity vanishes: point outside the cover");
  for (int i = 0; i < n; ++i) {
    double rho = f[i];
    f[i] = rho / s;
    df[i] = (df[i] * s - rho * ds) / (s * s);
  }
}

double PartitionOfUnity::value(int i, double x) const {
  std::vector<double> f(size()), df(size());
  evaluate(x, f, df);
  return f.at(i);
}

std::vector<double> PartitionOfUnity::values(double x) const {
  std::vector<double> f(size()), df(size());
  evaluate(x, f, df);
  return f;
}

double PartitionOfUnity::derivative(int i, double x) const {
  std::vector<double> f(size()), df(size());
  evaluate(x, f, df);
  return df.at(i);
}

double PartitionOfUnity::tail(int m, double x) const {
  std::vector<double> f(size()), df(size());
  evaluate(x, f, df);
  double acc = 0.0;
  for (int i = size() - 1; i >= m; --i) acc += f[i];
  return acc;
}

double PartitionOfUnity::tail_derivative(int m, double x) const {
  std::vector<double> f(size()), df(size());
  evaluate(x, f, df);
  double acc = 0.0;
  for (int i = size() - 1; i >= m; --i) acc += df[i];
  return acc;
}

SampledMap<double> PartitionOfUnity::sampled(int i, int n) const {
  return SampledMap<double>::tabulate(SampleGrid::circle(n), [&](double x) { return value(i, x); });
}

namespace {

SampledMap<double> derivative_samples(const SampledMap<double>& u) {
  std::vector<double> d(u.size());
  for (int k = 0; k < u.size(); ++k) d[k] = sample_derivative(u, k);
  return SampledMap<double>(u.grid(), std::move(d));
}

}  // namespace

Diffeo::Diffeo(SampledMap<double> u) : u_(std::move(u)), du_(derivative_samples(u_)) {
  if (!u_.grid().periodic()) throw DomainError("displacement must be sampled on the whole circle");
}

Diffeo Diffeo::identity(int n) {
  return Diffeo(SampledMap<double>(SampleGrid::circle(n), std::vector<double>(n, 0.0)));
}

Diffeo Diffeo::rotation(int n, double angle) {
  return Diffeo(SampledMap<double>(SampleGrid::circle(n), std::vector<double>(n, angle)));
}

Diffeo Diffeo::from_displacement(SampledMap<double> u, double slope_bound) {
  Diffeo g(std::move(u));
  for (double v : g.u_.values())
    if (!std::isfinite(v)) throw NeighbourhoodError("displacement is not finite");
  double s = g.sup_slope();
  if (s > slope_bound) {
    std::ostringstream os;
    os << "sup |u'| = " << s << " exceeds the admissible bound " << slope_bound;
    throw NeighbourhoodError(os.str());
  }
  return g;
}

Diffeo Diffeo::orientation_preserving(SampledMap<double> u) {
  Diffeo g(std::move(u));
  for (double d : g.du_.values())
    if (!(1.0 + d > 0.0)) throw NeighbourhoodError("map is not an orientation preserving diffeomorphism");
  return g;
}

double Diffeo::inverse_at(double y) const {
  double z = y - u_(y);
  for (int it = 0; it < 60; ++it) {
    double r = z + u_(z) - y;
    if (r == 0.0) return z;
    double step = r / (1.0 + du_(z));
    z -= step;
    if (std::abs(step) < 1e-16) return z;
  }
  double r = z + u_(z) - y;
  if (std::abs(r) < 1e-13) return z;
  std::ostringstream os;
  os << "Newton inversion did not converge at y = " << y << " (residual " << r << ")";
  throw NewtonFailure(os.str());
}

double Diffeo::sup_displacement() const {
  double m = 0.0;
  for (double v : u_.values()) m = std::max(m, std::abs(v));
  return m;
}

double Diffeo::sup_slope() const {
  double m = 0.0;
  for (double v : du_.values()) m = std::max(m, std::abs(v));
  return m;
}

Diffeo compose(const Diffeo& g, const Diffeo& h) {
  SampleGrid grid = h.displacement().grid();
  auto w = SampledMap<double>::tabulate(grid, [&](double x) {
    double uh = h.displacement()(x);
    return uh + g.displacement()(x + uh);
  });
  return Diffeo::from_displacement(std::move(w));
}

Diffeo invert(const Diffeo& g) {
  SampleGrid grid = g.displacement().grid();
  auto v = SampledMap<double>::tabulate(grid, [&](double x) { return g.inverse_at(x) - x; });
  return Diffeo::from_displacement(std::move(v));
}

Diffeo diffeo_from_field(const SampledMap<double>& field) {
  return Diffeo::from_displacement(field);
}

SampledMap<double> field_from_diffeo(const Diffeo& g) { return g.displacement(); }

double sup_distance(const Diffeo& g, const Diffeo& h) {
  const SampleGrid& grid = g.displacement().grid();
  double m = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    double x = grid.position(k);
    m = std::max(m, circle_distance(g(x), h(x)));
  }
  return m;
}

}  // namespace gaugeforge

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gaugeforge/manifold.hpp"

using namespace gaugeforge;

namespace {

const double pi = std::numbers::pi;

double total_length(const std::vector<Arc>& arcs) {
  double s = 0.0;
  for (const Arc& a : arcs) s += a.length();
  return s;
}

SampledMap<double> sine_displacement(int n, double amplitude) {
  return SampledMap<double>::tabulate(SampleGrid::circle(n),
                                      [&](double x) { return amplitude * std::sin(2 * pi * x); });
}

}  // namespace

TEST_CASE("build_cover(3, 0.45): centred arcs with overlaps of length 0.45 - 1/3") {
  ClosedCover c = build_cover(3, 0.45);
  REQUIRE(c.size() == 3);
  for (int i = 0; i < 3; ++i) {
    double centre = wrap01(c.arc(i).start() + c.arc(i).length() / 2);
    CHECK(circle_distance(centre, i / 3.0) < 1e-14);
    CHECK(c.arc(i).length() == doctest::Approx(0.45));
  }
  REQUIRE(c.overlaps().size() == 3);
  for (const Overlap& ov : c.overlaps()) {
    REQUIRE(ov.components.size() == 1);
    CHECK(ov.components[0].length() == doctest::Approx(0.45 - 1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("build_cover(2, 0.6): two overlap components") {
  ClosedCover c = build_cover(2, 0.6);
  REQUIRE(c.overlaps().size() == 1);
  REQUIRE(c.overlaps()[0].components.size() == 2);
  CHECK(total_length(c.overlaps()[0].components) == doctest::Approx(2 * 0.6 - 1.0).epsilon(1e-12));
}

TEST_CASE("covers that leave gaps are rejected") {
  CHECK_THROWS_AS(build_cover(1, 0.5), CoverError);
  CHECK_THROWS_AS(build_cover(3, 0.3), CoverError);
  CHECK(build_cover(1, 1.0).is_single_chart());
}

TEST_CASE("intersections of arcs") {
  CHECK(intersect(Arc(0.0, 0.3), Arc(0.5, 0.2)).empty());
  auto one = intersect(Arc(0.9, 0.3), Arc(0.1, 0.4));
  REQUIRE(one.size() == 1);
  CHECK(one[0].length() == doctest::Approx(0.1));
  CHECK(circle_distance(one[0].start(), 0.1) < 1e-14);
  auto two = intersect(Arc(0.0, 0.7), Arc(0.6, 0.6));
  CHECK(two.size() == 2);
  CHECK(total_length(two) == doctest::Approx(0.3));
}

TEST_CASE("partition of unity") {
  for (auto [n, len] : {std::pair{2, 0.6}, {3, 0.45}, {4, 0.35}, {5, 0.3}}) {
    ClosedCover c = build_cover(n, len);
    PartitionOfUnity pou(c);
    double worst = 0.0;
    for (int k = 0; k < 512; ++k) {
      double x = k / 512.0;
      auto f = pou.values(x);
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        s += f[i];
        CHECK(f[i] >= 0.0);
        if (!c.arc(i).contains_interior(x)) CHECK(f[i] == 0.0);
      }
      worst = std::max(worst, std::abs(s - 1.0));
      int owners = 0, owner = -1;
      for (int i = 0; i < n; ++i)
        if (c.arc(i).contains(x)) owners++, owner = i;
      if (owners == 1) CHECK(f[owner] == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("partition of unity derivatives against difference quotients") {
  PartitionOfUnity pou(build_cover(3, 0.45));
  double e = 1e-6;
  for (double x : {0.05, 0.12, 0.2, 0.31, 0.5, 0.83}) {
    for (int i = 0; i < 3; ++i) {
      double fd = (pou.value(i, x + e) - pou.value(i, x - e)) / (2 * e);
      CHECK(pou.derivative(i, x) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      double tail_fd = (pou.tail(i, x + e) - pou.tail(i, x - e)) / (2 * e);
      CHECK(pou.tail_derivative(i, x) == doctest::Approx(tail_fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("smooth step") {
  CHECK(smooth_step(-0.1) == 0.0);
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  for (double t = 0.05; t < 1.0; t += 0.1) CHECK(smooth_step(t) + smooth_step(1 - t) == doctest::Approx(1.0));
}

TEST_CASE("interpolation reproduces low-degree polynomials on an arc") {
  Arc arc(0.8, 0.35);
  SampleGrid grid = SampleGrid::on_arc(arc, 256);
  auto poly = [&](double x) {
    double t = arc.offset(x);
    return 1.0 - 2.0 * t + 3.0 * t * t - 4.0 * t * t * t;
  };
  auto f = SampledMap<double>::tabulate(grid, poly);
  for (double s = 0.0013; s < 0.35; s += 0.0171) {
    double x = wrap01(0.8 + s);
    CHECK(std::abs(f(x) - poly(x)) <= 1e-12);
  }
}

TEST_CASE("periodic interpolation converges at high order") {
  auto error = [](int n) {
    auto f = SampledMap<double>::tabulate(SampleGrid::circle(n), [](double x) { return std::sin(2 * pi * x); });
    double worst = 0.0;
    for (int k = 0; k < 997; ++k) {
      double x = (k + 0.5) / 997.0;
      worst = std::max(worst, std::abs(f(x) - std::sin(2 * pi * x)));
    }
    return worst;
  };
  CHECK(std::log2(error(32) / error(64)) > 3.5);
}

TEST_CASE("grids on arcs share the global sample points") {
  ClosedCover c = build_cover(3, 0.45);
  SampleGrid a = SampleGrid::on_arc(c.arc(0), 512), b = SampleGrid::on_arc(c.arc(1), 512);
  int shared = 0;
  for (int s = 0; s < a.size(); ++s) {
    auto t = b.local_index(a.global_index(s));
    if (!t) continue;
    shared++;
    CHECK(b.position(*t) == a.position(s));
  }
  CHECK(shared == static_cast<int>(grid_indices(c.overlaps()[0].components[0], 512).size()));
}

TEST_CASE("diffeomorphisms: composition, inversion, fields") {
  int n = 512;
  Diffeo id = Diffeo::identity(n);
  Diffeo g = Diffeo::from_displacement(sine_displacement(n, 0.01));
  CHECK(sup_distance(compose(id, g), g) == 0.0);
  CHECK(sup_distance(compose(Diffeo::rotation(n, 0.1), Diffeo::rotation(n, 0.25)), Diffeo::rotation(n, 0.35)) <= 1e-15);
  CHECK(sup_distance(invert(Diffeo::rotation(n, 0.1)), Diffeo::rotation(n, -0.1)) <= 1e-15);
  CHECK(sup_distance(invert(id), id) == 0.0);

  Diffeo gi = invert(g);
  CHECK(sup_distance(compose(g, gi), id) <= 1e-8);
  CHECK(sup_distance(compose(gi, g), id) <= 1e-8);
  for (int k = 0; k < n; k += 37) {
    double y = k / static_cast<double>(n);
    CHECK(std::abs(g(g.inverse_at(y)) - y) <= 1e-8);
  }

  auto zero = SampledMap<double>::tabulate(SampleGrid::circle(n), [](double) { return 0.0; });
  CHECK(sup_distance(diffeo_from_field(zero), id) == 0.0);
  auto c = SampledMap<double>::tabulate(SampleGrid::circle(n), [](double) { return 0.2; });
  CHECK(sup_distance(diffeo_from_field(c), Diffeo::rotation(n, 0.2)) <= 1e-15);
  auto field = sine_displacement(n, 0.03);
  auto back = field_from_diffeo(diffeo_from_field(field));
  for (int k = 0; k < n; ++k) CHECK(std::abs(back[k] - field[k]) <= 1e-12);
}

TEST_CASE("diffeomorphisms outside the slope bound are rejected") {
  CHECK_THROWS_AS(Diffeo::from_displacement(sine_displacement(256, 0.2)), NeighbourhoodError);
  CHECK_NOTHROW(Diffeo::orientation_preserving(sine_displacement(256, 0.1)));
}

TEST_CASE("reflection") {
  Reflection r;
  CHECK(r(0.25) == doctest::Approx(0.75));
  CHECK(r(0.0) == 0.0);
}

TEST_CASE("fourth-order derivative of sin 2 pi x at N = 512") {
  auto f = SampledMap<double>::tabulate(SampleGrid::circle(512), [](double x) { return std::sin(2 * pi * x); });
  double worst = 0.0;
  for (int k = 0; k < 512; ++k)
    worst = std::max(worst, std::abs(sample_derivative(f, k) - 2 * pi * std::cos(2 * pi * k / 512.0)));
  CHECK(worst <= 1e-8);

  // One-sided stencils at the ends of an arc.
  Arc arc(0.7, 0.45);
  auto g = SampledMap<double>::tabulate(SampleGrid::on_arc(arc, 512), [](double x) { return std::sin(2 * pi * x); });
  worst = 0.0;
  for (int k = 0; k < g.size(); ++k)
    worst = std::max(worst, std::abs(sample_derivative(g, k) - 2 * pi * std::cos(2 * pi * g.grid().position(k))));
  CHECK(worst <= 1e-7);
}

TEST_CASE("composition of near-identity diffeomorphisms is associative") {
  int n = 512;
  Diffeo a = Diffeo::from_displacement(sine_displacement(n, 0.01));
  Diffeo b = Diffeo::from_displacement(SampledMap<double>::tabulate(
      SampleGrid::circle(n), [](double x) { return 0.015 * std::cos(4 * pi * x); }));
  Diffeo c = Diffeo::rotation(n, 0.07);
  CHECK(sup_distance(compose(compose(a, b), c), compose(a, compose(b, c))) <= 1e-7);
}

TEST_CASE("diffeo_from_field fixes the zeros of the field") {
  int n = 512;
  auto field = SampledMap<double>::tabulate(SampleGrid::circle(n), [](double x) {
    return x < 0.5 ? 0.02 * std::pow(std::sin(2 * pi * x), 2) : 0.0;
  });
  Diffeo g = diffeo_from_field(field);
  for (int k = 0; k < n; ++k)
    if (field[k] == 0.0) CHECK(g(k / static_cast<double>(n)) == k / static_cast<double>(n));
}

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace gaugeforge {

using Complex = std::complex<double>;

// Every structure group used here is realised by matrices of size <= 3, so a
// fixed maximum size keeps all arithmetic allocation free.
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::ColMajor, 3, 3>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Canonical representative of a circle coordinate in [0, 1).
inline double wrap01(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

// Signed difference a - b taken on the circle, in [-1/2, 1/2).
inline double circle_delta(double a, double b) {
  return wrap01(a - b + 0.5) - 0.5;
}

inline double circle_distance(double a, double b) {
  return std::abs(circle_delta(a, b));
}

inline int positive_mod(long long a, long long n) {
  long long r = a % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

// Lagrange weights for nodes 0..m-1 evaluated at t (m <= 6).
inline std::array<double, 6> lagrange_weights(double t, int m) {
  std::array<double, 6> w{};
  for (int i = 0; i < m; ++i) {
    double v = 1.0;
    for (int j = 0; j < m; ++j)
      if (j != i) v *= (t - j) / (i - j);
    w[i] = v;
  }
  return w;
}

// Five-point fourth-order first-derivative stencil for sample k of a grid of
// `count` points with unit spacing. `offset` is the index of the first
// stencil node relative to k.
struct Stencil {
  int offset;
  std::array<double, 5> weights;
};

Stencil derivative_stencil(int k, int count, bool periodic);

// Largest singular value.
double op_norm(const Matrix& m);

// Deterministic generator for random probes: std::mt19937_64 with the
// conversions written out, so a seed gives the same stream on every standard
// library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }
  int index(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gaugeforge

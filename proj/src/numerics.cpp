#include "gaugeforge/numerics.hpp"
#include "gaugeforge/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "gaugeforge/error.hpp"

namespace gaugeforge {

Stencil derivative_stencil(int k, int count, bool periodic) {
  constexpr double c = 1.0 / 12.0;
  if (count < 5) throw DomainError("derivative stencil needs at least 5 samples");
  if (periodic || (k >= 2 && k <= count - 3)) {
    return {-2, {c, -8 * c, 0.0, 8 * c, -c}};
  }
  if (k == 0) return {0, {-25 * c, 48 * c, -36 * c, 16 * c, -3 * c}};
  if (k == 1) return {-1, {-3 * c, -10 * c, 18 * c, -6 * c, c}};
  if (k == count - 2) return {-3, {-c, 6 * c, -18 * c, 10 * c, 3 * c}};
  return {-4, {3 * c, -16 * c, 36 * c, -48 * c, 25 * c}};
}

double op_norm(const Matrix& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GAUGEFORGE_THREADS")) {
    try {
      int cap = std::stoi(env);
      if (cap >= 1) hw = std::min(hw, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
    }
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gaugeforge

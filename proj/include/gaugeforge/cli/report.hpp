#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gaugeforge/cli/config.hpp"
#include "gaugeforge/classify.hpp"

namespace gaugeforge::cli {

struct Row {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool at_least = false;  // pass when residual >= tolerance (convergence orders)
  bool pass = false;
  std::string detail;
  double wall_ms = 0.0;
};

struct Report {
  std::string command;
  RunConfig config;
  std::vector<Row> rows;
  std::optional<HomotopyReport> homotopy;
  // (N, residual) pairs of the product-rule convergence study.
  std::vector<std::pair<int, double>> convergence;

  bool all_pass() const;
  // Body excludes wall times; they are appended under "timings" only when
  // `with_timings` is set.
  std::string to_json(bool with_timings = true) const;
  std::string to_text() const;
  std::string convergence_csv() const;
};

}  // namespace gaugeforge::cli

#include "gaugeforge/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace gaugeforge::cli {

using ojson = nlohmann::ordered_json;

namespace {

ojson number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string bundle_type(BundleConfig::Type t) {
  switch (t) {
    case BundleConfig::Type::Trivial:
      return "trivial";
    case BundleConfig::Type::Flat:
      return "flat";
    case BundleConfig::Type::Transitions:
      return "transitions";
  }
  return "?";
}

std::string format(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

}  // namespace

bool Report::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.pass; });
}

std::string Report::to_json(bool with_timings) const {
  ojson j;
  j["command"] = command;
  ojson env;
  env["group"] = config.group;
  env["cover"] = {{"n_arcs", config.cover.n_arcs},
                  {"arc_length", config.cover.arc_length},
                  {"margin", config.cover.margin}};
  env["grid"] = config.grid;
  env["seed"] = config.seed;
  env["bundle"] = bundle_type(config.bundle.type);
  ojson tol = ojson::object();
  for (const auto& [k, v] : default_tolerances()) tol[k] = config.tolerance(k);
  env["tolerances"] = tol;
  j["environment"] = env;
  ojson rows_json = ojson::array();
  for (const Row& r : rows) {
    rows_json.push_back({{"name", r.name},
                         {"residual", number(r.residual)},
                         {"tolerance", number(r.tolerance)},
                         {"comparison", r.at_least ? ">=" : "<="},
                         {"pass", r.pass},
                         {"detail", r.detail}});
  }
  j["rows"] = rows_json;
  if (homotopy) {
    ojson h;
    h["group"] = homotopy->group;
    h["class"] = homotopy->bundle_class;
    h["pi0_K"] = homotopy->pi0_structure;
    h["diff_subgroup"] = gaugeforge::to_string(homotopy->diff_subgroup);
    ojson table = ojson::array();
    for (const HomotopyRow& r : homotopy->rows)
      table.push_back({{"space", r.space}, {"n", r.n}, {"group", r.group}, {"reason", r.reason}});
    h["table"] = table;
    h["notes"] = homotopy->notes;
    j["homotopy"] = h;
  }
  if (!convergence.empty()) {
    ojson c = ojson::array();
    for (auto [n, r] : convergence) c.push_back({{"N", n}, {"residual", number(r)}});
    j["convergence"] = c;
  }
  j["pass"] = all_pass();
  if (with_timings) {
    ojson t = ojson::object();
    for (const Row& r : rows) t[r.name] = r.wall_ms;
    j["timings_ms"] = t;
  }
  return j.dump(2) + "\n";
}

std::string Report::to_text() const {
  std::vector<std::array<std::string, 6>> cells;
  cells.push_back({"check", "residual", "tolerance", "result", "ms", "detail"});
  for (const Row& r : rows) {
    std::ostringstream ms;
    ms << std::fixed << std::setprecision(1) << r.wall_ms;
    cells.push_back({r.name, format(r.residual), (r.at_least ? ">= " : "<= ") + format(r.tolerance),
                     r.pass ? "PASS" : "FAIL", ms.str(), r.detail});
  }
  std::array<std::size_t, 6> width{};
  for (const auto& row : cells)
    for (std::size_t c = 0; c < 6; ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  os << command << ": group " << config.group << ", " << config.cover.n_arcs << " arcs, N = "
     << config.grid << ", seed " << config.seed << "\n";
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t c = 0; c < 6; ++c) {
      std::string cell = row[c];
      if (c + 1 < 6) cell.resize(width[c], ' ');
      line += cell;
      if (c + 1 < 6) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << "\n";
  }
  if (homotopy) os << "\n" << homotopy->to_text();
  os << (all_pass() ? "all checks passed" : "some checks FAILED") << "\n";
  return os.str();
}

std::string Report::convergence_csv() const {
  std::ostringstream os;
  os << "N,residual\n";
  os << std::setprecision(17);
  for (auto [n, r] : convergence) os << n << "," << r << "\n";
  return os.str();
}

}  // namespace gaugeforge::cli

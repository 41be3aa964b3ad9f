#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaugeforge/bundle.hpp"

namespace gaugeforge::cli {

struct CoverConfig {
  int n_arcs = 3;
  double arc_length = 0.45;
  double margin = kDefaultMargin;
};

// k_ij(x) = exp(log + slope (x - c)) on one overlap component, c its midpoint.
struct TransitionSpec {
  int i = 0;
  int j = 1;
  int component = 0;
  std::vector<double> log;
  std::vector<double> slope;
  bool reflect = false;
  int cyclic = 0;
};

struct BundleConfig {
  enum class Type { Trivial, Flat, Transitions } type = Type::Trivial;
  // Flat holonomy: cyclic^c . reflection^r . exp(log).
  std::vector<double> holonomy_log;
  bool holonomy_reflect = false;
  int holonomy_cyclic = 0;
  std::vector<TransitionSpec> transitions;
  // Amplitude of a smooth change of local sections applied after
  // construction (0 keeps the constructed transitions).
  double frame_twist = 0.0;
};

struct InjectConfig {
  double compatibility = 0.0;
  double cocycle = 0.0;
};

struct RunConfig {
  std::string group = "SU2";
  CoverConfig cover;
  int grid = 512;
  std::uint64_t seed = 1;
  BundleConfig bundle;
  std::map<std::string, double> tolerances;
  InjectConfig inject;

  double tolerance(const std::string& name) const;
};

// Default tolerance of every named check; the keys accepted under
// "tolerances".
const std::map<std::string, double>& default_tolerances();

inline constexpr int kMinGrid = 32;
inline constexpr int kMaxGrid = 16384;

// Throws ConfigError with "<source>:<line>:<column>: message".
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

// Bundle described by the configuration (cocycle-validated).
Bundle build_bundle(const RunConfig& config);
StructureGroup config_group(const RunConfig& config);

}  // namespace gaugeforge::cli

#include "gaugeforge/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gaugeforge::cli {

using nlohmann::json;

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t = {
      {"cocycle", 1e-10},
      {"injection_relative", 0.1},
      {"compatibility", 1e-9},
      {"chart_roundtrip", 1e-10},
      {"glue", 1e-9},
      {"exp_homomorphism", 1e-10},
      {"evolve", 1e-7},
      {"evolve_drift", 1e-7},
      {"product_rule", 1e-5},
      {"product_rule_order", 3.5},
      {"contraction", 1e-9},
      {"recomposition", 1e-6},
      {"section", 1e-6},
      {"chain", 1e-9},
      {"verticality", 1e-8},
      {"factor_cocycle", 1e-6},
      {"factor_conjugation", 1e-6},
      {"associativity", 1e-6},
      {"inverse", 1e-6},
      {"connection", 1e-7},
      {"holonomy", 1e-8},
      {"holonomy_conjugation", 1e-7},
      {"holonomy_refinement", 1e-7},
      {"aut_action", 1e-6},
      {"aut_holonomy", 1e-7},
      {"twist", 1e-9},
  };
  return t;
}

double RunConfig::tolerance(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  return default_tolerances().at(name);
}

namespace {

struct Position {
  int line = 1;
  int column = 1;
};

Position position_of(const std::string& text, std::size_t byte) {
  Position p;
  for (std::size_t q = 0; q < byte && q < text.size(); ++q) {
    if (text[q] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

// Walks the object keys of a validated document; reports errors at the
// first textual occurrence of the offending key along its path.
class Reader {
 public:
  Reader(const std::string& text, const std::string& source) : text_(text), source_(source) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
    std::size_t at = 0;
    for (const std::string& key : path) {
      std::size_t f = text_.find("\"" + key + "\"", at);
      if (f == std::string::npos) break;
      at = f;
    }
    Position p = position_of(text_, at);
    std::string dotted;
    for (const std::string& k : path) dotted += (dotted.empty() ? "" : ".") + k;
    std::ostringstream os;
    os << source_ << ":" << p.line << ":" << p.column << ": " << (dotted.empty() ? "" : dotted + ": ")
       << msg;
    throw ConfigError(os.str());
  }

  void only_keys(const json& j, const std::vector<std::string>& path,
                 const std::set<std::string>& allowed) const {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
      if (!allowed.count(key)) {
        auto p = path;
        p.push_back(key);
        fail(p, "unknown key");
      }
    }
  }

  double number(const json& j, const std::vector<std::string>& path, double lo, double hi) const {
    if (!j.is_number()) fail(path, "expected a number");
    double v = j.get<double>();
    if (!(v >= lo && v <= hi)) {
      std::ostringstream os;
      os << "value " << v << " outside [" << lo << ", " << hi << "]";
      fail(path, os.str());
    }
    return v;
  }

  long long integer(const json& j, const std::vector<std::string>& path, long long lo,
                    long long hi) const {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    long long v = j.get<long long>();
    if (v < lo || v > hi) {
      std::ostringstream os;
      os << "value " << v << " outside [" << lo << ", " << hi << "]";
      fail(path, os.str());
    }
    return v;
  }

  bool boolean(const json& j, const std::vector<std::string>& path) const {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
  }

  std::vector<double> vector(const json& j, const std::vector<std::string>& path, int dim) const {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    if (static_cast<int>(j.size()) != dim)
      fail(path, "expected " + std::to_string(dim) + " coordinates");
    std::vector<double> v;
    for (const auto& x : j) {
      if (!x.is_number()) fail(path, "expected an array of numbers");
      v.push_back(x.get<double>());
    }
    return v;
  }

 private:
  const std::string& text_;
  const std::string& source_;
};

using Path = std::vector<std::string>;

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    Position p = position_of(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    if (auto c = what.find("parse error"); c != std::string::npos) what = what.substr(c);
    std::ostringstream os;
    os << source << ":" << p.line << ":" << p.column << ": " << what;
    throw ConfigError(os.str());
  }
  Reader r(text, source);
  RunConfig c;
  r.only_keys(doc, {}, {"group", "cover", "grid", "seed", "bundle", "tolerances", "inject"});

  if (doc.contains("group")) {
    if (!doc["group"].is_string()) r.fail({"group"}, "expected a group name");
    c.group = doc["group"].get<std::string>();
  }
  StructureGroup group(BaseKind::U1);
  try {
    group = StructureGroup::parse(c.group);
  } catch (const Error& e) {
    r.fail({"group"}, e.what());
  }

  if (doc.contains("cover")) {
    const json& j = doc["cover"];
    r.only_keys(j, {"cover"}, {"n_arcs", "arc_length", "margin"});
    if (j.contains("n_arcs")) c.cover.n_arcs = static_cast<int>(r.integer(j["n_arcs"], {"cover", "n_arcs"}, 1, 64));
    if (j.contains("arc_length"))
      c.cover.arc_length = r.number(j["arc_length"], {"cover", "arc_length"}, 1e-3, 1.0);
    if (j.contains("margin")) c.cover.margin = r.number(j["margin"], {"cover", "margin"}, 0.0, 0.1);
  }
  if (doc.contains("grid")) c.grid = static_cast<int>(r.integer(doc["grid"], {"grid"}, kMinGrid, kMaxGrid));
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) r.fail({"seed"}, "expected a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }

  int dim = group.algebra_dim();
  if (doc.contains("bundle")) {
    const json& j = doc["bundle"];
    r.only_keys(j, {"bundle"}, {"type", "holonomy", "transitions", "frame_twist"});
    std::string type = "trivial";
    if (j.contains("type")) {
      if (!j["type"].is_string()) r.fail({"bundle", "type"}, "expected a string");
      type = j["type"].get<std::string>();
    }
    if (type == "trivial") {
      c.bundle.type = BundleConfig::Type::Trivial;
    } else if (type == "flat") {
      c.bundle.type = BundleConfig::Type::Flat;
    } else if (type == "transitions") {
      c.bundle.type = BundleConfig::Type::Transitions;
    } else {
      r.fail({"bundle", "type"}, "expected \"trivial\", \"flat\" or \"transitions\"");
    }
    if (j.contains("holonomy")) {
      if (c.bundle.type != BundleConfig::Type::Flat)
        r.fail({"bundle", "holonomy"}, "holonomy is only used by flat bundles");
      const json& h = j["holonomy"];
      r.only_keys(h, {"bundle", "holonomy"}, {"log", "reflect", "cyclic"});
      if (h.contains("log")) c.bundle.holonomy_log = r.vector(h["log"], {"bundle", "holonomy", "log"}, dim);
      if (h.contains("reflect")) {
        c.bundle.holonomy_reflect = r.boolean(h["reflect"], {"bundle", "holonomy", "reflect"});
        if (c.bundle.holonomy_reflect && !group.has_reflection())
          r.fail({"bundle", "holonomy", "reflect"}, "group has no reflection component");
      }
      if (h.contains("cyclic"))
        c.bundle.holonomy_cyclic = static_cast<int>(
            r.integer(h["cyclic"], {"bundle", "holonomy", "cyclic"}, 0, group.cyclic_order() - 1));
    }
    if (j.contains("transitions")) {
      if (c.bundle.type != BundleConfig::Type::Transitions)
        r.fail({"bundle", "transitions"}, "transition tables need type \"transitions\"");
      const json& list = j["transitions"];
      if (!list.is_array()) r.fail({"bundle", "transitions"}, "expected an array");
      for (const json& t : list) {
        Path p{"bundle", "transitions"};
        r.only_keys(t, p, {"i", "j", "component", "log", "slope", "reflect", "cyclic"});
        TransitionSpec s;
        if (!t.contains("i") || !t.contains("j")) r.fail(p, "each transition needs \"i\" and \"j\"");
        s.i = static_cast<int>(r.integer(t["i"], {"bundle", "transitions", "i"}, 0, c.cover.n_arcs - 1));
        s.j = static_cast<int>(r.integer(t["j"], {"bundle", "transitions", "j"}, 0, c.cover.n_arcs - 1));
        if (s.i >= s.j) r.fail({"bundle", "transitions", "j"}, "transitions are given for i < j");
        if (t.contains("component"))
          s.component = static_cast<int>(r.integer(t["component"], {"bundle", "transitions", "component"}, 0, 1));
        s.log = t.contains("log") ? r.vector(t["log"], {"bundle", "transitions", "log"}, dim)
                                  : std::vector<double>(dim, 0.0);
        s.slope = t.contains("slope") ? r.vector(t["slope"], {"bundle", "transitions", "slope"}, dim)
                                      : std::vector<double>(dim, 0.0);
        if (t.contains("reflect")) {
          s.reflect = r.boolean(t["reflect"], {"bundle", "transitions", "reflect"});
          if (s.reflect && !group.has_reflection())
            r.fail({"bundle", "transitions", "reflect"}, "group has no reflection component");
        }
        if (t.contains("cyclic"))
          s.cyclic = static_cast<int>(
              r.integer(t["cyclic"], {"bundle", "transitions", "cyclic"}, 0, group.cyclic_order() - 1));
        c.bundle.transitions.push_back(std::move(s));
      }
    }
    if (j.contains("frame_twist"))
      c.bundle.frame_twist = r.number(j["frame_twist"], {"bundle", "frame_twist"}, 0.0, 1.0);
  }
  if (c.bundle.holonomy_log.empty()) c.bundle.holonomy_log.assign(dim, 0.0);

  if (doc.contains("tolerances")) {
    const json& j = doc["tolerances"];
    if (!j.is_object()) r.fail({"tolerances"}, "expected an object");
    for (const auto& [key, value] : j.items()) {
      if (!default_tolerances().count(key)) r.fail({"tolerances", key}, "unknown key");
      c.tolerances[key] = r.number(value, {"tolerances", key}, 0.0, 1e3);
    }
  }
  if (doc.contains("inject")) {
    const json& j = doc["inject"];
    r.only_keys(j, {"inject"}, {"compatibility", "cocycle"});
    if (j.contains("compatibility"))
      c.inject.compatibility = r.number(j["compatibility"], {"inject", "compatibility"}, 0.0, 0.5);
    if (j.contains("cocycle")) c.inject.cocycle = r.number(j["cocycle"], {"inject", "cocycle"}, 0.0, 0.5);
  }
  try {
    (void)build_cover(c.cover.n_arcs, c.cover.arc_length, c.cover.margin);
  } catch (const Error& e) {
    r.fail({"cover"}, e.what());
  }
  if (c.bundle.type == BundleConfig::Type::Flat && c.cover.n_arcs < 2)
    r.fail({"bundle", "type"}, "flat bundles with nontrivial holonomy need at least 2 arcs");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open configuration file");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str(), path);
}

StructureGroup config_group(const RunConfig& config) { return StructureGroup::parse(config.group); }

Bundle build_bundle(const RunConfig& config) {
  StructureGroup group = config_group(config);
  ClosedCover cover = build_cover(config.cover.n_arcs, config.cover.arc_length, config.cover.margin);
  const BundleConfig& bc = config.bundle;
  auto element = [&](const std::vector<double>& log, bool reflect, int cyclic) {
    GroupElement k = group.exp(group.from_coords(log));
    if (reflect) k = group.reflection() * k;
    for (int q = 0; q < cyclic; ++q) k = group.cyclic_generator() * k;
    return k;
  };

  Bundle b = make_trivial_bundle(group, cover, config.grid);
  switch (bc.type) {
    case BundleConfig::Type::Trivial:
      break;
    case BundleConfig::Type::Flat:
      b = make_flat_bundle(group, element(bc.holonomy_log, bc.holonomy_reflect, bc.holonomy_cyclic),
                           cover, config.grid);
      break;
    case BundleConfig::Type::Transitions: {
      auto fn = [&](int i, int j, const Arc& comp, double x) {
        int index = 0;
        for (const auto& ov : cover.enlarged_overlaps()) {
          if (ov.i != i || ov.j != j) continue;
          for (std::size_t q = 0; q < ov.components.size(); ++q)
            if (std::abs(circle_delta(ov.components[q].start(), comp.start())) < 1e-12)
              index = static_cast<int>(q);
        }
        for (const TransitionSpec& s : bc.transitions) {
          if (s.i != i || s.j != j || s.component != index) continue;
          double t = circle_delta(x, comp.start() + comp.length() / 2.0);
          std::vector<double> v(s.log);
          for (std::size_t a = 0; a < v.size(); ++a) v[a] += s.slope[a] * t;
          return element(v, s.reflect, s.cyclic);
        }
        return group.identity();
      };
      b = make_bundle(group, cover, config.grid, fn);
      break;
    }
  }
  if (bc.frame_twist > 0.0) {
    int dim = group.algebra_dim();
    double a = bc.frame_twist;
    b = rechart(b, [&](int i, double x) {
      std::vector<double> c(dim);
      for (int q = 0; q < dim; ++q) c[q] = a * std::sin(kTwoPi * (x + 0.17 * (i + 1) + 0.31 * q));
      return group.exp(group.from_coords(c));
    });
  }
  return b;
}

}  // namespace gaugeforge::cli

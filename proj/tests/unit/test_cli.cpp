#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaugeforge/cli/commands.hpp"
#include "gaugeforge/error.hpp"

using namespace gaugeforge;
using namespace gaugeforge::cli;

namespace {

const std::filesystem::path kConfigs = GAUGEFORGE_CONFIG_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "bad.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const Row* find_row(const Report& r, const std::string& name) {
  for (const Row& row : r.rows)
    if (row.name == name) return &row;
  return nullptr;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "gaugeforge");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  std::filesystem::path p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("shipped configurations parse") {
  for (const char* name : {"su2_flat", "so3_twisted", "o2_reflection", "u1z3_class1", "trivial_single"}) {
    RunConfig c = load_config((kConfigs / (std::string(name) + ".json")).string());
    CHECK(c.grid >= 512);
    CHECK_NOTHROW(build_bundle(c));
  }
}

TEST_CASE("configuration errors carry line and column") {
  std::string syntax = config_error("{\n  \"group\": \"SU2\",\n  \"grid\": ,\n}");
  CHECK(syntax.rfind("bad.json:3:", 0) == 0);

  std::string unknown = config_error("{\n  \"group\": \"SU2\",\n  \"colour\": 3\n}");
  CHECK(unknown.rfind("bad.json:3:", 0) == 0);
  CHECK(unknown.find("colour") != std::string::npos);

  std::string type = config_error("{\n  \"group\": \"SU2\",\n  \"grid\": \"big\"\n}");
  CHECK(type.rfind("bad.json:3:", 0) == 0);

  CHECK(!config_error("{\"group\": \"SU3\"}").empty());
  CHECK(!config_error("{\"group\": \"U1\", \"bundle\": {\"type\": \"flat\", \"holonomy\": {\"reflect\": true}}}").empty());
  CHECK(!config_error("{\"grid\": 8}").empty());
  CHECK(!config_error("{\"tolerances\": {\"nonsense\": 1.0}}").empty());
  CHECK(config_error("{\"group\": \"U1\"}").empty());
}

TEST_CASE("trivial single-chart bundle: extension rows") {
  RunConfig c = load_config((kConfigs / "trivial_single.json").string());
  Report r = run_command("verify-extension", c);
  CHECK(r.all_pass());
  for (const char* name : {"verticality", "factor_cocycle", "factor_conjugation"}) {
    const Row* row = find_row(r, name);
    REQUIRE(row != nullptr);
    CHECK(row->residual <= 1e-10);
  }
}

TEST_CASE("U1xZ3 class 1") {
  RunConfig c = load_config((kConfigs / "u1z3_class1.json").string());
  Report r = run_command("classify", c);
  CHECK(r.all_pass());
  REQUIRE(r.homotopy.has_value());
  CHECK(r.homotopy->bundle_class == classify_S1(build_bundle(c)).to_string());
  CHECK(classify_S1(build_bundle(c)).cyclic() == 1);
  const Row* d = find_row(r, "diff_subgroup");
  REQUIRE(d != nullptr);
  CHECK(d->detail == "IdentityComponent");
}

TEST_CASE("injected incompatibility fails and names the overlap") {
  RunConfig c = load_config((kConfigs / "su2_flat.json").string());
  c.inject.compatibility = 1e-3;
  Report r = run_command("verify-gauge", c);
  const Row* row = find_row(r, "compatibility");
  REQUIRE(row != nullptr);
  CHECK(!row->pass);
  CHECK(row->detail.find("overlap (") != std::string::npos);
  CHECK(!r.all_pass());
}

TEST_CASE("reports are deterministic") {
  RunConfig c = load_config((kConfigs / "su2_flat.json").string());
  std::string a = run_command("verify-bundle", c).to_json(false);
  std::string b = run_command("verify-bundle", c).to_json(false);
  CHECK(a == b);
  CHECK(a.find("\"rows\"") != std::string::npos);
}

TEST_CASE("exit codes") {
  std::string cfg = (kConfigs / "trivial_single.json").string();
  std::filesystem::path out = std::filesystem::temp_directory_path() / "gaugeforge_cli_test.json";
  CHECK(run({"verify-bundle", "--config", cfg, "--out", out.string()}) == 0);
  CHECK(std::filesystem::exists(out));
  CHECK(slurp(out).find("verify-bundle") != std::string::npos);

  std::filesystem::path failing = temp_file(
      "gaugeforge_cli_inject.json",
      "{\"group\": \"SU2\", \"cover\": {\"n_arcs\": 3, \"arc_length\": 0.6}, "
      "\"bundle\": {\"type\": \"flat\", \"holonomy\": {\"log\": [0.2, 0.1, 0.0]}}, "
      "\"inject\": {\"cocycle\": 0.001}}");
  CHECK(run({"verify-bundle", "--config", failing.string()}) == 1);

  std::filesystem::path broken = temp_file("gaugeforge_cli_broken.json", "{\"group\": ");
  CHECK(run({"verify-bundle", "--config", broken.string()}) == 2);
  CHECK(run({"verify-bundle", "--config", "/nonexistent/config.json"}) == 2);
  CHECK(run({"no-such-command", "--config", cfg}) == 2);
  CHECK(run({"verify-bundle", "--config", cfg, "--grid", "4"}) == 2);
}

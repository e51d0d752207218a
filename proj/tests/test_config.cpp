#include "doctest.h"

#include "refsyn/bench.hpp"
#include "refsyn/config.hpp"
#include "refsyn/error.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace refsyn;
using nlohmann::json;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(REFSYN_SOURCE_DIR) / "configs";

json thermal_doc() {
  return json::parse(R"({
    "name": "tiny",
    "kind": "thermal",
    "tau": 0.25,
    "zones": [
      {"name": "r", "type": "room-a", "capacitance": 1.0, "gain": 0.0},
      {"name": "s", "type": "slab", "capacitance": 4.0, "water_resistance": 1.0}
    ],
    "fixed": {"outside": 28.0, "water": 18.0},
    "links": [{"a": "r", "b": "outside", "resistance": 8.0},
              {"a": "r", "b": "s", "resistance": 2.0}],
    "domain": {"r": [20, 28], "s": [20, 28]},
    "grid": {"r": 4, "s": 2},
    "disturbance": {"r": [-0.2, 0.2]},
    "propositions": {"B": {"r": [22, 26]}},
    "spec": {"safe": "A", "persist": "B"}
  })");
}

std::string error_of(const json &doc) {
  try {
    parse_config(doc.dump(), "doc");
  } catch (const ConfigError &e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST_CASE("thermal config parses into a two-mode system") {
  const auto cfg = parse_config(thermal_doc().dump());
  CHECK(cfg.name == "tiny");
  CHECK(cfg.system.modes.size() == 2);
  CHECK(cfg.system.grid == std::vector<std::size_t>{4, 2});
  CHECK(cfg.system.axis_names == std::vector<std::string>{"r", "s"});
  // A was not given, so it covers the domain; B's slab axis falls back too
  CHECK(cfg.system.propositions.at("A") == cfg.system.domain);
  const Box &b = cfg.system.propositions.at("B");
  CHECK(b.lo == std::vector<double>{22, 20});
  CHECK(b.hi == std::vector<double>{26, 28});
  CHECK(cfg.scope == ActionScope::Enabled);
  CHECK(cfg.spec.goals.empty());
}

TEST_CASE("config errors name the offending path") {
  auto doc = thermal_doc();
  doc["zones"][1]["capacitance"] = -1.0;
  CHECK(error_of(doc).find("zone 's'") != std::string::npos);

  doc = thermal_doc();
  doc.erase("tau");
  CHECK(error_of(doc).find("tau") != std::string::npos);

  doc = thermal_doc();
  doc["domain"]["r"] = json::array({28, 20});
  CHECK(error_of(doc).find("domain") != std::string::npos);

  doc = thermal_doc();
  doc["kind"] = "hydraulic";
  CHECK(error_of(doc).find("kind") != std::string::npos);

  doc = thermal_doc();
  doc["links"][0]["b"] = "nowhere";
  CHECK_FALSE(error_of(doc).empty());

  doc = thermal_doc();
  doc["tau"] = 10.0; // explicit Euler step too large for the room
  CHECK_FALSE(error_of(doc).empty());

  CHECK_THROWS_AS(parse_config("{not json", "x"), ConfigError);
  CHECK_THROWS_AS(load_config(kConfigs / "missing.json"), ConfigError);
}

TEST_CASE("spec files parse and reject unknown shapes") {
  const Spec s = parse_spec(R"({"safe": "S", "persist": "P", "goals": ["g1", "g2"]})");
  CHECK(s.safe == "S");
  CHECK(s.persist == "P");
  CHECK(s.goals == std::vector<std::string>{"g1", "g2"});
  CHECK_THROWS_AS(parse_spec(R"({"goals": "g"})"), ConfigError);
}

TEST_CASE("shipped configs load and validate") {
  std::size_t layouts = 0;
  for (const auto &e : std::filesystem::directory_iterator(kConfigs / "layouts")) {
    CAPTURE(e.path().string());
    const auto cfg = load_config(e.path());
    CHECK(cfg.thermal.has_value());
    CHECK(cfg.system.modes.size() == (std::size_t{1} << cfg.thermal->slab_count()));
    CHECK(cfg.system.propositions.count("B") == 1);
    ++layouts;
  }
  CHECK(layouts == 6);
  const auto desk = load_config(kConfigs / "desk_1room_1slab.json");
  CHECK(desk.system.modes.size() == 2);
  const auto affine = load_config(kConfigs / "affine_2d.json");
  CHECK(affine.spec.goals.size() == 2);
  CHECK(affine.refine.splits_per_iteration == 2);
}

TEST_CASE("bench rows are sorted and match the documented header") {
  std::vector<BenchRow> rows(2);
  rows[0].layout = "b";
  rows[0].representation = "list";
  rows[1].layout = "a";
  rows[1].representation = "bdd-log";
  std::ostringstream out;
  write_bench(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == kBenchHeader);
  std::getline(in, line);
  CHECK(line.rfind("a,bdd-log,", 0) == 0);
}

TEST_CASE("T2 replays one split sequence per level and T3 accounting holds") {
  auto cfg = load_config(kConfigs / "layouts" / "L1_1room_1slab.json");
  BenchOptions bo;
  bo.repeats = 1;
  bo.representations = default_representations(false);
  const auto rows = bench_t2(cfg, {10, 5}, bo);
  REQUIRE(rows.size() == 2 * bo.representations.size());
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    CHECK(rows[i].n_states < rows[i + 1].n_states);
    // every representation sees the same abstraction at a given level
    CHECK(rows[i].n_transitions == rows[0].n_transitions);
    CHECK(rows[i + 1].n_transitions == rows[1].n_transitions);
  }
  CHECK_THROWS_AS(bench_t2(cfg, {}, bo), UsageError);

  const auto t3 = bench_t3(cfg, std::chrono::milliseconds(30), bo);
  REQUIRE(t3.size() == bo.representations.size());
  for (const auto &r : t3)
    CHECK(r.completed_iterations >= r.report.rows.size());
  const auto buckets = t3_buckets(t3, 50);
  CHECK_FALSE(buckets.empty());
  CHECK_THROWS_AS(bench_t3(cfg, std::chrono::milliseconds(0), bo), UsageError);
}

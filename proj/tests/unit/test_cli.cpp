#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Captured {
  int code;
  std::string err;
};

Captured run(std::vector<std::string> args) {
  args.insert(args.begin(), "iltlab");
  std::ostringstream err;
  auto* old = std::cerr.rdbuf(err.rdbuf());
  const int code = iltlab::cli::run(args);
  std::cerr.rdbuf(old);
  return {code, err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
  const auto p = dir / name;
  std::ofstream(p) << j.dump();
  return p;
}

}  // namespace

TEST_CASE("cli exit codes") {
  const auto dir = iltlab::test::scratch_dir("cli-codes");
  const auto cache = iltlab::test::cache_dir().string();
  auto missing = run({"experiment", "--config", (dir / "missing.json").string(), "--out", dir.string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("missing.json") != std::string::npos);

  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"green"}).code == 2);

  const auto bad = write_config(dir, "bad.json", {{"kind", "intersection-tail"}, {"replicas", 10000}, {"bogus", 1}});
  auto r = run({"experiment", "--config", bad.string(), "--out", (dir / "o").string(), "--cache-dir", cache});
  CHECK(r.code == 2);
  CHECK(r.err.find("config.bogus") != std::string::npos);

  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK(run({"green", "--config", (dir / "broken.json").string(), "--out", (dir / "o").string()}).code == 2);

  // Level sets that are never reached fail the effective-sample-size floor.
  const auto rare = write_config(dir, "rare.json",
                                 {{"kind", "level-set-geometry"}, {"replicas", 200}, {"stop_radius", 12}, {"oracle_box", 12},
                                  {"n", 9}, {"m", 9}, {"L", 3}, {"epsilon", 0.2}});
  r = run({"experiment", "--config", rare.string(), "--out", (dir / "rare").string(), "--cache-dir", cache});
  CHECK(r.code == 3);
  CHECK(r.err.find("experiments:") != std::string::npos);
}

TEST_CASE("cli outputs are thread-independent, guarded and replayable") {
  const auto dir = iltlab::test::scratch_dir("cli-runs");
  const auto cache = iltlab::test::cache_dir().string();
  const auto cfg = write_config(dir, "decomp.json",
                                {{"kind", "intersection-decomposition"}, {"replicas", 1500}, {"stop_radius", 16},
                                 {"oracle_box", 12}, {"t", 3}, {"A", {1, 4}}, {"chunk", 64}});
  const auto a = dir / "a", b = dir / "b";
  REQUIRE(run({"experiment", "--config", cfg.string(), "--out", a.string(), "--threads", "1", "--cache-dir", cache}).code == 0);
  REQUIRE(run({"experiment", "--config", cfg.string(), "--out", b.string(), "--threads", "8", "--cache-dir", cache}).code == 0);
  for (const char* f : {"pairs.csv", "summary.csv", "summary.json"}) CHECK(slurp(a / f) == slurp(b / f));

  const auto manifest = json::parse(slurp(a / "manifest.json"));
  CHECK(manifest.at("command") == "experiment");
  CHECK(manifest.at("config").at("replicas") == 1500);
  CHECK(manifest.at("seed") == 1);
  CHECK(manifest.at("outputs").size() == 3);
  CHECK(manifest.contains("wall_time_seconds"));
  CHECK(manifest.at("versions").contains("eigen"));

  const auto before = slurp(a / "pairs.csv");
  auto refused = run({"experiment", "--config", cfg.string(), "--out", a.string(), "--cache-dir", cache});
  CHECK(refused.code == 2);
  CHECK(refused.err.find("--force") != std::string::npos);
  CHECK(run({"experiment", "--config", cfg.string(), "--out", a.string(), "--force", "--cache-dir", cache}).code == 0);
  CHECK(slurp(a / "pairs.csv") == before);

  CHECK(run({"replay", "--manifest", (a / "manifest.json").string(), "--out", (dir / "c").string(), "--threads", "3",
             "--cache-dir", cache})
            .code == 0);
  CHECK(slurp(dir / "c" / "pairs.csv") == before);

  CHECK(run({"experiment", "--config", cfg.string(), "--out", (dir / "s").string(), "--seed", "9", "--cache-dir", cache})
            .code == 0);
  CHECK(json::parse(slurp(dir / "s" / "manifest.json")).at("config").at("seed") == 9);
  CHECK(slurp(dir / "s" / "pairs.csv") != before);
}

TEST_CASE("cli subcommands") {
  const auto dir = iltlab::test::scratch_dir("cli-subcommands");
  const auto cache = iltlab::test::cache_dir().string();
  auto sub = [&](const std::string& cmd, const json& cfg) {
    const auto p = write_config(dir, cmd + ".json", cfg);
    return run({cmd, "--config", p.string(), "--out", (dir / cmd).string(), "--cache-dir", cache});
  };
  CHECK(sub("green", {{"dim", 5}, {"box", 12}, {"table_radius", 1}, {"replicas", 200}, {"mc_radius", 1}}).code == 0);
  CHECK(slurp(dir / "green" / "green.csv").rfind("# schema: green/v1\n", 0) == 0);
  CHECK(sub("capacity", {{"dim", 5}, {"box", 12}, {"sites", {{0, 0, 0, 0, 0}, {1, 0, 0, 0, 0}}}}).code == 0);
  CHECK(sub("moments", {{"dim", 5}, {"replicas", 500}, {"stop_radius", 12}, {"n_max", 2}}).code == 0);
  CHECK(sub("trail-check", {{"dim", 3}, {"path", {{0, 0, 0}, {1, 0, 0}, {0, 0, 0}}}, {"lambda", {{0, 0, 0}, {1, 0, 0}}}}).code == 0);
  CHECK(json::parse(slurp(dir / "trail-check" / "trail.json")).at("trail_stock").at("certificate").at("holds") == true);
  CHECK(sub("simulate", {{"dim", 3}, {"steps", 20}, {"replicas", 3}}).code == 0);
  CHECK(sub("simulate", {{"dim", 3}, {"steps", 20}, {"stop_radius", 4}}).code == 2);
  CHECK(sub("rate", {{"dim", 5}, {"box", 12}, {"lambda", {{"ball", 1}}}}).code == 0);
  const auto rate = json::parse(slurp(dir / "rate" / "rate.json"));
  CHECK(rate.at("feasibility").get<double>() >= 1.0);
  CHECK(rate.at("feasibility").get<double>() <= 1.0 + 1e-6);
}

#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <nlohmann/json.hpp>

#include "iltlab/capacity.hpp"
#include "iltlab/error.hpp"
#include "iltlab/experiments.hpp"
#include "iltlab/green.hpp"
#include "iltlab/moments.hpp"
#include "iltlab/rate.hpp"
#include "iltlab/stats.hpp"
#include "iltlab/trail.hpp"
#include "iltlab/walk.hpp"

namespace iltlab::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  int threads = 1;
  bool force = false;
  std::string cache_dir;
  std::string manifest;
};

struct Outputs {
  json config;  // normalised, defaults filled in
  std::vector<std::pair<std::string, std::string>> files;
  // Set when the run finished but a checked inequality failed.
  std::optional<std::string> violation;
};

json read_json_file(const std::string& path, const char* what) {
  if (!fs::exists(path)) throw InvalidInput(std::string(what) + " file not found: " + path);
  std::ifstream in(path);
  if (!in) throw InvalidInput(std::string(what) + " file unreadable: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string(what) + " file " + path + ": " + e.what());
  }
}

std::string fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Typed access to a command config with field-level errors and unknown-key rejection.
class Reader {
 public:
  Reader(const json& j, std::set<std::string> allowed) : j_(j) {
    if (!j.is_object()) throw ConfigError("<root>", "must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (!allowed.contains(key)) throw ConfigError(key, "unknown field");
    }
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  std::int64_t integer(const std::string& key, std::int64_t fallback, std::int64_t lo, std::int64_t hi) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(key, "must be an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(hi)) {
      throw ConfigError(key, "must be <= " + std::to_string(hi));
    }
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) throw ConfigError(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  std::uint64_t seed() const {
    if (!has("seed")) return 1;
    const auto& v = j_.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError("seed", "must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  double number(const std::string& key, double fallback, double lo, double hi) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(key, "must be a number");
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi)) throw ConfigError(key, "must lie in [" + format_double(lo) + ", " + format_double(hi) + "]");
    return x;
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ConfigError(key, "must be a boolean");
    return j_.at(key).get<bool>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(key, "must be a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(key, "must be a nonempty array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  SiteList sites(const std::string& key, int dim) const {
    return parse_sites(j_.at(key), key, dim);
  }

  static SiteList parse_sites(const json& v, const std::string& key, int dim) {
    if (!v.is_array() || v.empty()) throw ConfigError(key, "must be a nonempty array of points");
    SiteList out;
    for (const auto& p : v) {
      if (!p.is_array() || static_cast<int>(p.size()) != dim) {
        throw ConfigError(key, "every point needs " + std::to_string(dim) + " integer coordinates");
      }
      std::vector<LatticePoint::Coord> c;
      for (const auto& x : p) {
        if (!x.is_number_integer()) throw ConfigError(key, "coordinates must be integers");
        c.push_back(x.get<LatticePoint::Coord>());
      }
      out.push_back(LatticePoint::from_coords(c));
    }
    return out;
  }

  const json& raw(const std::string& key) const { return j_.at(key); }

 private:
  const json& j_;
};

json coords(const LatticePoint& z) { return std::vector<int>(z.coords().begin(), z.coords().end()); }

json site_list(const SiteList& s) {
  json out = json::array();
  for (const auto& z : s) out.push_back(coords(z));
  return out;
}

std::string coord_header(int dim) {
  std::string s;
  for (int i = 1; i <= dim; ++i) s += "x" + std::to_string(i) + ',';
  return s;
}

std::string coord_cells(const LatticePoint& z) {
  std::string s;
  for (int i = 0; i < z.dim(); ++i) s += std::to_string(z[i]) + ',';
  return s;
}

fs::path cache_dir(const Options& o) { return o.cache_dir.empty() ? fs::path(o.out) / ".oracle-cache" : fs::path(o.cache_dir); }

GreenOracle oracle_for(int dim, int box, const Options& o) {
  const fs::path dir = cache_dir(o);
  fs::create_directories(dir);
  return GreenOracle::cached_box(dim, box, dir / ("green-d" + std::to_string(dim) + "-b" + std::to_string(box) + ".bin"));
}

ParallelConfig parallel(const Options& o, std::uint64_t chunk) { return {o.threads, chunk}; }

// --- commands --------------------------------------------------------------

Outputs cmd_green(const json& j, const Options& o) {
  const Reader r(j, {"dim", "box", "seed", "table_radius", "mc_radius", "replicas", "stop_radius", "chunk"});
  const int dim = static_cast<int>(r.integer("dim", 5, 3, kMaxDim));
  const int box = static_cast<int>(r.integer("box", 24, 4, 64));
  const int table_radius = static_cast<int>(r.integer("table_radius", 5, 0, box));
  const int mc_radius = static_cast<int>(r.integer("mc_radius", 3, 0, box / 2));
  const auto replicas = static_cast<std::uint64_t>(r.integer("replicas", 0, 0, std::int64_t{1} << 40));
  const auto stop_radius = r.integer("stop_radius", 60, 2, 100000);
  const auto chunk = static_cast<std::uint64_t>(r.integer("chunk", 4096, 1, std::int64_t{1} << 32));
  const std::uint64_t seed = r.seed();
  const GreenOracle oracle = oracle_for(dim, box, o);

  Outputs out;
  out.config = {{"dim", dim}, {"box", box}, {"seed", seed}, {"table_radius", table_radius}, {"mc_radius", mc_radius},
                {"replicas", replicas}, {"stop_radius", stop_radius}, {"chunk", chunk}};
  std::string table = "# schema: green/v1\n" + coord_header(dim) + "orbit_size,G\n";
  for (std::size_t i = 0; i < oracle.table_size(); ++i) {
    const LatticePoint z = oracle.representative(i);
    if (z.linf_norm() > table_radius) continue;
    table += coord_cells(z) + std::to_string(oracle.table_weight(i)) + ',' + format_double(oracle.table_value(i)) + '\n';
  }
  out.files.emplace_back("green.csv", table);
  if (replicas > 0) {
    SiteList reps;
    for (std::size_t i = 0; i < oracle.table_size(); ++i) {
      const LatticePoint z = oracle.representative(i);
      if (z.linf_norm() <= mc_radius) reps.push_back(z);
    }
    const auto est = green_mc(dim, reps, replicas, stop_radius, seed, oracle, parallel(o, chunk));
    std::string mc = "# schema: green-mc/v1\n" + coord_header(dim) + "oracle,mc,se,bias,within\n";
    for (const auto& e : est) {
      const double g = oracle(e.site);
      const bool within = std::abs(e.mean - g) <= 3.0 * e.standard_error + e.bias_bound + oracle.boundary_error_bound();
      mc += coord_cells(e.site) + format_double(g) + ',' + format_double(e.mean) + ',' + format_double(e.standard_error) +
            ',' + format_double(e.bias_bound) + ',' + (within ? "1" : "0") + '\n';
    }
    out.files.emplace_back("green_mc.csv", mc);
  }
  const json summary = {{"G0", oracle.at_origin()},
                        {"residual", oracle.residual()},
                        {"iterations", oracle.iterations()},
                        {"boundary_error", oracle.boundary_error_bound()},
                        {"decay_constant", oracle.decay_constant()},
                        {"square_sum", oracle.square_sum()}};
  out.files.emplace_back("summary.json", summary.dump(2) + '\n');
  return out;
}

Outputs cmd_capacity(const json& j, const Options& o) {
  const Reader r(j, {"dim", "box", "sites", "replicas", "stop_radius", "seed", "chunk"});
  const int dim = static_cast<int>(r.integer("dim", 5, 3, kMaxDim));
  const int box = static_cast<int>(r.integer("box", 24, 4, 64));
  if (!r.has("sites")) throw ConfigError("sites", "required");
  const SiteList sites = r.sites("sites", dim);
  const auto replicas = static_cast<std::uint64_t>(r.integer("replicas", 0, 0, std::int64_t{1} << 40));
  const auto stop_radius = r.integer("stop_radius", 60, 2, 100000);
  const auto chunk = static_cast<std::uint64_t>(r.integer("chunk", 1024, 1, std::int64_t{1} << 32));
  const std::uint64_t seed = r.seed();
  const GreenOracle oracle = oracle_for(dim, box, o);

  const auto eq = equilibrium_solve(sites, oracle);
  const auto var = variational_lower_bound(sites, oracle);
  const auto hm = harmonic_measure(sites, oracle);
  json result = {{"sites", site_list(sites)},
                 {"equilibrium", {{"capacity", eq.capacity}, {"measure", eq.measure}, {"residual", eq.error},
                                  {"min_weight", eq.min_weight}, {"negative_weights", eq.negative_weights}}},
                 {"variational", {{"bound", var.bound}, {"max_potential", var.max_potential}, {"kappa_hat", var.kappa_hat}}}};
  json q = json::array();
  for (Eigen::Index i = 0; i < hm.q.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(hm.q.cols()));
    for (Eigen::Index k = 0; k < hm.q.cols(); ++k) row[static_cast<std::size_t>(k)] = hm.q(i, k);
    q.push_back({{"from", i < hm.q.rows() - 1 ? coords(sites[static_cast<std::size_t>(i)]) : coords(LatticePoint(dim))},
                 {"hit", row},
                 {"escape", hm.escape(i)}});
  }
  result["harmonic_measure"] = q;
  if (replicas > 0) {
    const auto mc = capacity_mc(sites, replicas, stop_radius, seed, oracle, parallel(o, chunk));
    result["escape_mc"] = {{"capacity", mc.capacity}, {"standard_error", mc.error}, {"bias_bound", mc.bias_bound},
                           {"replicas", replicas}};
  }
  Outputs out;
  out.config = {{"dim", dim}, {"box", box}, {"sites", site_list(sites)}, {"replicas", replicas},
                {"stop_radius", stop_radius}, {"seed", seed}, {"chunk", chunk}};
  out.files.emplace_back("capacity.json", result.dump(2) + '\n');
  return out;
}

Outputs cmd_moments(const json& j, const Options& o) {
  const Reader r(j, {"dim", "q", "n_max", "replicas", "stop_radius", "seed", "chunk"});
  const int dim = static_cast<int>(r.integer("dim", 5, 3, kMaxDim));
  const double q = r.number("q", 2.0, 1.0, 2.0);
  const int n_max = static_cast<int>(r.integer("n_max", 3, 1, 4));
  const auto replicas = static_cast<std::uint64_t>(r.integer("replicas", 10000, 1, std::int64_t{1} << 40));
  const auto stop_radius = r.integer("stop_radius", 40, 2, 100000);
  const auto chunk = static_cast<std::uint64_t>(r.integer("chunk", 256, 1, std::int64_t{1} << 32));
  const std::uint64_t seed = r.seed();
  const auto table = moment_bound_constant(q, dim, n_max, replicas, stop_radius, seed, parallel(o, chunk));
  std::string csv = "# schema: moments/v1\nn,estimate,se,envelope\n";
  for (const auto& row : table.rows) {
    csv += std::to_string(row.n) + ',' + format_double(row.estimate) + ',' + format_double(row.standard_error) + ',' +
           format_double(row.envelope) + '\n';
  }
  Outputs out;
  out.config = {{"dim", dim}, {"q", q}, {"n_max", n_max}, {"replicas", replicas}, {"stop_radius", stop_radius},
                {"seed", seed}, {"chunk", chunk}};
  out.files.emplace_back("moments.csv", csv);
  out.files.emplace_back("summary.json", json({{"q", q}, {"constant", table.constant}}).dump(2) + '\n');
  return out;
}

Outputs cmd_trail_check(const json& j, const Options&) {
  const Reader r(j, {"occupation", "dim", "path", "lambda", "seed"});
  EdgeOccupation e;
  Outputs out;
  if (r.has("occupation")) {
    e = occupation_from_json(r.raw("occupation"));
    out.config = {{"occupation", to_json(e)}};
  } else {
    if (!r.has("path") || !r.has("lambda")) throw ConfigError("path", "either occupation or path + lambda is required");
    const int dim = static_cast<int>(r.integer("dim", 5, 1, kMaxDim));
    const SiteList path = r.sites("path", dim);
    const SiteList lambda = r.sites("lambda", dim);
    e = edge_occupation(path, lambda);
    out.config = {{"dim", dim}, {"path", site_list(path)}, {"lambda", site_list(lambda)}};
  }
  const TrailStock ts = extract_trail_stock(e);
  const LoopTransfer lt = loop_transfer_check(e, ts);
  json levels = json::array();
  bool all = ts.holds;
  for (const auto& l : ts.levels) {
    levels.push_back({{"level", l.level}, {"holds", l.holds}});
    all = all && l.holds;
  }
  json result = {{"occupation", to_json(e)},
                 {"trail_stock", to_json(ts)},
                 {"levels", levels},
                 {"loop_transfer", {{"lhs", lt.lhs.str()}, {"rhs", lt.rhs.str()}, {"holds", lt.holds}}},
                 {"multinomial", multinomial_count_bound(e).str()}};
  out.files.emplace_back("trail.json", result.dump(2) + '\n');
  if (!all) out.violation = "trail: certificate inequality violated";
  if (!lt.holds) out.violation = "trail: loop transfer inequality violated";
  return out;
}

Outputs cmd_rate(const json& j, const Options& o) {
  const Reader r(j, {"dim", "box", "lambda", "xi", "calibration_tol", "improvement_floor", "use_symmetry", "seed"});
  const int dim = static_cast<int>(r.integer("dim", 5, 3, kMaxDim));
  const int box = static_cast<int>(r.integer("box", 16, 4, 64));
  if (!r.has("lambda")) throw ConfigError("lambda", "required: {\"ball\": r} or a list of points");
  SiteList lambda;
  json lambda_cfg = r.raw("lambda");
  if (lambda_cfg.is_object()) {
    if (!lambda_cfg.contains("ball") || !lambda_cfg.at("ball").is_number_integer() || lambda_cfg.at("ball").get<int>() < 0) {
      throw ConfigError("lambda", "object form must be {\"ball\": r} with integer r >= 0");
    }
    lambda = l1_ball(dim, lambda_cfg.at("ball").get<int>());
  } else {
    lambda = r.sites("lambda", dim);
  }
  OptimizerConfig cfg;
  cfg.calibration_tol = r.number("calibration_tol", 1e-6, 1e-12, 1e-2);
  cfg.improvement_floor = r.number("improvement_floor", 1e-5, 0.0, 0.1);
  cfg.use_symmetry = r.flag("use_symmetry", true);
  cfg.parallel = parallel(o, 1);
  const auto xi = r.numbers("xi", {1.0, 4.0});
  for (double x : xi) {
    if (!(x > 0.0)) throw ConfigError("xi", "entries must be positive");
  }
  const GreenOracle oracle = oracle_for(dim, box, o);
  const RateResult rate = minimize_rate(lambda, oracle, cfg);
  const auto pred = rate_predictions(rate, xi);
  json result = to_json(rate);
  result["feasibility_interval"] = {1.0, 1.0 + cfg.calibration_tol};
  result["feasible"] = rate.norm >= 1.0 && rate.norm <= 1.0 + cfg.calibration_tol;
  std::string csv = "# schema: rate-predictions/v1\n# finite-volume surrogate slopes\nxi,self_intersection_slope,intersection_slope\n";
  for (const auto& p : pred) {
    csv += format_double(p.xi) + ',' + format_double(p.self_intersection_slope) + ',' + format_double(p.intersection_slope) + '\n';
  }
  Outputs out;
  out.config = {{"dim", dim}, {"box", box}, {"lambda", lambda_cfg}, {"xi", xi},
                {"calibration_tol", cfg.calibration_tol}, {"improvement_floor", cfg.improvement_floor},
                {"use_symmetry", cfg.use_symmetry}};
  out.files.emplace_back("rate.json", result.dump(2) + '\n');
  out.files.emplace_back("predictions.csv", csv);
  return out;
}

Outputs cmd_simulate(const json& j, const Options& o) {
  const Reader r(j, {"dim", "seed", "replicas", "steps", "stop_radius", "origin_included", "chunk"});
  const int dim = static_cast<int>(r.integer("dim", 5, 1, kMaxDim));
  const std::uint64_t seed = r.seed();
  const auto replicas = static_cast<std::uint64_t>(r.integer("replicas", 1, 1, 1000000));
  const bool origin_included = r.flag("origin_included", true);
  const auto chunk = static_cast<std::uint64_t>(r.integer("chunk", 16, 1, std::int64_t{1} << 32));
  if (r.has("steps") == r.has("stop_radius")) throw ConfigError("steps", "give exactly one of steps or stop_radius");
  Horizon horizon;
  json horizon_cfg;
  if (r.has("steps")) {
    const auto steps = r.integer("steps", 0, 0, std::int64_t{1} << 40);
    horizon = FiniteHorizon{static_cast<std::uint64_t>(steps)};
    horizon_cfg = {"steps", steps};
  } else {
    const auto radius = r.integer("stop_radius", 0, 1, 100000);
    if (dim <= 2) throw ConfigError("stop_radius", "truncated infinite horizon needs dim >= 3");
    horizon = TruncatedInfinite{radius};
    horizon_cfg = {"stop_radius", radius};
  }
  auto parts = map_chunks(replicas, parallel(o, chunk), [&](std::uint64_t b, std::uint64_t e) {
    std::string s;
    for (std::uint64_t k = b; k < e; ++k) {
      const auto field = simulate_local_times(dim, seed, horizon, {origin_included, k});
      for (const auto& z : field.sites()) s += std::to_string(k) + ',' + coord_cells(z) + std::to_string(field.at(z)) + '\n';
    }
    return s;
  });
  std::string csv = "# schema: local-times/v1\nreplica," + coord_header(dim) + "count\n";
  for (const auto& p : parts) csv += p;
  Outputs out;
  out.config = {{"dim", dim}, {"seed", seed}, {"replicas", replicas}, {"origin_included", origin_included},
                {"chunk", chunk}, {horizon_cfg[0].get<std::string>(), horizon_cfg[1]}};
  out.files.emplace_back("local_times.csv", csv);
  return out;
}

Outputs cmd_experiment(const json& j, const Options& o) {
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  const GreenOracle oracle = oracle_for(cfg.dim, cfg.oracle_box, o);
  ExperimentOutput res = run_experiment(cfg, oracle, parallel(o, cfg.chunk));
  Outputs out;
  out.config = cfg.to_json();
  out.files = std::move(res.files);
  out.files.emplace_back("summary.json", res.summary.dump(2) + '\n');
  return out;
}

using Command = Outputs (*)(const json&, const Options&);

Command lookup(const std::string& name) {
  if (name == "green") return cmd_green;
  if (name == "capacity") return cmd_capacity;
  if (name == "moments") return cmd_moments;
  if (name == "trail-check") return cmd_trail_check;
  if (name == "rate") return cmd_rate;
  if (name == "simulate") return cmd_simulate;
  if (name == "experiment") return cmd_experiment;
  throw InvalidInput("unknown command '" + name + "'");
}

json library_versions() {
  return {{"iltlab", ILTLAB_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

// Runs a command and writes its files plus manifest.json into the output directory.
json execute(const std::string& name, json config, const Options& o) {
  if (o.threads < 1) throw ConfigError("threads", "must be >= 1");
  if (o.seed) config["seed"] = *o.seed;
  const Command cmd = lookup(name);
  const fs::path dir(o.out);
  const auto start = std::chrono::steady_clock::now();
  Outputs res = cmd(config, o);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(dir);
  if (!o.force) {
    for (const auto& [file, content] : res.files) {
      if (fs::exists(dir / file)) throw InvalidInput("output exists: " + (dir / file).string() + " (use --force)");
    }
  }
  json outputs = json::array();
  for (const auto& [file, content] : res.files) {
    std::ofstream f(dir / file, std::ios::binary | std::ios::trunc);
    f << content;
    if (!f) throw InvalidInput("cannot write " + (dir / file).string());
    outputs.push_back({{"file", file}, {"bytes", content.size()}, {"fnv1a64", fnv1a64(content)}});
  }
  json manifest = {{"tool", "iltlab"},
                   {"command", name},
                   {"config", res.config},
                   {"seed", res.config.value("seed", json())},
                   {"versions", library_versions()},
                   {"threads", o.threads},
                   {"wall_time_seconds", wall},
                   {"outputs", outputs}};
  std::ofstream m(dir / "manifest.json", std::ios::trunc);
  m << manifest.dump(2) << '\n';
  if (res.violation) throw NumericFailure("trail", res.violation->substr(7));
  return manifest;
}

int replay(const Options& o) {
  const json manifest = read_json_file(o.manifest, "manifest");
  if (!manifest.contains("command") || !manifest.contains("config") || !manifest.contains("outputs")) {
    throw InvalidInput("manifest " + o.manifest + ": missing command, config or outputs");
  }
  Options run = o;
  run.seed.reset();
  const json fresh = execute(manifest.at("command").get<std::string>(), manifest.at("config"), run);
  std::map<std::string, std::string> want;
  for (const auto& e : manifest.at("outputs")) want[e.at("file").get<std::string>()] = e.at("fnv1a64").get<std::string>();
  bool same = want.size() == fresh.at("outputs").size();
  for (const auto& e : fresh.at("outputs")) {
    const auto file = e.at("file").get<std::string>();
    const bool match = want.contains(file) && want[file] == e.at("fnv1a64").get<std::string>();
    std::cout << (match ? "identical " : "DIFFERS   ") << file << '\n';
    same = same && match;
  }
  if (!same) throw NumericFailure("replay", "outputs differ from manifest");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Intersection local times laboratory"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", o.config, "JSON configuration file");
    if (needs_config) c->required();
    sub->add_option("--seed", o.seed, "override the config seed");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads")->capture_default_str();
    sub->add_flag("--force", o.force, "overwrite existing outputs");
    sub->add_option("--cache-dir", o.cache_dir, "directory for cached Green tables (default <out>/.oracle-cache)");
  };
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"green", "Green's function table and optional Monte Carlo check"},
      {"capacity", "equilibrium measure, capacity bounds and harmonic measure of a set"},
      {"moments", "Monte Carlo moments of the interpolated intersection"},
      {"trail-check", "trail/stock certificate for an edge occupation"},
      {"rate", "variational rate functional on a finite set"},
      {"simulate", "local times of independent walks"},
      {"experiment", "configured experiment (decomposition, level sets, ranges, tails)"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), true);
  auto* rep = app.add_subcommand("replay", "rerun a manifest and compare output checksums");
  add_common(rep, false);
  rep->add_option("--manifest", o.manifest, "manifest.json of an earlier run")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "replay") return replay(o);
    execute(name, read_json_file(o.config, "config"), o);
    return kExitOk;
  } catch (const NumericFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace iltlab::cli

// netri: randomization tests for treatment interference on networks.
//
// Subcommands: test (one randomization test on supplied data), simulate
// (Monte Carlo studies), focal (emit a focal set), oracle (exact vs Monte
// Carlo p-values on enumerable instances).

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netri/design.hpp"
#include "netri/engine.hpp"
#include "netri/errors.hpp"
#include "netri/focal.hpp"
#include "netri/graph.hpp"
#include "netri/hypotheses.hpp"
#include "netri/io.hpp"
#include "netri/rng.hpp"
#include "netri/simlab.hpp"
#include "netri/stats.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
  std::string edges, edges2, nodes, config_path, out;
  std::string hypothesis = "no-spillovers";
  std::string design = "complete";
  std::string statistic = "score";
  std::string selector;
  std::string focal_file;
  std::int64_t draws = 1000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  int threads = 0;
  bool add_one = false;
  double degenerate_limit = 0.01;
  std::uint64_t cap = 1'000'000;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--edges", o.edges, "edge list file");
  cmd->add_option("--edges2", o.edges2, "second edge list (competing network)");
  cmd->add_option("--nodes", o.nodes, "node table CSV (id,treatment,outcome[,cluster])");
  cmd->add_option("--hypothesis", o.hypothesis, "null hypothesis");
  cmd->add_option("--design", o.design, "assignment design");
  cmd->add_option("--statistic", o.statistic, "test statistic");
  cmd->add_option("--selector", o.selector, "focal selector");
  cmd->add_option("--focal-file", o.focal_file, "file with one focal id per line");
  cmd->add_option("--draws", o.draws, "conditional draws");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--alpha", o.alpha, "nominal level");
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  cmd->add_option("--config", o.config_path, "JSON config file (CLI flags win)");
  cmd->add_flag("--add-one", o.add_one, "(1+count)/(1+B) p-value estimator");
  cmd->add_option("--degenerate-limit", o.degenerate_limit,
                  "max fraction of degenerate draws");
  cmd->add_option("--cap", o.cap, "support enumeration cap (oracle)");
}

// Config-file keys fill in whatever was not given on the command line.
void merge_config(const CLI::App* cmd, CommonOpts& o) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in)
    throw netri::ConfigError("FILE_NOT_FOUND",
                             "cannot open config: " + o.config_path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const std::exception& e) {
    throw netri::ConfigError("BAD_CONFIG", std::string("config parse: ") + e.what());
  }
  auto absent = [&](const char* flag) { return cmd->count(flag) == 0; };
  auto get_str = [&](const char* key, std::string& slot, const char* flag) {
    if (cfg.contains(key) && absent(flag)) slot = cfg.at(key).get<std::string>();
  };
  get_str("edges", o.edges, "--edges");
  get_str("edges2", o.edges2, "--edges2");
  get_str("nodes", o.nodes, "--nodes");
  get_str("hypothesis", o.hypothesis, "--hypothesis");
  get_str("design", o.design, "--design");
  get_str("statistic", o.statistic, "--statistic");
  get_str("selector", o.selector, "--selector");
  get_str("focal_file", o.focal_file, "--focal-file");
  get_str("out", o.out, "--out");
  if (cfg.contains("draws") && absent("--draws")) o.draws = cfg.at("draws").get<std::int64_t>();
  if (cfg.contains("seed") && absent("--seed")) o.seed = cfg.at("seed").get<std::uint64_t>();
  if (cfg.contains("alpha") && absent("--alpha")) o.alpha = cfg.at("alpha").get<double>();
  if (cfg.contains("threads") && absent("--threads")) o.threads = cfg.at("threads").get<int>();
  if (cfg.contains("add_one") && absent("--add-one")) o.add_one = cfg.at("add_one").get<bool>();
  if (cfg.contains("degenerate_limit") && absent("--degenerate-limit"))
    o.degenerate_limit = cfg.at("degenerate_limit").get<double>();
  if (cfg.contains("cap") && absent("--cap")) o.cap = cfg.at("cap").get<std::uint64_t>();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out)
    throw netri::DataError("WRITE_FAILED", "cannot write output: " + path);
  out << text;
}

netri::ExperimentDesign resolve_design(const netri::DesignSpec& spec,
                                       const netri::NodeTable& nodes) {
  const auto n = static_cast<netri::UnitId>(nodes.ids.size());
  if (!spec.cluster) {
    const std::int32_t observed = nodes.treatment.treated;
    if (spec.m >= 0 && spec.m != observed)
      throw netri::DataError("DESIGN_MISMATCH",
                             "design M=" + std::to_string(spec.m) +
                                 " but node table has " + std::to_string(observed) +
                                 " treated units");
    return netri::CompleteRandomization{n, observed};
  }
  if (nodes.cluster_of.empty())
    throw netri::ConfigError("MISSING_CLUSTERS",
                             "cluster design requires a cluster column");
  std::vector<std::uint8_t> arm(static_cast<std::size_t>(nodes.num_clusters), 0);
  for (std::size_t i = 0; i < nodes.cluster_of.size(); ++i)
    if (nodes.treatment.w[i]) arm[nodes.cluster_of[i]] = 1;
  std::int32_t observed = 0;
  for (std::uint8_t a : arm) observed += a;
  if (spec.m >= 0 && spec.m != observed)
    throw netri::DataError("DESIGN_MISMATCH",
                           "design Mc=" + std::to_string(spec.m) +
                               " but node table has " + std::to_string(observed) +
                               " treated clusters");
  return netri::ClusterRandomization{nodes.cluster_of, nodes.num_clusters, observed};
}

json resolved_config(const CommonOpts& o, const std::string& command) {
  json j;
  j["command"] = command;
  j["edges"] = o.edges;
  if (!o.edges2.empty()) j["edges2"] = o.edges2;
  if (!o.nodes.empty()) j["nodes"] = o.nodes;
  j["hypothesis"] = o.hypothesis;
  j["design"] = o.design;
  j["statistic"] = o.statistic;
  if (!o.selector.empty()) j["selector"] = o.selector;
  if (!o.focal_file.empty()) j["focal_file"] = o.focal_file;
  j["draws"] = o.draws;
  j["seed"] = o.seed;
  j["alpha"] = o.alpha;
  j["threads"] = o.threads;
  j["add_one"] = o.add_one;
  j["degenerate_limit"] = o.degenerate_limit;
  return j;
}

struct PreparedRun {
  netri::Dataset dataset;
  netri::NullHypothesis hypothesis;
  netri::StatisticSpec statistic;
  netri::ExperimentDesign design;
  std::vector<netri::UnitId> focal;
};

PreparedRun prepare_run(const CommonOpts& o) {
  if (o.edges.empty())
    throw netri::ConfigError("MISSING_EDGES", "--edges is required");
  if (o.nodes.empty())
    throw netri::ConfigError("MISSING_NODES", "--nodes is required");
  PreparedRun run;
  run.dataset = netri::load_dataset(o.edges, o.edges2, o.nodes);
  run.hypothesis = netri::parse_hypothesis(o.hypothesis);
  run.statistic = netri::parse_statistic(o.statistic);
  if (run.hypothesis.requires_pair() && !run.dataset.g2)
    throw netri::ConfigError("MISSING_SECOND_NETWORK",
                             o.hypothesis + " requires --edges2");
  run.design = resolve_design(netri::parse_design(o.design), run.dataset.nodes);

  const auto nets = run.dataset.nets();
  if (!o.focal_file.empty()) {
    run.focal = netri::parse_focal_file(o.focal_file, run.dataset.nodes.ids,
                                        nets.num_units());
  } else if (!o.selector.empty()) {
    const auto spec = netri::parse_selector(o.selector);
    if (spec.requires_pair() && !run.dataset.g2)
      throw netri::ConfigError("MISSING_SECOND_NETWORK",
                               o.selector + " requires --edges2");
    // only units with observed outcomes can serve as focal units
    run.focal = netri::run_selector(
        spec, nets, netri::subseed(o.seed, netri::SeedStream::kSelector),
        &run.dataset.nodes.outcomes.observed);
  } else {
    throw netri::ConfigError("MISSING_FOCAL",
                             "provide --selector or --focal-file");
  }
  return run;
}

int cmd_test(const CommonOpts& o) {
  PreparedRun run = prepare_run(o);
  netri::RunOptions opts;
  opts.b_draws = o.draws;
  opts.seed = o.seed;
  opts.threads = o.threads;
  opts.add_one = o.add_one;
  opts.degenerate_draw_limit = o.degenerate_limit;
  const auto nets = run.dataset.nets();
  const auto result = netri::run_test(
      nets, run.dataset.nodes.outcomes, run.dataset.nodes.treatment, run.design,
      run.hypothesis, run.focal, run.statistic, opts);
  json cfg = resolved_config(o, "test");
  cfg["focal_count"] = run.focal.size();
  if (run.statistic.kind == netri::StatKind::kBond)
    cfg["statistic_note"] =
        "bond is the unrestricted edge contrast; its unconditional "
        "randomization distribution is not a valid test of non-sharp nulls";
  write_output(o.out, netri::test_result_json(result, cfg.dump()));
  std::cerr << netri::summary_line(result) << "\n";
  return 0;
}

int cmd_oracle(const CommonOpts& o) {
  PreparedRun run = prepare_run(o);
  netri::RunOptions opts;
  opts.b_draws = o.draws;
  opts.seed = o.seed;
  opts.threads = o.threads;
  opts.add_one = o.add_one;
  opts.degenerate_draw_limit = 1.0;  // the exact reference skips the same draws
  opts.support_cap = o.cap;
  const auto nets = run.dataset.nets();
  const auto exact = netri::exact_test(nets, run.dataset.nodes.outcomes,
                                       run.dataset.nodes.treatment, run.design,
                                       run.hypothesis, run.focal, run.statistic,
                                       opts);
  const auto mc = netri::run_test(nets, run.dataset.nodes.outcomes,
                                  run.dataset.nodes.treatment, run.design,
                                  run.hypothesis, run.focal, run.statistic, opts);
  json j;
  j["config"] = resolved_config(o, "oracle");
  j["support_size"] = exact.b_draws;
  j["exact"] = {{"p_abs", exact.p_abs},
                {"p_two", exact.p_two},
                {"t_obs", exact.t_obs},
                {"degenerate_points", exact.degenerate_draws}};
  j["monte_carlo"] = {{"p_abs", mc.p_abs},
                      {"p_two", mc.p_two},
                      {"b_draws", mc.b_draws},
                      {"degenerate_draws", mc.degenerate_draws}};
  j["abs_diff_p_abs"] = std::fabs(exact.p_abs - mc.p_abs);
  write_output(o.out, j.dump(2) + "\n");
  return 0;
}

int cmd_focal(const CommonOpts& o) {
  if (o.edges.empty())
    throw netri::ConfigError("MISSING_EDGES", "--edges is required");
  if (o.selector.empty())
    throw netri::ConfigError("MISSING_FOCAL", "--selector is required");
  const auto spec = netri::parse_selector(o.selector);

  std::vector<std::string> labels;
  std::vector<netri::UnitId> focal;
  const auto seed = netri::subseed(o.seed, netri::SeedStream::kSelector);
  if (!o.nodes.empty()) {
    auto dataset = netri::load_dataset(o.edges, o.edges2, o.nodes);
    labels = dataset.nodes.ids;
    focal = netri::run_selector(spec, dataset.nets(), seed,
                                &dataset.nodes.outcomes.observed);
  } else {
    auto loaded = netri::load_edge_list(o.edges);
    std::shared_ptr<const netri::Network> g1 =
        std::make_shared<netri::Network>(std::move(loaded.network));
    labels = loaded.labels;
    std::shared_ptr<const netri::Network> g2;
    if (!o.edges2.empty()) {
      if (!labels.empty())
        throw netri::ConfigError(
            "MISSING_NODES",
            "string-labeled edge lists need --nodes to align two networks");
      auto second = netri::load_edge_list(o.edges2);
      g2 = std::make_shared<netri::Network>(std::move(second.network));
      if (g2->num_units() != g1->num_units()) {
        // pad the smaller unit range; ids are shared nonnegative integers
        const auto n = std::max(g1->num_units(), g2->num_units());
        g1 = std::make_shared<netri::Network>(n, g1->edges());
        g2 = std::make_shared<netri::Network>(n, g2->edges());
      }
    }
    if (spec.requires_pair() && !g2)
      throw netri::ConfigError("MISSING_SECOND_NETWORK",
                               o.selector + " requires --edges2");
    const auto nets = g2 ? netri::Nets::refs(*g1, *g2) : netri::Nets::single(*g1);
    focal = netri::run_selector(spec, nets, seed);
  }
  write_output(o.out, netri::focal_id_lines(focal, labels));
  std::cerr << "focal units: " << focal.size() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  std::string preset;
  std::string config_path;
  std::string edges;  // base (setup-two) or fixed network (setup-one)
  std::string out;
  std::int64_t reps = -1;
  std::int64_t draws = -1;
  std::int64_t n_pairs = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double alpha = -1.0;
  int threads = 0;
};

std::shared_ptr<const netri::Network> load_plain_network(const std::string& path) {
  auto loaded = netri::load_edge_list(path);
  return std::make_shared<netri::Network>(std::move(loaded.network));
}

json load_grid_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in)
    throw netri::ConfigError("FILE_NOT_FOUND", "cannot open config: " + path);
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    throw netri::ConfigError("BAD_CONFIG", std::string("config parse: ") + e.what());
  }
}

template <typename T>
std::vector<T> grid_of(const json& cfg, const char* key, std::vector<T> fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

int cmd_simulate(const SimulateOpts& so) {
  json cfg = load_grid_config(so.config_path);
  std::string preset = so.preset;
  if (preset.empty() && cfg.contains("preset"))
    preset = cfg.at("preset").get<std::string>();
  if (preset.empty())
    throw netri::ConfigError("MISSING_PRESET",
                             "--preset or config key 'preset' is required");

  const std::int64_t reps =
      so.reps >= 0 ? so.reps : cfg.value("reps", std::int64_t{1000});
  const std::int64_t draws =
      so.draws >= 0 ? so.draws : cfg.value("draws", std::int64_t{1000});
  const double alpha = so.alpha >= 0 ? so.alpha : cfg.value("alpha", 0.05);
  const std::uint64_t seed =
      so.seed_given ? so.seed : cfg.value("seed", std::uint64_t{0});

  std::vector<netri::SimResult> rows;
  json provenance;
  provenance["preset"] = preset;
  provenance["reps"] = reps;
  provenance["draws"] = draws;
  provenance["alpha"] = alpha;
  provenance["seed"] = seed;
  provenance["version"] = "netri 0.1.0";
  std::uint64_t cell_index = 0;
  auto cell_seed = [&] {
    return netri::subseed(seed, netri::SeedStream::kStudyCell, cell_index++);
  };

  if (preset == "appendix-a") {
    netri::AppendixAConfig acfg;
    acfg.n_pairs = static_cast<netri::UnitId>(
        so.n_pairs >= 0 ? so.n_pairs : cfg.value("n_pairs", std::int64_t{1000}));
    acfg.reps = reps;
    acfg.b_draws = draws;
    acfg.alpha = alpha;
    acfg.seed = cell_seed();
    acfg.threads = so.threads;
    if (reps > 0) {
      const auto result = netri::run_appendix_a(acfg);
      rows.push_back(result.naive);
      rows.push_back(result.valid);
      provenance["variance_ratio"] = result.variance_ratio;
      provenance["var_true"] = result.var_true;
      provenance["var_naive"] = result.var_naive;
    }
    provenance["n_pairs"] = acfg.n_pairs;
  } else if (preset == "setup-one") {
    netri::NetworkSource source;
    if (!so.edges.empty()) {
      source = netri::NetworkSource::fixed_network(load_plain_network(so.edges));
    } else if (cfg.contains("network") &&
               cfg.at("network").value("kind", "ws") == std::string("file")) {
      source = netri::NetworkSource::fixed_network(
          load_plain_network(cfg.at("network").at("path").get<std::string>()));
    } else {
      const json net = cfg.value("network", json::object());
      source = netri::NetworkSource::watts(net.value("n", 599), net.value("k", 10),
                                           net.value("p", 0.1),
                                           cfg.value("fix_network", false));
    }
    const auto stats = grid_of<std::string>(cfg, "statistics", {"score", "elc", "htn"});
    const auto selectors = grid_of<std::string>(
        cfg, "selectors", {"random:frac=0.5", "eps-net:eps=2", "greedy-delta"});
    const auto tds = grid_of<double>(cfg, "tau_direct", {0.0, 4.0});
    const auto tss = grid_of<double>(cfg, "tau_spill", {0.0, 0.4});
    netri::SetupOneConfig one;
    one.network = source;
    one.hypothesis = netri::parse_hypothesis(cfg.value("hypothesis", "no-spillovers"));
    one.m_treated = cfg.value("m_treated", 300);
    one.reps = reps;
    one.b_draws = draws;
    one.alpha = alpha;
    one.threads = so.threads;
    one.stats.clear();
    for (const auto& s : stats) one.stats.push_back(netri::parse_statistic(s).kind);
    for (const auto& sel : selectors) {
      one.selector = netri::parse_selector(sel);
      for (double td : tds) {
        for (double ts : tss) {
          one.tau_direct = td;
          one.tau_spill = ts;
          one.seed = cell_seed();
          if (reps == 0) continue;
          auto cell_rows = netri::run_setup_one(one);
          rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
        }
      }
    }
  } else if (preset == "setup-two") {
    std::string base_path = so.edges;
    if (base_path.empty() && cfg.contains("base"))
      base_path = cfg.at("base").value("path", "");
    if (base_path.empty())
      throw netri::ConfigError("MISSING_EDGES",
                               "setup-two needs --edges or config base.path");
    auto base = load_plain_network(base_path);
    const auto stats = grid_of<std::string>(cfg, "statistics", {"score-cn", "elc-cn"});
    const auto qs = grid_of<double>(cfg, "q", {0.9, 0.5});
    const auto lambdas = grid_of<double>(cfg, "lambda", {0.0, 0.5});
    const auto tds = grid_of<double>(cfg, "tau_direct", {0.0});
    const auto tss = grid_of<double>(cfg, "tau_spill", {0.4});
    auto two = netri::SetupTwoConfig::make_default();
    two.base = base;
    if (cfg.contains("selector"))
      two.selector = netri::parse_selector(cfg.at("selector").get<std::string>());
    two.m_treated = cfg.value("m_treated", 300);
    two.reps = reps;
    two.b_draws = draws;
    two.alpha = alpha;
    two.threads = so.threads;
    two.stats.clear();
    for (const auto& s : stats) two.stats.push_back(netri::parse_statistic(s).kind);
    for (double q : qs) {
      for (double lam : lambdas) {
        for (double td : tds) {
          for (double ts : tss) {
            two.q = q;
            two.lambda = lam;
            two.tau_direct = td;
            two.tau_spill = ts;
            two.seed = cell_seed();
            if (reps == 0) continue;
            auto cell_rows = netri::run_setup_two(two);
            rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
          }
        }
      }
    }
  } else {
    throw netri::ConfigError("BAD_PRESET", "unknown preset: " + preset);
  }

  const std::string csv = netri::sim_results_csv(rows);
  write_output(so.out, csv);
  if (so.out.empty()) {
    std::cerr << provenance.dump(2) << "\n";
  } else {
    std::ofstream prov(so.out + ".provenance.json");
    prov << provenance.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"randomization tests for network interference"};
  app.require_subcommand(1);

  CommonOpts test_opts, oracle_opts, focal_opts;
  SimulateOpts sim_opts;

  auto* test_cmd = app.add_subcommand("test", "run one randomization test");
  add_common(test_cmd, test_opts);
  auto* sim_cmd = app.add_subcommand("simulate", "run a Monte Carlo study");
  sim_cmd->add_option("--preset", sim_opts.preset, "setup-one | setup-two | appendix-a");
  sim_cmd->add_option("--config", sim_opts.config_path, "grid config JSON");
  sim_cmd->add_option("--edges", sim_opts.edges, "network edge list");
  sim_cmd->add_option("--out", sim_opts.out, "CSV output path");
  sim_cmd->add_option("--reps", sim_opts.reps, "replications");
  sim_cmd->add_option("--draws", sim_opts.draws, "conditional draws");
  sim_cmd->add_option("--n-pairs", sim_opts.n_pairs, "dyad count (appendix-a)");
  auto* seed_opt = sim_cmd->add_option("--seed", sim_opts.seed, "master seed");
  sim_cmd->add_option("--alpha", sim_opts.alpha, "nominal level");
  sim_cmd->add_option("--threads", sim_opts.threads, "worker threads");
  auto* focal_cmd = app.add_subcommand("focal", "emit a focal unit set");
  add_common(focal_cmd, focal_opts);
  auto* oracle_cmd = app.add_subcommand("oracle", "exact vs Monte Carlo p-values");
  add_common(oracle_cmd, oracle_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (test_cmd->parsed()) {
      merge_config(test_cmd, test_opts);
      return cmd_test(test_opts);
    }
    if (sim_cmd->parsed()) {
      sim_opts.seed_given = seed_opt->count() > 0;
      return cmd_simulate(sim_opts);
    }
    if (focal_cmd->parsed()) {
      merge_config(focal_cmd, focal_opts);
      return cmd_focal(focal_opts);
    }
    if (oracle_cmd->parsed()) {
      merge_config(oracle_cmd, oracle_opts);
      return cmd_oracle(oracle_opts);
    }
  } catch (const netri::Error& e) {
    json j;
    j["error"] = {{"code", e.code()}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    json j;
    j["error"] = {{"code", "INTERNAL"}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return 1;
  }
  return 0;
}

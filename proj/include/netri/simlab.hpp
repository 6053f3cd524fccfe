#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "netri/design.hpp"
#include "netri/engine.hpp"
#include "netri/focal.hpp"
#include "netri/graph.hpp"
#include "netri/hypotheses.hpp"
#include "netri/stats.hpp"

namespace netri {

// Network supplier for a study: either a Watts-Strogatz generator (fresh
// network per replication unless fixed) or a fixed network loaded from file.
struct NetworkSource {
  enum class Kind { kWattsStrogatz, kFixed };
  Kind kind = Kind::kWattsStrogatz;
  UnitId n = 599;
  UnitId k = 10;
  double p_rw = 0.1;
  std::shared_ptr<const Network> fixed;
  bool fix_network = false;  // generators resample per replication by default

  static NetworkSource watts(UnitId n, UnitId k, double p_rw, bool fix = false);
  static NetworkSource fixed_network(std::shared_ptr<const Network> net);
  std::string label() const;
};

struct OutcomeModel {
  enum class Kind { kSetupOne, kSetupTwo, kAppendixA };
  Kind kind = Kind::kSetupOne;
  double tau_direct = 0.0;
  double tau_spill = 0.0;
  double lambda = 0.0;  // weight on g2-only edges (setup two)
};

// Outcomes for one realized assignment. Setup one: standard-normal baseline
// plus own effect plus spillover proportional to the treated-neighbor
// fraction. Setup two: own effect plus spillover through the lambda-weighted
// treated fraction plus standard-normal noise. Appendix A: Y_i = W_i.
std::vector<double> gen_outcomes(const OutcomeModel& model, const Nets& nets,
                                 const Assignment& w, std::uint64_t seed);

struct SimResult {
  std::string network;
  std::string hypothesis;
  std::string statistic;
  std::string selector;
  double tau_direct = 0.0;
  double tau_spill = 0.0;
  double lambda = 0.0;
  double q = 0.0;
  std::int64_t reps = 0;
  std::int64_t degenerate_reps = 0;  // sampler or statistic undefined; excluded
  std::int64_t rejections = 0;
  double rejection_rate = 0.0;  // over non-degenerate replications
  double mc_se = 0.0;
  std::int64_t b_draws = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
};

// Spillover study on a single network (Monte Carlo setup I, generalized over
// the hypothesis so the same harness drives the size studies for the
// k-th-order and heterogeneity nulls). One result per statistic; all
// statistics share each replication's conditional draws.
struct SetupOneConfig {
  NetworkSource network;
  NullHypothesis hypothesis{HypKind::kNoSpillovers};
  std::vector<StatKind> stats{StatKind::kScore};
  SelectorSpec selector;
  double tau_direct = 0.0;
  double tau_spill = 0.0;
  std::int32_t m_treated = 300;
  std::int64_t reps = 1000;
  std::int64_t b_draws = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 0;
};
std::vector<SimResult> run_setup_one(const SetupOneConfig& cfg);

// Sparsification study (Monte Carlo setup II): g1 is the base network with
// each edge cut with probability q, g2 the base network; tests the
// sparsification null.
struct SetupTwoConfig {
  std::shared_ptr<const Network> base;
  double q = 0.9;
  double lambda = 0.0;
  std::vector<StatKind> stats{StatKind::kScoreCn, StatKind::kElcCn};
  SelectorSpec selector;  // defaults to greedy-cn via make_default
  double tau_direct = 0.0;
  double tau_spill = 0.4;
  std::int32_t m_treated = 300;
  std::int64_t reps = 1000;
  std::int64_t b_draws = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 0;

  static SetupTwoConfig make_default();
};
std::vector<SimResult> run_setup_two(const SetupTwoConfig& cfg);

// Appendix A replication: dyad population, half treated, outcomes equal to
// own treatment. The naive arm runs the unrestricted edge contrast against
// the no-effects randomization distribution (the invalid procedure); the
// valid arm runs the focal edge contrast against the no-spillovers
// conditional distribution with one focal unit per dyad. variance_ratio is
// the variance of the observed scaled statistic across replications (the
// true randomization law) over the mean per-replication variance of the
// naive null draws.
struct AppendixAConfig {
  UnitId n_pairs = 1000;
  std::int64_t reps = 10000;
  std::int64_t b_draws = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 0;
};
struct AppendixAResult {
  SimResult naive;
  SimResult valid;
  double var_true = 0.0;
  double var_naive = 0.0;
  double variance_ratio = 0.0;
};
AppendixAResult run_appendix_a(const AppendixAConfig& cfg);

}  // namespace netri

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netri/design.hpp"
#include "netri/focal.hpp"
#include "netri/graph.hpp"
#include "netri/hypotheses.hpp"
#include "netri/stats.hpp"

namespace netri {

struct TestResult {
  double t_obs = 0.0;
  std::int64_t b_draws = 0;  // conditional draws (or support size for exact tests)
  double p_abs = 0.0;        // Pr(|T| >= |T_obs|)
  double p_two = 0.0;        // 2 * min(upper tail, lower tail), capped at 1
  std::int64_t degenerate_draws = 0;
  std::uint64_t seed = 0;
};

struct RunOptions {
  std::int64_t b_draws = 1000;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  // Draws on which the statistic is undefined are skipped and counted;
  // exceeding this fraction of b_draws is an error. The paper's estimator
  // divides by B; with skipped draws the divisor is the non-degenerate count.
  double degenerate_draw_limit = 0.01;
  // (1 + count) / (1 + B) estimator instead of count / B.
  bool add_one = false;
  std::uint64_t support_cap = 1'000'000;
};

// Monte Carlo randomization test: b_draws i.i.d. draws from the conditional
// law p'. Optionally exposes the per-draw statistic values (NaN for
// degenerate draws).
TestResult run_test(const Nets& nets, const OutcomeData& outcomes,
                    const Assignment& w_obs, const ExperimentDesign& design,
                    const NullHypothesis& h, std::span<const UnitId> focal,
                    const StatisticSpec& stat, const RunOptions& options,
                    std::vector<double>* draw_values_out = nullptr);

// Exact p-values by full enumeration of the conditional support; degenerate
// support points are dropped and the p' masses renormalized.
TestResult exact_test(const Nets& nets, const OutcomeData& outcomes,
                      const Assignment& w_obs, const ExperimentDesign& design,
                      const NullHypothesis& h, std::span<const UnitId> focal,
                      const StatisticSpec& stat, const RunOptions& options);

std::string summary_line(const TestResult& r);

}  // namespace netri

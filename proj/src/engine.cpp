#include "netri/engine.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "netri/errors.hpp"
#include "netri/parallel.hpp"
#include "netri/rng.hpp"

namespace netri {

namespace {

void validate_inputs(const Nets& nets, const OutcomeData& outcomes,
                     const Assignment& w_obs, const NullHypothesis& h,
                     std::span<const UnitId> focal, const StatisticSpec& stat) {
  const UnitId n = nets.num_units();
  if (static_cast<UnitId>(outcomes.y.size()) != n ||
      static_cast<UnitId>(outcomes.observed.size()) != n)
    throw DataError("OUTCOME_LENGTH", "outcome vector does not match unit count");
  if (static_cast<UnitId>(w_obs.w.size()) != n)
    throw DataError("ASSIGNMENT_LENGTH", "assignment does not match unit count");
  if (focal.empty())
    throw DataError("NO_FOCAL_UNITS", "the focal set is empty");
  for (UnitId i : focal) {
    if (i < 0 || i >= n)
      throw DataError("UNIT_OUT_OF_RANGE", "focal unit out of range");
    if (!outcomes.observed[i])
      throw DataError("FOCAL_OUTCOME_MISSING",
                      "focal unit " + std::to_string(i) + " has no observed outcome");
  }
  if (!compatible(stat.kind, h))
    throw ConfigError("INCOMPATIBLE_STATISTIC",
                      "statistic " + stat.name() + " is not compatible with " +
                          h.name());
  if (h.requires_pair() && !nets.is_pair())
    throw ConfigError("MISSING_SECOND_NETWORK",
                      h.name() + " requires a second network");
}

struct TailCounts {
  std::int64_t abs = 0, hi = 0, lo = 0, degenerate = 0, total = 0;
};

double ratio(std::int64_t count, std::int64_t total, bool add_one) {
  if (add_one) return static_cast<double>(count + 1) / static_cast<double>(total + 1);
  return static_cast<double>(count) / static_cast<double>(total);
}

TestResult finish(double t_obs, std::int64_t b_field, const TailCounts& c,
                  std::uint64_t seed, bool add_one) {
  TestResult r;
  r.t_obs = t_obs;
  r.b_draws = b_field;
  r.degenerate_draws = c.degenerate;
  r.seed = seed;
  r.p_abs = ratio(c.abs, c.total, add_one);
  r.p_two = std::min(1.0, 2.0 * std::min(ratio(c.hi, c.total, add_one),
                                         ratio(c.lo, c.total, add_one)));
  return r;
}

}  // namespace

TestResult run_test(const Nets& nets, const OutcomeData& outcomes,
                    const Assignment& w_obs, const ExperimentDesign& design,
                    const NullHypothesis& h, std::span<const UnitId> focal,
                    const StatisticSpec& stat, const RunOptions& options,
                    std::vector<double>* draw_values_out) {
  validate_inputs(nets, outcomes, w_obs, h, focal, stat);
  if (options.b_draws <= 0)
    throw ConfigError("BAD_DRAW_COUNT", "b_draws must be positive");

  ConditionalSampler sampler(nets, h, design, focal, w_obs);
  if (sampler.degenerate())
    throw DegenerateError("DEGENERATE_SAMPLER",
                          "restricted assignment set is a singleton");

  FocalPartition part = make_partition(h, nets, focal);
  StatisticEvaluator evaluator(stat.kind, nets, part, outcomes);
  const auto t_obs_opt = evaluator.eval(w_obs.w);
  if (!t_obs_opt)
    throw DegenerateError("DEGENERATE_STATISTIC",
                          "statistic undefined at the observed assignment");
  const double t_obs = *t_obs_opt;

  const std::int64_t b = options.b_draws;
  std::vector<double> values(static_cast<std::size_t>(b));
  const double nan = std::numeric_limits<double>::quiet_NaN();

  parallel_for(b, options.threads, [&](std::int64_t begin, std::int64_t end) {
    Assignment w;
    ConditionalSampler::Workspace ws;
    for (std::int64_t i = begin; i < end; ++i) {
      sampler.draw_into(w, ws, subseed(options.seed, SeedStream::kDraw,
                                       static_cast<std::uint64_t>(i)));
      const auto t = evaluator.eval(w.w);
      values[static_cast<std::size_t>(i)] = t ? *t : nan;
    }
  });

  TailCounts c;
  const double abs_obs = std::fabs(t_obs);
  for (double t : values) {
    if (std::isnan(t)) {
      ++c.degenerate;
      continue;
    }
    ++c.total;
    if (std::fabs(t) >= abs_obs) ++c.abs;
    if (t >= t_obs) ++c.hi;
    if (t <= t_obs) ++c.lo;
  }
  if (c.degenerate > options.degenerate_draw_limit * static_cast<double>(b))
    throw DegenerateError(
        "DEGENERATE_DRAW_LIMIT",
        std::to_string(c.degenerate) + " of " + std::to_string(b) +
            " conditional draws had an undefined statistic");
  if (c.total == 0)
    throw DegenerateError("DEGENERATE_STATISTIC",
                          "statistic undefined on every conditional draw");

  if (draw_values_out != nullptr) *draw_values_out = std::move(values);
  return finish(t_obs, b, c, options.seed, options.add_one);
}

TestResult exact_test(const Nets& nets, const OutcomeData& outcomes,
                      const Assignment& w_obs, const ExperimentDesign& design,
                      const NullHypothesis& h, std::span<const UnitId> focal,
                      const StatisticSpec& stat, const RunOptions& options) {
  validate_inputs(nets, outcomes, w_obs, h, focal, stat);
  ConditionalSampler sampler(nets, h, design, focal, w_obs);
  FocalPartition part = make_partition(h, nets, focal);
  StatisticEvaluator evaluator(stat.kind, nets, part, outcomes);
  const auto t_obs_opt = evaluator.eval(w_obs.w);
  if (!t_obs_opt)
    throw DegenerateError("DEGENERATE_STATISTIC",
                          "statistic undefined at the observed assignment");
  const double t_obs = *t_obs_opt;
  const double abs_obs = std::fabs(t_obs);

  auto support = sampler.enumerate(options.support_cap);
  double mass_abs = 0.0, mass_hi = 0.0, mass_lo = 0.0, mass_total = 0.0;
  std::int64_t degenerate = 0;
  for (const auto& [assignment, mass] : support) {
    const auto t = evaluator.eval(assignment.w);
    if (!t) {
      ++degenerate;
      continue;
    }
    mass_total += mass;
    if (std::fabs(*t) >= abs_obs) mass_abs += mass;
    if (*t >= t_obs) mass_hi += mass;
    if (*t <= t_obs) mass_lo += mass;
  }
  if (mass_total <= 0.0)
    throw DegenerateError("DEGENERATE_STATISTIC",
                          "statistic undefined on the whole support");

  TestResult r;
  r.t_obs = t_obs;
  r.b_draws = static_cast<std::int64_t>(support.size());
  r.degenerate_draws = degenerate;
  r.seed = options.seed;
  r.p_abs = mass_abs / mass_total;
  r.p_two = std::min(1.0, 2.0 * std::min(mass_hi / mass_total, mass_lo / mass_total));
  return r;
}

std::string summary_line(const TestResult& r) {
  std::ostringstream os;
  os << "p_abs=" << r.p_abs << " p_two=" << r.p_two << " t_obs=" << r.t_obs
     << " draws=" << r.b_draws << " degenerate=" << r.degenerate_draws
     << " seed=" << r.seed;
  return os.str();
}

}  // namespace netri

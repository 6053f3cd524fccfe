#include "netri/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "netri/errors.hpp"
#include "netri/parallel.hpp"
#include "netri/rng.hpp"

namespace netri {

NetworkSource NetworkSource::watts(UnitId n, UnitId k, double p_rw, bool fix) {
  NetworkSource s;
  s.kind = Kind::kWattsStrogatz;
  s.n = n;
  s.k = k;
  s.p_rw = p_rw;
  s.fix_network = fix;
  return s;
}

NetworkSource NetworkSource::fixed_network(std::shared_ptr<const Network> net) {
  NetworkSource s;
  s.kind = Kind::kFixed;
  s.fixed = std::move(net);
  s.n = s.fixed->num_units();
  s.fix_network = true;
  return s;
}

std::string NetworkSource::label() const {
  if (kind == Kind::kFixed) return "fixed:n=" + std::to_string(n);
  return "ws:n=" + std::to_string(n) + ",k=" + std::to_string(k) +
         ",p=" + std::to_string(p_rw);
}

std::vector<double> gen_outcomes(const OutcomeModel& model, const Nets& nets,
                                 const Assignment& w, std::uint64_t seed) {
  const UnitId n = nets.num_units();
  std::vector<double> y(static_cast<std::size_t>(n));
  Rng rng(seed);
  switch (model.kind) {
    case OutcomeModel::Kind::kSetupOne: {
      const Network& g = nets.g1();
      for (UnitId i = 0; i < n; ++i) {
        double frac = 0.0;
        const UnitId k = g.degree(i);
        if (k > 0) {
          std::int32_t treated = 0;
          for (UnitId j : g.neighbors(i)) treated += w.w[j];
          frac = static_cast<double>(treated) / static_cast<double>(k);
        }
        y[i] = rng.normal() + model.tau_direct * w.w[i] + model.tau_spill * frac;
      }
      break;
    }
    case OutcomeModel::Kind::kSetupTwo: {
      // weight (1-lambda) on g1 edges plus lambda on g2 edges equals
      // g1 + lambda * (g2 - g1) for nested networks
      const Network& g1 = nets.g1();
      const Network& g2 = nets.g2();
      const double lam = model.lambda;
      for (UnitId i = 0; i < n; ++i) {
        double num = 0.0, den = 0.0;
        for (UnitId j : g1.neighbors(i)) {
          num += (1.0 - lam) * w.w[j];
          den += (1.0 - lam);
        }
        for (UnitId j : g2.neighbors(i)) {
          num += lam * w.w[j];
          den += lam;
        }
        const double wbar = den > 0.0 ? num / den : 0.0;
        y[i] = model.tau_direct * w.w[i] + model.tau_spill * wbar + rng.normal();
      }
      break;
    }
    case OutcomeModel::Kind::kAppendixA:
      for (UnitId i = 0; i < n; ++i) y[i] = static_cast<double>(w.w[i]);
      break;
  }
  return y;
}

namespace {

// p_abs per statistic over shared conditional draws; nullopt marks a
// degenerate replication for that statistic (singleton restricted set,
// undefined observed statistic, or no non-degenerate draw).
std::vector<std::optional<double>> conditional_p_values(
    const Nets& nets, const OutcomeData& outcomes, const Assignment& w_obs,
    const ExperimentDesign& design, const NullHypothesis& h,
    std::span<const UnitId> focal, std::span<const StatKind> stats,
    std::int64_t b_draws, std::uint64_t seed) {
  const std::size_t ns = stats.size();
  std::vector<std::optional<double>> out(ns);
  if (focal.empty()) return out;

  ConditionalSampler sampler(nets, h, design, focal, w_obs);
  if (sampler.degenerate()) return out;

  FocalPartition part = make_partition(h, nets, focal);
  std::vector<StatisticEvaluator> evals;
  evals.reserve(ns);
  for (StatKind kind : stats) evals.emplace_back(kind, nets, part, outcomes);

  std::vector<double> t_obs(ns);
  std::vector<std::uint8_t> live(ns, 0);
  bool any_live = false;
  for (std::size_t s = 0; s < ns; ++s) {
    if (auto t = evals[s].eval(w_obs.w)) {
      t_obs[s] = *t;
      live[s] = 1;
      any_live = true;
    }
  }
  if (!any_live) return out;

  std::vector<std::int64_t> hits(ns, 0), effective(ns, 0);
  Assignment w;
  ConditionalSampler::Workspace ws;
  for (std::int64_t i = 0; i < b_draws; ++i) {
    sampler.draw_into(w, ws, subseed(seed, SeedStream::kDraw,
                                     static_cast<std::uint64_t>(i)));
    for (std::size_t s = 0; s < ns; ++s) {
      if (!live[s]) continue;
      if (auto t = evals[s].eval(w.w)) {
        ++effective[s];
        if (std::fabs(*t) >= std::fabs(t_obs[s])) ++hits[s];
      }
    }
  }
  for (std::size_t s = 0; s < ns; ++s) {
    if (!live[s] || effective[s] == 0) continue;
    out[s] = static_cast<double>(hits[s]) / static_cast<double>(effective[s]);
  }
  return out;
}

SimResult summarize(std::string network, const NullHypothesis& h, StatKind stat,
                    const SelectorSpec& selector, double tau_d, double tau_s,
                    double lambda, double q, std::int64_t b_draws, double alpha,
                    std::uint64_t seed, std::span<const std::int8_t> cell) {
  SimResult r;
  r.network = std::move(network);
  r.hypothesis = h.name();
  r.statistic = StatisticSpec{stat}.name();
  r.selector = selector.name();
  r.tau_direct = tau_d;
  r.tau_spill = tau_s;
  r.lambda = lambda;
  r.q = q;
  r.b_draws = b_draws;
  r.alpha = alpha;
  r.seed = seed;
  r.reps = static_cast<std::int64_t>(cell.size());
  for (std::int8_t v : cell) {
    if (v < 0) {
      ++r.degenerate_reps;
    } else if (v > 0) {
      ++r.rejections;
    }
  }
  const std::int64_t used = r.reps - r.degenerate_reps;
  r.rejection_rate =
      used > 0 ? static_cast<double>(r.rejections) / static_cast<double>(used) : 0.0;
  r.mc_se = used > 0 ? std::sqrt(std::max(0.0, r.rejection_rate *
                                                   (1.0 - r.rejection_rate) /
                                                   static_cast<double>(used)))
                     : 0.0;
  return r;
}

}  // namespace

std::vector<SimResult> run_setup_one(const SetupOneConfig& cfg) {
  const std::size_t ns = cfg.stats.size();
  if (ns == 0) throw ConfigError("BAD_STUDY", "no statistics requested");
  std::shared_ptr<const Network> shared;
  if (cfg.network.kind == NetworkSource::Kind::kFixed) {
    shared = cfg.network.fixed;
  } else if (cfg.network.fix_network) {
    shared = std::make_shared<Network>(watts_strogatz(
        cfg.network.n, cfg.network.k, cfg.network.p_rw,
        subseed(cfg.seed, SeedStream::kNetwork, 0)));
  }

  std::vector<std::int8_t> flags(static_cast<std::size_t>(cfg.reps) * ns, 0);
  parallel_for(cfg.reps, cfg.threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t rep = begin; rep < end; ++rep) {
      const std::uint64_t rep_seed =
          subseed(cfg.seed, SeedStream::kReplication, static_cast<std::uint64_t>(rep));
      Network local;
      const Network* net = shared.get();
      if (net == nullptr) {
        local = watts_strogatz(cfg.network.n, cfg.network.k, cfg.network.p_rw,
                               subseed(rep_seed, SeedStream::kNetwork));
        net = &local;
      }
      const Nets nets = Nets::single(*net);
      const ExperimentDesign design =
          CompleteRandomization{net->num_units(), cfg.m_treated};
      const Assignment w = sample(design, subseed(rep_seed, SeedStream::kAssignment));
      OutcomeModel model{OutcomeModel::Kind::kSetupOne, cfg.tau_direct,
                         cfg.tau_spill, 0.0};
      const OutcomeData outcomes = OutcomeData::all_observed(
          gen_outcomes(model, nets, w, subseed(rep_seed, SeedStream::kOutcome)));
      const auto focal =
          run_selector(cfg.selector, nets, subseed(rep_seed, SeedStream::kSelector));
      const auto ps =
          conditional_p_values(nets, outcomes, w, design, cfg.hypothesis, focal,
                               cfg.stats, cfg.b_draws, rep_seed);
      for (std::size_t s = 0; s < ns; ++s)
        flags[static_cast<std::size_t>(rep) * ns + s] =
            ps[s] ? (*ps[s] <= cfg.alpha ? 1 : 0) : std::int8_t{-1};
    }
  });

  std::vector<SimResult> results;
  std::vector<std::int8_t> cell(static_cast<std::size_t>(cfg.reps));
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::int64_t rep = 0; rep < cfg.reps; ++rep)
      cell[rep] = flags[static_cast<std::size_t>(rep) * ns + s];
    results.push_back(summarize(cfg.network.label(), cfg.hypothesis, cfg.stats[s],
                                cfg.selector, cfg.tau_direct, cfg.tau_spill, 0.0,
                                0.0, cfg.b_draws, cfg.alpha, cfg.seed, cell));
  }
  return results;
}

SetupTwoConfig SetupTwoConfig::make_default() {
  SetupTwoConfig cfg;
  cfg.selector.kind = SelectorSpec::Kind::kGreedyCn;
  return cfg;
}

std::vector<SimResult> run_setup_two(const SetupTwoConfig& cfg) {
  const std::size_t ns = cfg.stats.size();
  if (ns == 0) throw ConfigError("BAD_STUDY", "no statistics requested");
  if (!cfg.base) throw ConfigError("BAD_STUDY", "setup two requires a base network");
  const NullHypothesis hyp{HypKind::kSparsification};

  std::vector<std::int8_t> flags(static_cast<std::size_t>(cfg.reps) * ns, 0);
  parallel_for(cfg.reps, cfg.threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t rep = begin; rep < end; ++rep) {
      const std::uint64_t rep_seed =
          subseed(cfg.seed, SeedStream::kReplication, static_cast<std::uint64_t>(rep));
      NetworkPair pair(
          sparsify(*cfg.base, cfg.q, subseed(rep_seed, SeedStream::kNetwork)),
          *cfg.base);
      const Nets nets = Nets::pair(pair);
      const ExperimentDesign design =
          CompleteRandomization{nets.num_units(), cfg.m_treated};
      const Assignment w = sample(design, subseed(rep_seed, SeedStream::kAssignment));
      OutcomeModel model{OutcomeModel::Kind::kSetupTwo, cfg.tau_direct,
                         cfg.tau_spill, cfg.lambda};
      const OutcomeData outcomes = OutcomeData::all_observed(
          gen_outcomes(model, nets, w, subseed(rep_seed, SeedStream::kOutcome)));
      const auto focal =
          run_selector(cfg.selector, nets, subseed(rep_seed, SeedStream::kSelector));
      const auto ps = conditional_p_values(nets, outcomes, w, design, hyp, focal,
                                           cfg.stats, cfg.b_draws, rep_seed);
      for (std::size_t s = 0; s < ns; ++s)
        flags[static_cast<std::size_t>(rep) * ns + s] =
            ps[s] ? (*ps[s] <= cfg.alpha ? 1 : 0) : std::int8_t{-1};
    }
  });

  std::vector<SimResult> results;
  std::vector<std::int8_t> cell(static_cast<std::size_t>(cfg.reps));
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::int64_t rep = 0; rep < cfg.reps; ++rep)
      cell[rep] = flags[static_cast<std::size_t>(rep) * ns + s];
    SimResult r = summarize("base:n=" + std::to_string(cfg.base->num_units()), hyp,
                            cfg.stats[s], cfg.selector, cfg.tau_direct,
                            cfg.tau_spill, cfg.lambda, cfg.q, cfg.b_draws,
                            cfg.alpha, cfg.seed, cell);
    results.push_back(std::move(r));
  }
  return results;
}

AppendixAResult run_appendix_a(const AppendixAConfig& cfg) {
  if (cfg.n_pairs < 2)
    throw ConfigError("BAD_STUDY", "appendix A requires n_pairs >= 2");
  const Network net = dyad_network(cfg.n_pairs);
  const Nets nets = Nets::single(net);
  const UnitId n = net.num_units();
  const std::int32_t m = cfg.n_pairs;  // half the units treated
  const ExperimentDesign design = CompleteRandomization{n, m};
  const double scale = std::sqrt(static_cast<double>(cfg.n_pairs));

  const std::size_t reps = static_cast<std::size_t>(cfg.reps);
  std::vector<std::int8_t> naive_flag(reps, 0), valid_flag(reps, 0);
  std::vector<double> naive_tobs(reps, 0.0), naive_draw_var(reps, 0.0);

  std::vector<UnitId> all_units(static_cast<std::size_t>(n));
  for (UnitId i = 0; i < n; ++i) all_units[i] = i;

  parallel_for(cfg.reps, cfg.threads, [&](std::int64_t begin, std::int64_t end) {
    Assignment w_draw;
    ConditionalSampler::Workspace ws;
    for (std::int64_t rep = begin; rep < end; ++rep) {
      const std::uint64_t rep_seed =
          subseed(cfg.seed, SeedStream::kReplication, static_cast<std::uint64_t>(rep));
      const Assignment w = sample(design, subseed(rep_seed, SeedStream::kAssignment));
      OutcomeModel model{OutcomeModel::Kind::kAppendixA, 0.0, 0.0, 0.0};
      const OutcomeData outcomes =
          OutcomeData::all_observed(gen_outcomes(model, nets, w, 0));

      // Naive arm: unrestricted re-randomization of everything, as if the
      // sharp no-effects null held.
      {
        const NullHypothesis h0{HypKind::kNoEffects};
        ConditionalSampler sampler(nets, h0, design, all_units, w);
        FocalPartition part = make_partition(h0, nets, all_units);
        StatisticEvaluator evaluator(StatKind::kBond, nets, part, outcomes);
        const double t_obs = *evaluator.eval(w.w);
        std::int64_t hits = 0, count = 0;
        double sum = 0.0, sumsq = 0.0;
        for (std::int64_t i = 0; i < cfg.b_draws; ++i) {
          sampler.draw_into(w_draw, ws, subseed(rep_seed, SeedStream::kDraw,
                                                static_cast<std::uint64_t>(i)));
          const double t = *evaluator.eval(w_draw.w);
          ++count;
          if (std::fabs(t) >= std::fabs(t_obs)) ++hits;
          const double st = scale * t;
          sum += st;
          sumsq += st * st;
        }
        const double p = static_cast<double>(hits) / static_cast<double>(count);
        naive_flag[rep] = p <= cfg.alpha ? 1 : 0;
        naive_tobs[rep] = scale * t_obs;
        const double mean = sum / static_cast<double>(count);
        naive_draw_var[rep] =
            (sumsq - static_cast<double>(count) * mean * mean) /
            static_cast<double>(count - 1);
      }

      // Valid arm: one focal unit per dyad, conditional on focal treatments.
      {
        const NullHypothesis h0{HypKind::kNoSpillovers};
        const auto focal =
            select_eps_net(net, 2, subseed(rep_seed, SeedStream::kSelector));
        const auto ps = conditional_p_values(
            nets, outcomes, w, design, h0, focal,
            std::vector<StatKind>{StatKind::kElc}, cfg.b_draws, rep_seed);
        valid_flag[rep] = ps[0] ? (*ps[0] <= cfg.alpha ? 1 : 0) : std::int8_t{-1};
      }
    }
  });

  AppendixAResult out;
  const std::string net_label = "dyads:pairs=" + std::to_string(cfg.n_pairs);
  out.naive = summarize(net_label, NullHypothesis{HypKind::kNoEffects},
                        StatKind::kBond, SelectorSpec{}, 0.0, 0.0, 0.0, 0.0,
                        cfg.b_draws, cfg.alpha, cfg.seed, naive_flag);
  SelectorSpec eps;
  eps.kind = SelectorSpec::Kind::kEpsNet;
  out.valid = summarize(net_label, NullHypothesis{HypKind::kNoSpillovers},
                        StatKind::kElc, eps, 0.0, 0.0, 0.0, 0.0, cfg.b_draws,
                        cfg.alpha, cfg.seed, valid_flag);

  double mean_tobs = 0.0;
  for (double t : naive_tobs) mean_tobs += t;
  mean_tobs /= static_cast<double>(reps);
  double var_true = 0.0;
  for (double t : naive_tobs) var_true += (t - mean_tobs) * (t - mean_tobs);
  var_true /= static_cast<double>(reps - 1);
  double var_naive = 0.0;
  for (double v : naive_draw_var) var_naive += v;
  var_naive /= static_cast<double>(reps);

  out.var_true = var_true;
  out.var_naive = var_naive;
  out.variance_ratio = var_naive > 0.0 ? var_true / var_naive : 0.0;
  return out;
}

}  // namespace netri

#include "netri/focal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "netri/errors.hpp"
#include "netri/rng.hpp"

namespace netri {

FocalPartition make_partition(const NullHypothesis& h, const Nets& nets,
                              std::span<const UnitId> focal) {
  const UnitId n = nets.num_units();
  FocalPartition part;
  part.focal.assign(focal.begin(), focal.end());
  std::sort(part.focal.begin(), part.focal.end());
  part.is_focal.assign(static_cast<std::size_t>(n), 0);
  for (UnitId i : part.focal) {
    if (i < 0 || i >= n)
      throw DataError("UNIT_OUT_OF_RANGE", "focal unit out of range");
    part.is_focal[i] = 1;
  }

  auto constrained = constrained_units(h, nets, part.focal);
  std::vector<std::uint8_t> held(static_cast<std::size_t>(n), 0);
  for (UnitId i : constrained) held[i] = 1;

  part.is_auxiliary.assign(static_cast<std::size_t>(n), 0);
  for (UnitId i = 0; i < n; ++i) {
    if (part.is_focal[i]) continue;
    if (held[i]) {
      part.buffer.push_back(i);
    } else {
      part.auxiliary.push_back(i);
      part.is_auxiliary[i] = 1;
    }
  }
  return part;
}

namespace {

bool ok(const Eligibility* eligible, UnitId i) {
  return eligible == nullptr || (*eligible)[i] != 0;
}

std::int64_t rounded_count(double fraction, std::int64_t candidates) {
  auto c = static_cast<std::int64_t>(std::llround(fraction * static_cast<double>(candidates)));
  return std::clamp<std::int64_t>(c, 1, candidates);
}

// One uniformly random index among the maximizers of `value` over candidates
// with valid[i]; returns -1 when no candidate qualifies (or the max fails
// `positive` when required). Each candidate's value is computed exactly once.
template <typename ValueFn>
UnitId argmax_tiebreak(UnitId n, const std::vector<std::uint8_t>& valid,
                       ValueFn&& value, bool require_positive, Rng& rng,
                       std::vector<double>& cache) {
  cache.assign(static_cast<std::size_t>(n), 0.0);
  double best = 0.0;
  bool have = false;
  for (UnitId i = 0; i < n; ++i) {
    if (!valid[i]) continue;
    cache[i] = value(i);
    if (!have || cache[i] > best) {
      best = cache[i];
      have = true;
    }
  }
  if (!have || (require_positive && !(best > 0.0))) return -1;
  std::uint64_t ties = 0;
  for (UnitId i = 0; i < n; ++i)
    if (valid[i] && cache[i] == best) ++ties;
  std::uint64_t pick = rng.below(ties);
  for (UnitId i = 0; i < n; ++i) {
    if (valid[i] && cache[i] == best) {
      if (pick == 0) return i;
      --pick;
    }
  }
  return -1;
}

}  // namespace

std::vector<UnitId> select_random(UnitId n, double fraction, std::uint64_t seed,
                                  const Eligibility* eligible) {
  if (!(fraction > 0.0) || !(fraction < 1.0))
    throw ConfigError("BAD_SELECTOR", "random selector requires 0 < frac < 1");
  std::vector<UnitId> pool;
  for (UnitId i = 0; i < n; ++i)
    if (ok(eligible, i)) pool.push_back(i);
  if (pool.empty()) throw DataError("NO_CANDIDATES", "no eligible focal candidates");
  const auto k = static_cast<std::size_t>(
      rounded_count(fraction, static_cast<std::int64_t>(pool.size())));
  Rng rng(seed);
  rng.choose_prefix(pool, k);
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<UnitId> select_eps_net(const Network& net, int eps, std::uint64_t seed,
                                   const Eligibility* eligible) {
  if (eps < 2) throw ConfigError("BAD_SELECTOR", "eps-net requires eps >= 2");
  const UnitId n = net.num_units();
  Rng rng(seed);
  std::vector<std::uint8_t> assigned(static_cast<std::size_t>(n), 0);
  std::vector<UnitId> pool;
  for (UnitId i = 0; i < n; ++i)
    if (ok(eligible, i)) pool.push_back(i);
  rng.shuffle(pool);

  std::vector<UnitId> focal;
  for (UnitId seed_unit : pool) {
    if (assigned[seed_unit]) continue;
    focal.push_back(seed_unit);
    // everything within eps-1 hops (including the seed) leaves the pool
    auto blocked = ball(net, std::span<const UnitId>(&seed_unit, 1),
                        static_cast<UnitId>(eps - 1));
    for (UnitId u : blocked) assigned[u] = 1;
  }
  std::sort(focal.begin(), focal.end());
  return focal;
}

std::vector<UnitId> select_greedy_edges(const Network& net, GreedyCriterion crit,
                                        std::uint64_t seed,
                                        const Eligibility* eligible) {
  const UnitId n = net.num_units();
  if (n == 0) throw DataError("NO_CANDIDATES", "empty network");
  Rng rng(seed);
  std::vector<std::uint8_t> candidate(static_cast<std::size_t>(n), 0);
  for (UnitId i = 0; i < n; ++i) candidate[i] = ok(eligible, i) ? 1 : 0;
  // k_aux[i] - k_focal[i] is the change in focal-auxiliary edges from making
  // i focal; all units start auxiliary.
  std::vector<std::int32_t> k_focal(static_cast<std::size_t>(n), 0);
  std::vector<UnitId> focal;

  auto gain = [&](UnitId i) {
    const std::int32_t k = net.degree(i);
    const std::int32_t raw = (k - 2 * k_focal[i]);  // K_A - K_F with K_A = K - K_F
    if (crit == GreedyCriterion::kRaw) return static_cast<double>(raw);
    return k == 0 ? 0.0 : static_cast<double>(raw) / static_cast<double>(k);
  };

  std::vector<double> cache;
  for (;;) {
    UnitId pick = argmax_tiebreak(n, candidate, gain, /*require_positive=*/true, rng, cache);
    if (pick < 0) break;
    focal.push_back(pick);
    candidate[pick] = 0;
    for (UnitId j : net.neighbors(pick)) ++k_focal[j];
  }
  std::sort(focal.begin(), focal.end());
  return focal;
}

std::vector<UnitId> select_greedy_higher_order(const Network& net,
                                               const SecondOrderAdjacency& h2,
                                               std::uint64_t seed,
                                               const Eligibility* eligible) {
  const UnitId n = net.num_units();
  Rng rng(seed);
  std::vector<std::uint8_t> candidate(static_cast<std::size_t>(n), 0);
  for (UnitId i = 0; i < n; ++i) candidate[i] = ok(eligible, i) ? 1 : 0;
  std::vector<std::uint8_t> is_focal(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> aux(static_cast<std::size_t>(n), 1);
  // phi[j] = sum over focal k with H_jk = 1 of 1 / HD_k: the per-unit cost a
  // new focal unit pays for turning auxiliary neighbors into buffer units.
  std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
  std::vector<UnitId> focal;

  auto delta = [&](UnitId i) {
    const double hd = static_cast<double>(h2.degree(i));
    double first = 0.0;
    if (hd > 0.0) {
      std::int32_t aux_h = 0, focal_h = 0;
      for (UnitId j : h2.neighbors(i)) {
        aux_h += aux[j];
        focal_h += is_focal[j];
      }
      first = (static_cast<double>(aux_h) -
               static_cast<double>(aux[i] ? focal_h : 0)) / hd;
    }
    double second = 0.0;
    for (UnitId j : net.neighbors(i))
      if (aux[j]) second += phi[j];
    return first - second;
  };

  std::vector<double> cache;
  for (;;) {
    UnitId pick = argmax_tiebreak(n, candidate, delta, /*require_positive=*/true, rng, cache);
    if (pick < 0) break;
    focal.push_back(pick);
    candidate[pick] = 0;
    is_focal[pick] = 1;
    aux[pick] = 0;
    for (UnitId j : net.neighbors(pick)) aux[j] = 0;
    if (h2.degree(pick) > 0) {
      const double inv = 1.0 / static_cast<double>(h2.degree(pick));
      for (UnitId j : h2.neighbors(pick)) phi[j] += inv;
    }
  }
  std::sort(focal.begin(), focal.end());
  return focal;
}

std::vector<UnitId> select_greedy_competing(const Network& g1, const Network& g2,
                                            std::uint64_t seed,
                                            const Eligibility* eligible) {
  const UnitId n = g2.num_units();
  Rng rng(seed);
  std::vector<std::uint8_t> candidate(static_cast<std::size_t>(n), 0);
  for (UnitId i = 0; i < n; ++i) candidate[i] = ok(eligible, i) ? 1 : 0;
  std::vector<std::uint8_t> aux(static_cast<std::size_t>(n), 1);
  // psi[j] = number of focal g2-neighbors of j: pairs lost if j leaves the
  // auxiliary set.
  std::vector<std::int32_t> psi(static_cast<std::size_t>(n), 0);
  std::vector<UnitId> focal;

  auto gain = [&](UnitId u) {
    std::int64_t added = 0;
    for (UnitId j : g2.neighbors(u))
      if (aux[j] && !g1.has_edge(u, j)) ++added;
    std::int64_t lost = aux[u] ? psi[u] : 0;
    for (UnitId j : g1.neighbors(u))
      if (aux[j]) lost += psi[j];
    return static_cast<double>(added - lost);
  };

  std::vector<double> cache;
  for (;;) {
    UnitId pick = argmax_tiebreak(n, candidate, gain, /*require_positive=*/true, rng, cache);
    if (pick < 0) break;
    focal.push_back(pick);
    candidate[pick] = 0;
    aux[pick] = 0;
    for (UnitId j : g1.neighbors(pick)) aux[j] = 0;
    for (UnitId j : g2.neighbors(pick)) ++psi[j];
  }
  std::sort(focal.begin(), focal.end());
  return focal;
}

std::vector<UnitId> select_heterogeneity(const Network& net, double target_fraction,
                                         std::uint64_t seed,
                                         const Eligibility* eligible) {
  if (!(target_fraction > 0.0) || !(target_fraction < 1.0))
    throw ConfigError("BAD_SELECTOR", "hetero selector requires 0 < frac < 1");
  const UnitId n = net.num_units();
  if (n == 0) throw DataError("NO_CANDIDATES", "empty network");
  const auto target = static_cast<std::size_t>(rounded_count(target_fraction, n));
  Rng rng(seed);
  std::vector<std::uint8_t> candidate(static_cast<std::size_t>(n), 0);
  for (UnitId i = 0; i < n; ++i) candidate[i] = ok(eligible, i) ? 1 : 0;
  std::vector<std::uint8_t> is_focal(static_cast<std::size_t>(n), 0);
  std::vector<std::int32_t> nf_deg(static_cast<std::size_t>(n), 0);
  for (UnitId i = 0; i < n; ++i) nf_deg[i] = net.degree(i);

  // S_U over a candidate's current non-focal neighbors j of U_ij, the number
  // of j's non-focal neighbors other than the candidate; negative when fewer
  // than two such neighbors exist.
  auto spread = [&](UnitId i) {
    double sum = 0.0, sumsq = 0.0;
    std::int32_t m = 0;
    for (UnitId j : net.neighbors(i)) {
      if (is_focal[j]) continue;
      const double u = static_cast<double>(nf_deg[j] - 1);
      sum += u;
      sumsq += u * u;
      ++m;
    }
    if (m < 2) return -1.0;
    const double mean = sum / m;
    const double ss = std::max(0.0, sumsq - static_cast<double>(m) * mean * mean);
    return std::sqrt(ss / (m - 1));
  };

  std::vector<UnitId> focal;
  std::vector<double> cache;
  while (focal.size() < target) {
    UnitId pick = argmax_tiebreak(n, candidate, spread, /*require_positive=*/false, rng, cache);
    if (pick < 0 || cache[pick] < 0.0) break;
    focal.push_back(pick);
    candidate[pick] = 0;
    is_focal[pick] = 1;
    for (UnitId j : net.neighbors(pick)) --nf_deg[j];
  }
  std::sort(focal.begin(), focal.end());
  return focal;
}

std::string SelectorSpec::name() const {
  switch (kind) {
    case Kind::kRandom: return "random:frac=" + std::to_string(fraction);
    case Kind::kEpsNet: return "eps-net:eps=" + std::to_string(eps);
    case Kind::kGreedyDelta: return "greedy-delta";
    case Kind::kGreedyRaw: return "greedy-raw";
    case Kind::kGreedyHo: return "greedy-ho";
    case Kind::kGreedyCn: return "greedy-cn";
    case Kind::kHetero: return "hetero:frac=" + std::to_string(fraction);
  }
  return "?";
}

SelectorSpec parse_selector(const std::string& text) {
  SelectorSpec spec;
  auto parse_double = [&](const std::string& s) {
    try {
      return std::stod(s);
    } catch (...) {
      throw ConfigError("BAD_SELECTOR", "cannot parse number in: " + text);
    }
  };
  if (text == "greedy-delta") {
    spec.kind = SelectorSpec::Kind::kGreedyDelta;
  } else if (text == "greedy-raw") {
    spec.kind = SelectorSpec::Kind::kGreedyRaw;
  } else if (text == "greedy-ho") {
    spec.kind = SelectorSpec::Kind::kGreedyHo;
  } else if (text == "greedy-cn") {
    spec.kind = SelectorSpec::Kind::kGreedyCn;
  } else if (text == "random") {
    spec.kind = SelectorSpec::Kind::kRandom;
  } else if (text.rfind("random:frac=", 0) == 0) {
    spec.kind = SelectorSpec::Kind::kRandom;
    spec.fraction = parse_double(text.substr(12));
  } else if (text == "eps-net") {
    spec.kind = SelectorSpec::Kind::kEpsNet;
  } else if (text.rfind("eps-net:eps=", 0) == 0) {
    spec.kind = SelectorSpec::Kind::kEpsNet;
    spec.eps = static_cast<int>(parse_double(text.substr(12)));
  } else if (text == "hetero") {
    spec.kind = SelectorSpec::Kind::kHetero;
    spec.fraction = 0.3;
  } else if (text.rfind("hetero:frac=", 0) == 0) {
    spec.kind = SelectorSpec::Kind::kHetero;
    spec.fraction = parse_double(text.substr(12));
  } else {
    throw ConfigError("BAD_SELECTOR", "unknown selector: " + text);
  }
  return spec;
}

std::vector<UnitId> run_selector(const SelectorSpec& spec, const Nets& nets,
                                 std::uint64_t seed, const Eligibility* eligible) {
  switch (spec.kind) {
    case SelectorSpec::Kind::kRandom:
      return select_random(nets.num_units(), spec.fraction, seed, eligible);
    case SelectorSpec::Kind::kEpsNet:
      return select_eps_net(nets.selection_graph(), spec.eps, seed, eligible);
    case SelectorSpec::Kind::kGreedyDelta:
      return select_greedy_edges(nets.selection_graph(), GreedyCriterion::kFractional,
                                 seed, eligible);
    case SelectorSpec::Kind::kGreedyRaw:
      return select_greedy_edges(nets.selection_graph(), GreedyCriterion::kRaw, seed,
                                 eligible);
    case SelectorSpec::Kind::kGreedyHo: {
      SecondOrderAdjacency h2(nets.selection_graph());
      return select_greedy_higher_order(nets.selection_graph(), h2, seed, eligible);
    }
    case SelectorSpec::Kind::kGreedyCn:
      if (!nets.is_pair())
        throw ConfigError("BAD_SELECTOR", "greedy-cn requires two networks");
      return select_greedy_competing(nets.g1(), nets.g2(), seed, eligible);
    case SelectorSpec::Kind::kHetero:
      return select_heterogeneity(nets.g1(), spec.fraction, seed, eligible);
  }
  throw ConfigError("BAD_SELECTOR", "unhandled selector");
}

}  // namespace netri

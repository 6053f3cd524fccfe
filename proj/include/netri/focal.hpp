#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netri/graph.hpp"
#include "netri/hypotheses.hpp"

namespace netri {

// Disjoint focal / buffer / auxiliary labeling induced by a focal set and a
// hypothesis: buffer units are the constrained non-focal units, auxiliary
// units are everything else.
struct FocalPartition {
  std::vector<UnitId> focal;
  std::vector<UnitId> buffer;
  std::vector<UnitId> auxiliary;
  std::vector<std::uint8_t> is_focal;      // indicator over all units
  std::vector<std::uint8_t> is_auxiliary;  // indicator over all units
};

FocalPartition make_partition(const NullHypothesis& h, const Nets& nets,
                              std::span<const UnitId> focal);

// An optional per-unit candidate mask; selectors never pick focal units
// outside it (used when outcomes are observed for a subset of units only).
using Eligibility = std::vector<std::uint8_t>;

// round(fraction * candidates) units uniformly without replacement, at least
// one.
std::vector<UnitId> select_random(UnitId n, double fraction, std::uint64_t seed,
                                  const Eligibility* eligible = nullptr);

// Greedy epsilon-net: draw a random unassigned seed, make it focal, assign
// everything within eps-1 hops of it as non-focal; repeat until every unit is
// assigned. Focal units end up pairwise at distance >= eps.
std::vector<UnitId> select_eps_net(const Network& net, int eps, std::uint64_t seed,
                                   const Eligibility* eligible = nullptr);

enum class GreedyCriterion { kRaw, kFractional };

// Starting from all-auxiliary, repeatedly make focal the unit with the
// largest gain in focal-auxiliary edge count (raw: K_A - K_F; fractional:
// (K_A - K_F)/K); stop when the maximum is no longer positive. Ties are
// broken uniformly at random.
std::vector<UnitId> select_greedy_edges(const Network& net, GreedyCriterion crit,
                                        std::uint64_t seed,
                                        const Eligibility* eligible = nullptr);

// Greedy maximization of focal-auxiliary neighbor-of-neighbor pairs, with the
// per-step gain normalized by second-order degree.
std::vector<UnitId> select_greedy_higher_order(const Network& net,
                                               const SecondOrderAdjacency& h2,
                                               std::uint64_t seed,
                                               const Eligibility* eligible = nullptr);

// Greedy maximization of focal-auxiliary pairs adjacent in g2, where
// auxiliary units are those that are neither focal nor g1-neighbors of focal
// units. May return an empty set when no addition has positive gain (e.g.
// g1 == g2).
std::vector<UnitId> select_greedy_competing(const Network& g1, const Network& g2,
                                            std::uint64_t seed,
                                            const Eligibility* eligible = nullptr);

// Sequentially picks the unit whose non-focal neighbors have the most
// dispersed non-focal degrees, until round(target_fraction * n) units are
// focal or no candidate has two non-focal neighbors.
std::vector<UnitId> select_heterogeneity(const Network& net, double target_fraction,
                                         std::uint64_t seed,
                                         const Eligibility* eligible = nullptr);

// Grammar: "random:frac=F" | "eps-net:eps=E" | "greedy-delta" | "greedy-raw" |
// "greedy-ho" | "greedy-cn" | "hetero:frac=F" (random defaults frac=0.5,
// eps-net defaults eps=2, hetero defaults frac=0.3).
struct SelectorSpec {
  enum class Kind { kRandom, kEpsNet, kGreedyDelta, kGreedyRaw, kGreedyHo, kGreedyCn, kHetero };
  Kind kind = Kind::kRandom;
  double fraction = 0.5;
  int eps = 2;

  bool requires_pair() const { return kind == Kind::kGreedyCn; }
  std::string name() const;
};

SelectorSpec parse_selector(const std::string& text);

std::vector<UnitId> run_selector(const SelectorSpec& spec, const Nets& nets,
                                 std::uint64_t seed,
                                 const Eligibility* eligible = nullptr);

}  // namespace netri

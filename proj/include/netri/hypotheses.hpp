#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netri/graph.hpp"

namespace netri {

// The view the hypothesis and statistic code works against. For
// single-network problems g1 and g2 refer to the same network; for
// competing-network problems g1 is the (sparser) network whose neighbor
// treatments the null holds fixed and g2 is the second network. Selectors
// that take a plain graph operate on selection_graph().
class Nets {
 public:
  static Nets single(const Network& net) { return Nets(&net, &net); }
  static Nets pair(const NetworkPair& p) { return Nets(&p.g1, &p.g2); }
  static Nets refs(const Network& g1, const Network& g2) { return Nets(&g1, &g2); }

  const Network& g1() const { return *g1_; }
  const Network& g2() const { return *g2_; }
  bool is_pair() const { return g1_ != g2_; }
  const Network& selection_graph() const { return *g2_; }
  UnitId num_units() const { return g1_->num_units(); }

 private:
  Nets(const Network* a, const Network* b) : g1_(a), g2_(b) {}
  const Network* g1_;
  const Network* g2_;
};

enum class HypKind {
  kNoEffects,
  kNoSpillovers,
  kNoKthOrder,        // k-th and higher order spillovers absent
  kNoDirectEffects,
  kSparsification,    // only g1-neighbor treatments (and own) matter
  kNoPeerHeterogeneity,
  kThresholdPeerEffects,
};

struct NullHypothesis {
  HypKind kind = HypKind::kNoSpillovers;
  int k = 0;  // only for kNoKthOrder

  bool requires_pair() const { return kind == HypKind::kSparsification; }
  // Conditional draws preserve per-focal treated-neighbor counts rather than
  // fixing individual units.
  bool count_preserving() const {
    return kind == HypKind::kNoPeerHeterogeneity ||
           kind == HypKind::kThresholdPeerEffects;
  }
  std::string name() const;
};

// BFS balls for kNoKthOrder grow quickly; larger k is almost certainly a
// configuration mistake.
inline constexpr int kMaxKthOrder = 4;

// Grammar: "no-effects" | "no-spillovers" | "no-korder:k=K" | "no-direct" |
// "sparsification" | "no-heterogeneity" | "threshold".
NullHypothesis parse_hypothesis(const std::string& text);

// Canonical per-unit summary of an assignment; two assignments give unit i
// the same outcome under the null iff their signatures for i are equal.
using ExposureSignature = std::vector<std::int32_t>;

ExposureSignature signature(const NullHypothesis& h, const Nets& nets, UnitId i,
                            std::span<const std::uint8_t> w);

// Units whose treatment the conditional sampler holds fixed given this focal
// set. For count-preserving hypotheses this is the focal set itself; the
// neighbor-count constraints are enforced by the sampler's grouping.
std::vector<UnitId> constrained_units(const NullHypothesis& h, const Nets& nets,
                                      std::span<const UnitId> focal);

// Membership test for the partition cell containing w: true iff every focal
// unit's signature agrees between w and w_alt.
bool same_cell(const NullHypothesis& h, const Nets& nets,
               std::span<const UnitId> focal, std::span<const std::uint8_t> w,
               std::span<const std::uint8_t> w_alt);

}  // namespace netri

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netri/focal.hpp"
#include "netri/graph.hpp"
#include "netri/hypotheses.hpp"

namespace netri {

struct OutcomeData {
  std::vector<double> y;
  std::vector<std::uint8_t> observed;

  static OutcomeData all_observed(std::vector<double> values);
};

enum class StatKind {
  kElc,        // focal-auxiliary edge contrast split by alter treatment
  kScore,      // cov of direct-effect-adjusted outcome with treated-neighbor fraction
  kHtn,        // corr of focal outcome with has-treated-non-focal-neighbor
  kElcHo,      // edge contrast over neighbor-of-neighbor pairs
  kScoreHo,    // cov of first-order-model residual with second-order fraction
  kElcCn,      // edge contrast over g2 edges
  kScoreCn,    // cov of g1-model residual with g2 fraction
  kScoreHet,   // cov of null-model residual with degree-weighted fraction
  kBond,       // unrestricted edge contrast; valid only under no-effects
  kDirectDiff, // focal treated mean minus focal control mean
};

struct StatisticSpec {
  StatKind kind = StatKind::kScore;
  std::string name() const;
};

// Grammar: "elc" | "score" | "htn" | "elc-ho" | "score-ho" | "elc-cn" |
// "score-cn" | "score-het" | "bond" | "direct-diff".
StatisticSpec parse_statistic(const std::string& text);

// A statistic is compatible with a hypothesis when its conditioning sets vary
// under the hypothesis' conditional draws and its graph inputs exist.
bool compatible(StatKind stat, const NullHypothesis& h);
std::string compatibility_table();

// Evaluates one statistic as a pure function of the assignment, with the
// graph-dependent index structures built once. eval() returns nullopt when
// the statistic is undefined for that assignment (an empty contrast arm, a
// constant indicator, a rank-deficient regression, or a conditioning set
// smaller than two).
class StatisticEvaluator {
 public:
  StatisticEvaluator(StatKind kind, const Nets& nets, const FocalPartition& part,
                     const OutcomeData& outcomes);

  StatKind kind() const { return kind_; }
  std::optional<double> eval(std::span<const std::uint8_t> w) const;

 private:
  struct ContrastPair {
    double ego_y;
    UnitId alter;
  };

  std::optional<double> eval_contrast(std::span<const std::uint8_t> w) const;
  std::optional<double> eval_score(std::span<const std::uint8_t> w) const;
  std::optional<double> eval_htn(std::span<const std::uint8_t> w) const;
  std::optional<double> eval_score_residual(std::span<const std::uint8_t> w) const;
  std::optional<double> eval_direct_diff(std::span<const std::uint8_t> w) const;

  StatKind kind_;
  std::vector<UnitId> focal_;
  std::vector<double> focal_y_;

  // contrast statistics
  std::vector<ContrastPair> pairs_;

  // neighbor structure flattened per focal unit: regressor fraction (g1 for
  // score kinds) and covariate fraction (H, g2, or degree-weighted g1)
  struct Csr {
    std::vector<UnitId> items;
    std::vector<std::int32_t> offsets;  // focal-indexed, size focal_.size()+1
    std::span<const UnitId> row(std::size_t f) const {
      return {items.data() + offsets[f],
              static_cast<std::size_t>(offsets[f + 1] - offsets[f])};
    }
  };
  Csr reg_nbrs_;   // g1 neighbors of each focal unit
  Csr cov_nbrs_;   // covariate neighbors of each focal unit
  std::vector<double> cov_weights_;     // aligned with cov_nbrs_.items (score-het)
  std::vector<double> cov_denom_;       // per focal: covariate denominator
  std::vector<std::uint8_t> nonfocal_;  // indicator, for htn
};

// Convenience wrappers matching the per-statistic operations; each builds an
// evaluator and runs it once.
std::optional<double> t_elc(const FocalPartition& part, std::span<const std::uint8_t> w,
                            const OutcomeData& y, const Nets& nets);
std::optional<double> t_score(const FocalPartition& part, std::span<const std::uint8_t> w,
                              const OutcomeData& y, const Nets& nets);
std::optional<double> t_htn(const FocalPartition& part, std::span<const std::uint8_t> w,
                            const OutcomeData& y, const Nets& nets);
std::optional<double> t_elc_ho(const FocalPartition& part, std::span<const std::uint8_t> w,
                               const OutcomeData& y, const Nets& nets);
std::optional<double> t_score_ho(const FocalPartition& part, std::span<const std::uint8_t> w,
                                 const OutcomeData& y, const Nets& nets);
std::optional<double> t_elc_cn(const FocalPartition& part, std::span<const std::uint8_t> w,
                               const OutcomeData& y, const Nets& nets);
std::optional<double> t_score_cn(const FocalPartition& part, std::span<const std::uint8_t> w,
                                 const OutcomeData& y, const Nets& nets);
std::optional<double> t_score_het(const FocalPartition& part, std::span<const std::uint8_t> w,
                                  const OutcomeData& y, const Nets& nets);
std::optional<double> t_bond(const FocalPartition& part, std::span<const std::uint8_t> w,
                             const OutcomeData& y, const Nets& nets);
std::optional<double> t_direct_diff(const FocalPartition& part,
                                    std::span<const std::uint8_t> w,
                                    const OutcomeData& y, const Nets& nets);

}  // namespace netri

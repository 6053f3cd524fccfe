#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "netri/graph.hpp"
#include "netri/hypotheses.hpp"

namespace netri {

struct Assignment {
  std::vector<std::uint8_t> w;
  std::int32_t treated = 0;

  static Assignment from_vector(std::vector<std::uint8_t> w);
};

// M of n units treated, uniformly.
struct CompleteRandomization {
  UnitId n = 0;
  std::int32_t m_treated = 0;
};

// Units carry cluster labels in [0, num_clusters); m_treated_clusters of the
// clusters are treated, all their units with them.
struct ClusterRandomization {
  std::vector<std::int32_t> cluster_of;
  std::int32_t num_clusters = 0;
  std::int32_t m_treated_clusters = 0;
};

using ExperimentDesign = std::variant<CompleteRandomization, ClusterRandomization>;

UnitId design_units(const ExperimentDesign& design);
void validate_in_support(const ExperimentDesign& design, const Assignment& w);

Assignment sample(const ExperimentDesign& design, std::uint64_t seed);

// Grammar: "complete" | "complete:M=<int>" | "cluster" | "cluster:Mc=<int>".
// Counts left unspecified are inferred from the observed assignment.
struct DesignSpec {
  bool cluster = false;
  std::int32_t m = -1;  // -1: infer from data
};
DesignSpec parse_design(const std::string& text);

// Draws from the conditional law p' over the restricted assignment set: the
// treatments of constrained units are held at their observed values and the
// observed treatments of the remaining units (or clusters) are permuted
// uniformly within exchangeability groups. For fixed-unit hypotheses there is
// a single group and the orbit is exactly the restricted set; for
// count-preserving hypotheses units are grouped by their vector of adjacency
// indicators to focal units, a refinement of the level-set cell that
// preserves every focal unit's treated-neighbor count.
class ConditionalSampler {
 public:
  ConditionalSampler(const Nets& nets, const NullHypothesis& h,
                     const ExperimentDesign& design,
                     std::span<const UnitId> focal, const Assignment& w_obs);

  // True when the reachable set is a singleton (every group is constant).
  bool degenerate() const { return degenerate_; }

  // Number of reachable assignments, saturating at `cap`.
  std::uint64_t support_size(std::uint64_t cap = UINT64_MAX) const;

  struct Workspace {
    std::vector<UnitId> scratch;
  };

  Assignment draw(std::uint64_t draw_seed) const;
  void draw_into(Assignment& out, Workspace& ws, std::uint64_t draw_seed) const;

  // Full support with exact p' masses (uniform over the orbit); throws
  // SupportTooLargeError beyond `cap` assignments.
  std::vector<std::pair<Assignment, double>> enumerate(
      std::uint64_t cap = 1'000'000) const;

 private:
  struct Group {
    std::vector<UnitId> members;  // units (complete) or cluster ids (cluster)
    std::int32_t treated = 0;     // observed treated count within the group
  };

  void build_complete(const Nets& nets, const NullHypothesis& h,
                      std::span<const UnitId> focal,
                      std::span<const UnitId> constrained);
  void build_cluster(const Nets& nets, const NullHypothesis& h,
                     const ClusterRandomization& cr,
                     std::span<const UnitId> focal,
                     std::span<const UnitId> constrained);
  void apply_group_selection(Assignment& out, const Group& g,
                             std::span<const UnitId> chosen) const;

  Assignment base_;
  std::vector<Group> groups_;
  bool cluster_mode_ = false;
  std::vector<std::vector<UnitId>> cluster_units_;  // only in cluster mode
  bool degenerate_ = true;

#ifndef NDEBUG
  const Network* dbg_g1_ = nullptr;
  const Network* dbg_g2_ = nullptr;
  NullHypothesis dbg_h_;
  std::vector<UnitId> dbg_focal_;
  std::int32_t dbg_treated_ = 0;
#endif
};

}  // namespace netri

#include "netri/design.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>

#include "netri/errors.hpp"
#include "netri/rng.hpp"

namespace netri {

Assignment Assignment::from_vector(std::vector<std::uint8_t> w) {
  Assignment a;
  a.treated = 0;
  for (std::uint8_t x : w) {
    if (x > 1) throw DataError("BAD_TREATMENT", "treatments must be 0 or 1");
    a.treated += x;
  }
  a.w = std::move(w);
  return a;
}

UnitId design_units(const ExperimentDesign& design) {
  if (const auto* c = std::get_if<CompleteRandomization>(&design)) return c->n;
  return static_cast<UnitId>(std::get<ClusterRandomization>(design).cluster_of.size());
}

void validate_in_support(const ExperimentDesign& design, const Assignment& w) {
  if (static_cast<UnitId>(w.w.size()) != design_units(design))
    throw DataError("ASSIGNMENT_LENGTH", "assignment length does not match design");
  if (const auto* c = std::get_if<CompleteRandomization>(&design)) {
    if (w.treated != c->m_treated)
      throw DataError("ASSIGNMENT_NOT_IN_SUPPORT",
                      "treated count " + std::to_string(w.treated) +
                          " does not match design M=" + std::to_string(c->m_treated));
    return;
  }
  const auto& cr = std::get<ClusterRandomization>(design);
  std::vector<std::int8_t> arm(static_cast<std::size_t>(cr.num_clusters), -1);
  std::int32_t treated_clusters = 0;
  for (std::size_t i = 0; i < w.w.size(); ++i) {
    std::int32_t c = cr.cluster_of[i];
    if (arm[c] == -1) {
      arm[c] = static_cast<std::int8_t>(w.w[i]);
      treated_clusters += w.w[i];
    } else if (arm[c] != static_cast<std::int8_t>(w.w[i])) {
      throw DataError("ASSIGNMENT_NOT_IN_SUPPORT",
                      "units within cluster " + std::to_string(c) +
                          " have mixed treatment arms");
    }
  }
  if (treated_clusters != cr.m_treated_clusters)
    throw DataError("ASSIGNMENT_NOT_IN_SUPPORT",
                    "treated cluster count does not match design Mc");
}

namespace {

// Uniformly treat `t` of the listed slots; everything listed is zeroed first.
void fill_uniform_subset(std::span<std::uint8_t> w, std::vector<UnitId>& slots,
                         std::int32_t t, Rng& rng) {
  for (UnitId s : slots) w[s] = 0;
  rng.choose_prefix(slots, static_cast<std::size_t>(t));
  for (std::int32_t i = 0; i < t; ++i) w[slots[i]] = 1;
}

}  // namespace

Assignment sample(const ExperimentDesign& design, std::uint64_t seed) {
  Rng rng(seed);
  if (const auto* c = std::get_if<CompleteRandomization>(&design)) {
    if (c->m_treated < 0 || c->m_treated > c->n)
      throw ConfigError("BAD_DESIGN", "complete randomization requires 0 <= M <= n");
    Assignment a;
    a.w.assign(static_cast<std::size_t>(c->n), 0);
    std::vector<UnitId> slots(static_cast<std::size_t>(c->n));
    std::iota(slots.begin(), slots.end(), 0);
    fill_uniform_subset(a.w, slots, c->m_treated, rng);
    a.treated = c->m_treated;
    return a;
  }
  const auto& cr = std::get<ClusterRandomization>(design);
  if (cr.m_treated_clusters < 0 || cr.m_treated_clusters > cr.num_clusters)
    throw ConfigError("BAD_DESIGN", "cluster randomization requires 0 <= Mc <= K");
  std::vector<std::uint8_t> arm(static_cast<std::size_t>(cr.num_clusters), 0);
  std::vector<UnitId> slots(static_cast<std::size_t>(cr.num_clusters));
  std::iota(slots.begin(), slots.end(), 0);
  fill_uniform_subset(arm, slots, cr.m_treated_clusters, rng);
  Assignment a;
  a.w.resize(cr.cluster_of.size());
  for (std::size_t i = 0; i < a.w.size(); ++i) a.w[i] = arm[cr.cluster_of[i]];
  a.treated = static_cast<std::int32_t>(
      std::count(a.w.begin(), a.w.end(), std::uint8_t{1}));
  return a;
}

DesignSpec parse_design(const std::string& text) {
  DesignSpec spec;
  if (text == "complete") return spec;
  if (text == "cluster") {
    spec.cluster = true;
    return spec;
  }
  auto parse_count = [&](const std::string& prefix, bool cluster) {
    spec.cluster = cluster;
    try {
      spec.m = std::stoi(text.substr(prefix.size()));
    } catch (...) {
      throw ConfigError("BAD_DESIGN", "cannot parse count in: " + text);
    }
    if (spec.m < 0) throw ConfigError("BAD_DESIGN", "negative count in: " + text);
  };
  if (text.rfind("complete:M=", 0) == 0) {
    parse_count("complete:M=", false);
    return spec;
  }
  if (text.rfind("cluster:Mc=", 0) == 0) {
    parse_count("cluster:Mc=", true);
    return spec;
  }
  throw ConfigError("BAD_DESIGN", "unknown design: " + text);
}

ConditionalSampler::ConditionalSampler(const Nets& nets, const NullHypothesis& h,
                                       const ExperimentDesign& design,
                                       std::span<const UnitId> focal,
                                       const Assignment& w_obs) {
  if (nets.num_units() != design_units(design))
    throw DataError("DESIGN_MISMATCH", "design and network unit counts differ");
  validate_in_support(design, w_obs);
  base_ = w_obs;
  auto constrained = constrained_units(h, nets, focal);

  if (std::holds_alternative<CompleteRandomization>(design)) {
    build_complete(nets, h, focal, constrained);
  } else {
    cluster_mode_ = true;
    build_cluster(nets, h, std::get<ClusterRandomization>(design), focal,
                  constrained);
  }

  degenerate_ = true;
  for (const auto& g : groups_) {
    if (g.treated > 0 && g.treated < static_cast<std::int32_t>(g.members.size())) {
      degenerate_ = false;
      break;
    }
  }

#ifndef NDEBUG
  dbg_g1_ = &nets.g1();
  dbg_g2_ = &nets.g2();
  dbg_h_ = h;
  dbg_focal_.assign(focal.begin(), focal.end());
  dbg_treated_ = w_obs.treated;
#endif
}

void ConditionalSampler::build_complete(const Nets& nets, const NullHypothesis& h,
                                        std::span<const UnitId> focal,
                                        std::span<const UnitId> constrained) {
  const UnitId n = nets.num_units();
  std::vector<std::uint8_t> fixed(static_cast<std::size_t>(n), 0);
  for (UnitId i : constrained) fixed[i] = 1;

  if (!h.count_preserving()) {
    Group g;
    for (UnitId i = 0; i < n; ++i)
      if (!fixed[i]) {
        g.members.push_back(i);
        g.treated += base_.w[i];
      }
    if (!g.members.empty()) groups_.push_back(std::move(g));
    return;
  }

  // Group free units by which focal units they are adjacent to; permuting
  // within a group changes no focal unit's treated-neighbor count.
  std::vector<std::uint8_t> is_focal(static_cast<std::size_t>(n), 0);
  for (UnitId i : focal) is_focal[i] = 1;
  std::map<std::vector<UnitId>, std::size_t> index;
  for (UnitId j = 0; j < n; ++j) {
    if (fixed[j]) continue;
    std::vector<UnitId> key;
    for (UnitId i : nets.g1().neighbors(j))
      if (is_focal[i]) key.push_back(i);
    auto [it, inserted] = index.emplace(std::move(key), groups_.size());
    if (inserted) groups_.emplace_back();
    groups_[it->second].members.push_back(j);
    groups_[it->second].treated += base_.w[j];
  }
}

void ConditionalSampler::build_cluster(const Nets& nets, const NullHypothesis& h,
                                       const ClusterRandomization& cr,
                                       std::span<const UnitId> focal,
                                       std::span<const UnitId> constrained) {
  cluster_units_.assign(static_cast<std::size_t>(cr.num_clusters), {});
  for (std::size_t i = 0; i < cr.cluster_of.size(); ++i)
    cluster_units_[cr.cluster_of[i]].push_back(static_cast<UnitId>(i));

  std::vector<std::uint8_t> pinned(static_cast<std::size_t>(cr.num_clusters), 0);
  for (UnitId i : constrained) pinned[cr.cluster_of[i]] = 1;

  std::vector<std::uint8_t> cluster_arm(static_cast<std::size_t>(cr.num_clusters), 0);
  for (std::int32_t c = 0; c < cr.num_clusters; ++c)
    if (!cluster_units_[c].empty()) cluster_arm[c] = base_.w[cluster_units_[c][0]];

  if (!h.count_preserving()) {
    Group g;
    for (std::int32_t c = 0; c < cr.num_clusters; ++c)
      if (!pinned[c]) {
        g.members.push_back(c);
        g.treated += cluster_arm[c];
      }
    if (!g.members.empty()) groups_.push_back(std::move(g));
    return;
  }

  // Free clusters grouped by their per-focal adjacency contribution: two
  // clusters may swap arms only when each focal unit has the same number of
  // neighbors in both.
  std::map<std::vector<std::pair<UnitId, std::int32_t>>, std::size_t> index;
  for (std::int32_t c = 0; c < cr.num_clusters; ++c) {
    if (pinned[c]) continue;
    std::vector<std::pair<UnitId, std::int32_t>> key;
    for (UnitId i : focal) {
      std::int32_t count = 0;
      for (UnitId j : cluster_units_[c]) count += nets.g1().has_edge(i, j);
      if (count > 0) key.emplace_back(i, count);
    }
    auto [it, inserted] = index.emplace(std::move(key), groups_.size());
    if (inserted) groups_.emplace_back();
    groups_[it->second].members.push_back(c);
    groups_[it->second].treated += cluster_arm[c];
  }
}

std::uint64_t ConditionalSampler::support_size(std::uint64_t cap) const {
  long double total = 1.0L;
  for (const auto& g : groups_) {
    const std::uint64_t nn = g.members.size();
    const std::uint64_t tt = static_cast<std::uint64_t>(g.treated);
    long double c = 1.0L;
    const std::uint64_t kk = std::min(tt, nn - tt);
    for (std::uint64_t i = 1; i <= kk; ++i)
      c = c * static_cast<long double>(nn - kk + i) / static_cast<long double>(i);
    total *= c;
    if (total > static_cast<long double>(cap) * 2.0L)
      return cap;
  }
  const long double rounded = total + 0.5L;
  if (rounded > static_cast<long double>(cap)) return cap;
  return static_cast<std::uint64_t>(rounded);
}

void ConditionalSampler::apply_group_selection(Assignment& out, const Group& g,
                                               std::span<const UnitId> chosen) const {
  if (!cluster_mode_) {
    for (UnitId u : g.members) out.w[u] = 0;
    for (UnitId u : chosen)
      out.w[u] = 1;
    return;
  }
  for (UnitId c : g.members)
    for (UnitId u : cluster_units_[c]) out.w[u] = 0;
  for (UnitId c : chosen)
    for (UnitId u : cluster_units_[c]) out.w[u] = 1;
}

Assignment ConditionalSampler::draw(std::uint64_t draw_seed) const {
  Assignment out;
  Workspace ws;
  draw_into(out, ws, draw_seed);
  return out;
}

void ConditionalSampler::draw_into(Assignment& out, Workspace& ws,
                                   std::uint64_t draw_seed) const {
  if (degenerate_)
    throw DegenerateError("DEGENERATE_SAMPLER",
                          "restricted assignment set is a singleton");
  out = base_;
  Rng rng(draw_seed);
  for (const auto& g : groups_) {
    if (g.treated == 0 || g.treated == static_cast<std::int32_t>(g.members.size())) {
      continue;  // constant group, nothing varies
    }
    ws.scratch.assign(g.members.begin(), g.members.end());
    rng.choose_prefix(ws.scratch, static_cast<std::size_t>(g.treated));
    apply_group_selection(
        out, g, std::span<const UnitId>(ws.scratch.data(),
                                        static_cast<std::size_t>(g.treated)));
  }
  out.treated = base_.treated;

#ifndef NDEBUG
  std::int32_t total = 0;
  for (std::uint8_t x : out.w) total += x;
  assert(total == dbg_treated_);
  if (dbg_g1_ != nullptr) {
    Nets nets = Nets::refs(*dbg_g1_, *dbg_g2_);
    assert(same_cell(dbg_h_, nets, dbg_focal_, base_.w, out.w));
  }
#endif
}

std::vector<std::pair<Assignment, double>> ConditionalSampler::enumerate(
    std::uint64_t cap) const {
  const std::uint64_t bound = cap == UINT64_MAX ? cap : cap + 1;
  if (support_size(bound) > cap)
    throw SupportTooLargeError("conditional support exceeds cap of " +
                               std::to_string(cap) + " assignments");

  std::vector<Assignment> support{base_};
  for (const auto& g : groups_) {
    const std::int32_t t = g.treated;
    const std::int32_t n = static_cast<std::int32_t>(g.members.size());
    if (t == 0 || t == n) continue;
    // All t-subsets of this group's members.
    std::vector<std::vector<UnitId>> subsets;
    std::vector<std::int32_t> idx(static_cast<std::size_t>(t));
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      std::vector<UnitId> chosen(static_cast<std::size_t>(t));
      for (std::int32_t i = 0; i < t; ++i) chosen[i] = g.members[idx[i]];
      subsets.push_back(std::move(chosen));
      std::int32_t pos = t - 1;
      while (pos >= 0 && idx[pos] == n - t + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (std::int32_t i = pos + 1; i < t; ++i) idx[i] = idx[i - 1] + 1;
    }
    std::vector<Assignment> next;
    next.reserve(support.size() * subsets.size());
    for (const auto& partial : support) {
      for (const auto& chosen : subsets) {
        Assignment a = partial;
        apply_group_selection(a, g, chosen);
        next.push_back(std::move(a));
      }
    }
    support = std::move(next);
  }
  const double mass = 1.0 / static_cast<double>(support.size());
  std::vector<std::pair<Assignment, double>> out;
  out.reserve(support.size());
  for (auto& a : support) {
    a.treated = base_.treated;
    out.emplace_back(std::move(a), mass);
  }
  return out;
}

}  // namespace netri

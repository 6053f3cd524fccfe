#include "netri/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "netri/errors.hpp"

namespace netri {

OutcomeData OutcomeData::all_observed(std::vector<double> values) {
  OutcomeData d;
  d.observed.assign(values.size(), 1);
  d.y = std::move(values);
  return d;
}

std::string StatisticSpec::name() const {
  switch (kind) {
    case StatKind::kElc: return "elc";
    case StatKind::kScore: return "score";
    case StatKind::kHtn: return "htn";
    case StatKind::kElcHo: return "elc-ho";
    case StatKind::kScoreHo: return "score-ho";
    case StatKind::kElcCn: return "elc-cn";
    case StatKind::kScoreCn: return "score-cn";
    case StatKind::kScoreHet: return "score-het";
    case StatKind::kBond: return "bond";
    case StatKind::kDirectDiff: return "direct-diff";
  }
  return "?";
}

StatisticSpec parse_statistic(const std::string& text) {
  static const std::array<std::pair<const char*, StatKind>, 10> table{{
      {"elc", StatKind::kElc},
      {"score", StatKind::kScore},
      {"htn", StatKind::kHtn},
      {"elc-ho", StatKind::kElcHo},
      {"score-ho", StatKind::kScoreHo},
      {"elc-cn", StatKind::kElcCn},
      {"score-cn", StatKind::kScoreCn},
      {"score-het", StatKind::kScoreHet},
      {"bond", StatKind::kBond},
      {"direct-diff", StatKind::kDirectDiff},
  }};
  for (const auto& [name, kind] : table)
    if (text == name) return {kind};
  throw ConfigError("BAD_STATISTIC", "unknown statistic: " + text);
}

bool compatible(StatKind stat, const NullHypothesis& h) {
  switch (stat) {
    case StatKind::kElc:
    case StatKind::kScore:
    case StatKind::kHtn:
      return h.kind == HypKind::kNoSpillovers || h.kind == HypKind::kNoEffects;
    case StatKind::kElcHo:
    case StatKind::kScoreHo:
      return h.kind == HypKind::kNoKthOrder && h.k >= 2;
    case StatKind::kElcCn:
    case StatKind::kScoreCn:
      return h.kind == HypKind::kSparsification;
    case StatKind::kScoreHet:
      return h.kind == HypKind::kNoPeerHeterogeneity ||
             h.kind == HypKind::kThresholdPeerEffects;
    case StatKind::kBond:
      return h.kind == HypKind::kNoEffects;
    case StatKind::kDirectDiff:
      return h.kind == HypKind::kNoDirectEffects || h.kind == HypKind::kNoEffects;
  }
  return false;
}

std::string compatibility_table() {
  return
      "statistic    hypotheses\n"
      "elc          no-spillovers, no-effects\n"
      "score        no-spillovers, no-effects\n"
      "htn          no-spillovers, no-effects\n"
      "elc-ho       no-korder:k>=2\n"
      "score-ho     no-korder:k>=2\n"
      "elc-cn       sparsification\n"
      "score-cn     sparsification\n"
      "score-het    no-heterogeneity, threshold\n"
      "bond         no-effects (not a valid test of non-sharp nulls)\n"
      "direct-diff  no-direct, no-effects\n";
}

namespace {

void require_observed(const OutcomeData& yd, UnitId i, const char* role) {
  if (!yd.observed[i])
    throw DataError("FOCAL_OUTCOME_MISSING",
                    std::string(role) + " unit " + std::to_string(i) +
                        " has no observed outcome");
}

// Solves the 3x3 normal equations by Gaussian elimination with partial
// pivoting; false on (near-)rank deficiency.
bool solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b,
            std::array<double, 3>& x) {
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) return false;
  const double tol = 1e-12 * scale;
  std::array<int, 3> perm{0, 1, 2};
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(a[perm[r]][col]) > std::fabs(a[perm[pivot]][col])) pivot = r;
    std::swap(perm[col], perm[pivot]);
    const double p = a[perm[col]][col];
    if (std::fabs(p) <= tol) return false;
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[perm[r]][col] / p;
      for (int c = col; c < 3; ++c) a[perm[r]][c] -= f * a[perm[col]][c];
      b[perm[r]] -= f * b[perm[col]];
    }
  }
  for (int col = 2; col >= 0; --col) {
    double s = b[perm[col]];
    for (int c = col + 1; c < 3; ++c) s -= a[perm[col]][c] * x[c];
    x[col] = s / a[perm[col]][col];
  }
  return true;
}

}  // namespace

StatisticEvaluator::StatisticEvaluator(StatKind kind, const Nets& nets,
                                       const FocalPartition& part,
                                       const OutcomeData& outcomes)
    : kind_(kind) {
  const Network& g1 = nets.g1();
  const Network& g2 = nets.g2();
  const UnitId n = g1.num_units();

  if (kind == StatKind::kBond) {
    // ego average over every directed edge; needs outcomes for all egos
    for (const auto& [a, b] : g1.edges()) {
      require_observed(outcomes, a, "ego");
      require_observed(outcomes, b, "ego");
      pairs_.push_back({outcomes.y[a], b});
      pairs_.push_back({outcomes.y[b], a});
    }
    return;
  }

  focal_ = part.focal;
  focal_y_.reserve(focal_.size());
  for (UnitId i : focal_) {
    require_observed(outcomes, i, "focal");
    focal_y_.push_back(outcomes.y[i]);
  }

  switch (kind) {
    case StatKind::kElc:
      for (UnitId i : focal_)
        for (UnitId j : g1.neighbors(i))
          if (part.is_auxiliary[j]) pairs_.push_back({outcomes.y[i], j});
      break;
    case StatKind::kElcHo: {
      SecondOrderAdjacency h2(g1);
      for (std::size_t f = 0; f < focal_.size(); ++f)
        for (UnitId j : h2.neighbors(focal_[f]))
          if (part.is_auxiliary[j]) pairs_.push_back({focal_y_[f], j});
      break;
    }
    case StatKind::kElcCn:
      for (std::size_t f = 0; f < focal_.size(); ++f)
        for (UnitId j : g2.neighbors(focal_[f]))
          if (part.is_auxiliary[j]) pairs_.push_back({focal_y_[f], j});
      break;
    case StatKind::kHtn:
      nonfocal_.assign(static_cast<std::size_t>(n), 1);
      for (UnitId i : focal_) nonfocal_[i] = 0;
      reg_nbrs_.offsets.push_back(0);
      for (UnitId i : focal_) {
        for (UnitId j : g1.neighbors(i))
          if (nonfocal_[j]) reg_nbrs_.items.push_back(j);
        reg_nbrs_.offsets.push_back(static_cast<std::int32_t>(reg_nbrs_.items.size()));
      }
      break;
    case StatKind::kScore:
    case StatKind::kScoreHo:
    case StatKind::kScoreCn:
    case StatKind::kScoreHet: {
      reg_nbrs_.offsets.push_back(0);
      for (UnitId i : focal_) {
        for (UnitId j : g1.neighbors(i)) reg_nbrs_.items.push_back(j);
        reg_nbrs_.offsets.push_back(static_cast<std::int32_t>(reg_nbrs_.items.size()));
      }
      if (kind == StatKind::kScore) break;
      cov_nbrs_.offsets.push_back(0);
      if (kind == StatKind::kScoreHo) {
        SecondOrderAdjacency h2(g1);
        for (UnitId i : focal_) {
          for (UnitId j : h2.neighbors(i)) cov_nbrs_.items.push_back(j);
          cov_nbrs_.offsets.push_back(static_cast<std::int32_t>(cov_nbrs_.items.size()));
          cov_denom_.push_back(static_cast<double>(h2.degree(i)));
        }
      } else if (kind == StatKind::kScoreCn) {
        for (UnitId i : focal_) {
          for (UnitId j : g2.neighbors(i)) cov_nbrs_.items.push_back(j);
          cov_nbrs_.offsets.push_back(static_cast<std::int32_t>(cov_nbrs_.items.size()));
          cov_denom_.push_back(static_cast<double>(g2.degree(i)));
        }
      } else {  // degree-weighted neighbor fraction
        for (UnitId i : focal_) {
          double denom = 0.0;
          for (UnitId j : g1.neighbors(i)) {
            cov_nbrs_.items.push_back(j);
            cov_weights_.push_back(static_cast<double>(g1.degree(j)));
            denom += static_cast<double>(g1.degree(j));
          }
          cov_nbrs_.offsets.push_back(static_cast<std::int32_t>(cov_nbrs_.items.size()));
          cov_denom_.push_back(denom);
        }
      }
      break;
    }
    case StatKind::kDirectDiff:
      break;
    case StatKind::kBond:
      break;  // handled above
  }
}

std::optional<double> StatisticEvaluator::eval(std::span<const std::uint8_t> w) const {
  switch (kind_) {
    case StatKind::kElc:
    case StatKind::kElcHo:
    case StatKind::kElcCn:
    case StatKind::kBond:
      return eval_contrast(w);
    case StatKind::kScore:
      return eval_score(w);
    case StatKind::kHtn:
      return eval_htn(w);
    case StatKind::kScoreHo:
    case StatKind::kScoreCn:
    case StatKind::kScoreHet:
      return eval_score_residual(w);
    case StatKind::kDirectDiff:
      return eval_direct_diff(w);
  }
  return std::nullopt;
}

std::optional<double> StatisticEvaluator::eval_contrast(
    std::span<const std::uint8_t> w) const {
  double sum1 = 0.0, sum0 = 0.0;
  std::int64_t c1 = 0, c0 = 0;
  for (const auto& p : pairs_) {
    if (w[p.alter]) {
      sum1 += p.ego_y;
      ++c1;
    } else {
      sum0 += p.ego_y;
      ++c0;
    }
  }
  if (c1 == 0 || c0 == 0) return std::nullopt;
  return sum1 / static_cast<double>(c1) - sum0 / static_cast<double>(c0);
}

std::optional<double> StatisticEvaluator::eval_direct_diff(
    std::span<const std::uint8_t> w) const {
  double sum1 = 0.0, sum0 = 0.0;
  std::int64_t c1 = 0, c0 = 0;
  for (std::size_t f = 0; f < focal_.size(); ++f) {
    if (w[focal_[f]]) {
      sum1 += focal_y_[f];
      ++c1;
    } else {
      sum0 += focal_y_[f];
      ++c0;
    }
  }
  if (c1 == 0 || c0 == 0) return std::nullopt;
  return sum1 / static_cast<double>(c1) - sum0 / static_cast<double>(c0);
}

std::optional<double> StatisticEvaluator::eval_score(
    std::span<const std::uint8_t> w) const {
  double sum1 = 0.0, sum0 = 0.0;
  std::int64_t c1 = 0, c0 = 0;
  for (std::size_t f = 0; f < focal_.size(); ++f) {
    if (w[focal_[f]]) {
      sum1 += focal_y_[f];
      ++c1;
    } else {
      sum0 += focal_y_[f];
      ++c0;
    }
  }
  if (c1 == 0 || c0 == 0) return std::nullopt;
  const double alpha = sum0 / static_cast<double>(c0);
  const double tau = sum1 / static_cast<double>(c1) - alpha;

  double sr = 0.0, sf = 0.0, srf = 0.0;
  std::int64_t m = 0;
  for (std::size_t f = 0; f < focal_.size(); ++f) {
    auto nbrs = reg_nbrs_.row(f);
    if (nbrs.empty()) continue;
    std::int32_t treated = 0;
    for (UnitId j : nbrs) treated += w[j];
    const double frac = static_cast<double>(treated) / static_cast<double>(nbrs.size());
    const double resid = focal_y_[f] - alpha - tau * static_cast<double>(w[focal_[f]]);
    sr += resid;
    sf += frac;
    srf += resid * frac;
    ++m;
  }
  if (m < 2) return std::nullopt;
  const double md = static_cast<double>(m);
  return (srf - sr * sf / md) / (md - 1.0);
}

std::optional<double> StatisticEvaluator::eval_htn(
    std::span<const std::uint8_t> w) const {
  const std::size_t m = focal_.size();
  if (m < 2) return std::nullopt;
  double sy = 0.0, syy = 0.0, si = 0.0, syi = 0.0;
  double ymin = focal_y_.empty() ? 0.0 : focal_y_[0];
  double ymax = ymin;
  int imin = 1, imax = 0;
  for (std::size_t f = 0; f < m; ++f) {
    int ind = 0;
    for (UnitId j : reg_nbrs_.row(f)) {
      if (w[j]) {
        ind = 1;
        break;
      }
    }
    const double y = focal_y_[f];
    sy += y;
    syy += y * y;
    si += ind;
    syi += y * ind;
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
    imin = std::min(imin, ind);
    imax = std::max(imax, ind);
  }
  if (ymin == ymax || imin == imax) return std::nullopt;  // a constant side
  const double md = static_cast<double>(m);
  const double cov = syi - sy * si / md;
  const double vy = syy - sy * sy / md;
  const double vi = si - si * si / md;  // indicator is 0/1 so sum of squares = si
  return cov / std::sqrt(vy * vi);
}

std::optional<double> StatisticEvaluator::eval_score_residual(
    std::span<const std::uint8_t> w) const {
  // OLS of y on (1, own treatment, g1 treated-neighbor fraction) over all
  // focal units, then the covariance of the residual with the covariate
  // fraction over focal units whose covariate denominator is positive.
  std::array<std::array<double, 3>, 3> xtx{};
  std::array<double, 3> xty{};
  const std::size_t nf = focal_.size();
  for (std::size_t f = 0; f < nf; ++f) {
    auto nbrs = reg_nbrs_.row(f);
    double frac = 0.0;
    if (!nbrs.empty()) {
      std::int32_t treated = 0;
      for (UnitId j : nbrs) treated += w[j];
      frac = static_cast<double>(treated) / static_cast<double>(nbrs.size());
    }
    const double xi[3] = {1.0, static_cast<double>(w[focal_[f]]), frac};
    for (int a = 0; a < 3; ++a) {
      for (int b = a; b < 3; ++b) xtx[a][b] += xi[a] * xi[b];
      xty[a] += xi[a] * focal_y_[f];
    }
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < a; ++b) xtx[a][b] = xtx[b][a];
  std::array<double, 3> beta{};
  if (!solve3(xtx, xty, beta)) return std::nullopt;

  double sr = 0.0, sf = 0.0, srf = 0.0;
  std::int64_t m = 0;
  for (std::size_t f = 0; f < nf; ++f) {
    if (cov_denom_[f] <= 0.0) continue;
    auto nbrs = reg_nbrs_.row(f);
    double gfrac = 0.0;
    if (!nbrs.empty()) {
      std::int32_t treated = 0;
      for (UnitId j : nbrs) treated += w[j];
      gfrac = static_cast<double>(treated) / static_cast<double>(nbrs.size());
    }
    const double resid = focal_y_[f] - beta[0] -
                         beta[1] * static_cast<double>(w[focal_[f]]) -
                         beta[2] * gfrac;
    auto cov_row = cov_nbrs_.row(f);
    double cfrac = 0.0;
    if (kind_ == StatKind::kScoreHet) {
      const std::int32_t begin = cov_nbrs_.offsets[f];
      for (std::size_t idx = 0; idx < cov_row.size(); ++idx)
        if (w[cov_row[idx]]) cfrac += cov_weights_[begin + idx];
      cfrac /= cov_denom_[f];
    } else {
      std::int32_t treated = 0;
      for (UnitId j : cov_row) treated += w[j];
      cfrac = static_cast<double>(treated) / cov_denom_[f];
    }
    sr += resid;
    sf += cfrac;
    srf += resid * cfrac;
    ++m;
  }
  if (m < 2) return std::nullopt;
  const double md = static_cast<double>(m);
  return (srf - sr * sf / md) / (md - 1.0);
}

namespace {

std::optional<double> run_once(StatKind kind, const FocalPartition& part,
                               std::span<const std::uint8_t> w, const OutcomeData& y,
                               const Nets& nets) {
  return StatisticEvaluator(kind, nets, part, y).eval(w);
}

}  // namespace

std::optional<double> t_elc(const FocalPartition& p, std::span<const std::uint8_t> w,
                            const OutcomeData& y, const Nets& n) {
  return run_once(StatKind::kElc, p, w, y, n);
}
std::optional<double> t_score(const FocalPartition& p, std::span<const std::uint8_t> w,
                              const OutcomeData& y, const Nets& n) {
  return run_once(StatKind::kScore, p, w, y, n);
}
std::optional<double> t_htn(const FocalPartition& p, std::span<const std::uint8_t> w,
                            const OutcomeData& y, const Nets& n) {
  return run_once(StatKind::kHtn, p, w, y, n);
}
std::optional<double> t_elc_ho(const FocalPartition& p, std::span<const std::uint8_t> w,
                               const OutcomeData& y, const Nets& n) {
  return run_once(StatKind::kElcHo, p, w, y, n);
}
std::optional<double> t_score_ho(const FocalPartition& p, std::span<const std::uint8_t> w,
                                 const OutcomeData& y, const Nets& n) {
  return run_once(StatKind::kScoreHo, p, w, y, n);
}
std::optional<double> t_elc_cn(const FocalPartition& p, std::span<const std::uint8_t> w,
                               const OutcomeData& y, const Nets& n) {
  return run_once(StatKind::kElcCn, p, w, y, n);
}
std::optional<double> t_score_cn(const FocalPartition& p, std::span<const std::uint8_t> w,
                                 const OutcomeData& y, const Nets& n) {
  return run_once(StatKind::kScoreCn, p, w, y, n);
}
std::optional<double> t_score_het(const FocalPartition& p, std::span<const std::uint8_t> w,
                                  const OutcomeData& y, const Nets& n) {
  return run_once(StatKind::kScoreHet, p, w, y, n);
}
std::optional<double> t_bond(const FocalPartition& p, std::span<const std::uint8_t> w,
                             const OutcomeData& y, const Nets& n) {
  return run_once(StatKind::kBond, p, w, y, n);
}
std::optional<double> t_direct_diff(const FocalPartition& p,
                                    std::span<const std::uint8_t> w,
                                    const OutcomeData& y, const Nets& n) {
  return run_once(StatKind::kDirectDiff, p, w, y, n);
}

}  // namespace netri

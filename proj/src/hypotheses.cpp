#include "netri/hypotheses.hpp"

#include <algorithm>

#include "netri/errors.hpp"

namespace netri {

std::string NullHypothesis::name() const {
  switch (kind) {
    case HypKind::kNoEffects: return "no-effects";
    case HypKind::kNoSpillovers: return "no-spillovers";
    case HypKind::kNoKthOrder: return "no-korder:k=" + std::to_string(k);
    case HypKind::kNoDirectEffects: return "no-direct";
    case HypKind::kSparsification: return "sparsification";
    case HypKind::kNoPeerHeterogeneity: return "no-heterogeneity";
    case HypKind::kThresholdPeerEffects: return "threshold";
  }
  return "?";
}

NullHypothesis parse_hypothesis(const std::string& text) {
  if (text == "no-effects") return {HypKind::kNoEffects};
  if (text == "no-spillovers") return {HypKind::kNoSpillovers};
  if (text == "no-direct") return {HypKind::kNoDirectEffects};
  if (text == "sparsification") return {HypKind::kSparsification};
  if (text == "no-heterogeneity") return {HypKind::kNoPeerHeterogeneity};
  if (text == "threshold") return {HypKind::kThresholdPeerEffects};
  const std::string prefix = "no-korder:k=";
  if (text.rfind(prefix, 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(text.substr(prefix.size()));
    } catch (...) {
      throw ConfigError("BAD_HYPOTHESIS", "cannot parse k in: " + text);
    }
    if (k < 1 || k > kMaxKthOrder)
      throw ConfigError("BAD_HYPOTHESIS",
                        "no-korder k must be in [1, " +
                            std::to_string(kMaxKthOrder) + "], got " + text);
    return {HypKind::kNoKthOrder, k};
  }
  throw ConfigError("BAD_HYPOTHESIS", "unknown hypothesis: " + text);
}

ExposureSignature signature(const NullHypothesis& h, const Nets& nets, UnitId i,
                            std::span<const std::uint8_t> w) {
  ExposureSignature sig;
  switch (h.kind) {
    case HypKind::kNoEffects:
      break;
    case HypKind::kNoSpillovers:
      sig.push_back(w[i]);
      break;
    case HypKind::kNoKthOrder: {
      const UnitId me = i;
      auto units = ball(nets.g1(), std::span<const UnitId>(&me, 1),
                        static_cast<UnitId>(h.k - 1));
      sig.reserve(units.size());
      for (UnitId j : units) sig.push_back(w[j]);
      break;
    }
    case HypKind::kNoDirectEffects:
      for (UnitId j : nets.g1().neighbors(i)) sig.push_back(w[j]);
      break;
    case HypKind::kSparsification:
      sig.push_back(w[i]);
      for (UnitId j : nets.g1().neighbors(i)) sig.push_back(w[j]);
      break;
    case HypKind::kNoPeerHeterogeneity: {
      std::int32_t count = 0;
      for (UnitId j : nets.g1().neighbors(i)) count += w[j];
      sig = {w[i], count};
      break;
    }
    case HypKind::kThresholdPeerEffects: {
      std::int32_t any = 0;
      for (UnitId j : nets.g1().neighbors(i)) any |= w[j];
      sig = {w[i], any};
      break;
    }
  }
  return sig;
}

std::vector<UnitId> constrained_units(const NullHypothesis& h, const Nets& nets,
                                      std::span<const UnitId> focal) {
  switch (h.kind) {
    case HypKind::kNoEffects:
      return {};
    case HypKind::kNoSpillovers:
    case HypKind::kNoPeerHeterogeneity:
    case HypKind::kThresholdPeerEffects:
      return {focal.begin(), focal.end()};
    case HypKind::kNoKthOrder:
      return ball(nets.g1(), focal, static_cast<UnitId>(h.k - 1));
    case HypKind::kNoDirectEffects: {
      std::vector<UnitId> out;
      for (UnitId i : focal)
        for (UnitId j : nets.g1().neighbors(i)) out.push_back(j);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    case HypKind::kSparsification: {
      std::vector<UnitId> out(focal.begin(), focal.end());
      for (UnitId i : focal)
        for (UnitId j : nets.g1().neighbors(i)) out.push_back(j);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
  }
  return {};
}

bool same_cell(const NullHypothesis& h, const Nets& nets,
               std::span<const UnitId> focal, std::span<const std::uint8_t> w,
               std::span<const std::uint8_t> w_alt) {
  for (UnitId i : focal)
    if (signature(h, nets, i, w) != signature(h, nets, i, w_alt)) return false;
  return true;
}

}  // namespace netri

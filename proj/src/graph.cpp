#include "netri/graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

#include "netri/errors.hpp"
#include "netri/rng.hpp"

namespace netri {

Network::Network(UnitId n, std::vector<Edge> edges) : n_(n) {
  if (n < 0) throw DataError("BAD_UNIT_COUNT", "negative unit count");
  for (auto& [a, b] : edges) {
    if (a == b)
      throw DataError("SELF_LOOP", "self-loop at unit " + std::to_string(a));
    if (a < 0 || b < 0 || a >= n || b >= n)
      throw DataError("UNIT_OUT_OF_RANGE",
                      "edge endpoint out of range: (" + std::to_string(a) +
                          ", " + std::to_string(b) + ")");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  adj_.assign(static_cast<std::size_t>(n_), {});
  for (const auto& [a, b] : edges_) {
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }
  for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
}

bool Network::has_edge(UnitId i, UnitId j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) return false;
  const auto& nbrs = adj_[i];
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

NetworkPair::NetworkPair(Network a, Network b) : g1(std::move(a)), g2(std::move(b)) {
  if (g1.num_units() != g2.num_units())
    throw DataError("NETWORK_PAIR_MISMATCH",
                    "paired networks must share the unit set");
}

namespace {

bool is_nonneg_integer(const std::string& tok) {
  if (tok.empty() || tok.size() > 9) return false;
  for (char c : tok)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

EdgeListData from_edge_list(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> raw;
  std::string line;
  int line_no = 0;
  bool all_integer = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a >> b) || (ls >> extra))
      throw DataError("EDGE_PARSE",
                      "line " + std::to_string(line_no) +
                          ": expected exactly two ids, got: " + line);
    all_integer = all_integer && is_nonneg_integer(a) && is_nonneg_integer(b);
    raw.emplace_back(std::move(a), std::move(b));
  }

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  std::vector<std::string> labels;
  UnitId n = 0;
  if (all_integer) {
    for (const auto& [a, b] : raw) {
      UnitId u = static_cast<UnitId>(std::stol(a));
      UnitId v = static_cast<UnitId>(std::stol(b));
      n = std::max({n, u + 1, v + 1});
      edges.emplace_back(u, v);
    }
  } else {
    std::unordered_map<std::string, UnitId> dict;
    auto intern = [&](const std::string& tok) {
      auto [it, inserted] = dict.emplace(tok, static_cast<UnitId>(labels.size()));
      if (inserted) labels.push_back(tok);
      return it->second;
    };
    for (const auto& [a, b] : raw) edges.emplace_back(intern(a), intern(b));
    n = static_cast<UnitId>(labels.size());
  }
  return {Network(n, std::move(edges)), std::move(labels)};
}

EdgeListData load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("FILE_NOT_FOUND", "cannot open edge list: " + path);
  return from_edge_list(in);
}

std::optional<UnitId> hop_distance(const Network& net, UnitId i, UnitId j) {
  const UnitId n = net.num_units();
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw DataError("UNIT_OUT_OF_RANGE", "hop_distance: unit id out of range");
  if (i == j) return 0;
  std::vector<UnitId> dist(static_cast<std::size_t>(n), -1);
  std::deque<UnitId> queue{i};
  dist[i] = 0;
  while (!queue.empty()) {
    UnitId u = queue.front();
    queue.pop_front();
    for (UnitId v : net.neighbors(u)) {
      if (dist[v] >= 0) continue;
      dist[v] = dist[u] + 1;
      if (v == j) return dist[v];
      queue.push_back(v);
    }
  }
  return std::nullopt;
}

std::vector<UnitId> ball(const Network& net, std::span<const UnitId> sources,
                         UnitId radius) {
  std::vector<UnitId> dist(static_cast<std::size_t>(net.num_units()), -1);
  std::deque<UnitId> queue;
  for (UnitId s : sources) {
    if (dist[s] < 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  std::vector<UnitId> out;
  while (!queue.empty()) {
    UnitId u = queue.front();
    queue.pop_front();
    out.push_back(u);
    if (dist[u] == radius) continue;
    for (UnitId v : net.neighbors(u)) {
      if (dist[v] >= 0) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

SecondOrderAdjacency::SecondOrderAdjacency(const Network& net) {
  const UnitId n = net.num_units();
  hadj_.assign(static_cast<std::size_t>(n), {});
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (UnitId i = 0; i < n; ++i) {
    for (UnitId k : net.neighbors(i)) {
      for (UnitId j : net.neighbors(k)) {
        if (j <= i || seen[j]) continue;
        seen[j] = 1;
        if (!net.has_edge(i, j)) {
          hadj_[i].push_back(j);
          hadj_[j].push_back(i);
          pairs_.emplace_back(i, j);
        }
      }
    }
    // reset marks; a unit's second-order neighborhood is small
    for (UnitId k : net.neighbors(i))
      for (UnitId j : net.neighbors(k)) seen[j] = 0;
  }
  for (auto& nbrs : hadj_) std::sort(nbrs.begin(), nbrs.end());
  std::sort(pairs_.begin(), pairs_.end());
}

SecondOrderAdjacency second_order(const Network& net) {
  return SecondOrderAdjacency(net);
}

std::vector<double> normalized_neighbor_weights(const Network& net, UnitId i) {
  const UnitId k = net.degree(i);
  if (k == 0) return {};
  return std::vector<double>(static_cast<std::size_t>(k), 1.0 / k);
}

Network watts_strogatz(UnitId n, UnitId k, double p_rw, std::uint64_t seed) {
  if (k < 0 || k % 2 != 0 || k >= n)
    throw ConfigError("BAD_WS_DEGREE",
                      "watts_strogatz requires an even k with k < n");
  std::vector<std::vector<UnitId>> adj(static_cast<std::size_t>(n));
  auto connected = [&](UnitId a, UnitId b) {
    return std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end();
  };
  auto link = [&](UnitId a, UnitId b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  auto unlink = [&](UnitId a, UnitId b) {
    adj[a].erase(std::find(adj[a].begin(), adj[a].end(), b));
    adj[b].erase(std::find(adj[b].begin(), adj[b].end(), a));
  };
  for (UnitId d = 1; d <= k / 2; ++d)
    for (UnitId i = 0; i < n; ++i) link(i, static_cast<UnitId>((i + d) % n));

  Rng rng(seed);
  for (UnitId d = 1; d <= k / 2; ++d) {
    for (UnitId i = 0; i < n; ++i) {
      if (!rng.bernoulli(p_rw)) continue;
      UnitId old = static_cast<UnitId>((i + d) % n);
      if (!connected(i, old)) continue;  // already rewired away by someone else
      if (static_cast<UnitId>(adj[i].size()) >= n - 1) continue;  // saturated
      UnitId target;
      do {
        target = static_cast<UnitId>(rng.below(static_cast<std::uint64_t>(n)));
      } while (target == i || connected(i, target));
      unlink(i, old);
      link(i, target);
    }
  }

  std::vector<Edge> edges;
  for (UnitId i = 0; i < n; ++i)
    for (UnitId j : adj[i])
      if (i < j) edges.emplace_back(i, j);
  return Network(n, std::move(edges));
}

Network sparsify(const Network& net, double q, std::uint64_t seed) {
  if (q < 0.0 || q > 1.0)
    throw ConfigError("BAD_PROBABILITY", "sparsify requires 0 <= q <= 1");
  Rng rng(seed);
  std::vector<Edge> kept;
  for (const Edge& e : net.edges())
    if (!rng.bernoulli(q)) kept.push_back(e);
  return Network(net.num_units(), std::move(kept));
}

Network dyad_network(UnitId n_pairs) {
  if (n_pairs < 1)
    throw ConfigError("BAD_UNIT_COUNT", "dyad_network requires n_pairs >= 1");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n_pairs));
  for (UnitId m = 0; m < n_pairs; ++m) edges.emplace_back(2 * m, 2 * m + 1);
  return Network(2 * n_pairs, std::move(edges));
}

}  // namespace netri

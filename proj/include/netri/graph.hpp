#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace netri {

using UnitId = std::int32_t;
using Edge = std::pair<UnitId, UnitId>;  // canonical form: first < second

// Immutable undirected simple graph over dense 0-based unit ids. Adjacency is
// stored as sorted neighbor lists; safe to share across threads after
// construction.
class Network {
 public:
  Network() = default;

  // Edges are deduplicated and normalized; self-loops and out-of-range
  // endpoints are rejected.
  Network(UnitId n, std::vector<Edge> edges);

  UnitId num_units() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  UnitId degree(UnitId i) const { return static_cast<UnitId>(adj_[i].size()); }
  std::span<const UnitId> neighbors(UnitId i) const { return adj_[i]; }
  bool has_edge(UnitId i, UnitId j) const;

  // Canonical (i < j) edge list, sorted.
  const std::vector<Edge>& edges() const { return edges_; }

  double mean_degree() const {
    return n_ == 0 ? 0.0 : 2.0 * static_cast<double>(edges_.size()) / n_;
  }

 private:
  UnitId n_ = 0;
  std::vector<std::vector<UnitId>> adj_;
  std::vector<Edge> edges_;
};

// Pairs (i, j) that are neighbors-of-neighbors but not neighbors, stored as a
// symmetric adjacency view.
class SecondOrderAdjacency {
 public:
  SecondOrderAdjacency() = default;
  explicit SecondOrderAdjacency(const Network& net);

  UnitId degree(UnitId i) const { return static_cast<UnitId>(hadj_[i].size()); }
  std::span<const UnitId> neighbors(UnitId i) const { return hadj_[i]; }
  const std::vector<Edge>& pairs() const { return pairs_; }

 private:
  std::vector<std::vector<UnitId>> hadj_;
  std::vector<Edge> pairs_;
};

// Two networks over the same unit set (e.g. a sparsified network g1 and the
// full network g2).
struct NetworkPair {
  Network g1;
  Network g2;

  NetworkPair(Network a, Network b);
};

struct EdgeListData {
  Network network;
  // Non-empty iff the file used non-integer ids; labels[i] is unit i's label.
  std::vector<std::string> labels;
};

// One edge per line, two whitespace-separated ids, '#' comment lines ignored.
// If every id token is a nonnegative integer the ids are used directly
// (n = max id + 1); otherwise ids are mapped through a dictionary in order of
// first appearance.
EdgeListData from_edge_list(std::istream& in);
EdgeListData load_edge_list(const std::string& path);

// BFS shortest-path length; std::nullopt when no path exists.
std::optional<UnitId> hop_distance(const Network& net, UnitId i, UnitId j);

// All units within `radius` hops of any source (includes the sources).
std::vector<UnitId> ball(const Network& net, std::span<const UnitId> sources,
                         UnitId radius);

SecondOrderAdjacency second_order(const Network& net);

// Row of the normalized adjacency: 1/K_i for each neighbor, empty when the
// unit is isolated.
std::vector<double> normalized_neighbor_weights(const Network& net, UnitId i);

// Ring lattice on n units, each connected to its k nearest neighbors, then
// each ring edge's far endpoint is rewired with probability p_rw to a uniform
// target that is neither the unit itself nor a current neighbor.
Network watts_strogatz(UnitId n, UnitId k, double p_rw, std::uint64_t seed);

// Keep each edge independently with probability 1 - q; unit set unchanged.
Network sparsify(const Network& net, double q, std::uint64_t seed);

// 2 * n_pairs units; unit 2m is paired with unit 2m+1.
Network dyad_network(UnitId n_pairs);

}  // namespace netri

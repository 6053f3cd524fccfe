#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "netri/design.hpp"
#include "netri/engine.hpp"
#include "netri/graph.hpp"
#include "netri/simlab.hpp"
#include "netri/stats.hpp"

namespace netri {

// CSV with header "id,treatment,outcome" or "id,treatment,outcome,cluster";
// missing outcomes are spelled "NA".
struct NodeTable {
  std::vector<std::string> ids;
  Assignment treatment;
  OutcomeData outcomes;
  std::vector<std::string> cluster_names;       // empty when no cluster column
  std::vector<std::int32_t> cluster_of;         // empty when no cluster column
  std::int32_t num_clusters = 0;

  std::optional<UnitId> index_of(const std::string& id) const;
};

NodeTable load_node_table(const std::string& path);

// Everything a test run needs, with edge ids resolved against the node table
// when one is supplied (the table then defines the unit set, so isolated
// units are representable).
struct Dataset {
  std::shared_ptr<const Network> g1;
  std::shared_ptr<const Network> g2;  // null without a second edge list
  NodeTable nodes;

  Nets nets() const {
    return g2 ? Nets::refs(*g1, *g2) : Nets::single(*g1);
  }
};

Dataset load_dataset(const std::string& edges_path,
                     const std::string& edges2_path,  // "" when absent
                     const std::string& nodes_path);

// Shortest-round-trip decimal form, for byte-stable reports.
std::string format_double(double v);

std::string test_result_json(const TestResult& result, const std::string& config_json);

std::string sim_results_csv(const std::vector<SimResult>& rows);

// One focal id per line, using external labels when available.
std::string focal_id_lines(const std::vector<UnitId>& focal,
                           const std::vector<std::string>& labels);

std::vector<UnitId> parse_focal_file(const std::string& path,
                                     const std::vector<std::string>& labels,
                                     UnitId n);

}  // namespace netri

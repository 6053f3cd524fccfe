#include "netri/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "netri/errors.hpp"

namespace netri {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto a = f.find_first_not_of(" \t");
    const auto b = f.find_last_not_of(" \t");
    f = a == std::string::npos ? "" : f.substr(a, b - a + 1);
  }
  return fields;
}

}  // namespace

std::optional<UnitId> NodeTable::index_of(const std::string& id) const {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) return std::nullopt;
  return static_cast<UnitId>(it - ids.begin());
}

NodeTable load_node_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("FILE_NOT_FOUND", "cannot open node table: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw DataError("NODE_TABLE_EMPTY", "node table has no header: " + path);
  auto header = split_csv_line(line);
  const bool with_cluster =
      header.size() == 4 && header[3] == "cluster";
  if (!((header.size() == 3 || with_cluster) && header[0] == "id" &&
        header[1] == "treatment" && header[2] == "outcome"))
    throw DataError("NODE_TABLE_HEADER",
                    "expected header id,treatment,outcome[,cluster] in " + path);

  NodeTable table;
  std::vector<std::uint8_t> w;
  std::unordered_map<std::string, UnitId> seen;
  std::unordered_map<std::string, std::int32_t> cluster_index;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError("NODE_TABLE_ROW", "line " + std::to_string(line_no) +
                                            ": wrong field count");
    const std::string& id = fields[0];
    if (!seen.emplace(id, static_cast<UnitId>(table.ids.size())).second)
      throw DataError("NODE_TABLE_DUPLICATE",
                      "duplicate id '" + id + "' at line " + std::to_string(line_no));
    table.ids.push_back(id);
    if (fields[1] != "0" && fields[1] != "1")
      throw DataError("BAD_TREATMENT", "line " + std::to_string(line_no) +
                                           ": treatment must be 0 or 1");
    w.push_back(fields[1] == "1" ? 1 : 0);
    if (fields[2] == "NA") {
      table.outcomes.y.push_back(0.0);
      table.outcomes.observed.push_back(0);
    } else {
      try {
        table.outcomes.y.push_back(std::stod(fields[2]));
      } catch (...) {
        throw DataError("BAD_OUTCOME", "line " + std::to_string(line_no) +
                                           ": cannot parse outcome");
      }
      table.outcomes.observed.push_back(1);
    }
    if (with_cluster) {
      auto [it, inserted] = cluster_index.emplace(
          fields[3], static_cast<std::int32_t>(table.cluster_names.size()));
      if (inserted) table.cluster_names.push_back(fields[3]);
      table.cluster_of.push_back(it->second);
    }
  }
  table.treatment = Assignment::from_vector(std::move(w));
  table.num_clusters = static_cast<std::int32_t>(table.cluster_names.size());
  return table;
}

namespace {

// Edge list resolved against an id dictionary (the node table's unit set).
std::shared_ptr<const Network> load_edges_with_dict(
    const std::string& path, const std::unordered_map<std::string, UnitId>& dict,
    UnitId n) {
  std::ifstream in(path);
  if (!in) throw DataError("FILE_NOT_FOUND", "cannot open edge list: " + path);
  std::vector<Edge> edges;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a >> b) || (ls >> extra))
      throw DataError("EDGE_PARSE", path + " line " + std::to_string(line_no) +
                                        ": expected exactly two ids");
    auto ia = dict.find(a);
    auto ib = dict.find(b);
    if (ia == dict.end() || ib == dict.end())
      throw DataError("UNKNOWN_UNIT",
                      path + " line " + std::to_string(line_no) +
                          ": id not present in node table");
    edges.emplace_back(ia->second, ib->second);
  }
  return std::make_shared<Network>(n, std::move(edges));
}

}  // namespace

Dataset load_dataset(const std::string& edges_path, const std::string& edges2_path,
                     const std::string& nodes_path) {
  Dataset ds;
  ds.nodes = load_node_table(nodes_path);
  const UnitId n = static_cast<UnitId>(ds.nodes.ids.size());
  std::unordered_map<std::string, UnitId> dict;
  for (UnitId i = 0; i < n; ++i) dict.emplace(ds.nodes.ids[i], i);
  ds.g1 = load_edges_with_dict(edges_path, dict, n);
  if (!edges2_path.empty()) ds.g2 = load_edges_with_dict(edges2_path, dict, n);
  return ds;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string test_result_json(const TestResult& result, const std::string& config_json) {
  nlohmann::json j;
  j["t_obs"] = result.t_obs;
  j["b_draws"] = result.b_draws;
  j["p_abs"] = result.p_abs;
  j["p_two"] = result.p_two;
  j["degenerate_draws"] = result.degenerate_draws;
  j["seed"] = result.seed;
  if (!config_json.empty()) j["config"] = nlohmann::json::parse(config_json);
  return j.dump(2) + "\n";
}

std::string sim_results_csv(const std::vector<SimResult>& rows) {
  std::ostringstream os;
  os << "network,hypothesis,statistic,selector,tau_direct,tau_spill,lambda,q,"
        "reps,degenerate_reps,rejections,rejection_rate,mc_se,b_draws,alpha,seed\n";
  for (const auto& r : rows) {
    os << r.network << ',' << r.hypothesis << ',' << r.statistic << ','
       << r.selector << ',' << format_double(r.tau_direct) << ','
       << format_double(r.tau_spill) << ',' << format_double(r.lambda) << ','
       << format_double(r.q) << ',' << r.reps << ',' << r.degenerate_reps << ','
       << r.rejections << ',' << format_double(r.rejection_rate) << ','
       << format_double(r.mc_se) << ',' << r.b_draws << ','
       << format_double(r.alpha) << ',' << r.seed << '\n';
  }
  return os.str();
}

std::string focal_id_lines(const std::vector<UnitId>& focal,
                           const std::vector<std::string>& labels) {
  std::ostringstream os;
  for (UnitId i : focal) {
    if (!labels.empty())
      os << labels[i] << '\n';
    else
      os << i << '\n';
  }
  return os.str();
}

std::vector<UnitId> parse_focal_file(const std::string& path,
                                     const std::vector<std::string>& labels,
                                     UnitId n) {
  std::ifstream in(path);
  if (!in) throw DataError("FILE_NOT_FOUND", "cannot open focal file: " + path);
  std::unordered_map<std::string, UnitId> dict;
  for (std::size_t i = 0; i < labels.size(); ++i)
    dict.emplace(labels[i], static_cast<UnitId>(i));
  std::vector<UnitId> focal;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::size_t end = line.find_last_not_of(" \t\r");
    const std::string tok = line.substr(start, end - start + 1);
    UnitId id = -1;
    if (!dict.empty()) {
      auto it = dict.find(tok);
      if (it == dict.end())
        throw DataError("UNKNOWN_UNIT", "focal file line " +
                                            std::to_string(line_no) +
                                            ": id not in node table");
      id = it->second;
    } else {
      try {
        id = static_cast<UnitId>(std::stol(tok));
      } catch (...) {
        throw DataError("BAD_FOCAL_ID", "focal file line " +
                                            std::to_string(line_no) +
                                            ": cannot parse id");
      }
    }
    if (id < 0 || id >= n)
      throw DataError("UNIT_OUT_OF_RANGE",
                      "focal file line " + std::to_string(line_no) +
                          ": id out of range");
    focal.push_back(id);
  }
  std::sort(focal.begin(), focal.end());
  focal.erase(std::unique(focal.begin(), focal.end()), focal.end());
  return focal;
}

}  // namespace netri

#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "expdec/decomposition.hpp"
#include "expdec/errors.hpp"
#include "expdec/graph.hpp"
#include "expdec/params.hpp"

namespace expdec {

/// Edge-list format: first significant line `n m`, then m lines `u v` with
/// 0-based ids; `u u` is a self-loop. Blank lines and lines starting with
/// `#` are ignored. Errors carry the 1-based line number.
inline MultiGraph read_edge_list(std::istream &in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&](std::string &out) {
    while (std::getline(in, line)) {
      ++lineno;
      std::size_t first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      if (line[first] == '#') continue;
      out = line;
      return true;
    }
    return false;
  };

  std::string header;
  require_input(next_line(header), "edge list: missing `n m` header");
  long long n = -1, m = -1;
  {
    std::istringstream ss(header);
    std::string extra;
    if (!(ss >> n >> m) || (ss >> extra) || n < 0 || m < 0)
      throw InputError("line " + std::to_string(lineno) + ": expected header `n m`");
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    std::string row;
    if (!next_line(row))
      throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(m) +
                       " edges, got " + std::to_string(i));
    std::istringstream ss(row);
    long long u = -1, v = -1;
    std::string extra;
    if (!(ss >> u >> v) || (ss >> extra))
      throw InputError("line " + std::to_string(lineno) + ": expected `u v`");
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw InputError("line " + std::to_string(lineno) + ": vertex id out of range");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  return MultiGraph(static_cast<int>(n), std::move(edges));
}

inline void write_edge_list(std::ostream &out, const MultiGraph &g) {
  out << g.n() << ' ' << g.m() << '\n';
  for (const auto &[u, v] : g.edges()) out << u << ' ' << v << '\n';
}

inline nlohmann::ordered_json params_to_json(const Params &p) {
  return nlohmann::ordered_json{{"phi", p.phi}, {"T", p.T},   {"Z", p.Z},
                                {"c", p.c},     {"d", p.d},   {"h", p.h},
                                {"mode", mode_name(p.mode)},  {"seed", p.seed}};
}

inline nlohmann::ordered_json partition_to_json(const Partition &part) {
  nlohmann::ordered_json j;
  j["clusters"] = part.clusters;
  j["inter_cluster_edges"] = part.inter_cluster_edges;
  nlohmann::ordered_json per_cluster = nlohmann::ordered_json::array();
  for (const auto &info : part.info) {
    per_cluster.push_back({{"size", info.vertices.size()},
                           {"vol", info.vol},
                           {"cert_method", info.cert_method},
                           {"cert_value", info.cert_value}});
  }
  j["per_cluster"] = per_cluster;
  j["rounds_total"] = part.rounds_total;
  j["seed"] = part.seed;
  j["params"] = {{"phi", part.phi}, {"mode", mode_name(part.mode)}};
  return j;
}

} // namespace expdec

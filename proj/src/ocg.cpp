#include "taskseg/ocg.hpp"

#include <queue>
#include <string>

#include "taskseg/error.hpp"

namespace taskseg {

std::map<ObjectId, double> degree_centrality(const PartGraph& g) {
  const std::size_t n = g.parts.size();
  if (n < 2) {
    throw Error(Errc::degenerate_graph,
                "degree centrality needs at least 2 part nodes, got " +
                    std::to_string(n));
  }
  std::map<ObjectId, double> out;
  const double denom = static_cast<double>(n - 1);
  for (ObjectId id : g.parts) {
    out[id] = static_cast<double>(g.neighbors[id].size()) / denom;
  }
  return out;
}

ObjectId select_origin(const std::map<ObjectId, double>& centrality) {
  if (centrality.empty()) {
    throw Error(Errc::degenerate_graph, "empty centrality map");
  }
  // std::map iterates ids in ascending order, so the first strict maximum
  // is also the smallest-id tie winner.
  ObjectId best = centrality.begin()->first;
  double best_value = centrality.begin()->second;
  for (const auto& [id, value] : centrality) {
    if (value > best_value) {
      best = id;
      best_value = value;
    }
  }
  return best;
}

std::map<ObjectId, std::optional<int>> shortest_distances(const PartGraph& g,
                                                          ObjectId origin) {
  bool known = false;
  for (ObjectId id : g.parts) known = known || id == origin;
  if (!known) {
    throw Error(Errc::unknown_node,
                "origin " + std::to_string(origin) + " is not a part node");
  }
  std::vector<int> dist(g.neighbors.size(), -1);
  std::queue<ObjectId> frontier;
  dist[origin] = 0;
  frontier.push(origin);
  while (!frontier.empty()) {
    const ObjectId u = frontier.front();
    frontier.pop();
    for (ObjectId v : g.neighbors[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push(v);
      }
    }
  }
  std::map<ObjectId, std::optional<int>> out;
  for (ObjectId id : g.parts) {
    out[id] = dist[id] < 0 ? std::nullopt : std::optional<int>(dist[id]);
  }
  return out;
}

std::map<ObjectId, double> origin_weights(
    const std::map<ObjectId, std::optional<int>>& distances) {
  std::map<ObjectId, double> out;
  for (const auto& [id, d] : distances) {
    out[id] = d ? 1.0 / (1.0 + static_cast<double>(*d)) : 0.0;
  }
  return out;
}

OriginCentricGraph build_ocg(const Recording& rec, const OcgOptions& opts) {
  if (rec.empty()) {
    throw Error(Errc::validation, "recording has no frames");
  }
  const int frame = opts.final_frame.value_or(rec.frame_count() - 1);
  const PartGraph g = rec.part_connectivity_at(frame);

  OriginCentricGraph ocg;
  ocg.centrality = degree_centrality(g);
  ocg.origin = select_origin(ocg.centrality);
  ocg.distance = shortest_distances(g, ocg.origin);
  ocg.weight = origin_weights(ocg.distance);

  if (opts.strict_connected) {
    for (const auto& [id, d] : ocg.distance) {
      if (!d) {
        throw Error(Errc::strict_connectivity,
                    "part " + std::to_string(id) +
                        " is not connected to the origin at frame " +
                        std::to_string(frame));
      }
    }
  }
  return ocg;
}

}  // namespace taskseg

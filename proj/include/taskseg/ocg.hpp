#ifndef TASKSEG_OCG_HPP
#define TASKSEG_OCG_HPP

#include <map>
#include <optional>

#include "taskseg/recording.hpp"

namespace taskseg {

/// Offline graph over part nodes built from the final assembly state.
/// `distance` is BFS hop count from the origin; nullopt marks nodes in
/// other components. Unreachable nodes carry weight 0; the origin always
/// carries weight 1.
struct OriginCentricGraph {
  ObjectId origin = -1;
  std::map<ObjectId, double> centrality;
  std::map<ObjectId, std::optional<int>> distance;
  std::map<ObjectId, double> weight;

  bool contains(ObjectId id) const { return weight.contains(id); }
};

struct OcgOptions {
  /// Frame whose part connectivity defines the final assembly stage;
  /// defaults to the last frame.
  std::optional<int> final_frame;
  /// Error out (StrictConnectivity) when the final part graph is
  /// disconnected instead of leaving unreachable nodes at weight 0.
  bool strict_connected = false;
};

/// deg(o_i) / (N - 1) for every part node; N is the part count.
std::map<ObjectId, double> degree_centrality(const PartGraph& g);

/// Argmax of centrality, ties broken by smallest id.
ObjectId select_origin(const std::map<ObjectId, double>& centrality);

/// Unweighted BFS hop counts from origin; nullopt for other components.
std::map<ObjectId, std::optional<int>> shortest_distances(const PartGraph& g,
                                                          ObjectId origin);

/// W = 1 / (1 + d); unreachable nodes get 0.
std::map<ObjectId, double> origin_weights(
    const std::map<ObjectId, std::optional<int>>& distances);

OriginCentricGraph build_ocg(const Recording& rec, const OcgOptions& opts = {});

}  // namespace taskseg

#endif  // TASKSEG_OCG_HPP

#include "taskseg/recording.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "taskseg/error.hpp"

namespace taskseg {

std::string_view to_string(Category c) {
  return c == Category::part ? "part" : "tool";
}

std::string_view to_string(HandSide s) {
  return s == HandSide::left ? "left" : "right";
}

std::string_view to_string(EdgeKind k) {
  return k == EdgeKind::part_part ? "pp" : "tp";
}

bool FrameRecord::hand_adjacency(HandSide side, ObjectId object) const {
  const auto& ids = grasp[side == HandSide::left ? 0 : 1];
  return std::binary_search(ids.begin(), ids.end(), object);
}

bool FrameRecord::adjacency(ObjectId i, ObjectId j) const {
  if (i == j) return false;
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges.begin(), edges.end(), i,
                             [](const Edge& e, ObjectId v) { return e.i < v; });
  for (; it != edges.end() && it->i == i; ++it) {
    if (it->j == j) return true;
  }
  return false;
}

Recording::Recording(std::vector<ObjectNode> nodes, double frame_rate)
    : nodes_(std::move(nodes)), frame_rate_(frame_rate) {
  if (nodes_.empty()) {
    throw Error(Errc::empty_registry, "node registry is empty");
  }
  if (!(frame_rate_ > 0.0) || !std::isfinite(frame_rate_)) {
    throw Error(Errc::validation, "frame_rate must be positive");
  }
  std::set<std::string> names;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    nodes_[k].id = static_cast<ObjectId>(k);
    if (nodes_[k].name.empty()) {
      throw Error(Errc::validation,
                  "node " + std::to_string(k) + " has an empty name");
    }
    if (!names.insert(nodes_[k].name).second) {
      throw Error(Errc::duplicate_node,
                  "duplicate node name \"" + nodes_[k].name + "\"");
    }
  }
}

double Recording::duration() const {
  return frames_.empty() ? 0.0 : frames_.back().timestamp;
}

namespace {

void validate_pose(const Pose6DoF& pose, long frame) {
  for (double v : pose.position) {
    if (!std::isfinite(v)) {
      throw Error(Errc::validation, "non-finite position", -1, frame);
    }
  }
  double norm2 = 0.0;
  for (double v : pose.rotation) {
    if (!std::isfinite(v)) {
      throw Error(Errc::validation, "non-finite rotation", -1, frame);
    }
    norm2 += v * v;
  }
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6) {
    throw Error(Errc::validation, "rotation quaternion is not unit length", -1,
                frame);
  }
}

void validate_hand(const HandState& hand, HandSide expected, long frame) {
  if (hand.side != expected) {
    throw Error(Errc::validation, "hand state stored in the wrong slot", -1,
                frame);
  }
  if (hand.joints && hand.joints->size() != kHandJointCount) {
    throw Error(Errc::validation,
                "hand joints must have exactly " +
                    std::to_string(kHandJointCount) + " entries",
                -1, frame);
  }
  if (hand.joints) {
    for (const auto& j : *hand.joints) validate_pose(j, frame);
  }
}

}  // namespace

void Recording::validate_frame(const FrameRecord& frame) const {
  const long fi = frame.index;
  const int n = node_count();
  if (frame.index != frame_count()) {
    throw Error(Errc::validation,
                "frame index " + std::to_string(frame.index) +
                    " does not continue the stream (expected " +
                    std::to_string(frame_count()) + ")",
                -1, fi);
  }
  if (!std::isfinite(frame.timestamp) || frame.timestamp < 0.0) {
    throw Error(Errc::validation, "timestamp must be finite and >= 0", -1, fi);
  }
  if (!frames_.empty() && frame.timestamp <= frames_.back().timestamp) {
    throw Error(Errc::time_order,
                "timestamp " + std::to_string(frame.timestamp) +
                    " is not greater than the previous frame's",
                -1, fi);
  }
  validate_hand(frame.left, HandSide::left, fi);
  validate_hand(frame.right, HandSide::right, fi);
  for (const auto& ids : frame.grasp) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (ids[k] < 0 || ids[k] >= n) {
        throw Error(Errc::matrix_shape,
                    "grasped object id " + std::to_string(ids[k]) +
                        " outside registry of size " + std::to_string(n),
                    -1, fi);
      }
      if (k > 0 && ids[k] <= ids[k - 1]) {
        throw Error(Errc::matrix_shape, "grasp list must be sorted and unique",
                    -1, fi);
      }
    }
  }
  for (std::size_t k = 0; k < frame.edges.size(); ++k) {
    const Edge& e = frame.edges[k];
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
      throw Error(Errc::matrix_shape,
                  "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                      ") outside registry of size " + std::to_string(n),
                  -1, fi);
    }
    if (e.i >= e.j) {
      throw Error(Errc::matrix_shape,
                  "edges must be normalized with i < j (zero diagonal)", -1,
                  fi);
    }
    if (k > 0 && !(frame.edges[k - 1] < e)) {
      throw Error(Errc::matrix_shape, "edge list must be sorted and unique",
                  -1, fi);
    }
    const bool pi = nodes_[e.i].category == Category::part;
    const bool pj = nodes_[e.j].category == Category::part;
    const EdgeKind expected =
        pi && pj ? EdgeKind::part_part : EdgeKind::tool_part;
    if (e.kind != expected) {
      throw Error(Errc::validation,
                  "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                      ") kind does not match node categories",
                  -1, fi);
    }
  }
  for (const auto& [id, pose] : frame.object_poses) {
    if (id < 0 || id >= n) {
      throw Error(Errc::validation,
                  "pose for unknown object id " + std::to_string(id), -1, fi);
    }
    validate_pose(pose, fi);
  }
}

void Recording::append_frame(FrameRecord frame) {
  validate_frame(frame);
  frames_.push_back(std::move(frame));
}

void Recording::append_frame_dense(
    double timestamp, const std::vector<std::vector<int>>& hand_adjacency,
    const std::vector<std::vector<int>>& adjacency,
    std::map<ObjectId, Pose6DoF> object_poses, HandState left,
    HandState right) {
  const int n = node_count();
  const long fi = frame_count();
  if (hand_adjacency.size() != 2) {
    throw Error(Errc::matrix_shape, "H must have exactly 2 rows", -1, fi);
  }
  if (static_cast<int>(adjacency.size()) != n) {
    throw Error(Errc::matrix_shape,
                "A must be " + std::to_string(n) + "x" + std::to_string(n), -1,
                fi);
  }

  FrameRecord frame;
  frame.index = static_cast<int>(fi);
  frame.timestamp = timestamp;
  frame.left = std::move(left);
  frame.right = std::move(right);
  frame.object_poses = std::move(object_poses);

  for (int h = 0; h < 2; ++h) {
    if (static_cast<int>(hand_adjacency[h].size()) != n) {
      throw Error(Errc::matrix_shape, "H row has wrong width", -1, fi);
    }
    for (int j = 0; j < n; ++j) {
      const int v = hand_adjacency[h][j];
      if (v != 0 && v != 1) {
        throw Error(Errc::matrix_shape, "H entry outside {0,1}", -1, fi);
      }
      if (v == 1) frame.grasp[h].push_back(j);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(adjacency[i].size()) != n) {
      throw Error(Errc::matrix_shape, "A row has wrong width", -1, fi);
    }
    for (int j = 0; j < n; ++j) {
      const int v = adjacency[i][j];
      if (v != 0 && v != 1) {
        throw Error(Errc::matrix_shape, "A entry outside {0,1}", -1, fi);
      }
      if (i == j && v != 0) {
        throw Error(Errc::matrix_shape, "A diagonal must be zero", -1, fi);
      }
      if (adjacency[j][i] != v) {
        throw Error(Errc::matrix_shape,
                    "A is asymmetric at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")",
                    -1, fi);
      }
      if (v == 1 && i < j) {
        const bool pp = nodes_[i].category == Category::part &&
                        nodes_[j].category == Category::part;
        frame.edges.push_back(
            {i, j, pp ? EdgeKind::part_part : EdgeKind::tool_part});
      }
    }
  }
  append_frame(std::move(frame));
}

std::vector<ConnectionEvent> Recording::connection_events(
    const EventOptions& opts) const {
  std::vector<ConnectionEvent> out;
  std::set<std::pair<ObjectId, ObjectId>> active;
  for (const FrameRecord& frame : frames_) {
    std::set<std::pair<ObjectId, ObjectId>> current;
    for (const Edge& e : frame.edges) current.insert({e.i, e.j});
    const bool initial_preassembled = frame.index == 0 &&
                                      opts.allow_initial_edges;
    for (const Edge& e : frame.edges) {
      if (!active.contains({e.i, e.j}) && !initial_preassembled) {
        out.push_back({frame.index, frame.timestamp, e.i, e.j, e.kind});
      }
    }
    if (opts.strict_monotone) {
      for (const auto& [i, j] : active) {
        const bool pp = nodes_[i].category == Category::part &&
                        nodes_[j].category == Category::part;
        if (pp && !current.contains({i, j})) {
          throw Error(Errc::validation,
                      "part-part edge (" + std::to_string(i) + "," +
                          std::to_string(j) + ") disassembled",
                      -1, frame.index);
        }
      }
    }
    active = std::move(current);
  }
  return out;
}

std::vector<DisassemblyEvent> Recording::disassembly_events() const {
  std::vector<DisassemblyEvent> out;
  std::set<std::pair<ObjectId, ObjectId>> active;
  for (const FrameRecord& frame : frames_) {
    std::set<std::pair<ObjectId, ObjectId>> current;
    for (const Edge& e : frame.edges) {
      if (e.kind == EdgeKind::part_part) current.insert({e.i, e.j});
    }
    for (const auto& [i, j] : active) {
      if (!current.contains({i, j})) {
        out.push_back({frame.index, frame.timestamp, i, j});
      }
    }
    active = std::move(current);
  }
  return out;
}

std::set<ObjectId> Recording::grasped_objects(int frame_index) const {
  if (frame_index < 0 || frame_index >= frame_count()) {
    throw Error(Errc::index_range,
                "frame " + std::to_string(frame_index) + " out of range [0," +
                    std::to_string(frame_count()) + ")");
  }
  const FrameRecord& frame = frames_[frame_index];
  std::set<ObjectId> out;
  for (const auto& ids : frame.grasp) out.insert(ids.begin(), ids.end());
  return out;
}

PartGraph Recording::part_connectivity_at(int frame_index) const {
  if (frame_index < 0 || frame_index >= frame_count()) {
    throw Error(Errc::index_range,
                "frame " + std::to_string(frame_index) + " out of range [0," +
                    std::to_string(frame_count()) + ")");
  }
  PartGraph g;
  g.neighbors.resize(nodes_.size());
  for (const ObjectNode& node : nodes_) {
    if (node.category == Category::part) g.parts.push_back(node.id);
  }
  for (const Edge& e : frames_[frame_index].edges) {
    if (e.kind != EdgeKind::part_part) continue;
    g.neighbors[e.i].push_back(e.j);
    g.neighbors[e.j].push_back(e.i);
    ++g.edge_count;
  }
  return g;
}

}  // namespace taskseg

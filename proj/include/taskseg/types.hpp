#ifndef TASKSEG_TYPES_HPP
#define TASKSEG_TYPES_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace taskseg {

using ObjectId = int;

enum class Category { part, tool };
enum class HandSide { left, right };
enum class EdgeKind { part_part, tool_part };

std::string_view to_string(Category c);
std::string_view to_string(HandSide s);
std::string_view to_string(EdgeKind k);

/// Registered object: id is the dense index assigned at recording creation
/// and never changes afterwards.
struct ObjectNode {
  ObjectId id = 0;
  std::string name;
  Category category = Category::part;

  bool operator==(const ObjectNode&) const = default;
};

/// Position in meters plus a unit quaternion stored as (x, y, z, w).
struct Pose6DoF {
  std::array<double, 3> position{0.0, 0.0, 0.0};
  std::array<double, 4> rotation{0.0, 0.0, 0.0, 1.0};

  bool operator==(const Pose6DoF&) const = default;
};

inline constexpr int kHandJointCount = 21;

/// One tracked hand. Joint poses are optional; when present there are
/// exactly kHandJointCount of them.
struct HandState {
  HandSide side = HandSide::left;
  std::optional<std::vector<Pose6DoF>> joints;

  bool operator==(const HandState&) const = default;
};

/// Undirected object-object edge, normalized so i < j.
struct Edge {
  ObjectId i = 0;
  ObjectId j = 0;
  EdgeKind kind = EdgeKind::part_part;

  auto operator<=>(const Edge&) const = default;
};

/// One time slice of the scene graph. The hand adjacency matrix H and the
/// adjacency matrix A are stored sparsely: `grasp` holds the grasped object
/// ids per hand (sorted), `edges` holds the active edges (sorted, i < j).
/// Both are semantically binary matrices sized by the recording's N.
struct FrameRecord {
  int index = 0;
  double timestamp = 0.0;
  HandState left{HandSide::left, std::nullopt};
  HandState right{HandSide::right, std::nullopt};
  std::map<ObjectId, Pose6DoF> object_poses;
  std::array<std::vector<ObjectId>, 2> grasp;
  std::vector<Edge> edges;

  /// H lookup: does `side` grasp `object` in this frame?
  bool hand_adjacency(HandSide side, ObjectId object) const;
  /// A lookup: are i and j connected in this frame?
  bool adjacency(ObjectId i, ObjectId j) const;

  bool operator==(const FrameRecord&) const = default;
};

/// 0->1 transition of A between consecutive frames.
struct ConnectionEvent {
  int frame_index = 0;
  double timestamp = 0.0;
  ObjectId i = 0;  // i < j
  ObjectId j = 0;
  EdgeKind kind = EdgeKind::part_part;

  bool operator==(const ConnectionEvent&) const = default;
};

/// 1->0 transition of a part-part edge; assembly is assumed monotone, so
/// these are surfaced as warnings (or errors in strict mode).
struct DisassemblyEvent {
  int frame_index = 0;
  double timestamp = 0.0;
  ObjectId i = 0;
  ObjectId j = 0;

  bool operator==(const DisassemblyEvent&) const = default;
};

}  // namespace taskseg

#endif  // TASKSEG_TYPES_HPP

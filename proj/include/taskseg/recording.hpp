#ifndef TASKSEG_RECORDING_HPP
#define TASKSEG_RECORDING_HPP

#include <set>
#include <vector>

#include "taskseg/types.hpp"

namespace taskseg {

/// Undirected graph over the part nodes of a recording at one frame.
/// `neighbors` is indexed by ObjectId (size N); tool slots stay empty.
struct PartGraph {
  std::vector<ObjectId> parts;  // sorted part ids
  std::vector<std::vector<ObjectId>> neighbors;
  int edge_count = 0;
};

struct EventOptions {
  /// When true (default) edges already present in frame 0 are treated as
  /// pre-assembled state and produce no ConnectionEvent.
  bool allow_initial_edges = true;
  /// When true, part-part 1->0 transitions raise ValidationError instead of
  /// being collected as warnings.
  bool strict_monotone = false;
};

/// The spatio-temporal scene graph: a fixed node registry plus a
/// time-ordered frame stream. Immutable once loaded/finalized; all queries
/// are pure and thread-safe.
class Recording {
 public:
  /// Node ids are assigned 0..N-1 in list order.
  Recording(std::vector<ObjectNode> nodes, double frame_rate);

  const std::vector<ObjectNode>& nodes() const { return nodes_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  double frame_rate() const { return frame_rate_; }
  const std::vector<FrameRecord>& frames() const { return frames_; }
  int frame_count() const { return static_cast<int>(frames_.size()); }
  bool empty() const { return frames_.empty(); }
  /// Timestamp of the last frame, 0 when there are no frames.
  double duration() const;

  /// Validates every FrameRecord invariant against this registry before
  /// accepting the frame. The frame's index must equal frame_count().
  void append_frame(FrameRecord frame);

  /// Convenience builder from dense binary matrices: H is 2xN, A is NxN.
  /// Entries outside {0,1}, asymmetry, or a nonzero diagonal raise
  /// MatrixShape. Edge kinds are derived from node categories.
  void append_frame_dense(double timestamp,
                          const std::vector<std::vector<int>>& hand_adjacency,
                          const std::vector<std::vector<int>>& adjacency,
                          std::map<ObjectId, Pose6DoF> object_poses = {},
                          HandState left = {HandSide::left, std::nullopt},
                          HandState right = {HandSide::right, std::nullopt});

  /// All 0->1 transitions of A, ordered by (frame, i, j) with i < j.
  std::vector<ConnectionEvent> connection_events(
      const EventOptions& opts = {}) const;

  /// Part-part 1->0 transitions (monotone-assembly violations).
  std::vector<DisassemblyEvent> disassembly_events() const;

  /// Union over both hands of the grasped object ids at one frame.
  std::set<ObjectId> grasped_objects(int frame_index) const;

  /// Graph restricted to part nodes and part-part edges at one frame.
  PartGraph part_connectivity_at(int frame_index) const;

  bool operator==(const Recording&) const = default;

 private:
  void validate_frame(const FrameRecord& frame) const;

  std::vector<ObjectNode> nodes_;
  double frame_rate_ = 0.0;
  std::vector<FrameRecord> frames_;
};

}  // namespace taskseg

#endif  // TASKSEG_RECORDING_HPP

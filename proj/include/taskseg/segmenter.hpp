#ifndef TASKSEG_SEGMENTER_HPP
#define TASKSEG_SEGMENTER_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taskseg/ocg.hpp"
#include "taskseg/recording.hpp"

namespace taskseg {

enum class BreakpointLevel { fine, coarse };

enum class Rule {
  origin_connection,  // merge joins the origin's component
  central_update,     // merge changes the active component's central object
  sub_assembly,       // merge grows a component without the origin
  coarse_merge,       // coarse breakpoints only
};

std::string_view to_string(BreakpointLevel level);
std::string_view to_string(Rule rule);
BreakpointLevel breakpoint_level_from_string(std::string_view s);
Rule rule_from_string(std::string_view s);

/// Detected boundary. Unrefined breakpoints carry refined == raw.
struct Breakpoint {
  BreakpointLevel level = BreakpointLevel::fine;
  Rule rule = Rule::origin_connection;
  int raw_frame = 0;
  double raw_time = 0.0;
  int refined_frame = 0;
  double refined_time = 0.0;
  std::set<ObjectId> objects;

  bool operator==(const Breakpoint&) const = default;
};

/// Merge-only union-find over part nodes that tracks each component's
/// central object: the member with maximal origin weight, ties broken by
/// smallest id.
class GroupState {
 public:
  GroupState(const OriginCentricGraph& ocg, int node_count);

  ObjectId find(ObjectId id) const;
  bool same_component(ObjectId a, ObjectId b) const;
  /// Merges the components of a and b; returns false when already joined.
  bool merge(ObjectId a, ObjectId b);
  ObjectId central(ObjectId member) const;
  int component_size(ObjectId member) const;
  bool component_has_origin(ObjectId member) const;

 private:
  ObjectId origin_;
  mutable std::vector<ObjectId> parent_;
  std::vector<int> size_;
  std::vector<ObjectId> central_;   // per root
  std::vector<char> has_origin_;    // per root
  std::vector<double> weight_;      // per node, from the OCG
};

/// Grouping configuration for coarse merging: names are mapped to a
/// category-group label, by explicit map entry when present, otherwise by
/// stripping a trailing "_<digits>" suffix.
struct SegmenterOptions {
  std::map<std::string, std::string> category_groups;
};

std::string category_group_label(const std::string& name,
                                 const std::map<std::string, std::string>&
                                     category_groups);

/// Incremental fine-breakpoint detector; feed frames in stream order.
/// Batch detect_fine() is a thin wrapper over this.
class FineDetector {
 public:
  FineDetector(const Recording& rec, const OriginCentricGraph& ocg);

  void observe(const FrameRecord& frame);

  const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
  std::vector<Breakpoint> take_breakpoints() { return std::move(breakpoints_); }

  /// Post-merge central object per detected breakpoint (detect_coarse input).
  const std::vector<ObjectId>& centrals_after() const {
    return centrals_after_;
  }
  /// Triggering edge endpoints per detected breakpoint.
  const std::vector<std::pair<ObjectId, ObjectId>>& endpoints() const {
    return endpoints_;
  }

 private:
  const Recording& rec_;
  const OriginCentricGraph& ocg_;
  GroupState groups_;
  std::set<std::pair<ObjectId, ObjectId>> active_edges_;
  std::optional<ObjectId> last_touched_;  // member of the last merged component
  int next_frame_ = 0;

  std::vector<Breakpoint> breakpoints_;
  std::vector<ObjectId> centrals_after_;
  std::vector<std::pair<ObjectId, ObjectId>> endpoints_;
};

/// Fine breakpoints: one per part-part connection event that merges two
/// components, attributed to a single rule with precedence
/// origin_connection > central_update > sub_assembly.
std::vector<Breakpoint> detect_fine(const Recording& rec,
                                    const OriginCentricGraph& ocg);

/// Coarse breakpoints: maximal consecutive fine runs sharing a post-merge
/// central object or a category-group label collapse to the run's final
/// breakpoint.
std::vector<Breakpoint> detect_coarse(const std::vector<Breakpoint>& fine,
                                      const Recording& rec,
                                      const OriginCentricGraph& ocg,
                                      const SegmenterOptions& opts = {});

/// Moves every breakpoint forward to the first frame where both hands have
/// released all involved objects (and the tools touching them), bounded by
/// the next breakpoint's raw frame.
std::vector<Breakpoint> refine(std::vector<Breakpoint> bps,
                               const Recording& rec);

struct TimeSegment {
  double start = 0.0;
  double end = 0.0;
  bool operator==(const TimeSegment&) const = default;
};

struct CoarseSegment {
  TimeSegment span;
  std::vector<TimeSegment> fine;
  bool operator==(const CoarseSegment&) const = default;
};

/// Two nested partitions of [0, duration]: coarse segments, each holding
/// the fine segments it spans.
struct SegmentTree {
  double duration = 0.0;
  std::vector<CoarseSegment> segments;

  std::vector<TimeSegment> fine_segments() const;
  bool operator==(const SegmentTree&) const = default;
};

SegmentTree build_segments(const std::vector<Breakpoint>& fine,
                           const std::vector<Breakpoint>& coarse,
                           double duration);

struct SegmentOptions {
  SegmenterOptions grouping;
  OcgOptions ocg;
  bool refine_breakpoints = true;
};

struct SegmentationResult {
  OriginCentricGraph ocg;
  std::vector<Breakpoint> fine;
  std::vector<Breakpoint> coarse;
  SegmentTree tree;
};

/// Whole pipeline: build_ocg -> detect_fine -> detect_coarse -> refine ->
/// build_segments. Coarse refinements are copied from each run's final fine
/// breakpoint so coarse boundaries stay aligned with fine ones.
SegmentationResult segment(const Recording& rec, const SegmentOptions& opts = {});

}  // namespace taskseg

#endif  // TASKSEG_SEGMENTER_HPP

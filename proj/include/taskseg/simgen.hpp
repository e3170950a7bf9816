#ifndef TASKSEG_SIMGEN_HPP
#define TASKSEG_SIMGEN_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taskseg/ocg.hpp"
#include "taskseg/recording.hpp"
#include "taskseg/segmenter.hpp"

namespace taskseg {

/// One hand holding one object over [start_s, end_s).
struct GraspSpec {
  HandSide hand = HandSide::left;
  ObjectId object = 0;
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const GraspSpec&) const = default;
};

/// A tool touching both connect endpoints over [start_s, end_s).
struct ToolUse {
  ObjectId tool = 0;
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const ToolUse&) const = default;
};

struct PlanStep {
  ObjectId i = 0;  // connect endpoints (parts), any order
  ObjectId j = 0;
  double connect_s = 0.0;  // instant the part-part edge appears
  std::vector<GraspSpec> grasps;
  std::optional<ToolUse> tool;

  bool operator==(const PlanStep&) const = default;
};

/// Scripted assembly: a node registry plus time-stamped connection steps.
/// Compiles deterministically into a Recording.
struct AssemblyPlan {
  std::vector<ObjectNode> nodes;
  std::vector<PlanStep> steps;  // connect_s strictly increasing
  double duration = 0.0;
  double frame_rate = 30.0;
  unsigned seed = 0;  // drives decorative pose jitter only
  std::map<std::string, std::string> category_groups;

  bool operator==(const AssemblyPlan&) const = default;
};

/// First frame whose timestamp is >= t (guarded against float noise).
int quantize_instant(double t, double frame_rate);

/// Renders the plan into a frame stream: part edges switch on at their
/// connection instants and stay on, tool edges follow their windows, grasp
/// windows fill H, poses are seeded decorative jitter.
Recording compile_plan(const AssemblyPlan& plan);

enum class AssemblyOrder {
  chain,  // finish one branch before starting the next
  level,  // all leaf joints first, then the next level, ...
};

struct PresetOptions {
  double frame_rate = 30.0;
  double spacing = 4.0;        // seconds between connection instants
  double grasp_lead = 1.0;     // hands pick parts up this long before joining
  double release_delay = 0.5;  // hands let go this long after joining
  AssemblyOrder order = AssemblyOrder::level;
};

/// Hub plus k identical parts, each joined straight to the hub.
AssemblyPlan preset_star(int k, const PresetOptions& opts = {});

/// Hub plus `arms` chains of `depth` parts, assembled per `opts.order`;
/// exercises SubAssembly, CentralUpdate, and OriginConnection rules.
AssemblyPlan preset_distributed(int arms, int depth,
                                const PresetOptions& opts = {});

/// Deterministic pseudo-random valid plan: random part/tool registry,
/// random (possibly cyclic, possibly disconnected) assembly structure,
/// random grasp/tool windows. Always satisfies compile_plan's contract.
AssemblyPlan random_plan(unsigned seed);

struct OracleBreakpoint {
  int frame = 0;
  Rule rule = Rule::origin_connection;
  int refined_frame = 0;
  std::set<ObjectId> objects;

  bool operator==(const OracleBreakpoint&) const = default;
};

/// Ground truth derived by replaying the plan's event list with an
/// independent component tracker; shares no code with the segmenter.
struct OracleResult {
  std::vector<OracleBreakpoint> fine;
  std::vector<OracleBreakpoint> coarse;  // rule == coarse_merge

  bool operator==(const OracleResult&) const = default;
};

OracleResult oracle_breakpoints(const AssemblyPlan& plan,
                                const OriginCentricGraph& ocg);

/// Oracle sidecar document (committed next to golden recordings).
void write_oracle(std::ostream& out, const OracleResult& oracle);
void write_oracle_file(const std::string& path, const OracleResult& oracle);
OracleResult read_oracle(std::istream& in);
OracleResult read_oracle_file(const std::string& path);

/// Plan document: one structured-text object mirroring AssemblyPlan.
void write_plan(std::ostream& out, const AssemblyPlan& plan);
void write_plan_file(const std::string& path, const AssemblyPlan& plan);
AssemblyPlan read_plan(std::istream& in);
AssemblyPlan read_plan_file(const std::string& path);

}  // namespace taskseg

#endif  // TASKSEG_SIMGEN_HPP

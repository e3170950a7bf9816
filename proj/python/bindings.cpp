#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "taskseg/error.hpp"
#include "taskseg/eval.hpp"
#include "taskseg/io.hpp"
#include "taskseg/ocg.hpp"
#include "taskseg/recording.hpp"
#include "taskseg/segmenter.hpp"
#include "taskseg/simgen.hpp"

namespace py = pybind11;
using namespace taskseg;

namespace {

std::string dump_to_string(const Recording& rec) {
  std::ostringstream out;
  write_recording(out, rec);
  return out.str();
}

Recording parse_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_recording(in);
}

}  // namespace

PYBIND11_MODULE(_taskseg, m) {
  m.doc() = "Assembly-task segmentation toolkit";

  static py::exception<Error> error_type(m, "TasksegError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object type = error_type;
      py::object exc = type(e.what());
      exc.attr("code") = std::string(errc_name(e.code()));
      exc.attr("line") = e.line();
      exc.attr("frame") = e.frame();
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });

  py::enum_<Category>(m, "Category")
      .value("part", Category::part)
      .value("tool", Category::tool);

  py::enum_<EdgeKind>(m, "EdgeKind")
      .value("part_part", EdgeKind::part_part)
      .value("tool_part", EdgeKind::tool_part);

  py::enum_<HandSide>(m, "HandSide")
      .value("left", HandSide::left)
      .value("right", HandSide::right);

  py::enum_<BreakpointLevel>(m, "BreakpointLevel")
      .value("fine", BreakpointLevel::fine)
      .value("coarse", BreakpointLevel::coarse);

  py::enum_<Rule>(m, "Rule")
      .value("origin_connection", Rule::origin_connection)
      .value("central_update", Rule::central_update)
      .value("sub_assembly", Rule::sub_assembly)
      .value("coarse_merge", Rule::coarse_merge);

  py::enum_<AssemblyOrder>(m, "AssemblyOrder")
      .value("chain", AssemblyOrder::chain)
      .value("level", AssemblyOrder::level);

  py::class_<ObjectNode>(m, "ObjectNode")
      .def(py::init([](ObjectId id, std::string name, Category category) {
             return ObjectNode{id, std::move(name), category};
           }),
           py::arg("id"), py::arg("name"), py::arg("category"))
      .def_readwrite("id", &ObjectNode::id)
      .def_readwrite("name", &ObjectNode::name)
      .def_readwrite("category", &ObjectNode::category)
      .def("__repr__", [](const ObjectNode& n) {
        return "ObjectNode(" + std::to_string(n.id) + ", '" + n.name + "')";
      });

  py::class_<Edge>(m, "Edge")
      .def(py::init([](ObjectId i, ObjectId j, EdgeKind kind) {
             return Edge{i, j, kind};
           }),
           py::arg("i"), py::arg("j"), py::arg("kind"))
      .def_readwrite("i", &Edge::i)
      .def_readwrite("j", &Edge::j)
      .def_readwrite("kind", &Edge::kind)
      .def(py::self == py::self);

  py::class_<Pose6DoF>(m, "Pose6DoF")
      .def(py::init<>())
      .def_readwrite("position", &Pose6DoF::position)
      .def_readwrite("rotation", &Pose6DoF::rotation);

  py::class_<FrameRecord>(m, "FrameRecord")
      .def_readonly("index", &FrameRecord::index)
      .def_readonly("timestamp", &FrameRecord::timestamp)
      .def_readonly("edges", &FrameRecord::edges)
      .def_readonly("object_poses", &FrameRecord::object_poses)
      .def_property_readonly(
          "left_grasp", [](const FrameRecord& f) { return f.grasp[0]; })
      .def_property_readonly(
          "right_grasp", [](const FrameRecord& f) { return f.grasp[1]; });

  py::class_<Recording>(m, "Recording")
      .def_property_readonly("nodes", &Recording::nodes)
      .def_property_readonly("frame_rate", &Recording::frame_rate)
      .def_property_readonly("frames", &Recording::frames)
      .def_property_readonly("frame_count", &Recording::frame_count)
      .def_property_readonly("duration", &Recording::duration)
      .def("grasped_objects", &Recording::grasped_objects,
           py::arg("frame_index"))
      .def("__eq__",
           [](const Recording& a, const Recording& b) { return a == b; })
      .def("__len__", &Recording::frame_count);

  py::class_<OcgOptions>(m, "OcgOptions")
      .def(py::init<>())
      .def_readwrite("final_frame", &OcgOptions::final_frame)
      .def_readwrite("strict_connected", &OcgOptions::strict_connected);

  py::class_<OriginCentricGraph>(m, "OriginCentricGraph")
      .def_readonly("origin", &OriginCentricGraph::origin)
      .def_readonly("centrality", &OriginCentricGraph::centrality)
      .def_readonly("distance", &OriginCentricGraph::distance)
      .def_readonly("weight", &OriginCentricGraph::weight);

  py::class_<Breakpoint>(m, "Breakpoint")
      .def_readonly("level", &Breakpoint::level)
      .def_readonly("rule", &Breakpoint::rule)
      .def_readonly("raw_frame", &Breakpoint::raw_frame)
      .def_readonly("raw_time", &Breakpoint::raw_time)
      .def_readonly("refined_frame", &Breakpoint::refined_frame)
      .def_readonly("refined_time", &Breakpoint::refined_time)
      .def_readonly("objects", &Breakpoint::objects)
      .def(py::self == py::self)
      .def("__repr__", [](const Breakpoint& bp) {
        return "Breakpoint(" + std::string(to_string(bp.level)) + ", " +
               std::string(to_string(bp.rule)) + ", raw_frame=" +
               std::to_string(bp.raw_frame) + ")";
      });

  py::class_<TimeSegment>(m, "TimeSegment")
      .def_readonly("start", &TimeSegment::start)
      .def_readonly("end", &TimeSegment::end);

  py::class_<CoarseSegment>(m, "CoarseSegment")
      .def_readonly("span", &CoarseSegment::span)
      .def_readonly("fine", &CoarseSegment::fine);

  py::class_<SegmentTree>(m, "SegmentTree")
      .def_readonly("duration", &SegmentTree::duration)
      .def_readonly("segments", &SegmentTree::segments)
      .def("fine_segments", &SegmentTree::fine_segments);

  py::class_<SegmenterOptions>(m, "SegmenterOptions")
      .def(py::init<>())
      .def_readwrite("category_groups", &SegmenterOptions::category_groups);

  py::class_<SegmentOptions>(m, "SegmentOptions")
      .def(py::init<>())
      .def_readwrite("grouping", &SegmentOptions::grouping)
      .def_readwrite("ocg", &SegmentOptions::ocg)
      .def_readwrite("refine_breakpoints",
                     &SegmentOptions::refine_breakpoints);

  py::class_<SegmentationResult>(m, "SegmentationResult")
      .def_readonly("ocg", &SegmentationResult::ocg)
      .def_readonly("fine", &SegmentationResult::fine)
      .def_readonly("coarse", &SegmentationResult::coarse)
      .def_readonly("tree", &SegmentationResult::tree);

  py::class_<GraspSpec>(m, "GraspSpec")
      .def(py::init<>())
      .def_readwrite("hand", &GraspSpec::hand)
      .def_readwrite("object", &GraspSpec::object)
      .def_readwrite("start_s", &GraspSpec::start_s)
      .def_readwrite("end_s", &GraspSpec::end_s);

  py::class_<ToolUse>(m, "ToolUse")
      .def(py::init<>())
      .def_readwrite("tool", &ToolUse::tool)
      .def_readwrite("start_s", &ToolUse::start_s)
      .def_readwrite("end_s", &ToolUse::end_s);

  py::class_<PlanStep>(m, "PlanStep")
      .def(py::init<>())
      .def_readwrite("i", &PlanStep::i)
      .def_readwrite("j", &PlanStep::j)
      .def_readwrite("connect_s", &PlanStep::connect_s)
      .def_readwrite("grasps", &PlanStep::grasps)
      .def_readwrite("tool", &PlanStep::tool);

  py::class_<AssemblyPlan>(m, "AssemblyPlan")
      .def(py::init<>())
      .def_readwrite("nodes", &AssemblyPlan::nodes)
      .def_readwrite("steps", &AssemblyPlan::steps)
      .def_readwrite("duration", &AssemblyPlan::duration)
      .def_readwrite("frame_rate", &AssemblyPlan::frame_rate)
      .def_readwrite("seed", &AssemblyPlan::seed)
      .def_readwrite("category_groups", &AssemblyPlan::category_groups)
      .def("__eq__",
           [](const AssemblyPlan& a, const AssemblyPlan& b) { return a == b; });

  py::class_<PresetOptions>(m, "PresetOptions")
      .def(py::init<>())
      .def_readwrite("frame_rate", &PresetOptions::frame_rate)
      .def_readwrite("spacing", &PresetOptions::spacing)
      .def_readwrite("grasp_lead", &PresetOptions::grasp_lead)
      .def_readwrite("release_delay", &PresetOptions::release_delay)
      .def_readwrite("order", &PresetOptions::order);

  py::class_<OracleBreakpoint>(m, "OracleBreakpoint")
      .def_readonly("frame", &OracleBreakpoint::frame)
      .def_readonly("rule", &OracleBreakpoint::rule)
      .def_readonly("refined_frame", &OracleBreakpoint::refined_frame)
      .def_readonly("objects", &OracleBreakpoint::objects);

  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("fine", &OracleResult::fine)
      .def_readonly("coarse", &OracleResult::coarse);

  py::class_<AnnotationRow>(m, "AnnotationRow")
      .def(py::init([](std::string participant_id, double time_s,
                       std::string group_tag, BreakpointLevel level) {
             return AnnotationRow{std::move(participant_id), time_s,
                                  std::move(group_tag), level};
           }),
           py::arg("participant_id"), py::arg("time_s"), py::arg("group_tag"),
           py::arg("level") = BreakpointLevel::fine)
      .def_readwrite("participant_id", &AnnotationRow::participant_id)
      .def_readwrite("time_s", &AnnotationRow::time_s)
      .def_readwrite("group_tag", &AnnotationRow::group_tag)
      .def_readwrite("level", &AnnotationRow::level);

  py::class_<DbscanOptions>(m, "DbscanOptions")
      .def(py::init<>())
      .def_readwrite("eps", &DbscanOptions::eps)
      .def_readwrite("min_samples", &DbscanOptions::min_samples);

  py::class_<GtBreakpoint>(m, "GtBreakpoint")
      .def_readonly("time", &GtBreakpoint::time)
      .def_readonly("group_tag", &GtBreakpoint::group_tag)
      .def_readonly("support", &GtBreakpoint::support);

  py::class_<GroundTruth>(m, "GroundTruth")
      .def_readonly("level", &GroundTruth::level)
      .def_readonly("breakpoints", &GroundTruth::breakpoints)
      .def_readonly("mean_bp_range", &GroundTruth::mean_bp_range);

  py::class_<Match>(m, "Match")
      .def_readonly("gt_time", &Match::gt_time)
      .def_readonly("pred_time", &Match::pred_time)
      .def_readonly("error", &Match::error);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("n_gt", &EvalReport::n_gt)
      .def_readonly("n_pred", &EvalReport::n_pred)
      .def_readonly("matches", &EvalReport::matches)
      .def_readonly("precision", &EvalReport::precision)
      .def_readonly("recall", &EvalReport::recall)
      .def_readonly("f1", &EvalReport::f1)
      .def_readonly("mae", &EvalReport::mae)
      .def_readonly("rmse", &EvalReport::rmse);

  // Pipeline operations.
  m.def("build_ocg", &build_ocg, py::arg("recording"),
        py::arg("options") = OcgOptions{});
  m.def("segment", &segment, py::arg("recording"),
        py::arg("options") = SegmentOptions{});
  m.def("category_group_label", &category_group_label, py::arg("name"),
        py::arg("category_groups"));

  // Synthetic plans and the independent oracle.
  m.def("quantize_instant", &quantize_instant, py::arg("t"),
        py::arg("frame_rate"));
  m.def("compile_plan", &compile_plan, py::arg("plan"));
  m.def("preset_star", &preset_star, py::arg("k"),
        py::arg("options") = PresetOptions{});
  m.def("preset_distributed", &preset_distributed, py::arg("arms"),
        py::arg("depth"), py::arg("options") = PresetOptions{});
  m.def("random_plan", &random_plan, py::arg("seed"));
  m.def("oracle_breakpoints", &oracle_breakpoints, py::arg("plan"),
        py::arg("ocg"));

  // Evaluation chain.
  m.def("bin_annotations", &bin_annotations, py::arg("rows"),
        py::arg("bin") = 1.0);
  m.def("cluster_ground_truth", &cluster_ground_truth, py::arg("rows"),
        py::arg("options") = DbscanOptions{});
  m.def("match_breakpoints", &match_breakpoints, py::arg("pred_times"),
        py::arg("ground_truth"), py::arg("tolerance") = 3.0);
  m.def("compute_metrics", &compute_metrics, py::arg("matches"),
        py::arg("n_pred"), py::arg("n_gt"));

  // File I/O.
  m.def("read_recording_file", &read_recording_file, py::arg("path"));
  m.def("write_recording_file", &write_recording_file, py::arg("path"),
        py::arg("recording"));
  m.def("dumps_recording", &dump_to_string, py::arg("recording"));
  m.def("loads_recording", &parse_from_string, py::arg("text"));
  m.def("read_annotations_file", &read_annotations_file, py::arg("path"));
  m.def("write_annotations_file", &write_annotations_file, py::arg("path"),
        py::arg("rows"));
  m.def("read_breakpoints_file", &read_breakpoints_file, py::arg("path"));
  m.def("write_breakpoints_file", &write_breakpoints_file, py::arg("path"),
        py::arg("breakpoints"));
  m.def("read_eval_report_file", &read_eval_report_file, py::arg("path"));
  m.def("write_eval_report_file", &write_eval_report_file, py::arg("path"),
        py::arg("report"));
  m.def("read_plan_file", &read_plan_file, py::arg("path"));
  m.def("write_plan_file", &write_plan_file, py::arg("path"), py::arg("plan"));
  m.def("read_oracle_file", &read_oracle_file, py::arg("path"));
  m.def("write_oracle_file", &write_oracle_file, py::arg("path"),
        py::arg("oracle"));
}

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "taskseg/error.hpp"
#include "taskseg/eval.hpp"
#include "taskseg/io.hpp"
#include "taskseg/ocg.hpp"
#include "taskseg/recording.hpp"
#include "taskseg/segmenter.hpp"
#include "taskseg/simgen.hpp"

namespace {

using taskseg::Errc;
using taskseg::Error;

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitUsage = 64;

/// Writes a machine-readable document to --out when given, else stdout.
void emit(const std::string& out_path,
          const std::function<void(std::ostream&)>& body) {
  if (out_path.empty()) {
    body(std::cout);
    std::cout.flush();
    if (!std::cout) throw Error(Errc::io, "write failure on standard output");
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw Error(Errc::io, "cannot open \"" + out_path + "\" for writing");
  }
  body(out);
}

std::map<std::string, std::string> read_groups_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open \"" + path + "\" for reading");
  std::string text(std::istreambuf_iterator<char>(in), {});
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(Errc::parse,
                "group map must be one object of name -> label strings");
  }
  std::map<std::string, std::string> groups;
  for (const auto& [name, label] : j.items()) {
    if (!label.is_string()) {
      throw Error(Errc::parse, "group map values must be strings");
    }
    groups[name] = label.get<std::string>();
  }
  return groups;
}

struct SegmentFlags {
  std::string recording;
  std::string level = "both";
  bool no_refine = false;
  std::string groups_path;
  std::optional<int> final_frame;
  bool strict_connected = false;
  std::string out;
};

struct EvalFlags {
  std::string pred;
  std::string annotations;
  std::string level = "fine";
  double eps = 2.0;
  int min_samples = 12;
  double tolerance = 3.0;
  double bin = 1.0;
  std::string out;
};

struct GenFlags {
  std::string preset;
  int k = 5;
  int arms = 4;
  int depth = 3;
  unsigned seed = 0;
  double fps = 30.0;
  double spacing = 4.0;
  double grasp_lead = 1.0;
  double release_delay = 0.5;
  std::string order = "level";
  std::string out;
};

int cmd_validate(const std::string& path) {
  const taskseg::Recording rec = taskseg::read_recording_file(path);
  int events = 0;
  for (const taskseg::ConnectionEvent& e : rec.connection_events()) {
    events += e.kind == taskseg::EdgeKind::part_part;
  }
  for (const taskseg::DisassemblyEvent& e : rec.disassembly_events()) {
    std::cerr << "warning: part-part edge (" << e.i << "," << e.j
              << ") disappears at frame " << e.frame_index << "\n";
  }
  std::cout << "N=" << rec.node_count() << ", frames=" << rec.frame_count()
            << ", events=" << events << "\n";
  return kExitOk;
}

nlohmann::ordered_json ocg_document(const taskseg::Recording& rec,
                                    const taskseg::OriginCentricGraph& ocg) {
  nlohmann::ordered_json doc;
  doc["origin"] = ocg.origin;
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const taskseg::ObjectNode& node : rec.nodes()) {
    if (!ocg.contains(node.id)) continue;
    nlohmann::ordered_json entry;
    entry["id"] = node.id;
    entry["name"] = node.name;
    entry["centrality"] = ocg.centrality.at(node.id);
    const auto& dist = ocg.distance.at(node.id);
    entry["distance"] = dist ? nlohmann::ordered_json(*dist)
                             : nlohmann::ordered_json(nullptr);
    entry["weight"] = ocg.weight.at(node.id);
    nodes.push_back(std::move(entry));
  }
  doc["nodes"] = std::move(nodes);
  return doc;
}

int cmd_ocg(const std::string& path, const std::optional<int>& final_frame,
            bool strict_connected, const std::string& out) {
  const taskseg::Recording rec = taskseg::read_recording_file(path);
  taskseg::OcgOptions opts;
  opts.final_frame = final_frame;
  opts.strict_connected = strict_connected;
  const taskseg::OriginCentricGraph ocg = taskseg::build_ocg(rec, opts);

  int unreachable = 0;
  for (const auto& [id, dist] : ocg.distance) unreachable += !dist.has_value();
  if (unreachable > 0) {
    std::cerr << "warning: " << unreachable
              << " part(s) unreachable from the origin\n";
  }
  emit(out, [&](std::ostream& sink) {
    sink << ocg_document(rec, ocg).dump() << '\n';
    if (!sink) throw Error(Errc::io, "write failure");
  });
  std::cerr << "origin=" << rec.nodes()[ocg.origin].name << "#" << ocg.origin
            << " parts=" << ocg.weight.size() << " unreachable=" << unreachable
            << "\n";
  return kExitOk;
}

int cmd_segment(const SegmentFlags& flags) {
  const taskseg::Recording rec = taskseg::read_recording_file(flags.recording);
  taskseg::SegmentOptions opts;
  if (!flags.groups_path.empty()) {
    opts.grouping.category_groups = read_groups_file(flags.groups_path);
  }
  opts.ocg.final_frame = flags.final_frame;
  opts.ocg.strict_connected = flags.strict_connected;
  opts.refine_breakpoints = !flags.no_refine;

  const taskseg::SegmentationResult result = taskseg::segment(rec, opts);
  std::vector<taskseg::Breakpoint> selected;
  if (flags.level == "fine" || flags.level == "both") {
    selected.insert(selected.end(), result.fine.begin(), result.fine.end());
  }
  if (flags.level == "coarse" || flags.level == "both") {
    selected.insert(selected.end(), result.coarse.begin(),
                    result.coarse.end());
  }
  emit(flags.out, [&](std::ostream& sink) {
    taskseg::write_breakpoints(sink, selected);
  });
  std::cerr << "fine=" << result.fine.size()
            << " coarse=" << result.coarse.size()
            << " duration=" << rec.duration() << "s\n";
  return kExitOk;
}

int cmd_eval(const EvalFlags& flags) {
  const taskseg::BreakpointLevel level =
      taskseg::breakpoint_level_from_string(flags.level);

  std::vector<double> pred_times;
  for (const taskseg::Breakpoint& bp :
       taskseg::read_breakpoints_file(flags.pred)) {
    if (bp.level == level) pred_times.push_back(bp.refined_time);
  }
  std::sort(pred_times.begin(), pred_times.end());

  std::vector<taskseg::AnnotationRow> rows;
  for (taskseg::AnnotationRow& row :
       taskseg::read_annotations_file(flags.annotations)) {
    if (row.level == level) rows.push_back(std::move(row));
  }
  rows = taskseg::bin_annotations(std::move(rows), flags.bin);
  const taskseg::GroundTruth gt = taskseg::cluster_ground_truth(
      rows, {.eps = flags.eps, .min_samples = flags.min_samples});
  const std::vector<taskseg::Match> matches =
      taskseg::match_breakpoints(pred_times, gt, flags.tolerance);
  const taskseg::EvalReport report = taskseg::compute_metrics(
      matches, static_cast<int>(pred_times.size()),
      static_cast<int>(gt.breakpoints.size()));

  emit(flags.out, [&](std::ostream& sink) {
    taskseg::write_eval_report(sink, report);
  });
  std::cerr << "n_gt=" << report.n_gt << " n_pred=" << report.n_pred
            << " matched=" << report.matches.size()
            << " precision=" << report.precision << " recall=" << report.recall
            << " f1=" << report.f1 << " mean_bp_range=" << gt.mean_bp_range
            << "\n";
  return kExitOk;
}

int cmd_gen(const GenFlags& flags) {
  taskseg::PresetOptions opts;
  opts.frame_rate = flags.fps;
  opts.spacing = flags.spacing;
  opts.grasp_lead = flags.grasp_lead;
  opts.release_delay = flags.release_delay;
  opts.order = flags.order == "chain" ? taskseg::AssemblyOrder::chain
                                      : taskseg::AssemblyOrder::level;

  taskseg::AssemblyPlan plan =
      flags.preset == "star"
          ? taskseg::preset_star(flags.k, opts)
          : taskseg::preset_distributed(flags.arms, flags.depth, opts);
  plan.seed = flags.seed;

  const taskseg::Recording rec = taskseg::compile_plan(plan);
  const taskseg::OriginCentricGraph ocg = taskseg::build_ocg(rec);
  const taskseg::OracleResult oracle = taskseg::oracle_breakpoints(plan, ocg);

  taskseg::write_plan_file(flags.out + ".plan", plan);
  taskseg::write_recording_file(flags.out + ".rec", rec);
  taskseg::write_oracle_file(flags.out + ".oracle.json", oracle);
  std::cerr << "wrote " << flags.out << ".rec (frames=" << rec.frame_count()
            << "), " << flags.out << ".plan, " << flags.out
            << ".oracle.json (fine=" << oracle.fine.size()
            << " coarse=" << oracle.coarse.size() << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assembly-task segmentation toolkit"};
  app.require_subcommand(1);

  std::string validate_path;
  CLI::App* validate =
      app.add_subcommand("validate", "Parse and fully validate a recording");
  validate->add_option("recording", validate_path, "Recording file")
      ->required();

  std::string ocg_path;
  std::optional<int> ocg_final_frame;
  bool ocg_strict = false;
  std::string ocg_out;
  CLI::App* ocg = app.add_subcommand(
      "ocg", "Build the origin-centric graph from the final assembly state");
  ocg->add_option("recording", ocg_path, "Recording file")->required();
  ocg->add_option("--final-frame", ocg_final_frame,
                  "Frame to read the assembly state from (default: last)");
  ocg->add_flag("--strict-connected", ocg_strict,
                "Error out when the final part graph is disconnected");
  ocg->add_option("--out", ocg_out, "Write the document here instead of stdout");

  SegmentFlags seg;
  CLI::App* segment =
      app.add_subcommand("segment", "Detect fine and coarse breakpoints");
  segment->add_option("recording", seg.recording, "Recording file")
      ->required();
  segment->add_option("--level", seg.level, "Breakpoint level(s) to emit")
      ->check(CLI::IsMember({"fine", "coarse", "both"}));
  segment->add_flag("--no-refine", seg.no_refine,
                    "Keep raw frames; skip hand-release refinement");
  segment->add_option("--groups", seg.groups_path,
                      "JSON file mapping object names to category-group labels");
  segment->add_option("--final-frame", seg.final_frame,
                      "Frame to build the OCG from (default: last)");
  segment->add_flag("--strict-connected", seg.strict_connected,
                    "Error out when the final part graph is disconnected");
  segment->add_option("--out", seg.out, "Write the document here instead of stdout");

  EvalFlags ev;
  CLI::App* eval = app.add_subcommand(
      "eval", "Score predicted breakpoints against annotation ground truth");
  eval->add_option("--pred", ev.pred, "Breakpoint document")->required();
  eval->add_option("--annotations", ev.annotations, "Annotation CSV")
      ->required();
  eval->add_option("--level", ev.level, "Level to evaluate")
      ->check(CLI::IsMember({"fine", "coarse"}));
  eval->add_option("--eps", ev.eps, "DBSCAN neighborhood radius in seconds");
  eval->add_option("--min-samples", ev.min_samples,
                   "DBSCAN minimum cluster support");
  eval->add_option("--tolerance", ev.tolerance,
                   "Matching tolerance in seconds");
  eval->add_option("--bin", ev.bin, "Annotation binning width in seconds");
  eval->add_option("--out", ev.out, "Write the report here instead of stdout");

  GenFlags gen;
  CLI::App* gen_cmd = app.add_subcommand(
      "gen", "Generate a synthetic recording with its oracle sidecar");
  gen_cmd->add_option("--preset", gen.preset, "Plan preset")
      ->required()
      ->check(CLI::IsMember({"star", "distributed"}));
  gen_cmd->add_option("--k", gen.k, "Star: number of spokes");
  gen_cmd->add_option("--arms", gen.arms, "Distributed: number of chains");
  gen_cmd->add_option("--depth", gen.depth, "Distributed: chain length");
  gen_cmd->add_option("--seed", gen.seed, "Pose jitter seed");
  gen_cmd->add_option("--fps", gen.fps, "Frame rate");
  gen_cmd->add_option("--spacing", gen.spacing,
                      "Seconds between connection instants");
  gen_cmd->add_option("--grasp-lead", gen.grasp_lead,
                      "Seconds hands hold parts before joining");
  gen_cmd->add_option("--release-delay", gen.release_delay,
                      "Seconds hands keep holding after joining");
  gen_cmd->add_option("--order", gen.order, "Distributed assembly order")
      ->check(CLI::IsMember({"chain", "level"}));
  gen_cmd->add_option("--out", gen.out, "Output path base")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(validate_path);
    if (*ocg) return cmd_ocg(ocg_path, ocg_final_frame, ocg_strict, ocg_out);
    if (*segment) return cmd_segment(seg);
    if (*eval) return cmd_eval(ev);
    if (*gen_cmd) return cmd_gen(gen);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

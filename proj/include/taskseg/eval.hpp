#ifndef TASKSEG_EVAL_HPP
#define TASKSEG_EVAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "taskseg/segmenter.hpp"

namespace taskseg {

/// One annotator's breakpoint mark. Rows tagged with the same group_tag
/// refer to the same assembly event.
struct AnnotationRow {
  std::string participant_id;
  double time_s = 0.0;
  std::string group_tag;
  BreakpointLevel level = BreakpointLevel::fine;

  bool operator==(const AnnotationRow&) const = default;
};

/// Snaps every time to the center of its bin: floor(t/bin)*bin + bin/2.
std::vector<AnnotationRow> bin_annotations(std::vector<AnnotationRow> rows,
                                           double bin = 1.0);

struct DbscanOptions {
  double eps = 2.0;
  int min_samples = 12;
};

struct GtBreakpoint {
  double time = 0.0;  // cluster median
  std::string group_tag;
  int support = 0;  // number of annotations in the cluster

  bool operator==(const GtBreakpoint&) const = default;
};

struct GroundTruth {
  BreakpointLevel level = BreakpointLevel::fine;
  std::vector<GtBreakpoint> breakpoints;  // sorted by (time, group_tag)
  double mean_bp_range = 0.0;  // mean over tags of max-min annotated time

  bool operator==(const GroundTruth&) const = default;
};

/// 1-D DBSCAN over annotation times, run independently per group tag.
/// A point is core when its eps-neighborhood (itself included) holds at
/// least min_samples points; clusters below min_samples are noise.
GroundTruth cluster_ground_truth(const std::vector<AnnotationRow>& rows,
                                 const DbscanOptions& opts = {});

struct Match {
  double gt_time = 0.0;
  double pred_time = 0.0;
  double error = 0.0;  // pred_time - gt_time

  bool operator==(const Match&) const = default;
};

/// Greedy one-to-one matching: all (gt, pred) pairs within tolerance,
/// sorted by (|error|, gt_time, pred_time), accepted when both sides are
/// still free.
std::vector<Match> match_breakpoints(const std::vector<double>& pred,
                                     const GroundTruth& gt,
                                     double tolerance = 3.0);

struct EvalReport {
  int n_gt = 0;
  int n_pred = 0;
  std::vector<Match> matches;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> mae;   // null when no matches
  std::optional<double> rmse;  // null when no matches

  bool operator==(const EvalReport&) const = default;
};

EvalReport compute_metrics(const std::vector<Match>& matches, int n_pred,
                           int n_gt);

}  // namespace taskseg

#endif  // TASKSEG_EVAL_HPP

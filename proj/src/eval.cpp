#include "taskseg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "taskseg/error.hpp"

namespace taskseg {

std::vector<AnnotationRow> bin_annotations(std::vector<AnnotationRow> rows,
                                           double bin) {
  if (!(bin > 0.0)) {
    throw Error(Errc::validation, "bin width must be positive");
  }
  for (AnnotationRow& row : rows) {
    row.time_s = std::floor(row.time_s / bin) * bin + bin / 2.0;
  }
  return rows;
}

namespace {

/// Classic DBSCAN over one tag's sorted times; returns per-point cluster ids
/// (-1 = noise). Seeds are visited left to right, so border points join the
/// leftmost cluster that reaches them.
std::vector<int> dbscan_1d(const std::vector<double>& times, double eps,
                           int min_samples) {
  const int n = static_cast<int>(times.size());
  auto neighborhood = [&](int p) {
    std::vector<int> out;
    const auto lo = std::lower_bound(times.begin(), times.end(),
                                     times[p] - eps);
    const auto hi = std::upper_bound(times.begin(), times.end(),
                                     times[p] + eps);
    for (auto it = lo; it != hi; ++it) {
      out.push_back(static_cast<int>(it - times.begin()));
    }
    return out;
  };

  std::vector<int> cluster(n, -1);
  std::vector<char> visited(n, 0);
  int next_cluster = 0;
  for (int p = 0; p < n; ++p) {
    if (visited[p]) continue;
    visited[p] = 1;
    std::vector<int> seeds = neighborhood(p);
    if (static_cast<int>(seeds.size()) < min_samples) continue;  // not core
    const int c = next_cluster++;
    cluster[p] = c;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const int q = seeds[k];
      if (cluster[q] == -1) cluster[q] = c;
      if (visited[q]) continue;
      visited[q] = 1;
      std::vector<int> more = neighborhood(q);
      if (static_cast<int>(more.size()) >= min_samples) {
        seeds.insert(seeds.end(), more.begin(), more.end());
      }
    }
  }
  return cluster;
}

double median_sorted(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

}  // namespace

GroundTruth cluster_ground_truth(const std::vector<AnnotationRow>& rows,
                                 const DbscanOptions& opts) {
  if (opts.eps < 0.0 || opts.min_samples < 1) {
    throw Error(Errc::validation, "eps must be >= 0 and min_samples >= 1");
  }
  GroundTruth gt;
  if (rows.empty()) return gt;

  gt.level = rows.front().level;
  for (const AnnotationRow& row : rows) {
    if (row.level != gt.level) {
      throw Error(Errc::level_mix,
                  "annotations mix fine and coarse levels in one evaluation");
    }
  }

  std::map<std::string, std::vector<double>> by_tag;
  for (const AnnotationRow& row : rows) {
    by_tag[row.group_tag].push_back(row.time_s);
  }

  double range_sum = 0.0;
  for (auto& [tag, times] : by_tag) {
    std::sort(times.begin(), times.end());
    range_sum += times.back() - times.front();

    const std::vector<int> cluster =
        dbscan_1d(times, opts.eps, opts.min_samples);
    std::map<int, std::vector<double>> members;
    for (std::size_t p = 0; p < times.size(); ++p) {
      if (cluster[p] >= 0) members[cluster[p]].push_back(times[p]);
    }
    for (auto& [id, xs] : members) {
      GtBreakpoint bp;
      bp.time = median_sorted(xs);  // xs inherits the sorted order
      bp.group_tag = tag;
      bp.support = static_cast<int>(xs.size());
      gt.breakpoints.push_back(std::move(bp));
    }
  }
  gt.mean_bp_range = range_sum / static_cast<double>(by_tag.size());
  std::sort(gt.breakpoints.begin(), gt.breakpoints.end(),
            [](const GtBreakpoint& a, const GtBreakpoint& b) {
              return std::tie(a.time, a.group_tag) <
                     std::tie(b.time, b.group_tag);
            });
  return gt;
}

std::vector<Match> match_breakpoints(const std::vector<double>& pred,
                                     const GroundTruth& gt,
                                     double tolerance) {
  struct Candidate {
    double abs_error;
    double gt_time;
    double pred_time;
    std::size_t gt_index;
    std::size_t pred_index;
  };
  std::vector<Candidate> candidates;
  for (std::size_t g = 0; g < gt.breakpoints.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      const double err = std::abs(pred[p] - gt.breakpoints[g].time);
      if (err <= tolerance) {
        candidates.push_back({err, gt.breakpoints[g].time, pred[p], g, p});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return std::tie(a.abs_error, a.gt_time, a.pred_time) <
                     std::tie(b.abs_error, b.gt_time, b.pred_time);
            });

  std::vector<char> gt_used(gt.breakpoints.size(), 0);
  std::vector<char> pred_used(pred.size(), 0);
  std::vector<Match> matches;
  for (const Candidate& c : candidates) {
    if (gt_used[c.gt_index] || pred_used[c.pred_index]) continue;
    gt_used[c.gt_index] = 1;
    pred_used[c.pred_index] = 1;
    matches.push_back({c.gt_time, c.pred_time, c.pred_time - c.gt_time});
  }
  std::sort(matches.begin(), matches.end(),
            [](const Match& a, const Match& b) {
              return std::tie(a.gt_time, a.pred_time) <
                     std::tie(b.gt_time, b.pred_time);
            });
  return matches;
}

EvalReport compute_metrics(const std::vector<Match>& matches, int n_pred,
                           int n_gt) {
  if (n_pred < 0 || n_gt < 0 ||
      static_cast<std::size_t>(std::min(n_pred, n_gt)) < matches.size()) {
    throw Error(Errc::validation,
                "match count exceeds prediction or ground-truth count");
  }
  EvalReport report;
  report.n_gt = n_gt;
  report.n_pred = n_pred;
  report.matches = matches;
  const double m = static_cast<double>(matches.size());
  report.precision = n_pred > 0 ? m / n_pred : 0.0;
  report.recall = n_gt > 0 ? m / n_gt : 0.0;
  const double pr = report.precision + report.recall;
  report.f1 = pr > 0.0 ? 2.0 * report.precision * report.recall / pr : 0.0;
  if (!matches.empty()) {
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (const Match& match : matches) {
      abs_sum += std::abs(match.error);
      sq_sum += match.error * match.error;
    }
    report.mae = abs_sum / m;
    report.rmse = std::sqrt(sq_sum / m);
  }
  return report;
}

}  // namespace taskseg

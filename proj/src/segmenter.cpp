#include "taskseg/segmenter.hpp"

#include <algorithm>
#include <cctype>

#include "taskseg/error.hpp"

namespace taskseg {

std::string_view to_string(BreakpointLevel level) {
  return level == BreakpointLevel::fine ? "fine" : "coarse";
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::origin_connection: return "OriginConnection";
    case Rule::central_update: return "CentralUpdate";
    case Rule::sub_assembly: return "SubAssembly";
    case Rule::coarse_merge: return "CoarseMerge";
  }
  return "?";
}

BreakpointLevel breakpoint_level_from_string(std::string_view s) {
  if (s == "fine") return BreakpointLevel::fine;
  if (s == "coarse") return BreakpointLevel::coarse;
  throw Error(Errc::parse, "unknown breakpoint level \"" + std::string(s) + "\"");
}

Rule rule_from_string(std::string_view s) {
  if (s == "OriginConnection") return Rule::origin_connection;
  if (s == "CentralUpdate") return Rule::central_update;
  if (s == "SubAssembly") return Rule::sub_assembly;
  if (s == "CoarseMerge") return Rule::coarse_merge;
  throw Error(Errc::parse, "unknown rule \"" + std::string(s) + "\"");
}

GroupState::GroupState(const OriginCentricGraph& ocg, int node_count)
    : origin_(ocg.origin),
      parent_(node_count),
      size_(node_count, 1),
      central_(node_count),
      has_origin_(node_count, 0),
      weight_(node_count, 0.0) {
  for (int i = 0; i < node_count; ++i) {
    parent_[i] = i;
    central_[i] = i;
  }
  for (const auto& [id, w] : ocg.weight) weight_[id] = w;
  if (origin_ >= 0 && origin_ < node_count) has_origin_[origin_] = 1;
}

ObjectId GroupState::find(ObjectId id) const {
  ObjectId root = id;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[id] != root) {
    ObjectId next = parent_[id];
    parent_[id] = root;
    id = next;
  }
  return root;
}

bool GroupState::same_component(ObjectId a, ObjectId b) const {
  return find(a) == find(b);
}

bool GroupState::merge(ObjectId a, ObjectId b) {
  ObjectId ra = find(a);
  ObjectId rb = find(b);
  if (ra == rb) return false;
  if (size_[ra] < size_[rb]) std::swap(ra, rb);
  parent_[rb] = ra;
  size_[ra] += size_[rb];
  has_origin_[ra] = has_origin_[ra] || has_origin_[rb];
  const ObjectId ca = central_[ra];
  const ObjectId cb = central_[rb];
  if (weight_[cb] > weight_[ca] || (weight_[cb] == weight_[ca] && cb < ca)) {
    central_[ra] = cb;
  }
  return true;
}

ObjectId GroupState::central(ObjectId member) const {
  return central_[find(member)];
}

int GroupState::component_size(ObjectId member) const {
  return size_[find(member)];
}

bool GroupState::component_has_origin(ObjectId member) const {
  return has_origin_[find(member)] != 0;
}

std::string category_group_label(
    const std::string& name,
    const std::map<std::string, std::string>& category_groups) {
  if (auto it = category_groups.find(name); it != category_groups.end()) {
    return it->second;
  }
  const auto pos = name.rfind('_');
  if (pos == std::string::npos || pos + 1 == name.size()) return name;
  for (std::size_t k = pos + 1; k < name.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(name[k]))) return name;
  }
  return name.substr(0, pos);
}

namespace {

void check_registry(const Recording& rec, const OriginCentricGraph& ocg) {
  std::size_t parts = 0;
  for (const ObjectNode& node : rec.nodes()) {
    if (node.category == Category::part) {
      ++parts;
      if (!ocg.contains(node.id)) {
        throw Error(Errc::registry_mismatch,
                    "part " + std::to_string(node.id) + " missing from OCG");
      }
    }
  }
  if (parts != ocg.weight.size()) {
    throw Error(Errc::registry_mismatch,
                "OCG node set does not match the recording's part registry");
  }
}

/// Tools connected to any object of `objects` in this frame.
std::set<ObjectId> involved_tools(const FrameRecord& frame,
                                  const std::vector<ObjectNode>& nodes,
                                  const std::set<ObjectId>& objects) {
  std::set<ObjectId> tools;
  for (const Edge& e : frame.edges) {
    if (e.kind != EdgeKind::tool_part) continue;
    const ObjectId tool = nodes[e.i].category == Category::tool ? e.i : e.j;
    const ObjectId other = tool == e.i ? e.j : e.i;
    if (objects.contains(other)) tools.insert(tool);
  }
  return tools;
}

}  // namespace

FineDetector::FineDetector(const Recording& rec, const OriginCentricGraph& ocg)
    : rec_(rec), ocg_(ocg), groups_(ocg, rec.node_count()) {
  check_registry(rec, ocg);
}

void FineDetector::observe(const FrameRecord& frame) {
  if (frame.index != next_frame_) {
    throw Error(Errc::validation,
                "frames must be observed in stream order", -1, frame.index);
  }
  ++next_frame_;

  const auto& nodes = rec_.nodes();
  const bool initial_preassembled = frame.index == 0;
  for (const Edge& e : frame.edges) {
    if (e.kind != EdgeKind::part_part) continue;
    if (active_edges_.contains({e.i, e.j})) continue;
    if (initial_preassembled) {
      // Pre-assembled state: merge silently, no breakpoint.
      groups_.merge(e.i, e.j);
      continue;
    }
    const ObjectId ri = groups_.find(e.i);
    const ObjectId rj = groups_.find(e.j);
    if (ri == rj) continue;  // cycle edge inside one component

    // Active assembly group: the most recently merged component when it is
    // one of the two sides, otherwise the larger side, otherwise the side
    // of the first-listed endpoint.
    ObjectId active_root = ri;
    if (last_touched_ && (groups_.find(*last_touched_) == ri ||
                          groups_.find(*last_touched_) == rj)) {
      active_root = groups_.find(*last_touched_);
    } else if (groups_.component_size(e.j) > groups_.component_size(e.i)) {
      active_root = rj;
    }
    const ObjectId central_before = groups_.central(active_root);
    const bool joins_origin = groups_.component_has_origin(e.i) !=
                              groups_.component_has_origin(e.j);

    groups_.merge(e.i, e.j);
    last_touched_ = e.i;
    const ObjectId central_after = groups_.central(e.i);

    Rule rule = Rule::sub_assembly;
    if (joins_origin) {
      rule = Rule::origin_connection;
    } else if (central_after != central_before) {
      rule = Rule::central_update;
    }

    Breakpoint bp;
    bp.level = BreakpointLevel::fine;
    bp.rule = rule;
    bp.raw_frame = frame.index;
    bp.raw_time = frame.timestamp;
    bp.refined_frame = frame.index;
    bp.refined_time = frame.timestamp;
    bp.objects = {e.i, e.j};
    for (ObjectId tool : involved_tools(frame, nodes, bp.objects)) {
      bp.objects.insert(tool);
    }
    breakpoints_.push_back(std::move(bp));
    centrals_after_.push_back(central_after);
    endpoints_.push_back({e.i, e.j});
  }

  // Track only part-part edges; tool edges legitimately toggle off.
  std::set<std::pair<ObjectId, ObjectId>> current;
  for (const Edge& e : frame.edges) {
    if (e.kind == EdgeKind::part_part) current.insert({e.i, e.j});
  }
  active_edges_ = std::move(current);
}

std::vector<Breakpoint> detect_fine(const Recording& rec,
                                    const OriginCentricGraph& ocg) {
  FineDetector detector(rec, ocg);
  for (const FrameRecord& frame : rec.frames()) detector.observe(frame);
  return detector.take_breakpoints();
}

namespace {

struct CoarseRun {
  Breakpoint breakpoint;
  std::size_t final_fine_index = 0;
};

std::vector<CoarseRun> group_coarse(
    const std::vector<Breakpoint>& fine,
    const std::vector<ObjectId>& centrals,
    const std::vector<std::pair<ObjectId, ObjectId>>& endpoints,
    const Recording& rec, const OriginCentricGraph& ocg,
    const SegmenterOptions& opts) {
  std::vector<CoarseRun> out;
  if (fine.empty()) return out;

  auto weight = [&ocg](ObjectId id) {
    auto it = ocg.weight.find(id);
    return it == ocg.weight.end() ? 0.0 : it->second;
  };
  // Label of the less-central endpoint of the triggering edge: the endpoint
  // with the lower origin weight, ties resolved toward the larger id so the
  // smaller id is treated as central.
  auto non_central_label = [&](std::size_t k) {
    auto [i, j] = endpoints[k];
    const ObjectId non_central = weight(i) < weight(j) ? i : j;
    return category_group_label(rec.nodes()[non_central].name,
                                opts.category_groups);
  };
  auto mergeable = [&](std::size_t a, std::size_t b) {
    return centrals[a] == centrals[b] ||
           non_central_label(a) == non_central_label(b);
  };

  std::size_t start = 0;
  while (start < fine.size()) {
    std::size_t end = start;
    while (end + 1 < fine.size() && mergeable(end, end + 1)) ++end;

    Breakpoint bp;
    bp.level = BreakpointLevel::coarse;
    bp.rule = Rule::coarse_merge;
    bp.raw_frame = fine[end].raw_frame;
    bp.raw_time = fine[end].raw_time;
    bp.refined_frame = fine[end].raw_frame;
    bp.refined_time = fine[end].raw_time;
    for (std::size_t k = start; k <= end; ++k) {
      bp.objects.insert(fine[k].objects.begin(), fine[k].objects.end());
    }
    out.push_back({std::move(bp), end});
    start = end + 1;
  }
  return out;
}

}  // namespace

std::vector<Breakpoint> detect_coarse(const std::vector<Breakpoint>& fine,
                                      const Recording& rec,
                                      const OriginCentricGraph& ocg,
                                      const SegmenterOptions& opts) {
  FineDetector detector(rec, ocg);
  for (const FrameRecord& frame : rec.frames()) detector.observe(frame);
  const auto& derived = detector.breakpoints();
  if (derived.size() != fine.size()) {
    throw Error(Errc::validation,
                "fine breakpoint list does not match this recording");
  }
  for (std::size_t k = 0; k < fine.size(); ++k) {
    if (fine[k].raw_frame != derived[k].raw_frame) {
      throw Error(Errc::validation,
                  "fine breakpoint list does not match this recording");
    }
  }
  std::vector<Breakpoint> out;
  for (auto& run : group_coarse(fine, detector.centrals_after(),
                                detector.endpoints(), rec, ocg, opts)) {
    out.push_back(std::move(run.breakpoint));
  }
  return out;
}

namespace {

/// Refined frame per breakpoint: first frame >= raw where no hand grasps
/// any relevant object, searching up to the next breakpoint's raw frame
/// (exclusive) or the end of the recording.
std::vector<int> refined_frames_for(const std::vector<Breakpoint>& bps,
                                    const Recording& rec) {
  std::vector<int> out(bps.size());
  for (std::size_t k = 0; k < bps.size(); ++k) {
    const int raw = bps[k].raw_frame;
    if (raw < 0 || raw >= rec.frame_count()) {
      throw Error(Errc::index_range,
                  "breakpoint frame " + std::to_string(raw) + " out of range");
    }
    const int bound = k + 1 < bps.size()
                          ? std::min(bps[k + 1].raw_frame, rec.frame_count())
                          : rec.frame_count();

    std::set<ObjectId> relevant = bps[k].objects;
    for (ObjectId tool :
         involved_tools(rec.frames()[raw], rec.nodes(), bps[k].objects)) {
      relevant.insert(tool);
    }

    int refined = std::max(raw, bound - 1);
    for (int f = raw; f < bound; ++f) {
      const std::set<ObjectId> held = rec.grasped_objects(f);
      bool busy = false;
      for (ObjectId id : relevant) {
        if (held.contains(id)) {
          busy = true;
          break;
        }
      }
      if (!busy) {
        refined = f;
        break;
      }
    }
    out[k] = refined;
  }
  return out;
}

/// Sorts by refined frame and collapses duplicates, keeping the earlier raw
/// event, so boundaries are strictly increasing.
std::vector<Breakpoint> collapse_refined(std::vector<Breakpoint> bps) {
  std::stable_sort(bps.begin(), bps.end(),
                   [](const Breakpoint& a, const Breakpoint& b) {
                     if (a.refined_frame != b.refined_frame) {
                       return a.refined_frame < b.refined_frame;
                     }
                     return a.raw_frame < b.raw_frame;
                   });
  std::vector<Breakpoint> out;
  for (auto& bp : bps) {
    if (!out.empty() && out.back().refined_frame == bp.refined_frame) continue;
    out.push_back(std::move(bp));
  }
  return out;
}

}  // namespace

std::vector<Breakpoint> refine(std::vector<Breakpoint> bps,
                               const Recording& rec) {
  if (bps.empty()) return bps;
  std::stable_sort(bps.begin(), bps.end(),
                   [](const Breakpoint& a, const Breakpoint& b) {
                     return a.raw_frame < b.raw_frame;
                   });
  const std::vector<int> refined = refined_frames_for(bps, rec);
  for (std::size_t k = 0; k < bps.size(); ++k) {
    bps[k].refined_frame = refined[k];
    bps[k].refined_time = rec.frames()[refined[k]].timestamp;
  }
  return collapse_refined(std::move(bps));
}

SegmentTree build_segments(const std::vector<Breakpoint>& fine,
                           const std::vector<Breakpoint>& coarse,
                           double duration) {
  if (duration < 0.0) {
    throw Error(Errc::nesting, "negative duration");
  }
  auto boundary_times = [duration](const std::vector<Breakpoint>& bps,
                                   const char* level) {
    std::vector<double> times;
    for (const Breakpoint& bp : bps) {
      if (!times.empty() && bp.refined_time <= times.back()) {
        throw Error(Errc::nesting,
                    std::string(level) +
                        " breakpoints are not strictly increasing");
      }
      times.push_back(bp.refined_time);
    }
    std::erase_if(times,
                  [duration](double t) { return t <= 0.0 || t >= duration; });
    return times;
  };
  const std::vector<double> fine_times = boundary_times(fine, "fine");
  const std::vector<double> coarse_times = boundary_times(coarse, "coarse");
  for (double t : coarse_times) {
    if (!std::binary_search(fine_times.begin(), fine_times.end(), t)) {
      throw Error(Errc::nesting,
                  "coarse boundary " + std::to_string(t) +
                      " is not a fine boundary");
    }
  }

  SegmentTree tree;
  tree.duration = duration;
  std::size_t fi = 0;
  double coarse_start = 0.0;
  for (std::size_t c = 0; c <= coarse_times.size(); ++c) {
    const double coarse_end =
        c < coarse_times.size() ? coarse_times[c] : duration;
    CoarseSegment seg;
    seg.span = {coarse_start, coarse_end};
    double fine_start = coarse_start;
    while (fi < fine_times.size() && fine_times[fi] < coarse_end) {
      seg.fine.push_back({fine_start, fine_times[fi]});
      fine_start = fine_times[fi];
      ++fi;
    }
    // A fine boundary coinciding with this coarse boundary is represented
    // by the coarse boundary itself.
    if (fi < fine_times.size() && fine_times[fi] == coarse_end) ++fi;
    seg.fine.push_back({fine_start, coarse_end});
    tree.segments.push_back(std::move(seg));
    coarse_start = coarse_end;
  }
  return tree;
}

std::vector<TimeSegment> SegmentTree::fine_segments() const {
  std::vector<TimeSegment> out;
  for (const CoarseSegment& seg : segments) {
    out.insert(out.end(), seg.fine.begin(), seg.fine.end());
  }
  return out;
}

SegmentationResult segment(const Recording& rec, const SegmentOptions& opts) {
  SegmentationResult result;
  if (rec.empty()) {
    result.tree = build_segments({}, {}, 0.0);
    return result;
  }
  result.ocg = build_ocg(rec, opts.ocg);

  FineDetector detector(rec, result.ocg);
  for (const FrameRecord& frame : rec.frames()) detector.observe(frame);
  std::vector<Breakpoint> fine = detector.breakpoints();
  std::vector<CoarseRun> runs =
      group_coarse(fine, detector.centrals_after(), detector.endpoints(), rec,
                   result.ocg, opts.grouping);

  if (opts.refine_breakpoints && !fine.empty()) {
    const std::vector<int> refined = refined_frames_for(fine, rec);
    for (std::size_t k = 0; k < fine.size(); ++k) {
      fine[k].refined_frame = refined[k];
      fine[k].refined_time = rec.frames()[refined[k]].timestamp;
    }
    // Coarse breakpoints inherit the refinement of their run's final fine
    // event so every coarse boundary stays aligned with a fine boundary.
    for (CoarseRun& run : runs) {
      run.breakpoint.refined_frame = fine[run.final_fine_index].refined_frame;
      run.breakpoint.refined_time = fine[run.final_fine_index].refined_time;
    }
    fine = collapse_refined(std::move(fine));
  }
  std::vector<Breakpoint> coarse;
  for (auto& run : runs) coarse.push_back(std::move(run.breakpoint));
  if (opts.refine_breakpoints) coarse = collapse_refined(std::move(coarse));

  result.tree = build_segments(fine, coarse, rec.duration());
  result.fine = std::move(fine);
  result.coarse = std::move(coarse);
  return result;
}

}  // namespace taskseg

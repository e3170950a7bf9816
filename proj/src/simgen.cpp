#include "taskseg/simgen.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <tuple>

#include <json.hpp>

#include "taskseg/error.hpp"

namespace taskseg {

using ordered_json = nlohmann::ordered_json;

int quantize_instant(double t, double frame_rate) {
  // ceil with a guard so 0.3 * 60 == 18.000000000000004 still lands on 18
  return static_cast<int>(std::ceil(t * frame_rate - 1e-9));
}

namespace {

Edge make_edge(ObjectId a, ObjectId b, const std::vector<ObjectNode>& nodes) {
  Edge e;
  e.i = std::min(a, b);
  e.j = std::max(a, b);
  e.kind = nodes[e.i].category == Category::part &&
                   nodes[e.j].category == Category::part
               ? EdgeKind::part_part
               : EdgeKind::tool_part;
  return e;
}

void check_window(double start, double end, double duration,
                  const char* what) {
  if (!(start >= 0.0) || !(end >= start) || !(end <= duration)) {
    throw Error(Errc::plan, std::string(what) +
                                " window must satisfy 0 <= start <= end <= "
                                "duration");
  }
}

int plan_frame_count(const AssemblyPlan& plan) {
  return std::max(1, quantize_instant(plan.duration, plan.frame_rate));
}

void validate_plan(const AssemblyPlan& plan) {
  if (!(plan.frame_rate > 0.0) || !std::isfinite(plan.frame_rate)) {
    throw Error(Errc::plan, "frame_rate must be positive and finite");
  }
  if (!(plan.duration > 0.0) || !std::isfinite(plan.duration)) {
    throw Error(Errc::plan, "duration must be positive and finite");
  }
  if (plan.nodes.empty()) throw Error(Errc::plan, "plan has no nodes");
  const int n = static_cast<int>(plan.nodes.size());
  for (int k = 0; k < n; ++k) {
    if (plan.nodes[k].id != k) {
      throw Error(Errc::plan, "node ids must be 0..N-1 in registry order");
    }
  }
  const int frame_count = plan_frame_count(plan);

  std::set<std::pair<ObjectId, ObjectId>> pairs;
  double prev_connect = -1.0;
  int prev_frame = 0;
  for (const PlanStep& step : plan.steps) {
    if (step.i < 0 || step.i >= n || step.j < 0 || step.j >= n ||
        step.i == step.j) {
      throw Error(Errc::plan, "connect endpoints must be two distinct nodes");
    }
    if (plan.nodes[step.i].category != Category::part ||
        plan.nodes[step.j].category != Category::part) {
      throw Error(Errc::plan, "connect endpoints must be parts");
    }
    if (!pairs.insert({std::min(step.i, step.j), std::max(step.i, step.j)})
             .second) {
      throw Error(Errc::plan, "duplicate connect pair");
    }
    if (!(step.connect_s > prev_connect)) {
      throw Error(Errc::plan, "connection instants must be strictly increasing");
    }
    prev_connect = step.connect_s;
    const int frame = quantize_instant(step.connect_s, plan.frame_rate);
    if (frame < 1 || frame >= frame_count) {
      throw Error(Errc::plan,
                  "connection instant quantizes outside frames 1..last");
    }
    if (frame == prev_frame) {
      throw Error(Errc::plan,
                  "connection instants must land on distinct frames");
    }
    prev_frame = frame;

    for (const GraspSpec& grasp : step.grasps) {
      if (grasp.object < 0 || grasp.object >= n) {
        throw Error(Errc::plan, "grasp references an unknown object");
      }
      check_window(grasp.start_s, grasp.end_s, plan.duration, "grasp");
    }
    if (step.tool) {
      if (step.tool->tool < 0 || step.tool->tool >= n ||
          plan.nodes[step.tool->tool].category != Category::tool) {
        throw Error(Errc::plan, "tool field must reference a tool node");
      }
      check_window(step.tool->start_s, step.tool->end_s, plan.duration,
                   "tool");
    }
  }
}

}  // namespace

Recording compile_plan(const AssemblyPlan& plan) {
  validate_plan(plan);
  const double fps = plan.frame_rate;
  const int frame_count = plan_frame_count(plan);
  const int n = static_cast<int>(plan.nodes.size());

  // Per-frame deltas.
  std::vector<std::vector<Edge>> part_on(frame_count);
  std::vector<std::vector<std::pair<Edge, int>>> tool_delta(frame_count);
  std::vector<std::vector<std::tuple<int, ObjectId, int>>> grasp_delta(
      frame_count);
  auto add_window = [&](double start, double end, auto&& on, auto&& off) {
    const int f0 = std::min(quantize_instant(start, fps), frame_count);
    const int f1 = std::min(quantize_instant(end, fps), frame_count);
    if (f0 >= f1) return;
    on(f0);
    if (f1 < frame_count) off(f1);
  };
  for (const PlanStep& step : plan.steps) {
    const int frame = quantize_instant(step.connect_s, fps);
    part_on[frame].push_back(make_edge(step.i, step.j, plan.nodes));
    for (const GraspSpec& grasp : step.grasps) {
      const int hand = grasp.hand == HandSide::left ? 0 : 1;
      add_window(
          grasp.start_s, grasp.end_s,
          [&](int f) { grasp_delta[f].push_back({hand, grasp.object, 1}); },
          [&](int f) { grasp_delta[f].push_back({hand, grasp.object, -1}); });
    }
    if (step.tool) {
      for (ObjectId endpoint : {step.i, step.j}) {
        const Edge e = make_edge(step.tool->tool, endpoint, plan.nodes);
        add_window(
            step.tool->start_s, step.tool->end_s,
            [&](int f) { tool_delta[f].push_back({e, 1}); },
            [&](int f) { tool_delta[f].push_back({e, -1}); });
      }
    }
  }

  Recording rec(plan.nodes, fps);
  std::set<Edge> part_edges;
  std::map<Edge, int> tool_count;
  std::array<std::map<ObjectId, int>, 2> held;
  std::mt19937 rng(plan.seed);
  std::uniform_real_distribution<double> jitter(-0.005, 0.005);

  for (int f = 0; f < frame_count; ++f) {
    for (const Edge& e : part_on[f]) part_edges.insert(e);
    for (const auto& [e, d] : tool_delta[f]) {
      if ((tool_count[e] += d) == 0) tool_count.erase(e);
    }
    for (const auto& [hand, object, d] : grasp_delta[f]) {
      if ((held[hand][object] += d) == 0) held[hand].erase(object);
    }

    FrameRecord frame;
    frame.index = f;
    frame.timestamp = f / fps;
    for (int hand = 0; hand < 2; ++hand) {
      for (const auto& [object, count] : held[hand]) {
        frame.grasp[hand].push_back(object);
      }
    }
    frame.edges.assign(part_edges.begin(), part_edges.end());
    for (const auto& [e, count] : tool_count) frame.edges.push_back(e);
    std::sort(frame.edges.begin(), frame.edges.end());
    for (int id = 0; id < n; ++id) {
      Pose6DoF pose;
      pose.position = {0.4 * id + jitter(rng), 0.1 * (id % 5) + jitter(rng),
                       0.7 + jitter(rng)};
      frame.object_poses.emplace(id, pose);
    }
    rec.append_frame(std::move(frame));
  }
  return rec;
}

namespace {

void check_preset_options(const PresetOptions& opts) {
  if (!(opts.frame_rate > 0.0) || !(opts.spacing > 0.0) ||
      opts.grasp_lead < 0.0 || opts.release_delay < 0.0) {
    throw Error(Errc::plan, "invalid preset options");
  }
  if (opts.release_delay >= opts.spacing) {
    throw Error(Errc::plan, "release_delay must be smaller than spacing");
  }
}

PlanStep joint_step(ObjectId a, ObjectId b, double connect,
                    const PresetOptions& opts) {
  PlanStep step;
  step.i = std::min(a, b);
  step.j = std::max(a, b);
  step.connect_s = connect;
  const double start = std::max(0.0, connect - opts.grasp_lead);
  const double end = connect + opts.release_delay;
  step.grasps.push_back({HandSide::left, step.i, start, end});
  step.grasps.push_back({HandSide::right, step.j, start, end});
  return step;
}

}  // namespace

AssemblyPlan preset_star(int k, const PresetOptions& opts) {
  if (k < 2) throw Error(Errc::plan, "preset_star requires k >= 2");
  check_preset_options(opts);

  AssemblyPlan plan;
  plan.frame_rate = opts.frame_rate;
  plan.nodes.push_back({0, "hub", Category::part});
  for (int s = 1; s <= k; ++s) {
    plan.nodes.push_back({s, "spoke_" + std::to_string(s), Category::part});
  }
  for (int s = 1; s <= k; ++s) {
    plan.steps.push_back(joint_step(0, s, opts.spacing * s, opts));
  }
  plan.duration = plan.steps.back().connect_s + opts.release_delay + 1.0;
  return plan;
}

AssemblyPlan preset_distributed(int arms, int depth,
                                const PresetOptions& opts) {
  if (arms < 2 || depth < 2) {
    throw Error(Errc::plan, "preset_distributed requires arms >= 2, depth >= 2");
  }
  check_preset_options(opts);

  AssemblyPlan plan;
  plan.frame_rate = opts.frame_rate;
  plan.nodes.push_back({0, "hub", Category::part});
  auto level_base = [depth](int level) -> std::string {
    if (depth == 2) return level == 1 ? "arm" : "motor";
    if (depth == 3) {
      return level == 1 ? "arm" : level == 2 ? "motor" : "propeller";
    }
    return "link" + std::to_string(level);
  };
  auto id_of = [depth](int arm, int level) {
    return 1 + (arm - 1) * depth + (level - 1);
  };
  for (int arm = 1; arm <= arms; ++arm) {
    for (int level = 1; level <= depth; ++level) {
      plan.nodes.push_back({id_of(arm, level),
                            level_base(level) + "_" + std::to_string(arm),
                            Category::part});
    }
  }

  // Joints per arm, leaf joint first, hub attachment last.
  std::vector<std::vector<std::pair<ObjectId, ObjectId>>> joints(arms + 1);
  for (int arm = 1; arm <= arms; ++arm) {
    for (int level = depth; level >= 2; --level) {
      joints[arm].push_back({id_of(arm, level - 1), id_of(arm, level)});
    }
    joints[arm].push_back({0, id_of(arm, 1)});
  }

  std::vector<std::pair<ObjectId, ObjectId>> order;
  if (opts.order == AssemblyOrder::chain) {
    for (int arm = 1; arm <= arms; ++arm) {
      order.insert(order.end(), joints[arm].begin(), joints[arm].end());
    }
  } else {
    for (int stage = 0; stage < depth; ++stage) {
      for (int arm = 1; arm <= arms; ++arm) {
        order.push_back(joints[arm][stage]);
      }
    }
  }
  double connect = 0.0;
  for (const auto& [a, b] : order) {
    connect += opts.spacing;
    plan.steps.push_back(joint_step(a, b, connect, opts));
  }
  plan.duration = connect + opts.release_delay + 1.0;
  return plan;
}

AssemblyPlan random_plan(unsigned seed) {
  std::mt19937 rng(seed);
  auto u_int = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto u_real = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  AssemblyPlan plan;
  plan.seed = seed;
  plan.frame_rate = std::array{20.0, 30.0, 60.0}[u_int(0, 2)];

  const int n_parts = u_int(3, 40);
  const int n_tools = u_int(0, 4);
  static constexpr const char* kPartPool[] = {"plate", "rod",   "gear",
                                              "bracket", "panel", "wheel"};
  static constexpr const char* kToolPool[] = {"driver", "wrench", "clamp"};
  std::map<std::string, int> counters;
  std::vector<std::pair<std::string, Category>> protos;
  for (int p = 0; p < n_parts; ++p) {
    const std::string base = kPartPool[u_int(0, 5)];
    protos.push_back({base + "_" + std::to_string(++counters[base]),
                      Category::part});
  }
  for (int t = 0; t < n_tools; ++t) {
    const std::string base = kToolPool[u_int(0, 2)];
    protos.push_back({base + "_" + std::to_string(++counters[base]),
                      Category::tool});
  }
  std::shuffle(protos.begin(), protos.end(), rng);
  std::vector<ObjectId> part_ids;
  std::vector<ObjectId> tool_ids;
  for (std::size_t k = 0; k < protos.size(); ++k) {
    plan.nodes.push_back(
        {static_cast<ObjectId>(k), protos[k].first, protos[k].second});
    (protos[k].second == Category::part ? part_ids : tool_ids)
        .push_back(static_cast<ObjectId>(k));
  }

  // Spanning structure over a random subset of parts, plus a few cycle
  // edges; shuffling the step order produces sub-assembly merge patterns.
  std::shuffle(part_ids.begin(), part_ids.end(), rng);
  const int in_assembly = u_int(2, n_parts);
  std::set<std::pair<ObjectId, ObjectId>> pairs;
  std::vector<std::pair<ObjectId, ObjectId>> connects;
  for (int k = 1; k < in_assembly; ++k) {
    const ObjectId a = part_ids[k];
    const ObjectId b = part_ids[u_int(0, k - 1)];
    pairs.insert({std::min(a, b), std::max(a, b)});
    connects.push_back({a, b});
  }
  for (int extra = u_int(0, 2); extra > 0 && in_assembly >= 3; --extra) {
    for (int tries = 0; tries < 10; ++tries) {
      const ObjectId a = part_ids[u_int(0, in_assembly - 1)];
      const ObjectId b = part_ids[u_int(0, in_assembly - 1)];
      if (a == b) continue;
      if (!pairs.insert({std::min(a, b), std::max(a, b)}).second) continue;
      connects.push_back({a, b});
      break;
    }
  }
  std::shuffle(connects.begin(), connects.end(), rng);

  double t = u_real(0.5, 1.5);
  for (const auto& [a, b] : connects) {
    t += u_real(0.4, 1.2);
    PlanStep step;
    step.i = std::min(a, b);
    step.j = std::max(a, b);
    step.connect_s = t;
    plan.steps.push_back(step);
  }
  plan.duration = t + u_real(1.0, 2.5);

  for (PlanStep& step : plan.steps) {
    const double c = step.connect_s;
    for (ObjectId endpoint : {step.i, step.j}) {
      if (u_real(0.0, 1.0) >= 0.8) continue;
      GraspSpec grasp;
      grasp.hand = u_int(0, 1) == 0 ? HandSide::left : HandSide::right;
      grasp.object = endpoint;
      grasp.start_s = std::max(0.0, c - u_real(0.1, 1.2));
      grasp.end_s = std::min(plan.duration, c + u_real(0.0, 1.5));
      if (grasp.start_s < grasp.end_s) step.grasps.push_back(grasp);
    }
    if (!tool_ids.empty() && u_real(0.0, 1.0) < 0.35) {
      ToolUse tool;
      tool.tool = tool_ids[u_int(0, static_cast<int>(tool_ids.size()) - 1)];
      tool.start_s = std::max(0.0, c - u_real(0.05, 0.8));
      tool.end_s = std::min(plan.duration, c + u_real(0.05, 1.0));
      if (tool.start_s < tool.end_s) step.tool = tool;
    }
  }

  if (u_real(0.0, 1.0) < 0.3 && n_parts >= 2) {
    const int grouped = u_int(2, std::min(4, n_parts));
    for (int k = 0; k < grouped; ++k) {
      plan.category_groups[plan.nodes[part_ids[k % part_ids.size()]].name] =
          "cluster";
    }
  }
  return plan;
}

namespace {

// ---- Independent oracle ---------------------------------------------------
// Deliberately naive re-derivation of the rules from the plan's event list;
// no segmenter code is reused.

struct OracleState {
  std::vector<int> comp;        // node -> component label
  std::vector<double> weight;   // node -> origin weight
  ObjectId origin;

  explicit OracleState(int n, const OriginCentricGraph& ocg)
      : comp(n), weight(n, 0.0), origin(ocg.origin) {
    for (int k = 0; k < n; ++k) comp[k] = k;
    for (const auto& [id, w] : ocg.weight) weight[id] = w;
  }

  int size_of(int label) const {
    int count = 0;
    for (int c : comp) count += c == label;
    return count;
  }
  bool has_origin(int label) const {
    return origin >= 0 && origin < static_cast<int>(comp.size()) &&
           comp[origin] == label;
  }
  ObjectId central_of(int label) const {
    ObjectId best = -1;
    for (int k = 0; k < static_cast<int>(comp.size()); ++k) {
      if (comp[k] != label) continue;
      if (best == -1 || weight[k] > weight[best] ||
          (weight[k] == weight[best] && k < best)) {
        best = k;
      }
    }
    return best;
  }
  void merge_into(int from, int into) {
    for (int& c : comp) {
      if (c == from) c = into;
    }
  }
};

std::string oracle_label(const std::string& name,
                         const std::map<std::string, std::string>& groups) {
  if (auto it = groups.find(name); it != groups.end()) return it->second;
  const auto pos = name.rfind('_');
  if (pos == std::string::npos || pos + 1 == name.size()) return name;
  for (std::size_t k = pos + 1; k < name.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(name[k]))) return name;
  }
  return name.substr(0, pos);
}

bool oracle_grasped(const AssemblyPlan& plan, int frame,
                    const std::set<ObjectId>& relevant) {
  for (const PlanStep& step : plan.steps) {
    for (const GraspSpec& grasp : step.grasps) {
      if (!relevant.contains(grasp.object)) continue;
      if (quantize_instant(grasp.start_s, plan.frame_rate) <= frame &&
          frame < quantize_instant(grasp.end_s, plan.frame_rate)) {
        return true;
      }
    }
  }
  return false;
}

std::set<ObjectId> oracle_tools_at(const AssemblyPlan& plan, int frame,
                                   ObjectId a, ObjectId b) {
  std::set<ObjectId> tools;
  for (const PlanStep& step : plan.steps) {
    if (!step.tool) continue;
    if (step.i != a && step.i != b && step.j != a && step.j != b) continue;
    if (quantize_instant(step.tool->start_s, plan.frame_rate) <= frame &&
        frame < quantize_instant(step.tool->end_s, plan.frame_rate)) {
      tools.insert(step.tool->tool);
    }
  }
  return tools;
}

void oracle_collapse(std::vector<OracleBreakpoint>& bps) {
  std::stable_sort(bps.begin(), bps.end(),
                   [](const OracleBreakpoint& x, const OracleBreakpoint& y) {
                     if (x.refined_frame != y.refined_frame) {
                       return x.refined_frame < y.refined_frame;
                     }
                     return x.frame < y.frame;
                   });
  std::vector<OracleBreakpoint> kept;
  for (auto& bp : bps) {
    if (!kept.empty() && kept.back().refined_frame == bp.refined_frame) {
      continue;
    }
    kept.push_back(std::move(bp));
  }
  bps = std::move(kept);
}

}  // namespace

OracleResult oracle_breakpoints(const AssemblyPlan& plan,
                                const OriginCentricGraph& ocg) {
  validate_plan(plan);
  const int n = static_cast<int>(plan.nodes.size());
  const int frame_count = plan_frame_count(plan);
  OracleState state(n, ocg);

  OracleResult result;
  std::vector<ObjectId> centrals;
  std::vector<std::string> run_labels;
  int last_comp = -1;
  for (const PlanStep& step : plan.steps) {
    const ObjectId a = std::min(step.i, step.j);
    const ObjectId b = std::max(step.i, step.j);
    const int ca = state.comp[a];
    const int cb = state.comp[b];
    if (ca == cb) continue;  // cycle edge: no rule fires

    int active = ca;
    if (last_comp == ca || last_comp == cb) {
      active = last_comp;
    } else if (state.size_of(cb) > state.size_of(ca)) {
      active = cb;
    }
    const ObjectId central_before = state.central_of(active);
    const bool joins_origin = state.has_origin(ca) != state.has_origin(cb);

    state.merge_into(cb, ca);
    last_comp = ca;
    const ObjectId central_after = state.central_of(ca);

    OracleBreakpoint bp;
    bp.frame = quantize_instant(step.connect_s, plan.frame_rate);
    bp.rule = joins_origin ? Rule::origin_connection
              : central_after != central_before ? Rule::central_update
                                                : Rule::sub_assembly;
    bp.objects = {a, b};
    for (ObjectId tool : oracle_tools_at(plan, bp.frame, a, b)) {
      bp.objects.insert(tool);
    }
    bp.refined_frame = bp.frame;
    result.fine.push_back(std::move(bp));
    centrals.push_back(central_after);
    const ObjectId non_central =
        state.weight[a] < state.weight[b] ? a : b;
    run_labels.push_back(
        oracle_label(plan.nodes[non_central].name, plan.category_groups));
  }

  // Release refinement, bounded by the next fine event.
  for (std::size_t k = 0; k < result.fine.size(); ++k) {
    OracleBreakpoint& bp = result.fine[k];
    const int bound = k + 1 < result.fine.size() ? result.fine[k + 1].frame
                                                 : frame_count;
    bp.refined_frame = std::max(bp.frame, bound - 1);
    for (int f = bp.frame; f < bound; ++f) {
      if (!oracle_grasped(plan, f, bp.objects)) {
        bp.refined_frame = f;
        break;
      }
    }
  }

  // Coarse grouping over maximal mergeable runs.
  std::size_t start = 0;
  while (start < result.fine.size()) {
    std::size_t end = start;
    while (end + 1 < result.fine.size() &&
           (centrals[end] == centrals[end + 1] ||
            run_labels[end] == run_labels[end + 1])) {
      ++end;
    }
    OracleBreakpoint bp;
    bp.frame = result.fine[end].frame;
    bp.rule = Rule::coarse_merge;
    bp.refined_frame = result.fine[end].refined_frame;
    for (std::size_t k = start; k <= end; ++k) {
      bp.objects.insert(result.fine[k].objects.begin(),
                        result.fine[k].objects.end());
    }
    result.coarse.push_back(std::move(bp));
    start = end + 1;
  }

  oracle_collapse(result.fine);
  oracle_collapse(result.coarse);
  return result;
}

namespace {

constexpr std::string_view kPlanFormat = "taskseg-plan/1";

ordered_json oracle_list_json(const std::vector<OracleBreakpoint>& bps) {
  ordered_json list = ordered_json::array();
  for (const OracleBreakpoint& bp : bps) {
    ordered_json j;
    j["frame"] = bp.frame;
    j["rule"] = to_string(bp.rule);
    j["refined_frame"] = bp.refined_frame;
    j["objects"] = bp.objects;
    list.push_back(std::move(j));
  }
  return list;
}

std::vector<OracleBreakpoint> oracle_list_from(const ordered_json& list) {
  if (!list.is_array()) {
    throw Error(Errc::parse, "oracle lists must be arrays");
  }
  std::vector<OracleBreakpoint> bps;
  for (const auto& j : list) {
    if (!j.is_object() || !j.contains("frame") || !j.contains("rule") ||
        !j.contains("refined_frame") || !j.contains("objects") ||
        !j.at("frame").is_number_integer() || !j.at("rule").is_string() ||
        !j.at("refined_frame").is_number_integer() ||
        !j.at("objects").is_array()) {
      throw Error(Errc::parse, "malformed oracle breakpoint entry");
    }
    OracleBreakpoint bp;
    bp.frame = j.at("frame").get<int>();
    bp.rule = rule_from_string(j.at("rule").get<std::string>());
    bp.refined_frame = j.at("refined_frame").get<int>();
    for (const auto& id : j.at("objects")) {
      if (!id.is_number_integer()) {
        throw Error(Errc::parse, "oracle objects must be integer ids");
      }
      bp.objects.insert(id.get<int>());
    }
    bps.push_back(std::move(bp));
  }
  return bps;
}

}  // namespace

void write_oracle(std::ostream& out, const OracleResult& oracle) {
  ordered_json j;
  j["fine"] = oracle_list_json(oracle.fine);
  j["coarse"] = oracle_list_json(oracle.coarse);
  out << j.dump(2) << '\n';
  if (!out) throw Error(Errc::io, "write failure");
}

void write_oracle_file(const std::string& path, const OracleResult& oracle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot open \"" + path + "\" for writing");
  write_oracle(out, oracle);
}

OracleResult read_oracle(std::istream& in) {
  std::string text(std::istreambuf_iterator<char>(in), {});
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("fine") ||
      !j.contains("coarse")) {
    throw Error(Errc::parse, "malformed oracle document");
  }
  OracleResult oracle;
  oracle.fine = oracle_list_from(j.at("fine"));
  oracle.coarse = oracle_list_from(j.at("coarse"));
  return oracle;
}

OracleResult read_oracle_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open \"" + path + "\" for reading");
  return read_oracle(in);
}

void write_plan(std::ostream& out, const AssemblyPlan& plan) {
  ordered_json j;
  j["format"] = kPlanFormat;
  j["frame_rate"] = plan.frame_rate;
  j["duration"] = plan.duration;
  j["seed"] = plan.seed;
  ordered_json nodes = ordered_json::array();
  for (const ObjectNode& node : plan.nodes) {
    nodes.push_back({node.id, node.name, to_string(node.category)});
  }
  j["nodes"] = std::move(nodes);
  if (!plan.category_groups.empty()) {
    j["category_groups"] = plan.category_groups;
  }
  ordered_json steps = ordered_json::array();
  for (const PlanStep& step : plan.steps) {
    ordered_json s;
    s["connect"] = {step.i, step.j};
    s["t"] = step.connect_s;
    ordered_json grasps = ordered_json::array();
    for (const GraspSpec& grasp : step.grasps) {
      grasps.push_back({to_string(grasp.hand), grasp.object, grasp.start_s,
                        grasp.end_s});
    }
    s["grasps"] = std::move(grasps);
    if (step.tool) {
      s["tool"] = {step.tool->tool, step.tool->start_s, step.tool->end_s};
    }
    steps.push_back(std::move(s));
  }
  j["steps"] = std::move(steps);
  out << j.dump(2) << '\n';
  if (!out) throw Error(Errc::io, "write failure");
}

void write_plan_file(const std::string& path, const AssemblyPlan& plan) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot open \"" + path + "\" for writing");
  write_plan(out, plan);
}

AssemblyPlan read_plan(std::istream& in) {
  std::string text(std::istreambuf_iterator<char>(in), {});
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(Errc::parse, "malformed plan document");
  }
  auto require = [&j](const char* key) -> const ordered_json& {
    if (!j.contains(key)) {
      throw Error(Errc::parse, std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
  };
  const ordered_json& fmt = require("format");
  if (!fmt.is_string() || fmt.get<std::string>() != kPlanFormat) {
    throw Error(Errc::version, "unsupported plan format");
  }

  AssemblyPlan plan;
  if (!require("frame_rate").is_number() || !require("duration").is_number() ||
      !require("seed").is_number_integer()) {
    throw Error(Errc::parse, "frame_rate/duration/seed have wrong types");
  }
  plan.frame_rate = j.at("frame_rate").get<double>();
  plan.duration = j.at("duration").get<double>();
  plan.seed = j.at("seed").get<unsigned>();

  const ordered_json& nodes = require("nodes");
  if (!nodes.is_array()) throw Error(Errc::parse, "nodes must be an array");
  for (const auto& entry : nodes) {
    if (!entry.is_array() || entry.size() != 3 ||
        !entry[0].is_number_integer() || !entry[1].is_string() ||
        !entry[2].is_string()) {
      throw Error(Errc::parse, "node entries must be [id, name, category]");
    }
    const std::string cat = entry[2].get<std::string>();
    if (cat != "part" && cat != "tool") {
      throw Error(Errc::parse, "unknown category \"" + cat + "\"");
    }
    plan.nodes.push_back({entry[0].get<int>(), entry[1].get<std::string>(),
                          cat == "part" ? Category::part : Category::tool});
  }
  if (j.contains("category_groups")) {
    const ordered_json& groups = j.at("category_groups");
    if (!groups.is_object()) {
      throw Error(Errc::parse, "category_groups must be an object");
    }
    for (const auto& [name, label] : groups.items()) {
      if (!label.is_string()) {
        throw Error(Errc::parse, "category_groups values must be strings");
      }
      plan.category_groups[name] = label.get<std::string>();
    }
  }

  const ordered_json& steps = require("steps");
  if (!steps.is_array()) throw Error(Errc::parse, "steps must be an array");
  for (const auto& s : steps) {
    if (!s.is_object() || !s.contains("connect") || !s.contains("t") ||
        !s.at("connect").is_array() || s.at("connect").size() != 2 ||
        !s.at("connect")[0].is_number_integer() ||
        !s.at("connect")[1].is_number_integer() || !s.at("t").is_number()) {
      throw Error(Errc::parse, "step entries need connect:[i,j] and t");
    }
    PlanStep step;
    step.i = s.at("connect")[0].get<int>();
    step.j = s.at("connect")[1].get<int>();
    step.connect_s = s.at("t").get<double>();
    if (s.contains("grasps")) {
      const ordered_json& grasps = s.at("grasps");
      if (!grasps.is_array()) {
        throw Error(Errc::parse, "grasps must be an array");
      }
      for (const auto& g : grasps) {
        if (!g.is_array() || g.size() != 4 || !g[0].is_string() ||
            !g[1].is_number_integer() || !g[2].is_number() ||
            !g[3].is_number()) {
          throw Error(Errc::parse,
                      "grasp entries must be [hand, object, start, end]");
        }
        const std::string hand = g[0].get<std::string>();
        if (hand != "left" && hand != "right") {
          throw Error(Errc::parse, "unknown hand \"" + hand + "\"");
        }
        step.grasps.push_back({hand == "left" ? HandSide::left
                                              : HandSide::right,
                               g[1].get<int>(), g[2].get<double>(),
                               g[3].get<double>()});
      }
    }
    if (s.contains("tool")) {
      const ordered_json& tool = s.at("tool");
      if (!tool.is_array() || tool.size() != 3 ||
          !tool[0].is_number_integer() || !tool[1].is_number() ||
          !tool[2].is_number()) {
        throw Error(Errc::parse, "tool must be [id, start, end]");
      }
      step.tool = ToolUse{tool[0].get<int>(), tool[1].get<double>(),
                          tool[2].get<double>()};
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

AssemblyPlan read_plan_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open \"" + path + "\" for reading");
  return read_plan(in);
}

}  // namespace taskseg

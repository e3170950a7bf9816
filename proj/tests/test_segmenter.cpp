#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "taskseg/ocg.hpp"
#include "taskseg/segmenter.hpp"

using namespace tt;

namespace {

// hub(0) with two arm-motor-propeller chains; chain k uses ids
// 1+3k (arm), 2+3k (motor), 3+3k (propeller).
Recording two_chain_recording() {
  std::vector<ObjectNode> nodes = part_nodes({"hub"});
  for (int k = 0; k < 2; ++k) {
    for (const char* stem : {"arm", "motor", "propeller"}) {
      nodes.push_back({static_cast<ObjectId>(nodes.size()),
                       std::string(stem) + "_" + std::to_string(k + 1),
                       Category::part});
    }
  }
  Recording rec(nodes, 1.0);
  std::vector<Edge> edges;
  auto push = [&rec, &edges](double t, std::vector<Edge> fresh = {}) {
    for (const Edge& e : fresh) edges.push_back(e);
    add_frame(rec, t, edges);
  };
  push(0.0);
  push(1.0, {pp(2, 3)});  // propeller_1 -> motor_1
  push(2.0, {pp(1, 2)});  // motor module -> arm_1
  push(3.0, {pp(0, 1)});  // arm module -> hub
  push(4.0, {pp(5, 6)});  // propeller_2 -> motor_2
  push(5.0, {pp(4, 5)});  // motor module -> arm_2
  push(6.0, {pp(0, 4)});  // arm module -> hub
  push(7.0);
  return rec;
}

Breakpoint fine_at(int frame, double time, std::set<ObjectId> objects = {}) {
  Breakpoint bp;
  bp.raw_frame = frame;
  bp.raw_time = time;
  bp.refined_frame = frame;
  bp.refined_time = time;
  bp.objects = std::move(objects);
  return bp;
}

std::vector<Rule> rules_of(const std::vector<Breakpoint>& bps) {
  std::vector<Rule> out;
  for (const Breakpoint& bp : bps) out.push_back(bp.rule);
  return out;
}

std::vector<int> raw_frames_of(const std::vector<Breakpoint>& bps) {
  std::vector<int> out;
  for (const Breakpoint& bp : bps) out.push_back(bp.raw_frame);
  return out;
}

}  // namespace

TEST_CASE("group state") {
  // Path 0-1-2: origin 1 (weight 1), neighbours weight 0.5.
  OriginCentricGraph ocg;
  ocg.origin = 1;
  ocg.weight = {{0, 0.5}, {1, 1.0}, {2, 0.5}, {3, 0.0}};
  GroupState groups(ocg, 4);

  CHECK(groups.component_size(0) == 1);
  CHECK(groups.central(0) == 0);
  CHECK(groups.component_has_origin(1));
  CHECK_FALSE(groups.component_has_origin(0));

  CHECK(groups.merge(0, 2));
  CHECK(groups.same_component(0, 2));
  CHECK(groups.central(2) == 0);  // equal weights, smaller id wins
  CHECK_FALSE(groups.component_has_origin(0));

  CHECK(groups.merge(2, 1));
  CHECK(groups.central(0) == 1);  // origin weight dominates
  CHECK(groups.component_has_origin(2));
  CHECK(groups.component_size(0) == 3);

  CHECK_FALSE(groups.merge(0, 1));  // already joined
  CHECK(groups.component_size(3) == 1);
}

TEST_CASE("category group labels") {
  CHECK(category_group_label("propeller_1", {}) == "propeller");
  CHECK(category_group_label("propeller_42", {}) == "propeller");
  CHECK(category_group_label("hub", {}) == "hub");
  CHECK(category_group_label("arm_", {}) == "arm_");
  CHECK(category_group_label("arm_x", {}) == "arm_x");
  CHECK(category_group_label("part_2_3", {}) == "part_2");
  CHECK(category_group_label("screw_1", {{"screw_1", "fastener"}}) ==
        "fastener");
}

TEST_CASE("fine detection") {
  SUBCASE("star: three parts join the origin") {
    Recording rec(part_nodes({"base", "a", "b", "c"}), 1.0);
    std::vector<Edge> edges;
    add_frame(rec, 0.0);
    add_frame(rec, 1.0);
    edges.push_back(pp(0, 1));
    add_frame(rec, 2.0, edges);
    add_frame(rec, 3.0, edges);
    edges.push_back(pp(0, 2));
    add_frame(rec, 4.0, edges);
    add_frame(rec, 5.0, edges);
    edges.push_back(pp(0, 3));
    add_frame(rec, 6.0, edges);

    auto fine = detect_fine(rec, build_ocg(rec));
    REQUIRE(fine.size() == 3);
    CHECK(raw_frames_of(fine) == std::vector<int>{2, 4, 6});
    for (const Breakpoint& bp : fine) {
      CHECK(bp.level == BreakpointLevel::fine);
      CHECK(bp.rule == Rule::origin_connection);
      CHECK(bp.refined_frame == bp.raw_frame);  // unrefined
    }
    CHECK(fine[1].objects == std::set<ObjectId>{0, 2});
  }

  SUBCASE("no connection events") {
    Recording rec(part_nodes({"a", "b"}), 1.0);
    add_frame(rec, 0.0);
    add_frame(rec, 1.0);
    // OCG on an edgeless pair: origin falls to id 0 by tie-break.
    CHECK(detect_fine(rec, build_ocg(rec)).empty());
  }

  SUBCASE("chain fires SubAssembly, CentralUpdate, OriginConnection") {
    Recording rec = two_chain_recording();
    auto fine = detect_fine(rec, build_ocg(rec));
    REQUIRE(fine.size() == 6);
    CHECK(rules_of(fine) ==
          std::vector<Rule>{Rule::sub_assembly, Rule::central_update,
                            Rule::origin_connection, Rule::sub_assembly,
                            Rule::central_update, Rule::origin_connection});
    CHECK(raw_frames_of(fine) == std::vector<int>{1, 2, 3, 4, 5, 6});
  }

  SUBCASE("frame-0 edges are pre-assembled, not events") {
    Recording rec(part_nodes({"a", "b", "c"}), 1.0);
    add_frame(rec, 0.0, {pp(0, 1)});
    add_frame(rec, 1.0, {pp(0, 1), pp(1, 2)});
    auto fine = detect_fine(rec, build_ocg(rec));
    REQUIRE(fine.size() == 1);
    CHECK(fine[0].raw_frame == 1);
    CHECK(fine[0].objects == std::set<ObjectId>{1, 2});
  }

  SUBCASE("cycle edges fire no rule") {
    Recording rec(part_nodes({"a", "b", "c", "d"}), 1.0);
    std::vector<Edge> edges;
    add_frame(rec, 0.0);
    edges.push_back(pp(0, 1));
    add_frame(rec, 1.0, edges);
    edges.push_back(pp(1, 2));
    add_frame(rec, 2.0, edges);
    edges.push_back(pp(2, 3));
    add_frame(rec, 3.0, edges);
    edges.push_back(pp(0, 3));  // closes the square
    add_frame(rec, 4.0, edges);
    auto fine = detect_fine(rec, build_ocg(rec));
    CHECK(fine.size() == 3);
    CHECK(raw_frames_of(fine) == std::vector<int>{1, 2, 3});
  }

  SUBCASE("re-appearing edge does not re-fire") {
    Recording rec(part_nodes({"a", "b", "c"}), 1.0);
    add_frame(rec, 0.0);
    add_frame(rec, 1.0, {pp(0, 1)});
    add_frame(rec, 2.0, {});          // tracker glitch: edge drops out
    add_frame(rec, 3.0, {pp(0, 1)});  // same component again
    auto fine = detect_fine(rec, build_ocg(rec));
    CHECK(fine.size() == 1);
    CHECK(fine[0].raw_frame == 1);
  }

  SUBCASE("two events in one frame yield two breakpoints") {
    Recording rec(part_nodes({"a", "b", "c", "d"}), 1.0);
    add_frame(rec, 0.0);
    add_frame(rec, 1.0, {pp(0, 1), pp(2, 3)});
    auto fine = detect_fine(rec, build_ocg(rec));
    REQUIRE(fine.size() == 2);
    CHECK(fine[0].raw_frame == 1);
    CHECK(fine[1].raw_frame == 1);
    CHECK(fine[0].objects == std::set<ObjectId>{0, 1});
    CHECK(fine[1].objects == std::set<ObjectId>{2, 3});
  }

  SUBCASE("objects include tools touching the endpoints") {
    std::vector<ObjectNode> nodes = part_nodes({"a", "b", "c"});
    nodes.push_back({3, "driver", Category::tool});
    Recording rec(nodes, 1.0);
    add_frame(rec, 0.0);
    add_frame(rec, 1.0, {pp(0, 1), tp(3, 1), tp(3, 2)});
    add_frame(rec, 2.0, {pp(0, 1), pp(1, 2)});
    auto fine = detect_fine(rec, build_ocg(rec));
    REQUIRE(fine.size() == 2);
    CHECK(fine[0].objects == std::set<ObjectId>{0, 1, 3});  // tool on b
    CHECK(fine[1].objects == std::set<ObjectId>{1, 2});     // tool gone
  }

  SUBCASE("registry mismatch") {
    Recording rec(part_nodes({"a", "b", "c"}), 1.0);
    add_frame(rec, 0.0, {pp(0, 1), pp(1, 2)});
    Recording other(part_nodes({"a", "b"}), 1.0);
    add_frame(other, 0.0, {pp(0, 1)});
    CHECK_ERRC(detect_fine(rec, build_ocg(other)), Errc::registry_mismatch);
  }

  SUBCASE("incremental detector equals batch") {
    Recording rec = two_chain_recording();
    auto ocg = build_ocg(rec);
    FineDetector detector(rec, ocg);
    for (const FrameRecord& frame : rec.frames()) detector.observe(frame);
    CHECK(detector.breakpoints() == detect_fine(rec, ocg));
  }

  SUBCASE("frames must arrive in stream order") {
    Recording rec = two_chain_recording();
    auto ocg = build_ocg(rec);
    FineDetector detector(rec, ocg);
    CHECK_ERRC(detector.observe(rec.frames()[1]), Errc::validation);
  }
}

TEST_CASE("coarse detection") {
  SUBCASE("same-prefix parts collapse to one coarse breakpoint") {
    // Four propellers fastened to four motors, consecutively.
    std::vector<ObjectNode> nodes;
    for (int k = 1; k <= 4; ++k) {
      nodes.push_back({static_cast<ObjectId>(nodes.size()),
                       "motor_" + std::to_string(k), Category::part});
    }
    for (int k = 1; k <= 4; ++k) {
      nodes.push_back({static_cast<ObjectId>(nodes.size()),
                       "propeller_" + std::to_string(k), Category::part});
    }
    Recording rec(nodes, 1.0);
    std::vector<Edge> edges;
    add_frame(rec, 0.0);
    for (int k = 0; k < 4; ++k) {
      edges.push_back(pp(k, 4 + k));
      add_frame(rec, 1.0 + k, edges);
    }
    auto ocg = build_ocg(rec);
    auto fine = detect_fine(rec, ocg);
    REQUIRE(fine.size() == 4);
    auto coarse = detect_coarse(fine, rec, ocg);
    REQUIRE(coarse.size() == 1);
    CHECK(coarse[0].level == BreakpointLevel::coarse);
    CHECK(coarse[0].rule == Rule::coarse_merge);
    CHECK(coarse[0].raw_frame == fine.back().raw_frame);
    CHECK(coarse[0].objects ==
          std::set<ObjectId>{0, 1, 2, 3, 4, 5, 6, 7});  // union over the run
  }

  SUBCASE("singleton fine list") {
    Recording rec(part_nodes({"a", "b"}), 1.0);
    add_frame(rec, 0.0);
    add_frame(rec, 1.0, {pp(0, 1)});
    auto ocg = build_ocg(rec);
    auto fine = detect_fine(rec, ocg);
    REQUIRE(fine.size() == 1);
    auto coarse = detect_coarse(fine, rec, ocg);
    REQUIRE(coarse.size() == 1);
    CHECK(coarse[0].raw_frame == fine[0].raw_frame);
    CHECK(coarse[0].objects == fine[0].objects);
  }

  SUBCASE("alternating groups never merge") {
    Recording rec(
        part_nodes({"left_1", "left_2", "left_3", "right_1", "right_2",
                    "right_3"}),
        1.0);
    std::vector<Edge> edges;
    auto push = [&rec, &edges](double t, Edge e) {
      edges.push_back(e);
      add_frame(rec, t, edges);
    };
    add_frame(rec, 0.0);
    push(1.0, pp(0, 1));
    push(2.0, pp(3, 4));
    push(3.0, pp(1, 2));
    push(4.0, pp(4, 5));
    auto ocg = build_ocg(rec);
    auto fine = detect_fine(rec, ocg);
    REQUIRE(fine.size() == 4);
    CHECK(detect_coarse(fine, rec, ocg).size() == 4);
  }

  SUBCASE("shared central object merges unlike names") {
    Recording rec(part_nodes({"hub", "alpha", "beta"}), 1.0);
    add_frame(rec, 0.0);
    add_frame(rec, 1.0, {pp(0, 1)});
    add_frame(rec, 2.0, {pp(0, 1), pp(0, 2)});
    auto ocg = build_ocg(rec);
    REQUIRE(ocg.origin == 0);
    auto fine = detect_fine(rec, ocg);
    REQUIRE(fine.size() == 2);
    auto coarse = detect_coarse(fine, rec, ocg);
    REQUIRE(coarse.size() == 1);
    CHECK(coarse[0].raw_frame == 2);
  }

  SUBCASE("explicit grouping map overrides name prefixes") {
    Recording rec(part_nodes({"alpha", "beta", "gamma", "delta"}), 1.0);
    add_frame(rec, 0.0);
    add_frame(rec, 1.0, {pp(0, 1)});
    add_frame(rec, 2.0, {pp(0, 1), pp(2, 3)});
    auto ocg = build_ocg(rec);
    auto fine = detect_fine(rec, ocg);
    REQUIRE(fine.size() == 2);
    CHECK(detect_coarse(fine, rec, ocg).size() == 2);
    SegmenterOptions grouped;
    grouped.category_groups = {{"beta", "fastener"}, {"delta", "fastener"}};
    CHECK(detect_coarse(fine, rec, ocg, grouped).size() == 1);
  }

  SUBCASE("empty fine list") {
    Recording rec(part_nodes({"a", "b"}), 1.0);
    add_frame(rec, 0.0);
    auto ocg = build_ocg(rec);
    CHECK(detect_coarse({}, rec, ocg).empty());
  }

  SUBCASE("foreign fine list is rejected") {
    Recording rec(part_nodes({"a", "b"}), 1.0);
    add_frame(rec, 0.0);
    add_frame(rec, 1.0, {pp(0, 1)});
    auto ocg = build_ocg(rec);
    CHECK_ERRC(detect_coarse({fine_at(0, 0.0)}, rec, ocg), Errc::validation);
    auto fine = detect_fine(rec, ocg);
    fine[0].raw_frame = 0;
    CHECK_ERRC(detect_coarse(fine, rec, ocg), Errc::validation);
  }
}

TEST_CASE("refinement") {
  // Recording with one connection and scripted hand releases.
  auto scripted = [](int frames, int grasp_from, int grasp_to,
                     ObjectId held) {
    Recording rec(part_nodes({"a", "b", "c", "d"}), 1.0);
    for (int f = 0; f < frames; ++f) {
      std::vector<Edge> edges = f >= 100 ? std::vector<Edge>{pp(0, 1)}
                                         : std::vector<Edge>{};
      std::vector<ObjectId> right;
      if (f >= grasp_from && f < grasp_to) right.push_back(held);
      add_frame(rec, f, edges, {}, right);
    }
    return rec;
  };

  SUBCASE("release at frame 130") {
    Recording rec = scripted(200, 90, 130, 0);
    auto out = refine({fine_at(100, 100.0, {0, 1})}, rec);
    REQUIRE(out.size() == 1);
    CHECK(out[0].refined_frame == 130);
    CHECK(out[0].refined_time == 130.0);
    CHECK(out[0].raw_frame == 100);
  }

  SUBCASE("no relevant grasp: refined equals raw") {
    Recording rec = scripted(200, 90, 130, 3);  // hand holds an unrelated part
    auto out = refine({fine_at(100, 100.0, {0, 1})}, rec);
    CHECK(out[0].refined_frame == 100);
  }

  SUBCASE("never released: bounded by next breakpoint") {
    Recording rec = scripted(200, 90, 200, 0);
    auto out =
        refine({fine_at(100, 100.0, {0, 1}), fine_at(150, 150.0, {2, 3})},
               rec);
    REQUIRE(out.size() == 2);
    CHECK(out[0].refined_frame == 149);
    CHECK(out[1].refined_frame == 150);  // c,d never grasped
  }

  SUBCASE("never released: bounded by end of recording") {
    Recording rec = scripted(200, 90, 200, 0);
    auto out = refine({fine_at(100, 100.0, {0, 1})}, rec);
    CHECK(out[0].refined_frame == 199);
  }

  SUBCASE("tools touching the objects stay relevant") {
    std::vector<ObjectNode> nodes = part_nodes({"a", "b"});
    nodes.push_back({2, "driver", Category::tool});
    Recording rec(nodes, 1.0);
    for (int f = 0; f < 40; ++f) {
      std::vector<Edge> edges;
      if (f >= 10) edges.push_back(pp(0, 1));
      if (f == 10) edges.push_back(tp(2, 0));
      std::vector<ObjectId> right;
      if (f >= 5 && f < 25) right.push_back(2);  // hand holds only the tool
      add_frame(rec, f, edges, {}, right);
    }
    auto out = refine({fine_at(10, 10.0, {0, 1, 2})}, rec);
    CHECK(out[0].refined_frame == 25);
  }

  SUBCASE("duplicate refined frames collapse to the earlier raw event") {
    Recording rec(part_nodes({"a", "b", "c", "d"}), 1.0);
    for (int f = 0; f < 10; ++f) add_frame(rec, f);
    auto out = refine({fine_at(5, 5.0, {0, 1}), fine_at(5, 5.0, {2, 3})}, rec);
    REQUIRE(out.size() == 1);
    CHECK(out[0].refined_frame == 5);
    CHECK(out[0].objects == std::set<ObjectId>{0, 1});
  }

  SUBCASE("empty list and frame-range checks") {
    Recording rec(part_nodes({"a", "b"}), 1.0);
    add_frame(rec, 0.0);
    CHECK(refine({}, rec).empty());
    CHECK_ERRC(refine({fine_at(3, 3.0, {0, 1})}, rec), Errc::index_range);
  }
}

TEST_CASE("segment tree construction") {
  auto coarse_at = [](double t) {
    Breakpoint bp = fine_at(0, t);
    bp.refined_time = t;
    bp.level = BreakpointLevel::coarse;
    bp.rule = Rule::coarse_merge;
    return bp;
  };
  auto fine_time = [](double t) {
    Breakpoint bp = fine_at(0, t);
    bp.refined_time = t;
    return bp;
  };

  SUBCASE("fine {10,20,30}, coarse {30}, duration 40") {
    auto tree = build_segments({fine_time(10), fine_time(20), fine_time(30)},
                               {coarse_at(30)}, 40.0);
    REQUIRE(tree.segments.size() == 2);
    CHECK(tree.segments[0].span == TimeSegment{0.0, 30.0});
    CHECK(tree.segments[1].span == TimeSegment{30.0, 40.0});
    CHECK(tree.segments[0].fine ==
          std::vector<TimeSegment>{{0, 10}, {10, 20}, {20, 30}});
    CHECK(tree.segments[1].fine == std::vector<TimeSegment>{{30, 40}});
    CHECK(tree.fine_segments().size() == 4);
  }

  SUBCASE("empty lists: one segment at both levels") {
    auto tree = build_segments({}, {}, 12.0);
    REQUIRE(tree.segments.size() == 1);
    CHECK(tree.segments[0].span == TimeSegment{0.0, 12.0});
    CHECK(tree.segments[0].fine == std::vector<TimeSegment>{{0.0, 12.0}});
  }

  SUBCASE("boundaries at 0 or duration are dropped") {
    auto tree = build_segments({fine_time(0), fine_time(10), fine_time(40)},
                               {}, 40.0);
    REQUIRE(tree.segments.size() == 1);
    CHECK(tree.segments[0].fine ==
          std::vector<TimeSegment>{{0, 10}, {10, 40}});
  }

  SUBCASE("partitions cover duration with no gaps") {
    auto tree = build_segments({fine_time(5), fine_time(9), fine_time(21)},
                               {coarse_at(9)}, 30.0);
    double cursor = 0.0;
    for (const CoarseSegment& seg : tree.segments) {
      CHECK(seg.span.start == cursor);
      double inner = seg.span.start;
      for (const TimeSegment& fs : seg.fine) {
        CHECK(fs.start == inner);
        CHECK(fs.end > fs.start);
        inner = fs.end;
      }
      CHECK(inner == seg.span.end);
      cursor = seg.span.end;
    }
    CHECK(cursor == 30.0);
  }

  SUBCASE("nesting violations") {
    CHECK_ERRC(build_segments({fine_time(10)}, {coarse_at(15)}, 40.0),
               Errc::nesting);
    CHECK_ERRC(build_segments({fine_time(20), fine_time(10)}, {}, 40.0),
               Errc::nesting);
    CHECK_ERRC(build_segments({}, {}, -1.0), Errc::nesting);
  }
}

TEST_CASE("segment facade") {
  Recording rec = two_chain_recording();
  SegmentOptions raw_only;
  raw_only.refine_breakpoints = false;

  SUBCASE("composition and determinism") {
    auto a = segment(rec);
    auto b = segment(rec);
    CHECK(a.fine == b.fine);
    CHECK(a.coarse == b.coarse);
    CHECK(a.tree == b.tree);
    CHECK(a.ocg.origin == 0);
    CHECK(a.fine.size() == 6);
    // Interleaved chains: neither centrals nor labels repeat back-to-back.
    CHECK(a.coarse.size() == 6);
    CHECK(a.tree.duration == rec.duration());
  }

  SUBCASE("coarse raw frames are a subset of fine raw frames") {
    auto result = segment(rec, raw_only);
    std::vector<int> fine_frames = raw_frames_of(result.fine);
    for (const Breakpoint& bp : result.coarse) {
      CHECK(std::find(fine_frames.begin(), fine_frames.end(), bp.raw_frame) !=
            fine_frames.end());
    }
  }

  SUBCASE("refinement disabled keeps refined == raw") {
    auto result = segment(rec, raw_only);
    for (const Breakpoint& bp : result.fine) {
      CHECK(bp.refined_frame == bp.raw_frame);
      CHECK(bp.refined_time == bp.raw_time);
    }
  }

  SUBCASE("every fine raw frame is a connection event frame") {
    auto result = segment(rec, raw_only);
    std::set<int> event_frames;
    for (const ConnectionEvent& e : rec.connection_events()) {
      event_frames.insert(e.frame_index);
    }
    for (const Breakpoint& bp : result.fine) {
      CHECK(event_frames.contains(bp.raw_frame));
    }
  }

  SUBCASE("coarse boundaries align with fine boundaries after refinement") {
    auto result = segment(rec);
    std::set<int> fine_refined;
    for (const Breakpoint& bp : result.fine) {
      fine_refined.insert(bp.refined_frame);
    }
    for (const Breakpoint& bp : result.coarse) {
      CHECK(fine_refined.contains(bp.refined_frame));
    }
  }

  SUBCASE("empty recording") {
    Recording empty(part_nodes({"a", "b"}), 1.0);
    auto result = segment(empty);
    CHECK(result.fine.empty());
    CHECK(result.coarse.empty());
    CHECK(result.tree.duration == 0.0);
  }
}

TEST_CASE("level and rule names") {
  CHECK(to_string(BreakpointLevel::fine) == "fine");
  CHECK(to_string(BreakpointLevel::coarse) == "coarse");
  CHECK(to_string(Rule::origin_connection) == "OriginConnection");
  CHECK(to_string(Rule::central_update) == "CentralUpdate");
  CHECK(to_string(Rule::sub_assembly) == "SubAssembly");
  CHECK(to_string(Rule::coarse_merge) == "CoarseMerge");
  for (Rule rule : {Rule::origin_connection, Rule::central_update,
                    Rule::sub_assembly, Rule::coarse_merge}) {
    CHECK(rule_from_string(std::string(to_string(rule))) == rule);
  }
  for (BreakpointLevel level :
       {BreakpointLevel::fine, BreakpointLevel::coarse}) {
    CHECK(breakpoint_level_from_string(std::string(to_string(level))) ==
          level);
  }
  CHECK_ERRC(rule_from_string("Nope"), Errc::parse);
  CHECK_ERRC(breakpoint_level_from_string("medium"), Errc::parse);
}

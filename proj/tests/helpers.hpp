#ifndef TASKSEG_TESTS_HELPERS_HPP
#define TASKSEG_TESTS_HELPERS_HPP

#include <algorithm>
#include <initializer_list>
#include <string>
#include <vector>

#include "taskseg/error.hpp"
#include "taskseg/recording.hpp"

/// Asserts that `expr` throws a taskseg::Error with the given code.
#define CHECK_ERRC(expr, errc)                   \
  do {                                           \
    try {                                        \
      (void)(expr);                              \
      FAIL("expected " << taskseg::errc_name(errc)); \
    } catch (const taskseg::Error& e_) {         \
      CHECK(e_.code() == (errc));                \
    }                                            \
  } while (0)

namespace tt {

using namespace taskseg;

/// All-part registry with ids assigned in list order.
inline std::vector<ObjectNode> part_nodes(
    std::initializer_list<const char*> names) {
  std::vector<ObjectNode> nodes;
  for (const char* name : names) {
    nodes.push_back({static_cast<ObjectId>(nodes.size()), name,
                     Category::part});
  }
  return nodes;
}

inline Edge pp(ObjectId a, ObjectId b) {
  return {std::min(a, b), std::max(a, b), EdgeKind::part_part};
}

inline Edge tp(ObjectId a, ObjectId b) {
  return {std::min(a, b), std::max(a, b), EdgeKind::tool_part};
}

/// Appends one frame; edge/grasp lists may be given in any order.
inline void add_frame(Recording& rec, double t, std::vector<Edge> edges = {},
                      std::vector<ObjectId> left = {},
                      std::vector<ObjectId> right = {}) {
  FrameRecord frame;
  frame.index = rec.frame_count();
  frame.timestamp = t;
  std::sort(edges.begin(), edges.end());
  frame.edges = std::move(edges);
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  frame.grasp[0] = std::move(left);
  frame.grasp[1] = std::move(right);
  rec.append_frame(std::move(frame));
}

}  // namespace tt

#endif  // TASKSEG_TESTS_HELPERS_HPP

#include "taskseg/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "taskseg/error.hpp"

namespace taskseg {

using ordered_json = nlohmann::ordered_json;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open \"" + path + "\" for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot open \"" + path + "\" for writing");
  return out;
}

void check_sink(std::ostream& out) {
  if (!out) throw Error(Errc::io, "write failure");
}

/// Shortest round-trip decimal form (reuses the JSON number printer).
std::string fmt_double(double v) { return ordered_json(v).dump(); }

ordered_json parse_line(const std::string& line, long line_no) {
  ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    throw Error(Errc::parse, "malformed document line", line_no);
  }
  return j;
}

const ordered_json& field(const ordered_json& j, const char* key,
                          long line_no) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(Errc::parse, std::string("missing field \"") + key + "\"",
                line_no);
  }
  return j.at(key);
}

double number_field(const ordered_json& j, const char* key, long line_no) {
  const ordered_json& v = field(j, key, line_no);
  if (!v.is_number()) {
    throw Error(Errc::parse, std::string("field \"") + key + "\" must be a number",
                line_no);
  }
  return v.get<double>();
}

int int_field(const ordered_json& j, const char* key, long line_no) {
  const ordered_json& v = field(j, key, line_no);
  if (!v.is_number_integer()) {
    throw Error(Errc::parse,
                std::string("field \"") + key + "\" must be an integer",
                line_no);
  }
  return v.get<int>();
}

ordered_json pose_json(const Pose6DoF& pose) {
  return ordered_json{pose.position[0], pose.position[1], pose.position[2],
                      pose.rotation[0], pose.rotation[1], pose.rotation[2],
                      pose.rotation[3]};
}

Pose6DoF pose_from(const ordered_json& a, std::size_t offset, long line_no) {
  Pose6DoF pose;
  for (int k = 0; k < 7; ++k) {
    if (!a[offset + k].is_number()) {
      throw Error(Errc::parse, "pose entries must be numbers", line_no);
    }
  }
  pose.position = {a[offset].get<double>(), a[offset + 1].get<double>(),
                   a[offset + 2].get<double>()};
  pose.rotation = {a[offset + 3].get<double>(), a[offset + 4].get<double>(),
                   a[offset + 5].get<double>(), a[offset + 6].get<double>()};
  return pose;
}

EdgeKind edge_kind_from(const std::string& tag, long line_no) {
  if (tag == "pp") return EdgeKind::part_part;
  if (tag == "tp") return EdgeKind::tool_part;
  throw Error(Errc::parse, "unknown edge kind \"" + tag + "\"", line_no);
}

std::vector<ObjectId> id_list_field(const ordered_json& j, const char* key,
                                    int node_count, long line_no, int frame) {
  const ordered_json& v = field(j, key, line_no);
  if (!v.is_array()) {
    throw Error(Errc::parse,
                std::string("field \"") + key + "\" must be an array", line_no);
  }
  std::vector<ObjectId> ids;
  for (const auto& e : v) {
    if (!e.is_number_integer()) {
      throw Error(Errc::parse, "grasp lists must contain integer ids", line_no);
    }
    const int id = e.get<int>();
    if (id < 0 || id >= node_count) {
      throw Error(Errc::validation,
                  "object id " + std::to_string(id) + " out of range",
                  line_no, frame);
    }
    ids.push_back(id);
  }
  return ids;
}

std::optional<std::vector<Pose6DoF>> joints_field(const ordered_json& j,
                                                  const char* key,
                                                  long line_no) {
  if (!j.contains(key)) return std::nullopt;
  const ordered_json& v = j.at(key);
  if (!v.is_array() || v.size() != static_cast<std::size_t>(kHandJointCount)) {
    throw Error(Errc::parse,
                std::string("field \"") + key + "\" must list " +
                    std::to_string(kHandJointCount) + " joint poses",
                line_no);
  }
  std::vector<Pose6DoF> joints;
  for (const auto& entry : v) {
    if (!entry.is_array() || entry.size() != 7) {
      throw Error(Errc::parse, "joint poses must have 7 numbers", line_no);
    }
    joints.push_back(pose_from(entry, 0, line_no));
  }
  return joints;
}

}  // namespace

void write_recording(std::ostream& out, const Recording& rec) {
  ordered_json header;
  header["format"] = kFormatVersion;
  header["frame_rate"] = rec.frame_rate();
  ordered_json nodes = ordered_json::array();
  for (const ObjectNode& node : rec.nodes()) {
    nodes.push_back({node.id, node.name, to_string(node.category)});
  }
  header["nodes"] = std::move(nodes);
  out << header.dump() << '\n';

  for (const FrameRecord& frame : rec.frames()) {
    ordered_json j;
    j["frame"] = frame.index;
    j["t"] = frame.timestamp;
    j["left"] = frame.grasp[0];
    j["right"] = frame.grasp[1];
    ordered_json edges = ordered_json::array();
    for (const Edge& e : frame.edges) {
      edges.push_back({e.i, e.j, to_string(e.kind)});
    }
    j["edges"] = std::move(edges);
    if (!frame.object_poses.empty()) {
      ordered_json poses = ordered_json::array();
      for (const auto& [id, pose] : frame.object_poses) {
        poses.push_back({id, pose.position[0], pose.position[1],
                         pose.position[2], pose.rotation[0], pose.rotation[1],
                         pose.rotation[2], pose.rotation[3]});
      }
      j["poses"] = std::move(poses);
    }
    for (const auto& [key, hand] :
         {std::pair{"joints_left", &frame.left},
          std::pair{"joints_right", &frame.right}}) {
      if (!hand->joints) continue;
      ordered_json joints = ordered_json::array();
      for (const Pose6DoF& pose : *hand->joints) joints.push_back(pose_json(pose));
      j[key] = std::move(joints);
    }
    out << j.dump() << '\n';
  }
  check_sink(out);
}

void write_recording_file(const std::string& path, const Recording& rec) {
  auto out = open_output(path);
  write_recording(out, rec);
}

Recording read_recording(std::istream& in) {
  std::string line;
  long line_no = 0;

  // Header
  ordered_json header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    header = parse_line(line, line_no);
    break;
  }
  if (header.is_null()) {
    throw Error(Errc::parse, "empty stream: missing header line", line_no);
  }
  const ordered_json& fmt = field(header, "format", line_no);
  if (!fmt.is_string() || fmt.get<std::string>() != kFormatVersion) {
    throw Error(Errc::version,
                "unsupported format \"" +
                    (fmt.is_string() ? fmt.get<std::string>() : fmt.dump()) +
                    "\", expected \"" + std::string(kFormatVersion) + "\"",
                line_no);
  }
  const double frame_rate = number_field(header, "frame_rate", line_no);
  const ordered_json& nodes_json = field(header, "nodes", line_no);
  if (!nodes_json.is_array()) {
    throw Error(Errc::parse, "field \"nodes\" must be an array", line_no);
  }
  std::vector<ObjectNode> nodes;
  for (const auto& entry : nodes_json) {
    if (!entry.is_array() || entry.size() != 3 ||
        !entry[0].is_number_integer() || !entry[1].is_string() ||
        !entry[2].is_string()) {
      throw Error(Errc::parse, "node entries must be [id, name, category]",
                  line_no);
    }
    if (entry[0].get<int>() != static_cast<int>(nodes.size())) {
      throw Error(Errc::validation,
                  "node ids must be 0..N-1 in registry order", line_no);
    }
    const std::string cat = entry[2].get<std::string>();
    if (cat != "part" && cat != "tool") {
      throw Error(Errc::parse, "unknown category \"" + cat + "\"", line_no);
    }
    nodes.push_back({entry[0].get<int>(), entry[1].get<std::string>(),
                     cat == "part" ? Category::part : Category::tool});
  }

  try {
    Recording rec(std::move(nodes), frame_rate);
    const int n = rec.node_count();

    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const ordered_json j = parse_line(line, line_no);

      FrameRecord frame;
      frame.index = int_field(j, "frame", line_no);
      frame.timestamp = number_field(j, "t", line_no);
      frame.grasp[0] = id_list_field(j, "left", n, line_no, frame.index);
      frame.grasp[1] = id_list_field(j, "right", n, line_no, frame.index);

      const ordered_json& edges = field(j, "edges", line_no);
      if (!edges.is_array()) {
        throw Error(Errc::parse, "field \"edges\" must be an array", line_no);
      }
      for (const auto& entry : edges) {
        if (!entry.is_array() || entry.size() != 3 ||
            !entry[0].is_number_integer() || !entry[1].is_number_integer() ||
            !entry[2].is_string()) {
          throw Error(Errc::parse, "edge entries must be [i, j, kind]",
                      line_no);
        }
        Edge e;
        e.i = entry[0].get<int>();
        e.j = entry[1].get<int>();
        e.kind = edge_kind_from(entry[2].get<std::string>(), line_no);
        if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) {
          throw Error(Errc::validation,
                      "edge (" + std::to_string(e.i) + "," +
                          std::to_string(e.j) + ") references unknown nodes",
                      line_no, frame.index);
        }
        frame.edges.push_back(e);
      }

      if (j.contains("poses")) {
        const ordered_json& poses = j.at("poses");
        if (!poses.is_array()) {
          throw Error(Errc::parse, "field \"poses\" must be an array", line_no);
        }
        for (const auto& entry : poses) {
          if (!entry.is_array() || entry.size() != 8 ||
              !entry[0].is_number_integer()) {
            throw Error(Errc::parse,
                        "pose entries must be [id, x, y, z, qx, qy, qz, qw]",
                        line_no);
          }
          const int id = entry[0].get<int>();
          if (id < 0 || id >= n) {
            throw Error(Errc::validation,
                        "pose id " + std::to_string(id) + " out of range",
                        line_no, frame.index);
          }
          frame.object_poses[id] = pose_from(entry, 1, line_no);
        }
      }
      frame.left.joints = joints_field(j, "joints_left", line_no);
      frame.right.joints = joints_field(j, "joints_right", line_no);

      rec.append_frame(std::move(frame));
    }
    return rec;
  } catch (const Error& e) {
    if (e.line() >= 0) throw;
    throw e.at_line(line_no);
  }
}

Recording read_recording_file(const std::string& path) {
  auto in = open_input(path);
  return read_recording(in);
}

namespace {

constexpr std::string_view kAnnotationHeader =
    "participant_id,time_s,group_tag,level";

void check_csv_field(const std::string& value, long line_no) {
  if (value.find_first_of(",\r\n\"") != std::string::npos) {
    throw Error(Errc::validation,
                "annotation fields must not contain commas, quotes, or "
                "newlines",
                line_no);
  }
}

}  // namespace

std::vector<AnnotationRow> read_annotations(std::istream& in) {
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) {
    throw Error(Errc::parse, "empty stream: missing CSV header", 1);
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kAnnotationHeader) {
    throw Error(Errc::parse,
                "expected header \"" + std::string(kAnnotationHeader) + "\"",
                line_no);
  }

  std::vector<AnnotationRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(',', start);
      fields.push_back(line.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (fields.size() != 4) {
      throw Error(Errc::parse, "expected 4 comma-separated fields", line_no);
    }

    AnnotationRow row;
    row.participant_id = fields[0];
    if (row.participant_id.empty()) {
      throw Error(Errc::parse, "participant_id must not be empty", line_no);
    }
    try {
      std::size_t consumed = 0;
      row.time_s = std::stod(fields[1], &consumed);
      if (consumed != fields[1].size()) throw std::invalid_argument("tail");
    } catch (const std::exception&) {
      throw Error(Errc::parse, "time_s \"" + fields[1] + "\" is not a number",
                  line_no);
    }
    if (!std::isfinite(row.time_s) || row.time_s < 0.0) {
      throw Error(Errc::validation, "time_s must be finite and non-negative",
                  line_no);
    }
    row.group_tag = fields[2];
    try {
      row.level = breakpoint_level_from_string(fields[3]);
    } catch (const Error& e) {
      throw e.at_line(line_no);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<AnnotationRow> read_annotations_file(const std::string& path) {
  auto in = open_input(path);
  return read_annotations(in);
}

void write_annotations(std::ostream& out,
                       const std::vector<AnnotationRow>& rows) {
  out << kAnnotationHeader << '\n';
  for (const AnnotationRow& row : rows) {
    check_csv_field(row.participant_id, -1);
    check_csv_field(row.group_tag, -1);
    if (!std::isfinite(row.time_s) || row.time_s < 0.0) {
      throw Error(Errc::validation, "time_s must be finite and non-negative");
    }
    out << row.participant_id << ',' << fmt_double(row.time_s) << ','
        << row.group_tag << ',' << to_string(row.level) << '\n';
  }
  check_sink(out);
}

void write_annotations_file(const std::string& path,
                            const std::vector<AnnotationRow>& rows) {
  auto out = open_output(path);
  write_annotations(out, rows);
}

void write_breakpoints(std::ostream& out,
                       const std::vector<Breakpoint>& bps) {
  for (const Breakpoint& bp : bps) {
    ordered_json j;
    j["level"] = to_string(bp.level);
    j["rule"] = to_string(bp.rule);
    j["raw_frame"] = bp.raw_frame;
    j["raw_time"] = bp.raw_time;
    j["refined_frame"] = bp.refined_frame;
    j["refined_time"] = bp.refined_time;
    j["objects"] = bp.objects;
    out << j.dump() << '\n';
  }
  check_sink(out);
}

void write_breakpoints_file(const std::string& path,
                            const std::vector<Breakpoint>& bps) {
  auto out = open_output(path);
  write_breakpoints(out, bps);
}

std::vector<Breakpoint> read_breakpoints(std::istream& in) {
  std::vector<Breakpoint> bps;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const ordered_json j = parse_line(line, line_no);

    Breakpoint bp;
    const ordered_json& level = field(j, "level", line_no);
    const ordered_json& rule = field(j, "rule", line_no);
    if (!level.is_string() || !rule.is_string()) {
      throw Error(Errc::parse, "level and rule must be strings", line_no);
    }
    try {
      bp.level = breakpoint_level_from_string(level.get<std::string>());
      bp.rule = rule_from_string(rule.get<std::string>());
    } catch (const Error& e) {
      throw e.at_line(line_no);
    }
    bp.raw_frame = int_field(j, "raw_frame", line_no);
    bp.raw_time = number_field(j, "raw_time", line_no);
    bp.refined_frame = int_field(j, "refined_frame", line_no);
    bp.refined_time = number_field(j, "refined_time", line_no);
    const ordered_json& objects = field(j, "objects", line_no);
    if (!objects.is_array()) {
      throw Error(Errc::parse, "field \"objects\" must be an array", line_no);
    }
    for (const auto& e : objects) {
      if (!e.is_number_integer()) {
        throw Error(Errc::parse, "objects must be integer ids", line_no);
      }
      bp.objects.insert(e.get<int>());
    }
    bps.push_back(std::move(bp));
  }
  return bps;
}

std::vector<Breakpoint> read_breakpoints_file(const std::string& path) {
  auto in = open_input(path);
  return read_breakpoints(in);
}

void write_eval_report(std::ostream& out, const EvalReport& report) {
  ordered_json j;
  j["n_gt"] = report.n_gt;
  j["n_pred"] = report.n_pred;
  ordered_json matches = ordered_json::array();
  for (const Match& m : report.matches) {
    matches.push_back({m.gt_time, m.pred_time, m.error});
  }
  j["matches"] = std::move(matches);
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["mae"] = report.mae ? ordered_json(*report.mae) : ordered_json(nullptr);
  j["rmse"] = report.rmse ? ordered_json(*report.rmse) : ordered_json(nullptr);
  out << j.dump() << '\n';
  check_sink(out);
}

void write_eval_report_file(const std::string& path,
                            const EvalReport& report) {
  auto out = open_output(path);
  write_eval_report(out, report);
}

EvalReport read_eval_report(std::istream& in) {
  std::string text(std::istreambuf_iterator<char>(in), {});
  const ordered_json j = parse_line(text, 1);
  EvalReport report;
  report.n_gt = int_field(j, "n_gt", 1);
  report.n_pred = int_field(j, "n_pred", 1);
  const ordered_json& matches = field(j, "matches", 1);
  if (!matches.is_array()) {
    throw Error(Errc::parse, "field \"matches\" must be an array", 1);
  }
  for (const auto& entry : matches) {
    if (!entry.is_array() || entry.size() != 3 || !entry[0].is_number() ||
        !entry[1].is_number() || !entry[2].is_number()) {
      throw Error(Errc::parse,
                  "match entries must be [gt_time, pred_time, error]", 1);
    }
    report.matches.push_back({entry[0].get<double>(), entry[1].get<double>(),
                              entry[2].get<double>()});
  }
  report.precision = number_field(j, "precision", 1);
  report.recall = number_field(j, "recall", 1);
  report.f1 = number_field(j, "f1", 1);
  for (const auto& [key, slot] : {std::pair{"mae", &report.mae},
                                  std::pair{"rmse", &report.rmse}}) {
    const ordered_json& v = field(j, key, 1);
    if (v.is_null()) continue;
    if (!v.is_number()) {
      throw Error(Errc::parse,
                  std::string("field \"") + key + "\" must be a number or null",
                  1);
    }
    *slot = v.get<double>();
  }
  return report;
}

EvalReport read_eval_report_file(const std::string& path) {
  auto in = open_input(path);
  return read_eval_report(in);
}

}  // namespace taskseg

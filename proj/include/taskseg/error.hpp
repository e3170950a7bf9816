#ifndef TASKSEG_ERROR_HPP
#define TASKSEG_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace taskseg {

enum class Errc {
  duplicate_node,
  empty_registry,
  time_order,
  matrix_shape,
  index_range,
  version,
  parse,
  validation,
  degenerate_graph,
  unknown_node,
  strict_connectivity,
  registry_mismatch,
  level_mix,
  nesting,
  plan,
  io,
};

std::string_view errc_name(Errc c);

/// Library-wide exception. `line` is 1-based for file errors, `frame` is a
/// frame index; both are -1 when not applicable.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, long line = -1, long frame = -1)
      : std::runtime_error(format(code, message, line, frame)),
        code_(code),
        message_(std::move(message)),
        line_(line),
        frame_(frame) {}

  Errc code() const { return code_; }
  /// Unformatted description, without the code/line/frame prefix.
  const std::string& message() const { return message_; }
  long line() const { return line_; }
  long frame() const { return frame_; }

  /// Copy of this error with the line number attached (used by parsers).
  Error at_line(long line) const { return {code_, message_, line, frame_}; }

 private:
  static std::string format(Errc code, const std::string& message, long line,
                            long frame) {
    std::string out{errc_name(code)};
    if (line >= 0) out += " at line " + std::to_string(line);
    if (frame >= 0) out += " at frame " + std::to_string(frame);
    out += ": " + message;
    return out;
  }

  Errc code_;
  std::string message_;
  long line_;
  long frame_;
};

inline std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::duplicate_node: return "DuplicateNode";
    case Errc::empty_registry: return "EmptyRegistry";
    case Errc::time_order: return "TimeOrder";
    case Errc::matrix_shape: return "MatrixShape";
    case Errc::index_range: return "IndexRange";
    case Errc::version: return "VersionError";
    case Errc::parse: return "ParseError";
    case Errc::validation: return "ValidationError";
    case Errc::degenerate_graph: return "DegenerateGraph";
    case Errc::unknown_node: return "UnknownNode";
    case Errc::strict_connectivity: return "StrictConnectivity";
    case Errc::registry_mismatch: return "RegistryMismatch";
    case Errc::level_mix: return "LevelMix";
    case Errc::nesting: return "NestingError";
    case Errc::plan: return "PlanError";
    case Errc::io: return "IoError";
  }
  return "Error";
}

}  // namespace taskseg

#endif  // TASKSEG_ERROR_HPP

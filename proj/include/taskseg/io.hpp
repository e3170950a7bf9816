#ifndef TASKSEG_IO_HPP
#define TASKSEG_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "taskseg/eval.hpp"
#include "taskseg/recording.hpp"
#include "taskseg/segmenter.hpp"

namespace taskseg {

inline constexpr std::string_view kFormatVersion = "taskseg/1";

/// Recording stream: one header line ({"format","frame_rate","nodes"})
/// followed by one line per frame. Output is byte-deterministic: equal
/// recordings serialize to equal bytes.
void write_recording(std::ostream& out, const Recording& rec);
void write_recording_file(const std::string& path, const Recording& rec);

Recording read_recording(std::istream& in);
Recording read_recording_file(const std::string& path);

/// Annotation CSV with header `participant_id,time_s,group_tag,level`.
std::vector<AnnotationRow> read_annotations(std::istream& in);
std::vector<AnnotationRow> read_annotations_file(const std::string& path);
void write_annotations(std::ostream& out,
                       const std::vector<AnnotationRow>& rows);
void write_annotations_file(const std::string& path,
                            const std::vector<AnnotationRow>& rows);

/// Breakpoint document: one object per line with the Breakpoint fields
/// (level, rule, raw_frame, raw_time, refined_frame, refined_time, objects).
void write_breakpoints(std::ostream& out, const std::vector<Breakpoint>& bps);
void write_breakpoints_file(const std::string& path,
                            const std::vector<Breakpoint>& bps);
std::vector<Breakpoint> read_breakpoints(std::istream& in);
std::vector<Breakpoint> read_breakpoints_file(const std::string& path);

/// Eval report document: a single object with the EvalReport fields
/// (n_gt, n_pred, matches, precision, recall, f1, mae, rmse).
void write_eval_report(std::ostream& out, const EvalReport& report);
void write_eval_report_file(const std::string& path, const EvalReport& report);
EvalReport read_eval_report(std::istream& in);
EvalReport read_eval_report_file(const std::string& path);

}  // namespace taskseg

#endif  // TASKSEG_IO_HPP

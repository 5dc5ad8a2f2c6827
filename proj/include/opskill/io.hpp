#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "opskill/eval.hpp"
#include "opskill/metrics.hpp"
#include "opskill/types.hpp"

namespace opskill {

/// Parse failure with the 1-based line it occurred on.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

/// Pull parser for the line-delimited detection format. Emits dense frame
/// groups from frame 0 through the last frame that carries a record; frames
/// without records come out as empty groups. Record order within a frame is
/// preserved. With with_confidence=false the conf field is optional and
/// ignored (ground-truth box labels).
class DetectionStreamParser {
 public:
  explicit DetectionStreamParser(std::istream& in, bool with_confidence = true);

  std::optional<FrameGroup> next();

 private:
  std::optional<Detection> read_record();

  std::istream& in_;
  bool with_confidence_;
  std::size_t line_no_ = 0;
  FrameIndex last_record_frame_ = -1;
  FrameIndex next_frame_ = 0;
  std::optional<Detection> pending_;
  bool primed_ = false;
};

std::vector<FrameGroup> parse_detection_stream(std::istream& in);
std::vector<FrameGroup> parse_box_labels(std::istream& in);
void write_detection_stream(std::ostream& out,
                            const std::vector<FrameGroup>& groups);
void write_box_labels(std::ostream& out, const std::vector<FrameGroup>& groups);

/// CSV with header `class,start_frame,end_frame`. Events come back sorted by
/// (side, start); same-side overlaps and start > end are errors.
std::vector<TimedEvent> parse_event_labels(std::istream& in);
void write_event_labels(std::ostream& out, const std::vector<TimedEvent>& events);

/// key=value lines: fps, width, height.
SessionMeta parse_session_meta(std::istream& in);
void write_session_meta(std::ostream& out, const SessionMeta& meta);

/// fps line followed by one record per frame per side:
/// `frame side payload provenance [x y w h]`.
UsageTimeline parse_usage_timeline(std::istream& in);
void write_usage_timeline(std::ostream& out, const UsageTimeline& timeline);
void write_usage_record(std::ostream& out, const UsageState& state);

/// key=value document; unavailable metrics read/write as `none`. Unknown
/// keys are skipped on parse, so config echoes survive a round trip.
SessionReport parse_session_report(std::istream& in);
void write_session_report(
    std::ostream& out, const SessionReport& report,
    const std::vector<std::pair<std::string, std::string>>& extras = {});

void write_eval_report(std::ostream& out, const EvalReport& report);

}  // namespace opskill

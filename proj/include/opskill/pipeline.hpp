#pragma once

#include <deque>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "opskill/interaction.hpp"
#include "opskill/metrics.hpp"
#include "opskill/temporal.hpp"
#include "opskill/types.hpp"

namespace opskill {

/// Every stage threshold in one place. Defaults follow the published values
/// where they exist (15-frame window, 25 px/s static threshold, 30 fps via
/// SessionMeta) and common detector practice where they do not.
struct PipelineConfig {
  double nms_iou = 0.45;
  double cross_nms_iou = 0.5;
  double s1_overlap = 0.25;
  int smooth_window = 15;
  double fast_gate = 300.0;
  int max_gap = 15;
  double static_thresh = 25.0;

  /// Throws std::invalid_argument on an out-of-range value.
  void validate() const;

  /// key/value echo of every threshold, appended to written reports.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Incremental run-length encoder from per-frame states to TimedEvents.
/// Absent frames break runs without emitting an event.
class EventBuilder {
 public:
  void add(const UsageState& state);
  std::vector<TimedEvent> finish();

 private:
  std::vector<TimedEvent> events_;
  Payload run_payload_ = Payload::Absent;
  FrameIndex run_start_ = 0;
  FrameIndex last_frame_ = -1;
  Side side_ = Side::Right;
  bool open_ = false;
};

/// Streaming session processor: suppression -> resolution -> trajectory ->
/// smoothing -> metrics, one dense frame group at a time.
///
/// Frames are buffered only until their trajectory samples cannot change
/// anymore (gap interpolation looks at most max_gap frames ahead), then
/// flushed in order through the sink. Peak buffering is max_gap + 2 frames
/// regardless of session length.
class SessionRunner {
 public:
  /// Called once per flushed frame with the raw and smoothed states of both
  /// sides (right first).
  using StateSink = std::function<void(const UsageState& raw,
                                       const UsageState& smoothed)>;

  SessionRunner(const SessionMeta& meta, const PipelineConfig& cfg,
                StateSink sink = {});

  /// Groups must arrive with consecutive frame indices starting at 0.
  void push(const FrameGroup& group);

  /// Flushes everything still pending and builds the session report.
  SessionReport finish();

  std::size_t peak_pending() const { return peak_pending_; }

 private:
  struct Pending {
    FrameIndex frame = 0;
    UsageState raw[kSideCount];
    std::optional<Point> pos[kSideCount];
    int segment[kSideCount] = {-1, -1};
    std::optional<double> forceps_ar;
  };

  struct SideState {
    // trajectory finalization
    FrameIndex last_defined = -1;
    int segment_count = 0;
    FrameIndex frontier = -1;  // samples <= frontier are final

    // previous flushed sample and velocity (for pair-wise accumulators)
    std::optional<Point> prev_pos;
    int prev_segment = -1;
    bool prev_v_defined = false;
    bool prev_moving = false;

    // smoothing
    std::deque<Payload> window;
    std::array<int, 4> votes{};
    std::optional<Payload> prev_smoothed;

    // cumulative metrics over flushed frames
    double cum_path = 0.0;
    std::int64_t cum_crossings = 0;
    std::int64_t absent_frames = 0;

    // snapshots at the procedure bounds
    double start_path = 0.0, end_path = 0.0;
    std::int64_t start_crossings = 0, end_crossings = 0;
  };

  Pending* pending_at(FrameIndex frame);
  void flush_ready(bool eof);
  void flush_front(bool eof);

  SessionMeta meta_;
  PipelineConfig cfg_;
  StateSink sink_;
  ResolveDiagnostics diag_;

  std::deque<Pending> pending_;
  FrameIndex next_push_ = 0;
  FrameIndex next_flush_ = 0;
  std::size_t peak_pending_ = 0;

  SideState side_[kSideCount];

  // session-level bounds and forceps accumulators; aspect ratios only ever
  // accumulate on tool-usage frames, so they need no bound snapshots
  bool started_ = false;
  FrameIndex bound_start_ = 0, bound_end_ = 0;
  std::int64_t ar_n_ = 0;
  double ar_sum_ = 0.0, ar_sum_sq_ = 0.0;

  bool finished_ = false;
};

/// Everything a session run produces, collected in memory.
struct SessionResult {
  UsageTimeline raw;
  UsageTimeline smoothed;
  std::vector<TimedEvent> events;
  SessionReport report;
};

/// Convenience wrapper around SessionRunner for whole-session inputs.
SessionResult run_session(const std::vector<FrameGroup>& stream,
                          const SessionMeta& meta, const PipelineConfig& cfg);

/// Run-length events of a smoothed timeline (right side first).
std::vector<TimedEvent> timeline_events(const UsageTimeline& timeline);

}  // namespace opskill

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "opskill/interaction.hpp"
#include "opskill/temporal.hpp"
#include "opskill/types.hpp"

namespace opskill {

using FrameBounds = std::pair<FrameIndex, FrameIndex>;

/// Motion metrics plus pipeline diagnostics for one session. Metrics that
/// cannot be computed (no tool usage, forceps never used) stay unset.
struct SessionReport {
  std::optional<FrameIndex> start_frame;
  std::optional<FrameIndex> end_frame;
  std::optional<double> duration_s;
  std::optional<double> path_length_px_right;
  std::optional<double> path_length_px_left;
  std::optional<std::int64_t> movement_count_right;
  std::optional<std::int64_t> movement_count_left;
  std::optional<double> forceps_ar_mean;
  std::optional<double> forceps_ar_std;

  std::int64_t frames = 0;
  std::int64_t states_direct = 0;
  std::int64_t states_scenario1 = 0;
  std::int64_t states_scenario2 = 0;
  std::int64_t states_absent = 0;
  std::int64_t absent_frames_right = 0;
  std::int64_t absent_frames_left = 0;
  /// (Scenario1 + Scenario2) / resolved states; unset when nothing resolved.
  std::optional<double> fallback_rate;
};

/// First and last frame where either side's smoothed payload is a tool.
std::optional<FrameBounds> procedure_bounds(
    const std::vector<UsageState>& right, const std::vector<UsageState>& left);

/// (end - start + 1) / fps
double duration_seconds(FrameBounds bounds, const SessionMeta& meta);

/// Sum of center-to-center distances over consecutive defined frame pairs of
/// the same segment within bounds. Cross-segment jumps contribute nothing.
double path_length(const Trajectory& traj, FrameBounds bounds);

/// Threshold crossings of the speed series divided by two, floored.
///
/// A frame is static when v <= static_thresh; a crossing is a static/moving
/// flip between adjacent defined samples within bounds.
/// Throws std::invalid_argument when static_thresh <= 0.
std::int64_t count_movements(const std::vector<VelocitySample>& vel,
                             FrameBounds bounds, double static_thresh);

/// Mean and population standard deviation of the forceps localization box
/// aspect ratio over frames within bounds where either side's smoothed
/// payload is Forceps and a forceps box exists (highest-confidence one when
/// several). Unset when no frame qualifies.
std::optional<std::pair<double, double>> forceps_grip_stats(
    const std::vector<UsageState>& right, const std::vector<UsageState>& left,
    const std::vector<FrameGroup>& loc_groups, FrameBounds bounds);

/// Aggregates all metrics and diagnostics for one fully processed session.
SessionReport compute_report(const std::vector<UsageState>& smoothed_right,
                             const std::vector<UsageState>& smoothed_left,
                             const Trajectory& traj_right,
                             const Trajectory& traj_left,
                             const std::vector<VelocitySample>& vel_right,
                             const std::vector<VelocitySample>& vel_left,
                             const std::vector<FrameGroup>& loc_groups,
                             const SessionMeta& meta,
                             const ResolveDiagnostics& diag,
                             double static_thresh);

}  // namespace opskill

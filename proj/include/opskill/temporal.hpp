#pragma once

#include <optional>
#include <vector>

#include "opskill/geometry.hpp"
#include "opskill/types.hpp"

namespace opskill {

struct TrajectorySample {
  std::optional<Point> pos;
  bool interpolated = false;
  int segment = -1;  ///< id of the maximal defined run, -1 when undefined
};

/// Per-frame hand center track for one side, dense over the session.
struct Trajectory {
  Side side = Side::Right;
  std::vector<TrajectorySample> samples;
  int segment_count = 0;
};

/// px/s speed at one frame; frame index is the position in the sequence.
struct VelocitySample {
  double v = 0.0;
  bool defined = false;
};

/// Extracts the side's hand-class center per frame (highest confidence when
/// several survive suppression, ties by input order). Detection gaps of at
/// most max_gap frames are filled by linear interpolation and flagged;
/// longer gaps split the track into segments.
Trajectory build_trajectory(const std::vector<FrameGroup>& loc_groups,
                            Side side, int max_gap);

/// Speed per frame from centered differences on x and y, v = sqrt(vx^2+vy^2).
/// Segment endpoints use one-sided differences; single-sample segments stay
/// undefined.
std::vector<VelocitySample> velocity(const Trajectory& traj, double fps);

/// Majority-vote payload smoothing for one side, sequential over frames.
///
/// The vote window is the current frame plus the window-1 preceding raw
/// states, with Absent frames excluded from the vote. While the hand moves
/// faster than fast_gate the previous smoothed decision is frozen. Vote ties
/// and all-Absent windows also retain the previous decision; before any
/// decision exists the raw state passes through. Boxes and provenance are
/// never altered.
/// Throws std::invalid_argument when window < 1.
std::vector<UsageState> smooth_usage(const std::vector<UsageState>& states,
                                     const std::vector<VelocitySample>& vel,
                                     int window, double fast_gate);

}  // namespace opskill

#include "opskill/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "opskill/geometry.hpp"

namespace opskill {

std::optional<FrameBounds> procedure_bounds(
    const std::vector<UsageState>& right,
    const std::vector<UsageState>& left) {
  std::optional<FrameIndex> first, last;
  const std::size_t n = std::max(right.size(), left.size());
  for (std::size_t i = 0; i < n; ++i) {
    const bool tool =
        (i < right.size() && is_tool_payload(right[i].payload)) ||
        (i < left.size() && is_tool_payload(left[i].payload));
    if (!tool) continue;
    const FrameIndex frame =
        i < right.size() ? right[i].frame : left[i].frame;
    if (!first) first = frame;
    last = frame;
  }
  if (!first) return std::nullopt;
  return FrameBounds{*first, *last};
}

double duration_seconds(FrameBounds bounds, const SessionMeta& meta) {
  return static_cast<double>(bounds.second - bounds.first + 1) / meta.fps;
}

double path_length(const Trajectory& traj, FrameBounds bounds) {
  double total = 0.0;
  const auto& s = traj.samples;
  const std::size_t lo = static_cast<std::size_t>(std::max<FrameIndex>(bounds.first, 0));
  for (std::size_t i = lo; i + 1 < s.size(); ++i) {
    if (static_cast<FrameIndex>(i + 1) > bounds.second) break;
    if (!s[i].pos || !s[i + 1].pos || s[i].segment != s[i + 1].segment)
      continue;
    const double dx = s[i + 1].pos->x - s[i].pos->x;
    const double dy = s[i + 1].pos->y - s[i].pos->y;
    total += std::sqrt(dx * dx + dy * dy);
  }
  return total;
}

std::int64_t count_movements(const std::vector<VelocitySample>& vel,
                             FrameBounds bounds, double static_thresh) {
  if (!(static_thresh > 0.0)) {
    throw std::invalid_argument("static_thresh must be > 0");
  }
  std::int64_t crossings = 0;
  const std::size_t lo = static_cast<std::size_t>(std::max<FrameIndex>(bounds.first, 0));
  for (std::size_t i = lo; i + 1 < vel.size(); ++i) {
    if (static_cast<FrameIndex>(i + 1) > bounds.second) break;
    if (!vel[i].defined || !vel[i + 1].defined) continue;
    // At the threshold a frame counts as static.
    const bool moving_a = vel[i].v > static_thresh;
    const bool moving_b = vel[i + 1].v > static_thresh;
    if (moving_a != moving_b) ++crossings;
  }
  return crossings / 2;
}

std::optional<std::pair<double, double>> forceps_grip_stats(
    const std::vector<UsageState>& right, const std::vector<UsageState>& left,
    const std::vector<FrameGroup>& loc_groups, FrameBounds bounds) {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < loc_groups.size(); ++i) {
    const FrameIndex frame = loc_groups[i].frame;
    if (frame < bounds.first || frame > bounds.second) continue;
    const bool forceps_used =
        (i < right.size() && right[i].payload == Payload::Forceps) ||
        (i < left.size() && left[i].payload == Payload::Forceps);
    if (!forceps_used) continue;

    const Detection* best = nullptr;
    for (const Detection& d : loc_groups[i].dets) {
      const auto* l = std::get_if<LocClass>(&d.cls);
      if (!l || *l != LocClass::Forceps) continue;
      if (!best || d.confidence > best->confidence) best = &d;
    }
    if (!best) continue;
    const double ar = aspect_ratio(best->box);
    sum += ar;
    sum_sq += ar * ar;
    ++n;
  }
  if (n == 0) return std::nullopt;
  const double mean = sum / static_cast<double>(n);
  const double var =
      std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
  return std::pair<double, double>{mean, std::sqrt(var)};
}

SessionReport compute_report(const std::vector<UsageState>& smoothed_right,
                             const std::vector<UsageState>& smoothed_left,
                             const Trajectory& traj_right,
                             const Trajectory& traj_left,
                             const std::vector<VelocitySample>& vel_right,
                             const std::vector<VelocitySample>& vel_left,
                             const std::vector<FrameGroup>& loc_groups,
                             const SessionMeta& meta,
                             const ResolveDiagnostics& diag,
                             double static_thresh) {
  SessionReport rep;
  rep.frames = static_cast<std::int64_t>(
      std::max(smoothed_right.size(), smoothed_left.size()));
  rep.states_direct = diag.direct;
  rep.states_scenario1 = diag.scenario1;
  rep.states_scenario2 = diag.scenario2;
  rep.states_absent = diag.absent;
  for (const UsageState& s : smoothed_right) {
    if (s.provenance == Provenance::Absent) ++rep.absent_frames_right;
  }
  for (const UsageState& s : smoothed_left) {
    if (s.provenance == Provenance::Absent) ++rep.absent_frames_left;
  }
  if (diag.resolved() > 0) {
    rep.fallback_rate =
        static_cast<double>(diag.scenario1 + diag.scenario2) /
        static_cast<double>(diag.resolved());
  }

  const auto bounds = procedure_bounds(smoothed_right, smoothed_left);
  if (!bounds) return rep;

  rep.start_frame = bounds->first;
  rep.end_frame = bounds->second;
  rep.duration_s = duration_seconds(*bounds, meta);
  rep.path_length_px_right = path_length(traj_right, *bounds);
  rep.path_length_px_left = path_length(traj_left, *bounds);
  rep.movement_count_right = count_movements(vel_right, *bounds, static_thresh);
  rep.movement_count_left = count_movements(vel_left, *bounds, static_thresh);
  if (const auto grip = forceps_grip_stats(smoothed_right, smoothed_left,
                                           loc_groups, *bounds)) {
    rep.forceps_ar_mean = grip->first;
    rep.forceps_ar_std = grip->second;
  }
  return rep;
}

}  // namespace opskill

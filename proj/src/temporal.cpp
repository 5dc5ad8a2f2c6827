#include "opskill/temporal.hpp"

#include <cmath>
#include <stdexcept>

namespace opskill {

Trajectory build_trajectory(const std::vector<FrameGroup>& loc_groups,
                            Side side, int max_gap) {
  if (max_gap < 0) {
    throw std::invalid_argument("max_gap must be >= 0");
  }
  Trajectory traj;
  traj.side = side;
  traj.samples.resize(loc_groups.size());

  const LocClass hand_cls = hand_class_of(side);
  for (std::size_t f = 0; f < loc_groups.size(); ++f) {
    const Detection* best = nullptr;
    for (const Detection& d : loc_groups[f].dets) {
      const auto* l = std::get_if<LocClass>(&d.cls);
      if (!l || *l != hand_cls) continue;
      if (!best || d.confidence > best->confidence) best = &d;
    }
    if (best) traj.samples[f].pos = center(best->box);
  }

  // Fill short gaps between detections; longer gaps stay undefined.
  std::ptrdiff_t last_defined = -1;
  for (std::size_t f = 0; f < traj.samples.size(); ++f) {
    if (!traj.samples[f].pos) continue;
    if (last_defined >= 0) {
      const std::ptrdiff_t gap =
          static_cast<std::ptrdiff_t>(f) - last_defined - 1;
      if (gap > 0 && gap <= max_gap) {
        const Point a = *traj.samples[last_defined].pos;
        const Point b = *traj.samples[f].pos;
        for (std::ptrdiff_t g = 1; g <= gap; ++g) {
          const double t = static_cast<double>(g) / (gap + 1);
          auto& s = traj.samples[last_defined + g];
          s.pos = Point{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
          s.interpolated = true;
        }
      }
    }
    last_defined = static_cast<std::ptrdiff_t>(f);
  }

  // Label maximal defined runs.
  int segment = -1;
  bool in_run = false;
  for (auto& s : traj.samples) {
    if (s.pos) {
      if (!in_run) {
        ++segment;
        in_run = true;
      }
      s.segment = segment;
    } else {
      in_run = false;
    }
  }
  traj.segment_count = segment + 1;
  return traj;
}

std::vector<VelocitySample> velocity(const Trajectory& traj, double fps) {
  const auto& s = traj.samples;
  std::vector<VelocitySample> out(s.size());
  std::size_t f = 0;
  while (f < s.size()) {
    if (!s[f].pos) {
      ++f;
      continue;
    }
    // [a, b] is one maximal defined segment.
    const std::size_t a = f;
    std::size_t b = f;
    while (b + 1 < s.size() && s[b + 1].segment == s[a].segment) ++b;
    if (b > a) {
      for (std::size_t i = a; i <= b; ++i) {
        const Point& prev = *s[i == a ? i : i - 1].pos;
        const Point& next = *s[i == b ? i : i + 1].pos;
        const double span = (i == a || i == b) ? 1.0 : 2.0;
        const double vx = (next.x - prev.x) * fps / span;
        const double vy = (next.y - prev.y) * fps / span;
        out[i].v = std::sqrt(vx * vx + vy * vy);
        out[i].defined = true;
      }
    }
    f = b + 1;
  }
  return out;
}

std::vector<UsageState> smooth_usage(const std::vector<UsageState>& states,
                                     const std::vector<VelocitySample>& vel,
                                     int window, double fast_gate) {
  if (window < 1) {
    throw std::invalid_argument("smooth window must be >= 1");
  }

  std::vector<UsageState> out;
  out.reserve(states.size());
  std::array<int, 4> votes{};  // Scissors, NeedleDriver, Forceps, Empty
  std::optional<Payload> prev;

  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].payload != Payload::Absent) {
      ++votes[static_cast<int>(states[i].payload)];
    }
    if (i >= static_cast<std::size_t>(window)) {
      const Payload leaving = states[i - window].payload;
      if (leaving != Payload::Absent) --votes[static_cast<int>(leaving)];
    }

    const bool fast =
        i < vel.size() && vel[i].defined && vel[i].v > fast_gate;

    Payload decided;
    if (fast && prev) {
      decided = *prev;  // decision frozen during fast movement
    } else {
      int best = 0;
      int ties = 0;
      Payload winner = Payload::Empty;
      for (int p = 0; p < 4; ++p) {
        if (votes[p] > best) {
          best = votes[p];
          ties = 1;
          winner = static_cast<Payload>(p);
        } else if (votes[p] == best && best > 0) {
          ++ties;
        }
      }
      if (best > 0 && ties == 1) {
        decided = winner;
      } else if (prev) {
        decided = *prev;  // tie or all-Absent window: keep last decision
      } else {
        decided = states[i].payload;  // bootstrap
      }
    }

    UsageState smoothed = states[i];
    smoothed.payload = decided;
    out.push_back(smoothed);
    prev = decided;
  }
  return out;
}

}  // namespace opskill

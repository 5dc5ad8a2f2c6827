#include "opskill/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "opskill/geometry.hpp"
#include "opskill/io.hpp"
#include "opskill/suppression.hpp"

namespace opskill {

void PipelineConfig::validate() const {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(nms_iou)) throw std::invalid_argument("nms-iou must be in [0,1]");
  if (!in_unit(cross_nms_iou)) {
    throw std::invalid_argument("cross-nms-iou must be in [0,1]");
  }
  if (!in_unit(s1_overlap)) {
    throw std::invalid_argument("s1-overlap must be in [0,1]");
  }
  if (smooth_window < 1) {
    throw std::invalid_argument("smooth-window must be >= 1");
  }
  if (fast_gate < 0.0) throw std::invalid_argument("fast-gate must be >= 0");
  if (max_gap < 0) throw std::invalid_argument("max-gap must be >= 0");
  if (!(static_thresh > 0.0)) {
    throw std::invalid_argument("static-thresh must be > 0");
  }
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::echo() const {
  return {
      {"cfg_nms_iou", format_number(nms_iou)},
      {"cfg_cross_nms_iou", format_number(cross_nms_iou)},
      {"cfg_s1_overlap", format_number(s1_overlap)},
      {"cfg_smooth_window", std::to_string(smooth_window)},
      {"cfg_fast_gate", format_number(fast_gate)},
      {"cfg_max_gap", std::to_string(max_gap)},
      {"cfg_static_thresh", format_number(static_thresh)},
  };
}

void EventBuilder::add(const UsageState& state) {
  side_ = state.side;
  const bool continues =
      open_ && state.payload == run_payload_ && state.frame == last_frame_ + 1;
  if (!continues) {
    if (open_) {
      events_.push_back(
          {interaction_class(run_payload_, side_), run_start_, last_frame_});
      open_ = false;
    }
    if (state.payload != Payload::Absent) {
      run_payload_ = state.payload;
      run_start_ = state.frame;
      open_ = true;
    }
  }
  last_frame_ = state.frame;
}

std::vector<TimedEvent> EventBuilder::finish() {
  if (open_) {
    events_.push_back(
        {interaction_class(run_payload_, side_), run_start_, last_frame_});
    open_ = false;
  }
  return std::move(events_);
}

SessionRunner::SessionRunner(const SessionMeta& meta, const PipelineConfig& cfg,
                             StateSink sink)
    : meta_(meta), cfg_(cfg), sink_(std::move(sink)) {
  cfg_.validate();
  if (!(meta_.fps > 0.0)) throw std::invalid_argument("fps must be > 0");
}

SessionRunner::Pending* SessionRunner::pending_at(FrameIndex frame) {
  const FrameIndex first = pending_.empty() ? 0 : pending_.front().frame;
  const FrameIndex idx = frame - first;
  if (pending_.empty() || idx < 0 ||
      idx >= static_cast<FrameIndex>(pending_.size())) {
    return nullptr;
  }
  return &pending_[static_cast<std::size_t>(idx)];
}

void SessionRunner::push(const FrameGroup& group) {
  if (finished_) throw std::logic_error("push after finish");
  if (group.frame != next_push_) {
    throw std::invalid_argument("frame groups must be dense and in order");
  }
  ++next_push_;

  std::vector<Detection> loc, inter;
  for (const Detection& d : group.dets) {
    (d.channel() == Channel::Localization ? loc : inter).push_back(d);
  }
  loc = tool_nms(standard_nms(loc, cfg_.nms_iou), cfg_.cross_nms_iou);
  inter = standard_nms(inter, cfg_.nms_iou);

  Pending entry;
  entry.frame = group.frame;
  const FrameResolution res =
      resolve_frame(group.frame, inter, loc, cfg_.s1_overlap, diag_);
  entry.raw[0] = res.right;
  entry.raw[1] = res.left;

  for (int s = 0; s < kSideCount; ++s) {
    const LocClass hand_cls = hand_class_of(static_cast<Side>(s));
    const Detection* best = nullptr;
    for (const Detection& d : loc) {
      const auto* l = std::get_if<LocClass>(&d.cls);
      if (!l || *l != hand_cls) continue;
      if (!best || d.confidence > best->confidence) best = &d;
    }
    if (best) entry.pos[s] = center(best->box);
  }
  {
    const Detection* best = nullptr;
    for (const Detection& d : loc) {
      const auto* l = std::get_if<LocClass>(&d.cls);
      if (!l || *l != LocClass::Forceps) continue;
      if (!best || d.confidence > best->confidence) best = &d;
    }
    if (best) entry.forceps_ar = aspect_ratio(best->box);
  }

  pending_.push_back(entry);
  peak_pending_ = std::max(peak_pending_, pending_.size());

  // Trajectory finalization per side: settle gaps, advance the frontier.
  for (int s = 0; s < kSideCount; ++s) {
    SideState& st = side_[s];
    Pending& cur = pending_.back();
    if (cur.pos[s]) {
      if (st.last_defined >= 0) {
        const FrameIndex gap = cur.frame - st.last_defined - 1;
        if (gap > 0 && gap <= cfg_.max_gap) {
          // The frontier never passes an open gap, so the bracketing entry
          // and every gap frame are still buffered; fill them in place.
          const Point a = *pending_at(st.last_defined)->pos[s];
          const Point b = *cur.pos[s];
          for (FrameIndex g = 1; g <= gap; ++g) {
            const double t =
                static_cast<double>(g) / static_cast<double>(gap + 1);
            Pending* e = pending_at(st.last_defined + g);
            e->pos[s] = Point{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
            e->segment[s] = st.segment_count - 1;
          }
        } else if (gap > cfg_.max_gap) {
          ++st.segment_count;
        }
      } else {
        ++st.segment_count;
      }
      cur.segment[s] = st.segment_count - 1;
      st.last_defined = cur.frame;
      st.frontier = cur.frame;
    } else if (st.last_defined < 0 ||
               cur.frame - st.last_defined > cfg_.max_gap) {
      // No future detection can reach back past max_gap.
      st.frontier = cur.frame;
    }
  }

  flush_ready(/*eof=*/false);
}

void SessionRunner::flush_ready(bool eof) {
  while (!pending_.empty()) {
    const FrameIndex t = next_flush_;
    if (!eof) {
      // Velocity at t needs sample t+1 to be final on both sides.
      if (side_[0].frontier < t + 1 || side_[1].frontier < t + 1) break;
    }
    flush_front(eof);
  }
}

void SessionRunner::flush_front(bool eof) {
  Pending cur = pending_.front();
  pending_.pop_front();
  ++next_flush_;
  const Pending* next = pending_.empty() ? nullptr : &pending_.front();

  UsageState smoothed_out[kSideCount];
  for (int s = 0; s < kSideCount; ++s) {
    SideState& st = side_[s];

    // Velocity from centered/one-sided differences, same rule as velocity().
    bool v_defined = false;
    double v = 0.0;
    if (cur.pos[s]) {
      const bool has_prev =
          st.prev_pos && st.prev_segment == cur.segment[s];
      const bool has_next = next && next->pos[s] &&
                            next->segment[s] == cur.segment[s];
      if (has_prev || has_next) {
        const Point& prev = has_prev ? *st.prev_pos : *cur.pos[s];
        const Point& nxt = has_next ? *next->pos[s] : *cur.pos[s];
        const double span = (has_prev && has_next) ? 2.0 : 1.0;
        const double vx = (nxt.x - prev.x) * meta_.fps / span;
        const double vy = (nxt.y - prev.y) * meta_.fps / span;
        v = std::sqrt(vx * vx + vy * vy);
        v_defined = true;
      }
    }

    // Path and crossing pairs whose later endpoint is this frame.
    if (st.prev_pos && cur.pos[s] && st.prev_segment == cur.segment[s]) {
      const double dx = cur.pos[s]->x - st.prev_pos->x;
      const double dy = cur.pos[s]->y - st.prev_pos->y;
      st.cum_path += std::sqrt(dx * dx + dy * dy);
    }
    const bool moving = v_defined && v > cfg_.static_thresh;
    if (st.prev_v_defined && v_defined && st.prev_moving != moving) {
      ++st.cum_crossings;
    }

    // Majority smoothing, identical update rule to smooth_usage().
    const UsageState& raw = cur.raw[s];
    if (raw.payload != Payload::Absent) {
      ++st.votes[static_cast<int>(raw.payload)];
    }
    st.window.push_back(raw.payload);
    if (static_cast<int>(st.window.size()) > cfg_.smooth_window) {
      const Payload leaving = st.window.front();
      st.window.pop_front();
      if (leaving != Payload::Absent) --st.votes[static_cast<int>(leaving)];
    }
    const bool fast = v_defined && v > cfg_.fast_gate;
    Payload decided;
    if (fast && st.prev_smoothed) {
      decided = *st.prev_smoothed;
    } else {
      int best = 0;
      int ties = 0;
      Payload winner = Payload::Empty;
      for (int p = 0; p < 4; ++p) {
        if (st.votes[p] > best) {
          best = st.votes[p];
          ties = 1;
          winner = static_cast<Payload>(p);
        } else if (st.votes[p] == best && best > 0) {
          ++ties;
        }
      }
      if (best > 0 && ties == 1) {
        decided = winner;
      } else if (st.prev_smoothed) {
        decided = *st.prev_smoothed;
      } else {
        decided = raw.payload;
      }
    }
    st.prev_smoothed = decided;
    smoothed_out[s] = raw;
    smoothed_out[s].payload = decided;

    if (raw.provenance == Provenance::Absent) ++st.absent_frames;

    st.prev_pos = cur.pos[s];
    st.prev_segment = cur.segment[s];
    st.prev_v_defined = v_defined;
    st.prev_moving = moving;
  }

  const bool tool_frame = is_tool_payload(smoothed_out[0].payload) ||
                          is_tool_payload(smoothed_out[1].payload);
  if (tool_frame) {
    if (!started_) {
      started_ = true;
      bound_start_ = cur.frame;
      for (int s = 0; s < kSideCount; ++s) {
        side_[s].start_path = side_[s].cum_path;
        side_[s].start_crossings = side_[s].cum_crossings;
      }
    }
    const bool forceps = smoothed_out[0].payload == Payload::Forceps ||
                         smoothed_out[1].payload == Payload::Forceps;
    if (forceps && cur.forceps_ar) {
      const double ar = *cur.forceps_ar;
      ar_sum_ += ar;
      ar_sum_sq_ += ar * ar;
      ++ar_n_;
    }
    bound_end_ = cur.frame;
    for (int s = 0; s < kSideCount; ++s) {
      side_[s].end_path = side_[s].cum_path;
      side_[s].end_crossings = side_[s].cum_crossings;
    }
  }

  if (sink_) {
    sink_(cur.raw[0], smoothed_out[0]);
    sink_(cur.raw[1], smoothed_out[1]);
  }
  (void)eof;
}

SessionReport SessionRunner::finish() {
  if (finished_) throw std::logic_error("finish called twice");
  finished_ = true;
  flush_ready(/*eof=*/true);

  SessionReport rep;
  rep.frames = next_flush_;
  rep.states_direct = diag_.direct;
  rep.states_scenario1 = diag_.scenario1;
  rep.states_scenario2 = diag_.scenario2;
  rep.states_absent = diag_.absent;
  rep.absent_frames_right = side_[0].absent_frames;
  rep.absent_frames_left = side_[1].absent_frames;
  if (diag_.resolved() > 0) {
    rep.fallback_rate =
        static_cast<double>(diag_.scenario1 + diag_.scenario2) /
        static_cast<double>(diag_.resolved());
  }

  if (started_) {
    rep.start_frame = bound_start_;
    rep.end_frame = bound_end_;
    rep.duration_s =
        static_cast<double>(bound_end_ - bound_start_ + 1) / meta_.fps;
    rep.path_length_px_right = side_[0].end_path - side_[0].start_path;
    rep.path_length_px_left = side_[1].end_path - side_[1].start_path;
    rep.movement_count_right =
        (side_[0].end_crossings - side_[0].start_crossings) / 2;
    rep.movement_count_left =
        (side_[1].end_crossings - side_[1].start_crossings) / 2;
    if (ar_n_ > 0) {
      const double mean = ar_sum_ / static_cast<double>(ar_n_);
      const double var = std::max(
          0.0, ar_sum_sq_ / static_cast<double>(ar_n_) - mean * mean);
      rep.forceps_ar_mean = mean;
      rep.forceps_ar_std = std::sqrt(var);
    }
  }
  return rep;
}

SessionResult run_session(const std::vector<FrameGroup>& stream,
                          const SessionMeta& meta, const PipelineConfig& cfg) {
  SessionResult result;
  result.raw.fps = meta.fps;
  result.smoothed.fps = meta.fps;

  SessionRunner runner(meta, cfg,
                       [&](const UsageState& raw, const UsageState& smoothed) {
                         result.raw.states(raw.side).push_back(raw);
                         result.smoothed.states(smoothed.side)
                             .push_back(smoothed);
                       });
  for (const FrameGroup& g : stream) runner.push(g);
  result.report = runner.finish();
  result.events = timeline_events(result.smoothed);
  return result;
}

std::vector<TimedEvent> timeline_events(const UsageTimeline& timeline) {
  std::vector<TimedEvent> events;
  for (Side side : {Side::Right, Side::Left}) {
    EventBuilder builder;
    for (const UsageState& s : timeline.states(side)) builder.add(s);
    auto side_events = builder.finish();
    events.insert(events.end(), side_events.begin(), side_events.end());
  }
  return events;
}

}  // namespace opskill

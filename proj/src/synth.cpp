#include "opskill/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "opskill/geometry.hpp"

namespace opskill {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::uint64_t Rng::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  const double u = uniform();
  return lo + static_cast<std::int64_t>(u * static_cast<double>(hi - lo + 1));
}

bool Rng::chance(double p) { return uniform() < p; }

Rng Rng::fork(std::uint64_t tag) const {
  Rng tagger(state_ ^ (tag * 0xD1B54A32D192ED03ULL + 0x9E3779B97F4A7C15ULL));
  return Rng(tagger.next());
}

namespace {

// Scene constants, sized for the default 640x480 frame. Hand work regions
// are kept disjoint with margin so one hand's tool can never overlap the
// other hand's box, which keeps Scenario-1 recovery unambiguous.
constexpr double kHandHalf = 45.0;       // hand box is 90x90
constexpr double kToolOffsetX = 25.0;    // in-use tool rides toward midline
constexpr double kToolOffsetY = -18.0;
constexpr double kNeedleDriverW = 64.0, kNeedleDriverH = 44.0;
constexpr double kScissorsW = 56.0, kScissorsH = 40.0;
constexpr double kForcepsSize = 52.0;    // forceps box area is kept constant
constexpr FrameIndex kLeadFrames = 36;
constexpr FrameIndex kTailFrames = 36;
constexpr FrameIndex kEpisodeStartPad = 16;  // keeps motion clear of votes

struct ProfileParams {
  double time_scale;
  int extra_glides;
  double glide_lo, glide_hi;  // displacement per excursion, px
  double speed_lo, speed_hi;  // peak speed, px/s
  double tremor;              // per-frame uniform jitter bound, px
  double ar_mean, ar_noise;   // forceps grip aspect ratio
};

// The two profiles share the phase script and differ only in parameters.
// All ranges are disjoint in the direction of the published skill gaps:
// novices take longer, reach farther, move more often, and grip less
// consistently.
ProfileParams params_for(SkillProfile p) {
  if (p == SkillProfile::Expert) {
    return {1.0, 0, 45.0, 85.0, 140.0, 220.0, 0.04, 1.05, 0.05};
  }
  return {1.7, 2, 110.0, 140.0, 180.0, 300.0, 0.25, 0.72, 0.22};
}

struct Phase {
  Payload right = Payload::Empty;
  Payload left = Payload::Empty;
  FrameIndex base = 0;    // profile-independent length
  FrameIndex frames = 0;  // scaled length
  bool moves = false;
};

struct PatternSpec {
  Payload right, left;
  FrameIndex base_lo, base_hi;
  bool moves;
};

// Suturing-like loop: stitch, tie, cut, pause, regrasp, pause.
constexpr PatternSpec kPatterns[] = {
    {Payload::NeedleDriver, Payload::Forceps, 270, 480, true},
    {Payload::NeedleDriver, Payload::Empty, 270, 390, true},
    {Payload::Scissors, Payload::Forceps, 270, 330, true},
    {Payload::Empty, Payload::Empty, 60, 90, false},
    {Payload::Forceps, Payload::Empty, 270, 390, true},
    {Payload::Empty, Payload::Empty, 60, 90, false},
};
constexpr int kCutPattern = 2;

std::vector<Phase> build_script(Rng script, const SynthConfig& cfg,
                                const ProfileParams& prof) {
  const FrameIndex budget =
      std::max<FrameIndex>(cfg.frames - kLeadFrames - kTailFrames, 270);
  std::vector<Phase> phases;
  FrameIndex acc = 0;
  int idx = 0;
  int last_pattern = -1;
  while (acc < budget) {
    const int pattern = idx % static_cast<int>(std::size(kPatterns));
    const PatternSpec& spec = kPatterns[pattern];
    Phase ph;
    ph.right = spec.right;
    ph.left = spec.left;
    ph.base = script.uniform_int(spec.base_lo, spec.base_hi);
    ph.moves = spec.moves;
    phases.push_back(ph);
    acc += ph.base;
    last_pattern = pattern;
    ++idx;
  }
  if (last_pattern != kCutPattern) {
    const PatternSpec& spec = kPatterns[kCutPattern];
    Phase ph;
    ph.right = spec.right;
    ph.left = spec.left;
    ph.base = script.uniform_int(spec.base_lo, spec.base_hi);
    ph.moves = spec.moves;
    phases.push_back(ph);
  }
  for (Phase& ph : phases) {
    ph.frames = std::llround(static_cast<double>(ph.base) * prof.time_scale);
  }
  return phases;
}

// Shared glide budget per phase; the profile only adds excursions on top.
int base_glides(const Phase& ph) { return ph.base >= 380 ? 2 : 1; }

struct HandTrack {
  std::vector<Point> centers;  // one per frame
};

// One excursion: raised-cosine glide out by V, short dwell, glide back.
// Peak speed stays far above the static threshold and edge-frame speeds far
// below it, so each excursion contributes exactly two enclosed movements.
void place_episode(std::vector<Point>& pos, FrameIndex at, Point home,
                   double dx, double dy, FrameIndex t_frames,
                   FrameIndex dwell) {
  const auto set = [&](FrameIndex f, double sx, double sy) {
    if (f >= 0 && f < static_cast<FrameIndex>(pos.size())) {
      pos[static_cast<std::size_t>(f)] = Point{home.x + sx, home.y + sy};
    }
  };
  for (FrameIndex t = 0; t <= t_frames; ++t) {
    const double s =
        (1.0 - std::cos(kPi * static_cast<double>(t) /
                        static_cast<double>(t_frames))) /
        2.0;
    set(at + t, dx * s, dy * s);
  }
  for (FrameIndex t = 1; t <= dwell; ++t) set(at + t_frames + t, dx, dy);
  const FrameIndex back_at = at + t_frames + dwell;
  for (FrameIndex t = 0; t <= t_frames; ++t) {
    const double s =
        (1.0 + std::cos(kPi * static_cast<double>(t) /
                        static_cast<double>(t_frames))) /
        2.0;
    set(back_at + t, dx * s, dy * s);
  }
}

HandTrack build_hand_track(Rng motion, Rng tremor_rng, Side side,
                           const std::vector<Phase>& phases,
                           FrameIndex total_frames, const SynthConfig& cfg,
                           const ProfileParams& prof) {
  const double sx = static_cast<double>(cfg.frame_width) / 640.0;
  const double sy = static_cast<double>(cfg.frame_height) / 480.0;
  const Point home = side == Side::Right ? Point{488.0 * sx, 240.0 * sy}
                                         : Point{152.0 * sx, 240.0 * sy};

  HandTrack track;
  track.centers.assign(static_cast<std::size_t>(total_frames), home);

  FrameIndex phase_start = kLeadFrames;
  for (const Phase& ph : phases) {
    if (ph.moves) {
      const int glides = base_glides(ph) + prof.extra_glides;
      const FrameIndex block = ph.frames / glides;
      for (int g = 0; g < glides; ++g) {
        // Vertical-leaning cone keeps the hands inside their own work
        // regions for any drawn distance.
        const bool down = motion.chance(0.5);
        const double theta_deg = motion.uniform(65.0, 115.0);
        const double theta =
            (down ? theta_deg : theta_deg + 180.0) * kPi / 180.0;
        const double dist = motion.uniform(prof.glide_lo, prof.glide_hi);
        const double peak = motion.uniform(prof.speed_lo, prof.speed_hi);
        const FrameIndex dwell = motion.uniform_int(4, 10);
        const FrameIndex t_frames = static_cast<FrameIndex>(
            std::ceil(dist * kPi * cfg.fps / (2.0 * peak)));
        const double dx = dist * std::cos(theta);
        const double dy = dist * std::sin(theta);
        place_episode(track.centers, phase_start + g * block + kEpisodeStartPad,
                      home, dx, dy, t_frames, dwell);
      }
    }
    phase_start += ph.frames;
  }

  if (prof.tremor > 0.0) {
    for (Point& p : track.centers) {
      p.x += tremor_rng.uniform(-prof.tremor, prof.tremor);
      p.y += tremor_rng.uniform(-prof.tremor, prof.tremor);
    }
  }
  return track;
}

Box hand_box(Point c) {
  return Box{c.x - kHandHalf, c.y - kHandHalf, 2 * kHandHalf, 2 * kHandHalf};
}

Box tool_box(Point hand_center, Side side, Payload tool, double forceps_ar) {
  const double cx = hand_center.x +
                    (side == Side::Right ? -kToolOffsetX : kToolOffsetX);
  const double cy = hand_center.y + kToolOffsetY;
  double w = 0.0, h = 0.0;
  switch (tool) {
    case Payload::NeedleDriver:
      w = kNeedleDriverW;
      h = kNeedleDriverH;
      break;
    case Payload::Scissors:
      w = kScissorsW;
      h = kScissorsH;
      break;
    default:
      w = kForcepsSize * std::sqrt(forceps_ar);
      h = kForcepsSize / std::sqrt(forceps_ar);
      break;
  }
  return Box{cx - w / 2.0, cy - h / 2.0, w, h};
}

Box union_box(const Box& a, const Box& b) {
  const double x = std::min(a.x, b.x);
  const double y = std::min(a.y, b.y);
  return Box{x, y, std::max(a.right(), b.right()) - x,
             std::max(a.bottom(), b.bottom()) - y};
}

Box idle_spot(LocClass tool, const SynthConfig& cfg) {
  const double sx = static_cast<double>(cfg.frame_width) / 640.0;
  const double sy = static_cast<double>(cfg.frame_height) / 480.0;
  switch (tool) {
    case LocClass::NeedleDriver:
      return Box{40.0 * sx, 18.0 * sy, 70.0, 26.0};
    case LocClass::Forceps:
      return Box{300.0 * sx, 18.0 * sy, 54.0, 22.0};
    default:
      return Box{540.0 * sx, 18.0 * sy, 58.0, 28.0};
  }
}

Box sanitize(Box b) {
  b.x = std::max(b.x, 0.0);
  b.y = std::max(b.y, 0.0);
  b.w = std::max(b.w, 1.0);
  b.h = std::max(b.h, 1.0);
  return b;
}

void validate(const SynthConfig& cfg) {
  if (cfg.frames <= 0) throw std::invalid_argument("frames must be > 0");
  if (!(cfg.fps > 0.0)) throw std::invalid_argument("fps must be > 0");
  const NoiseConfig& n = cfg.noise;
  for (double p : {n.interaction_dropout_p, n.duplicate_p, n.flip_p}) {
    if (p < 0.0 || p > 1.0) {
      throw std::invalid_argument("noise probabilities must be in [0,1]");
    }
  }
  if (n.box_jitter_px < 0.0) {
    throw std::invalid_argument("box_jitter_px must be >= 0");
  }
  if (n.confidence_lo < 0.0 || n.confidence_hi > 1.0 ||
      n.confidence_lo > n.confidence_hi) {
    throw std::invalid_argument("bad confidence range");
  }
}

Payload flip_target(Payload true_payload, Rng& rng) {
  constexpr Payload all[] = {Payload::Scissors, Payload::NeedleDriver,
                             Payload::Forceps, Payload::Empty};
  Payload options[3];
  int n = 0;
  for (Payload p : all) {
    if (p != true_payload) options[n++] = p;
  }
  return options[rng.uniform_int(0, 2)];
}

Payload duplicate_payload(Payload emitted, Rng& rng) {
  constexpr Payload tools[] = {Payload::Scissors, Payload::NeedleDriver,
                               Payload::Forceps};
  Payload options[3];
  int n = 0;
  for (Payload p : tools) {
    if (p != emitted) options[n++] = p;
  }
  return options[rng.uniform_int(0, n - 1)];
}

}  // namespace

Scenario generate_scenario(const SynthConfig& cfg) {
  validate(cfg);

  const ProfileParams prof = params_for(cfg.profile);
  Rng root(cfg.seed);

  const std::vector<Phase> phases = build_script(root.fork(1), cfg, prof);
  FrameIndex total = kLeadFrames + kTailFrames;
  for (const Phase& ph : phases) total += ph.frames;

  Scenario sc;
  sc.meta.fps = cfg.fps;
  sc.meta.frame_width = cfg.frame_width;
  sc.meta.frame_height = cfg.frame_height;
  sc.frames = total;

  // Dense ground-truth payload per side.
  for (auto& v : sc.gt_payload) {
    v.assign(static_cast<std::size_t>(total), Payload::Empty);
  }
  FrameIndex at = kLeadFrames;
  for (const Phase& ph : phases) {
    for (FrameIndex f = at; f < at + ph.frames; ++f) {
      sc.gt_payload[0][static_cast<std::size_t>(f)] = ph.right;
      sc.gt_payload[1][static_cast<std::size_t>(f)] = ph.left;
    }
    at += ph.frames;
  }

  const HandTrack right_track =
      build_hand_track(root.fork(2), root.fork(10), Side::Right, phases, total,
                       cfg, prof);
  const HandTrack left_track =
      build_hand_track(root.fork(3), root.fork(11), Side::Left, phases, total,
                       cfg, prof);

  // Forceps grip angle per frame; at most one hand holds the forceps.
  Rng grip = root.fork(4);
  std::vector<double> forceps_ar(static_cast<std::size_t>(total), 1.0);
  for (FrameIndex f = 0; f < total; ++f) {
    if (sc.gt_payload[0][static_cast<std::size_t>(f)] == Payload::Forceps ||
        sc.gt_payload[1][static_cast<std::size_t>(f)] == Payload::Forceps) {
      forceps_ar[static_cast<std::size_t>(f)] =
          prof.ar_mean + prof.ar_noise * grip.uniform(-1.0, 1.0);
    }
  }

  // Per-frame ground-truth boxes for both channels.
  struct FrameScene {
    Box hand[kSideCount];
    std::optional<Box> tool[kSideCount];
    Box interaction[kSideCount];
  };
  std::vector<FrameScene> scenes(static_cast<std::size_t>(total));
  sc.gt_boxes.resize(static_cast<std::size_t>(total));
  for (FrameIndex f = 0; f < total; ++f) {
    const std::size_t i = static_cast<std::size_t>(f);
    FrameScene& scene = scenes[i];
    FrameGroup& group = sc.gt_boxes[i];
    group.frame = f;

    std::array<Payload, kSideCount> payload = {sc.gt_payload[0][i],
                                               sc.gt_payload[1][i]};
    const Point centers[kSideCount] = {right_track.centers[i],
                                       left_track.centers[i]};
    for (int s = 0; s < kSideCount; ++s) {
      const Side side = static_cast<Side>(s);
      scene.hand[s] = sanitize(hand_box(centers[s]));
      group.dets.push_back(
          {f, hand_class_of(side), scene.hand[s], 1.0});
      if (is_tool_payload(payload[s])) {
        scene.tool[s] = sanitize(
            tool_box(centers[s], side, payload[s], forceps_ar[i]));
      }
    }
    for (int s = 0; s < kSideCount; ++s) {
      if (!scene.tool[s]) continue;
      LocClass cls = LocClass::NeedleDriver;
      if (payload[s] == Payload::Scissors) cls = LocClass::Scissors;
      if (payload[s] == Payload::Forceps) cls = LocClass::Forceps;
      group.dets.push_back({f, cls, *scene.tool[s], 1.0});
    }
    for (LocClass tool :
         {LocClass::NeedleDriver, LocClass::Forceps, LocClass::Scissors}) {
      const Payload p = payload_of(tool);
      if (payload[0] != p && payload[1] != p) {
        group.dets.push_back({f, tool, sanitize(idle_spot(tool, cfg)), 1.0});
      }
    }
    for (int s = 0; s < kSideCount; ++s) {
      const Side side = static_cast<Side>(s);
      scene.interaction[s] = scene.tool[s]
                                 ? union_box(scene.hand[s], *scene.tool[s])
                                 : scene.hand[s];
      group.dets.push_back({f, interaction_class(payload[s], side),
                            scene.interaction[s], 1.0});
    }
  }

  // Ground-truth events: run-length encoding of the payload timelines.
  for (int s = 0; s < kSideCount; ++s) {
    const auto& seq = sc.gt_payload[s];
    FrameIndex run_start = 0;
    for (FrameIndex f = 1; f <= total; ++f) {
      if (f == total || seq[static_cast<std::size_t>(f)] !=
                            seq[static_cast<std::size_t>(run_start)]) {
        sc.events.push_back(
            {interaction_class(seq[static_cast<std::size_t>(run_start)],
                               static_cast<Side>(s)),
             run_start, f - 1});
        run_start = f;
      }
    }
  }

  // Corruption decisions, one slot per (frame, side).
  Rng drop_rng = root.fork(5);
  Rng dup_rng = root.fork(6);
  Rng flip_rng = root.fork(7);
  struct DupSpec {
    Payload payload;
    double dx, dy, scale;
  };
  std::array<std::vector<Payload>, kSideCount> emitted_payload;
  std::array<std::vector<DupSpec>, kSideCount> dup_specs;
  for (int s = 0; s < kSideCount; ++s) {
    sc.dropped[s].assign(static_cast<std::size_t>(total), false);
    sc.duplicated[s].assign(static_cast<std::size_t>(total), false);
    sc.flipped[s].assign(static_cast<std::size_t>(total), false);
    emitted_payload[s] = sc.gt_payload[s];
    dup_specs[s].resize(static_cast<std::size_t>(total));
  }
  for (FrameIndex f = 0; f < total; ++f) {
    const std::size_t i = static_cast<std::size_t>(f);
    for (int s = 0; s < kSideCount; ++s) {
      const bool dropped = drop_rng.chance(cfg.noise.interaction_dropout_p);
      const bool duplicated =
          dup_rng.chance(cfg.noise.duplicate_p) && !dropped;
      const bool flipped = flip_rng.chance(cfg.noise.flip_p) && !dropped;
      sc.dropped[s][i] = dropped;
      sc.duplicated[s][i] = duplicated;
      sc.flipped[s][i] = flipped;
      if (flipped) {
        emitted_payload[s][i] = flip_target(sc.gt_payload[s][i], flip_rng);
      }
      if (duplicated) {
        DupSpec& d = dup_specs[s][i];
        d.payload = duplicate_payload(emitted_payload[s][i], dup_rng);
        d.dx = (dup_rng.chance(0.5) ? 1.0 : -1.0) * dup_rng.uniform(10.0, 20.0);
        d.dy = (dup_rng.chance(0.5) ? 1.0 : -1.0) * dup_rng.uniform(10.0, 20.0);
        d.scale = dup_rng.uniform(1.25, 1.5);
      }
    }
  }

  // Corrupted detection stream.
  Rng jitter_rng = root.fork(8);
  Rng conf_rng = root.fork(9);
  const double jit = cfg.noise.box_jitter_px;
  const auto jitter = [&](Box b) {
    if (jit <= 0.0) return b;
    double x1 = b.x + jitter_rng.uniform(-jit, jit);
    double y1 = b.y + jitter_rng.uniform(-jit, jit);
    double x2 = b.right() + jitter_rng.uniform(-jit, jit);
    double y2 = b.bottom() + jitter_rng.uniform(-jit, jit);
    return sanitize(Box{x1, y1, x2 - x1, y2 - y1});
  };
  const auto conf = [&]() {
    return conf_rng.uniform(cfg.noise.confidence_lo, cfg.noise.confidence_hi);
  };

  sc.detections.resize(static_cast<std::size_t>(total));
  for (FrameIndex f = 0; f < total; ++f) {
    const std::size_t i = static_cast<std::size_t>(f);
    FrameGroup& group = sc.detections[i];
    group.frame = f;
    for (const Detection& d : sc.gt_boxes[i].dets) {
      if (d.channel() == Channel::Localization) {
        group.dets.push_back({f, d.cls, jitter(d.box), conf()});
      }
    }
    for (int s = 0; s < kSideCount; ++s) {
      const Side side = static_cast<Side>(s);
      if (!sc.dropped[s][i]) {
        group.dets.push_back(
            {f, interaction_class(emitted_payload[s][i], side),
             jitter(scenes[i].interaction[s]), conf()});
      }
      if (sc.duplicated[s][i]) {
        const DupSpec& d = dup_specs[s][i];
        const Box& base = scenes[i].interaction[s];
        const double cx = base.x + base.w / 2.0 + d.dx;
        const double cy = base.y + base.h / 2.0 + d.dy;
        const Box dup = sanitize(Box{cx - base.w * d.scale / 2.0,
                                     cy - base.h * d.scale / 2.0,
                                     base.w * d.scale, base.h * d.scale});
        group.dets.push_back(
            {f, interaction_class(d.payload, side), jitter(dup), conf()});
      }
    }
  }

  // Expected report, computed with plain formula code on the ground truth.
  SessionReport& rep = sc.expected;
  rep.frames = total;
  for (int s = 0; s < kSideCount; ++s) {
    for (FrameIndex f = 0; f < total; ++f) {
      const std::size_t i = static_cast<std::size_t>(f);
      if (sc.dropped[s][i]) {
        ++rep.states_scenario1;
      } else if (sc.duplicated[s][i]) {
        ++rep.states_scenario2;
      } else {
        ++rep.states_direct;
      }
    }
  }
  rep.fallback_rate =
      static_cast<double>(rep.states_scenario1 + rep.states_scenario2) /
      static_cast<double>(2 * total);

  std::optional<FrameIndex> first_tool, last_tool;
  for (FrameIndex f = 0; f < total; ++f) {
    const std::size_t i = static_cast<std::size_t>(f);
    if (is_tool_payload(sc.gt_payload[0][i]) ||
        is_tool_payload(sc.gt_payload[1][i])) {
      if (!first_tool) first_tool = f;
      last_tool = f;
    }
  }
  if (first_tool) {
    const FrameIndex s0 = *first_tool;
    const FrameIndex e0 = *last_tool;
    rep.start_frame = s0;
    rep.end_frame = e0;
    rep.duration_s = static_cast<double>(e0 - s0 + 1) / cfg.fps;

    for (int s = 0; s < kSideCount; ++s) {
      // Centers recomputed from the emitted boxes so the arithmetic matches
      // what any consumer of the files would see.
      std::vector<Point> c(static_cast<std::size_t>(total));
      for (FrameIndex f = 0; f < total; ++f) {
        const Box& hb = scenes[static_cast<std::size_t>(f)].hand[s];
        c[static_cast<std::size_t>(f)] =
            Point{hb.x + hb.w / 2.0, hb.y + hb.h / 2.0};
      }

      double path = 0.0;
      for (FrameIndex f = s0; f < e0; ++f) {
        const Point& a = c[static_cast<std::size_t>(f)];
        const Point& b = c[static_cast<std::size_t>(f + 1)];
        path += std::sqrt((b.x - a.x) * (b.x - a.x) +
                          (b.y - a.y) * (b.y - a.y));
      }

      std::vector<double> speed(static_cast<std::size_t>(total), 0.0);
      if (total >= 2) {
        for (FrameIndex f = 0; f < total; ++f) {
          const FrameIndex p = f == 0 ? f : f - 1;
          const FrameIndex n = f == total - 1 ? f : f + 1;
          const double span = static_cast<double>(n - p);
          const double vx = (c[static_cast<std::size_t>(n)].x -
                             c[static_cast<std::size_t>(p)].x) *
                            cfg.fps / span;
          const double vy = (c[static_cast<std::size_t>(n)].y -
                             c[static_cast<std::size_t>(p)].y) *
                            cfg.fps / span;
          speed[static_cast<std::size_t>(f)] = std::sqrt(vx * vx + vy * vy);
        }
      }
      std::int64_t crossings = 0;
      for (FrameIndex f = s0; f < e0 && total >= 2; ++f) {
        const bool ma = speed[static_cast<std::size_t>(f)] > 25.0;
        const bool mb = speed[static_cast<std::size_t>(f + 1)] > 25.0;
        if (ma != mb) ++crossings;
      }

      if (s == 0) {
        rep.path_length_px_right = path;
        rep.movement_count_right = crossings / 2;
      } else {
        rep.path_length_px_left = path;
        rep.movement_count_left = crossings / 2;
      }
    }

    std::vector<double> ratios;
    for (FrameIndex f = s0; f <= e0; ++f) {
      const std::size_t i = static_cast<std::size_t>(f);
      for (int s = 0; s < kSideCount; ++s) {
        if (sc.gt_payload[s][i] == Payload::Forceps && scenes[i].tool[s]) {
          ratios.push_back(scenes[i].tool[s]->w / scenes[i].tool[s]->h);
          break;
        }
      }
    }
    if (!ratios.empty()) {
      double mean = 0.0;
      for (double r : ratios) mean += r;
      mean /= static_cast<double>(ratios.size());
      double var = 0.0;
      for (double r : ratios) var += (r - mean) * (r - mean);
      var /= static_cast<double>(ratios.size());
      rep.forceps_ar_mean = mean;
      rep.forceps_ar_std = std::sqrt(var);
    }
  }

  return sc;
}

}  // namespace opskill

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "opskill/metrics.hpp"
#include "opskill/types.hpp"

namespace opskill {

/// Deterministic generator behind every synthetic fixture.
///
/// Algorithm (version 1): splitmix64. state += 0x9E3779B97F4A7C15, then the
/// finalizer of Appleby/Stafford mix 13. Uniform doubles take the top 53
/// bits; substreams hash the parent state with a tag through the same mix.
/// The update rule is part of the external contract; bump kRngVersion and
/// regenerate frozen fixtures if it ever changes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  /// Uniform in [0,1).
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi], both inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool chance(double p);

  /// Independent substream; tagged forks of one parent never collide.
  Rng fork(std::uint64_t tag) const;

 private:
  std::uint64_t state_;
};

inline constexpr int kRngVersion = 1;

enum class SkillProfile : std::uint8_t { Expert = 0, Novice };

struct NoiseConfig {
  double interaction_dropout_p = 0.0;  ///< drop a side's interaction box
  double duplicate_p = 0.0;            ///< emit a rival interaction box
  double flip_p = 0.0;                 ///< mislabel the interaction payload
  double box_jitter_px = 0.0;          ///< uniform corner jitter, all boxes
  double confidence_lo = 0.55;
  double confidence_hi = 0.95;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  /// Nominal session length; the script fills it at Expert pace, so the
  /// actual frame count tracks this closely for Expert and stretches for
  /// Novice.
  FrameIndex frames = 1800;
  double fps = 30.0;
  int frame_width = 640;
  int frame_height = 480;
  SkillProfile profile = SkillProfile::Expert;
  NoiseConfig noise;
};

/// One generated session: ground truth, a corrupted detection stream, and
/// the expected session report computed straight from the ground truth.
struct Scenario {
  SessionMeta meta;
  FrameIndex frames = 0;

  std::vector<TimedEvent> events;     // ground-truth usage intervals
  std::vector<FrameGroup> gt_boxes;   // uncorrupted boxes, both channels
  std::vector<FrameGroup> detections; // corrupted stream fed to the pipeline

  /// Metric values computed from the uncorrupted ground truth by the plain
  /// formula implementations below, never by the pipeline modules.
  SessionReport expected;

  // Dense ground truth and per-slot corruption log, for tests.
  std::array<std::vector<Payload>, kSideCount> gt_payload;
  std::array<std::vector<bool>, kSideCount> dropped;
  std::array<std::vector<bool>, kSideCount> duplicated;
  std::array<std::vector<bool>, kSideCount> flipped;
};

/// Throws std::invalid_argument on frames <= 0, probabilities outside [0,1],
/// negative jitter, or a bad confidence range.
Scenario generate_scenario(const SynthConfig& cfg);

}  // namespace opskill

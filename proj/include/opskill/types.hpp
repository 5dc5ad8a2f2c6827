#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace opskill {

using FrameIndex = std::int64_t;

/// Axis-aligned pixel rectangle, top-left corner plus size.
struct Box {
  double x = 0.0;  ///< left edge
  double y = 0.0;  ///< top edge
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
};

/// True when w > 0, h > 0 and all coordinates are finite and non-negative.
bool box_valid(const Box& b);

/// Localization-channel classes: two hands plus three tools.
enum class LocClass : std::uint8_t {
  RightHand = 0,
  LeftHand,
  NeedleDriver,
  Forceps,
  Scissors,
};
inline constexpr int kLocClassCount = 5;

/// Interaction-channel classes: (tool-or-empty, hand side) combinations.
enum class InteractionClass : std::uint8_t {
  ScissorsRight = 0,
  ScissorsLeft,
  NeedleDriverRight,
  NeedleDriverLeft,
  ForcepsRight,
  ForcepsLeft,
  EmptyRight,
  EmptyLeft,
};
inline constexpr int kInteractionClassCount = 8;

enum class Channel : std::uint8_t { Localization = 0, Interaction };

enum class Side : std::uint8_t { Right = 0, Left };
inline constexpr int kSideCount = 2;

/// What a hand holds. Absent means the hand was not detected at all.
enum class Payload : std::uint8_t {
  Scissors = 0,
  NeedleDriver,
  Forceps,
  Empty,
  Absent,
};

/// How a per-frame usage decision was reached.
enum class Provenance : std::uint8_t {
  Direct = 0,
  Scenario1,
  Scenario2,
  Absent,
};

inline bool is_hand(LocClass c) {
  return c == LocClass::RightHand || c == LocClass::LeftHand;
}
inline bool is_tool(LocClass c) { return !is_hand(c); }

inline LocClass hand_class_of(Side s) {
  return s == Side::Right ? LocClass::RightHand : LocClass::LeftHand;
}

inline Side side_of(InteractionClass c) {
  return (static_cast<int>(c) % 2 == 0) ? Side::Right : Side::Left;
}

inline Payload payload_of(InteractionClass c) {
  switch (c) {
    case InteractionClass::ScissorsRight:
    case InteractionClass::ScissorsLeft:
      return Payload::Scissors;
    case InteractionClass::NeedleDriverRight:
    case InteractionClass::NeedleDriverLeft:
      return Payload::NeedleDriver;
    case InteractionClass::ForcepsRight:
    case InteractionClass::ForcepsLeft:
      return Payload::Forceps;
    default:
      return Payload::Empty;
  }
}

/// Tool payload carried by a localization tool class. Hands have none.
inline Payload payload_of(LocClass c) {
  switch (c) {
    case LocClass::Scissors:
      return Payload::Scissors;
    case LocClass::NeedleDriver:
      return Payload::NeedleDriver;
    case LocClass::Forceps:
      return Payload::Forceps;
    default:
      return Payload::Empty;
  }
}

/// (payload, side) -> interaction class. Payload must not be Absent.
InteractionClass interaction_class(Payload p, Side s);

inline bool is_tool_payload(Payload p) {
  return p == Payload::Scissors || p == Payload::NeedleDriver ||
         p == Payload::Forceps;
}

/// Class of a detection; the variant alternative fixes the channel.
using DetClass = std::variant<LocClass, InteractionClass>;

inline Channel channel_of(const DetClass& c) {
  return c.index() == 0 ? Channel::Localization : Channel::Interaction;
}

/// Dense per-(channel,class) key, usable as an array or map index.
inline int class_key(const DetClass& c) {
  if (const auto* l = std::get_if<LocClass>(&c)) return static_cast<int>(*l);
  return kLocClassCount + static_cast<int>(std::get<InteractionClass>(c));
}

/// One channel-tagged, class-tagged, confidence-scored box on one frame.
struct Detection {
  FrameIndex frame = 0;
  DetClass cls = LocClass::RightHand;
  Box box;
  double confidence = 1.0;

  Channel channel() const { return channel_of(cls); }
};

/// All detections of one frame, input order preserved.
struct FrameGroup {
  FrameIndex frame = 0;
  std::vector<Detection> dets;
};

/// A (usage class, start frame, end frame) interval, both ends inclusive.
struct TimedEvent {
  InteractionClass cls = InteractionClass::EmptyRight;
  FrameIndex start = 0;
  FrameIndex end = 0;

  friend bool operator==(const TimedEvent&, const TimedEvent&) = default;
};

struct SessionMeta {
  double fps = 30.0;
  int frame_width = 640;
  int frame_height = 480;
};

/// Per-frame, per-hand resolved tool assignment.
///
/// After resolution, payload == Absent iff provenance == Absent iff the hand
/// was undetected in both channels, and box is present otherwise. Smoothing
/// rewrites payload only, so a smoothed state may pair a voted payload with
/// the untouched box/provenance of its raw frame.
struct UsageState {
  FrameIndex frame = 0;
  Side side = Side::Right;
  Payload payload = Payload::Absent;
  std::optional<Box> box;
  Provenance provenance = Provenance::Absent;
};

/// Dense per-side usage sequences over frames [0, frames()).
struct UsageTimeline {
  double fps = 30.0;
  std::vector<UsageState> right;
  std::vector<UsageState> left;

  std::size_t frames() const { return right.size(); }
  const std::vector<UsageState>& states(Side s) const {
    return s == Side::Right ? right : left;
  }
  std::vector<UsageState>& states(Side s) {
    return s == Side::Right ? right : left;
  }
};

// snake_case names used by every external file format.
std::string_view to_string(LocClass c);
std::string_view to_string(InteractionClass c);
std::string_view to_string(Channel c);
std::string_view to_string(Side s);
std::string_view to_string(Payload p);
std::string_view to_string(Provenance p);
std::string to_string(const DetClass& c);

std::optional<LocClass> loc_class_from(std::string_view name);
std::optional<InteractionClass> interaction_class_from(std::string_view name);
std::optional<Channel> channel_from(std::string_view name);
std::optional<Side> side_from(std::string_view name);
std::optional<Payload> payload_from(std::string_view name);
std::optional<Provenance> provenance_from(std::string_view name);

}  // namespace opskill

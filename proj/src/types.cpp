#include "opskill/types.hpp"

#include <cmath>
#include <stdexcept>

namespace opskill {

bool box_valid(const Box& b) {
  return std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.w) &&
         std::isfinite(b.h) && b.x >= 0.0 && b.y >= 0.0 && b.w > 0.0 &&
         b.h > 0.0;
}

InteractionClass interaction_class(Payload p, Side s) {
  const int right = (s == Side::Right) ? 0 : 1;
  switch (p) {
    case Payload::Scissors:
      return static_cast<InteractionClass>(right + 0);
    case Payload::NeedleDriver:
      return static_cast<InteractionClass>(right + 2);
    case Payload::Forceps:
      return static_cast<InteractionClass>(right + 4);
    case Payload::Empty:
      return static_cast<InteractionClass>(right + 6);
    default:
      throw std::invalid_argument("interaction_class: Absent has no class");
  }
}

namespace {

constexpr std::array<std::string_view, kLocClassCount> kLocNames = {
    "right_hand", "left_hand", "needle_driver", "forceps", "scissors"};

constexpr std::array<std::string_view, kInteractionClassCount> kIntNames = {
    "scissors_in_right_hand",      "scissors_in_left_hand",
    "needle_driver_in_right_hand", "needle_driver_in_left_hand",
    "forceps_in_right_hand",       "forceps_in_left_hand",
    "empty_right_hand",            "empty_left_hand"};

constexpr std::array<std::string_view, 2> kChannelNames = {"loc", "int"};
constexpr std::array<std::string_view, 2> kSideNames = {"right", "left"};
constexpr std::array<std::string_view, 5> kPayloadNames = {
    "scissors", "needle_driver", "forceps", "empty", "absent"};
constexpr std::array<std::string_view, 4> kProvenanceNames = {
    "direct", "scenario1", "scenario2", "absent"};

template <typename Enum, std::size_t N>
std::optional<Enum> from_name(const std::array<std::string_view, N>& names,
                              std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(LocClass c) {
  return kLocNames[static_cast<int>(c)];
}
std::string_view to_string(InteractionClass c) {
  return kIntNames[static_cast<int>(c)];
}
std::string_view to_string(Channel c) {
  return kChannelNames[static_cast<int>(c)];
}
std::string_view to_string(Side s) { return kSideNames[static_cast<int>(s)]; }
std::string_view to_string(Payload p) {
  return kPayloadNames[static_cast<int>(p)];
}
std::string_view to_string(Provenance p) {
  return kProvenanceNames[static_cast<int>(p)];
}

std::string to_string(const DetClass& c) {
  if (const auto* l = std::get_if<LocClass>(&c))
    return std::string(to_string(*l));
  return std::string(to_string(std::get<InteractionClass>(c)));
}

std::optional<LocClass> loc_class_from(std::string_view name) {
  return from_name<LocClass>(kLocNames, name);
}
std::optional<InteractionClass> interaction_class_from(std::string_view name) {
  return from_name<InteractionClass>(kIntNames, name);
}
std::optional<Channel> channel_from(std::string_view name) {
  return from_name<Channel>(kChannelNames, name);
}
std::optional<Side> side_from(std::string_view name) {
  return from_name<Side>(kSideNames, name);
}
std::optional<Payload> payload_from(std::string_view name) {
  return from_name<Payload>(kPayloadNames, name);
}
std::optional<Provenance> provenance_from(std::string_view name) {
  return from_name<Provenance>(kProvenanceNames, name);
}

}  // namespace opskill

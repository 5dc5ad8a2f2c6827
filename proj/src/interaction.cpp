#include "opskill/interaction.hpp"

#include <stdexcept>

#include "opskill/geometry.hpp"

namespace opskill {

namespace {

// Highest-confidence detection of the side's hand class; ties by input order.
const Detection* find_hand(const std::vector<Detection>& loc_dets, Side side) {
  const LocClass hand_cls = hand_class_of(side);
  const Detection* best = nullptr;
  for (const Detection& d : loc_dets) {
    const auto* l = std::get_if<LocClass>(&d.cls);
    if (!l || *l != hand_cls) continue;
    if (!best || d.confidence > best->confidence) best = &d;
  }
  return best;
}

std::vector<Detection> loc_tools(const std::vector<Detection>& loc_dets) {
  std::vector<Detection> tools;
  for (const Detection& d : loc_dets) {
    if (const auto* l = std::get_if<LocClass>(&d.cls); l && is_tool(*l)) {
      tools.push_back(d);
    }
  }
  return tools;
}

}  // namespace

std::pair<Payload, Box> scenario1_fallback(
    const Box& hand_box, const std::vector<Detection>& tool_dets,
    double min_overlap) {
  const Detection* best = nullptr;
  double best_score = -1.0;
  for (const Detection& d : tool_dets) {
    const double score = overlap_over_min(hand_box, d.box);
    const bool better =
        score > best_score ||
        (score == best_score && best && d.confidence > best->confidence);
    if (better) {
      best = &d;
      best_score = score;
    }
  }
  if (best && best_score >= min_overlap) {
    return {payload_of(std::get<LocClass>(best->cls)), hand_box};
  }
  return {Payload::Empty, hand_box};
}

std::size_t scenario2_select(const std::vector<Detection>& candidates,
                             const std::vector<Detection>& loc_dets,
                             Side side) {
  if (candidates.size() < 2) {
    throw std::invalid_argument("scenario2_select: needs >= 2 candidates");
  }
  const std::vector<Detection> tools = loc_tools(loc_dets);
  const Detection* hand = find_hand(loc_dets, side);

  std::size_t best = 0;
  double best_score = -1.0;
  double best_conf = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Detection& c = candidates[i];
    double score = 0.0;
    if (payload_of(std::get<InteractionClass>(c.cls)) == Payload::Empty) {
      // Empty carries no tool to match; compare against the hand instead.
      if (hand) score = iou(c.box, hand->box);
    } else {
      for (const Detection& t : tools) {
        score = std::max(score, iou(c.box, t.box));
      }
    }
    if (score > best_score ||
        (score == best_score && c.confidence > best_conf)) {
      best = i;
      best_score = score;
      best_conf = c.confidence;
    }
  }
  return best;
}

FrameResolution resolve_frame(FrameIndex frame,
                              const std::vector<Detection>& int_dets,
                              const std::vector<Detection>& loc_dets,
                              double min_overlap, ResolveDiagnostics& diag) {
  FrameResolution out;
  for (Side side : {Side::Right, Side::Left}) {
    UsageState& state = (side == Side::Right) ? out.right : out.left;
    state.frame = frame;
    state.side = side;

    std::vector<Detection> candidates;
    for (const Detection& d : int_dets) {
      if (const auto* ic = std::get_if<InteractionClass>(&d.cls);
          ic && side_of(*ic) == side) {
        candidates.push_back(d);
      }
    }

    if (candidates.size() == 1) {
      state.payload = payload_of(std::get<InteractionClass>(candidates[0].cls));
      state.box = candidates[0].box;
      state.provenance = Provenance::Direct;
      ++diag.direct;
    } else if (candidates.empty()) {
      if (const Detection* hand = find_hand(loc_dets, side)) {
        auto [payload, box] =
            scenario1_fallback(hand->box, loc_tools(loc_dets), min_overlap);
        state.payload = payload;
        state.box = box;
        state.provenance = Provenance::Scenario1;
        ++diag.scenario1;
      } else {
        state.payload = Payload::Absent;
        state.provenance = Provenance::Absent;
        ++diag.absent;
      }
    } else {
      const std::size_t pick = scenario2_select(candidates, loc_dets, side);
      state.payload =
          payload_of(std::get<InteractionClass>(candidates[pick].cls));
      state.box = candidates[pick].box;
      state.provenance = Provenance::Scenario2;
      ++diag.scenario2;
    }
  }
  return out;
}

}  // namespace opskill

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "opskill/types.hpp"

namespace opskill {

/// Running counts of how per-(frame,side) usage decisions were reached.
struct ResolveDiagnostics {
  std::int64_t direct = 0;
  std::int64_t scenario1 = 0;
  std::int64_t scenario2 = 0;
  std::int64_t absent = 0;

  std::int64_t resolved() const { return direct + scenario1 + scenario2; }
};

struct FrameResolution {
  UsageState right;
  UsageState left;
};

/// Searches the localization tools for the best containment-tolerant overlap
/// with the hand box. Payload is the best tool's class when the top score
/// reaches min_overlap (ties: higher confidence, then input order), Empty
/// otherwise. The returned box is always the hand box.
std::pair<Payload, Box> scenario1_fallback(
    const Box& hand_box, const std::vector<Detection>& tool_dets,
    double min_overlap);

/// Picks one of >= 2 same-side interaction candidates. Every candidate is
/// scored by its best IoU against the localization tool boxes; Empty-payload
/// candidates score against the side's localization hand box instead. Best
/// pair wins; ties fall back to higher confidence, then input order.
/// Returns the index into candidates.
std::size_t scenario2_select(const std::vector<Detection>& candidates,
                             const std::vector<Detection>& loc_dets,
                             Side side);

/// Resolves exactly one UsageState per side for one frame. Inputs are the
/// frame's post-suppression interaction and localization detections.
/// min_overlap is the Scenario-1 acceptance threshold on overlap_over_min.
FrameResolution resolve_frame(FrameIndex frame,
                              const std::vector<Detection>& int_dets,
                              const std::vector<Detection>& loc_dets,
                              double min_overlap, ResolveDiagnostics& diag);

}  // namespace opskill

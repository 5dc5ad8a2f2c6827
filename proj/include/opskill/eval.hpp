#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "opskill/types.hpp"

namespace opskill {

/// Table-3 style usage categories: tool categories pool both sides, the two
/// hand rows score the per-side Empty label.
enum class UsageCategory : std::uint8_t {
  LeftHand = 0,  ///< empty left hand
  RightHand,     ///< empty right hand
  NeedleDriver,
  Forceps,
  Scissors,
};
inline constexpr int kUsageCategoryCount = 5;

std::string_view to_string(UsageCategory c);

struct CategoryScore {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Frame-level usage quality. Categories without any ground-truth or
/// predicted slot are left unset and excluded from the means.
struct UsageMetrics {
  std::array<std::optional<CategoryScore>, kUsageCategoryCount> per_category;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_f1 = 0.0;
  double accuracy = 0.0;
  std::int64_t slots = 0;
};

struct EvalReport {
  std::array<std::optional<double>, kLocClassCount> ap_loc;
  std::array<std::optional<double>, kInteractionClassCount> ap_int;
  std::optional<double> map_localization;
  std::optional<double> map_interaction;
  std::optional<double> map_overall;
  std::optional<UsageMetrics> usage;
};

/// Average precision for one class at the given IoU threshold.
///
/// Detections are visited by descending confidence (ties by input order) and
/// greedily matched to the unmatched same-frame ground-truth box of maximal
/// IoU when that IoU reaches iou_thresh. AP is the area under the precision
/// envelope of the resulting curve (all-point interpolation). Unset when the
/// class has no ground-truth instances.
std::optional<double> ap50(const std::vector<Detection>& dets,
                           const std::vector<Detection>& gts, DetClass cls,
                           double iou_thresh = 0.5);

/// Arithmetic mean over the defined APs. Throws std::invalid_argument when
/// every entry is undefined.
double mean_ap(std::span<const std::optional<double>> aps);

/// AP for every class of both channels plus the three mAP aggregates.
EvalReport detection_eval(const std::vector<FrameGroup>& dets,
                          const std::vector<FrameGroup>& gts,
                          double iou_thresh = 0.5);

/// Per-(frame,side) comparison of a predicted usage timeline against dense
/// ground-truth events. Frames outside all events count as Empty for that
/// side; Absent predictions are wrong for every category.
/// Throws std::invalid_argument when the timeline fps differs from meta.
UsageMetrics usage_frame_metrics(const UsageTimeline& predicted,
                                 const std::vector<TimedEvent>& gt_events,
                                 const SessionMeta& meta);

}  // namespace opskill

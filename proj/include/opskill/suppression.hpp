#pragma once

#include <vector>

#include "opskill/types.hpp"

namespace opskill {

/// Greedy per-class NMS over the detections of one frame and channel.
///
/// Detections are visited by descending confidence (ties keep input order);
/// one is kept iff its IoU with every already-kept detection of the same
/// class is < iou_thresh. Output is sorted by descending confidence.
/// Throws std::invalid_argument when iou_thresh is outside [0,1].
std::vector<Detection> standard_nms(const std::vector<Detection>& dets,
                                    double iou_thresh);

/// Cross-class tool suppression for the localization channel.
///
/// Runs after standard_nms. Tool-class detections compete greedily by
/// confidence across classes: a tool is dropped when its IoU with a kept
/// tool reaches cross_thresh. Hand detections are never dropped and never
/// suppress tools. Input order is preserved.
/// Throws std::invalid_argument on a non-localization detection or a
/// threshold outside [0,1].
std::vector<Detection> tool_nms(const std::vector<Detection>& dets,
                                double cross_thresh);

}  // namespace opskill

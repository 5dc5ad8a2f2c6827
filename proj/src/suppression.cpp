#include "opskill/suppression.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "opskill/geometry.hpp"

namespace opskill {

namespace {

void check_thresh(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::invalid_argument(std::string(what) +
                                " must be in [0,1], got " + std::to_string(t));
  }
}

// Indices sorted by descending confidence, ties by input order.
std::vector<std::size_t> confidence_order(const std::vector<Detection>& dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return dets[a].confidence > dets[b].confidence;
                   });
  return order;
}

}  // namespace

std::vector<Detection> standard_nms(const std::vector<Detection>& dets,
                                    double iou_thresh) {
  check_thresh(iou_thresh, "iou_thresh");
  std::vector<Detection> kept;
  kept.reserve(dets.size());
  for (std::size_t i : confidence_order(dets)) {
    const Detection& d = dets[i];
    bool keep = true;
    for (const Detection& k : kept) {
      if (k.cls == d.cls && iou(k.box, d.box) >= iou_thresh) {
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(d);
  }
  return kept;
}

std::vector<Detection> tool_nms(const std::vector<Detection>& dets,
                                double cross_thresh) {
  check_thresh(cross_thresh, "cross_thresh");
  for (const Detection& d : dets) {
    if (d.channel() != Channel::Localization) {
      throw std::invalid_argument(
          "tool_nms: input must be localization-channel detections");
    }
  }

  std::vector<bool> suppressed(dets.size(), false);
  std::vector<std::size_t> kept_tools;
  for (std::size_t i : confidence_order(dets)) {
    if (!is_tool(std::get<LocClass>(dets[i].cls))) continue;
    bool keep = true;
    for (std::size_t k : kept_tools) {
      if (iou(dets[k].box, dets[i].box) >= cross_thresh) {
        keep = false;
        break;
      }
    }
    if (keep) {
      kept_tools.push_back(i);
    } else {
      suppressed[i] = true;
    }
  }

  std::vector<Detection> out;
  out.reserve(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (!suppressed[i]) out.push_back(dets[i]);
  }
  return out;
}

}  // namespace opskill

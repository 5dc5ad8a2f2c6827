#include "opskill/eval.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "opskill/geometry.hpp"

namespace opskill {

namespace {

constexpr std::array<std::string_view, kUsageCategoryCount> kCategoryNames = {
    "left_hand", "right_hand", "needle_driver", "forceps", "scissors"};

std::optional<UsageCategory> category_of(Payload p, Side s) {
  switch (p) {
    case Payload::Scissors:
      return UsageCategory::Scissors;
    case Payload::NeedleDriver:
      return UsageCategory::NeedleDriver;
    case Payload::Forceps:
      return UsageCategory::Forceps;
    case Payload::Empty:
      return s == Side::Left ? UsageCategory::LeftHand
                             : UsageCategory::RightHand;
    default:
      return std::nullopt;  // Absent matches no category
  }
}

}  // namespace

std::string_view to_string(UsageCategory c) {
  return kCategoryNames[static_cast<int>(c)];
}

std::optional<double> ap50(const std::vector<Detection>& dets,
                           const std::vector<Detection>& gts, DetClass cls,
                           double iou_thresh) {
  struct GtBox {
    Box box;
    bool matched = false;
  };
  std::map<FrameIndex, std::vector<GtBox>> gt_by_frame;
  std::int64_t total_gt = 0;
  for (const Detection& g : gts) {
    if (g.cls != cls) continue;
    gt_by_frame[g.frame].push_back({g.box});
    ++total_gt;
  }
  if (total_gt == 0) return std::nullopt;

  std::vector<const Detection*> preds;
  for (const Detection& d : dets) {
    if (d.cls == cls) preds.push_back(&d);
  }
  std::stable_sort(preds.begin(), preds.end(),
                   [](const Detection* a, const Detection* b) {
                     return a->confidence > b->confidence;
                   });

  // Precision/recall point after each prediction, best confidence first.
  std::vector<std::pair<double, double>> curve;
  curve.reserve(preds.size());
  std::int64_t tp = 0;
  std::int64_t seen = 0;
  for (const Detection* d : preds) {
    ++seen;
    GtBox* best = nullptr;
    double best_iou = 0.0;
    if (auto it = gt_by_frame.find(d->frame); it != gt_by_frame.end()) {
      for (GtBox& g : it->second) {
        if (g.matched) continue;
        const double ov = iou(d->box, g.box);
        if (!best || ov > best_iou) {
          best = &g;
          best_iou = ov;
        }
      }
    }
    if (best && best_iou >= iou_thresh) {
      best->matched = true;
      ++tp;
    }
    curve.emplace_back(static_cast<double>(tp) / static_cast<double>(seen),
                       static_cast<double>(tp) / static_cast<double>(total_gt));
  }

  // Area under the running-max precision envelope, all recall points.
  double ap = 0.0;
  double envelope = 0.0;
  double prev_recall = 0.0;
  std::vector<double> env(curve.size());
  for (std::size_t i = curve.size(); i-- > 0;) {
    envelope = std::max(envelope, curve[i].first);
    env[i] = envelope;
  }
  for (std::size_t i = 0; i < curve.size(); ++i) {
    ap += (curve[i].second - prev_recall) * env[i];
    prev_recall = curve[i].second;
  }
  return ap;
}

double mean_ap(std::span<const std::optional<double>> aps) {
  double sum = 0.0;
  int n = 0;
  for (const auto& ap : aps) {
    if (ap) {
      sum += *ap;
      ++n;
    }
  }
  if (n == 0) {
    throw std::invalid_argument("mean_ap: every class AP is undefined");
  }
  return sum / n;
}

EvalReport detection_eval(const std::vector<FrameGroup>& dets,
                          const std::vector<FrameGroup>& gts,
                          double iou_thresh) {
  std::vector<Detection> flat_dets, flat_gts;
  for (const FrameGroup& g : dets) {
    flat_dets.insert(flat_dets.end(), g.dets.begin(), g.dets.end());
  }
  for (const FrameGroup& g : gts) {
    flat_gts.insert(flat_gts.end(), g.dets.begin(), g.dets.end());
  }

  EvalReport rep;
  for (int c = 0; c < kLocClassCount; ++c) {
    rep.ap_loc[c] =
        ap50(flat_dets, flat_gts, static_cast<LocClass>(c), iou_thresh);
  }
  for (int c = 0; c < kInteractionClassCount; ++c) {
    rep.ap_int[c] =
        ap50(flat_dets, flat_gts, static_cast<InteractionClass>(c), iou_thresh);
  }

  const auto any_defined = [](std::span<const std::optional<double>> aps) {
    return std::any_of(aps.begin(), aps.end(),
                       [](const auto& a) { return a.has_value(); });
  };
  std::vector<std::optional<double>> all(rep.ap_loc.begin(), rep.ap_loc.end());
  all.insert(all.end(), rep.ap_int.begin(), rep.ap_int.end());
  if (any_defined(rep.ap_loc)) rep.map_localization = mean_ap(rep.ap_loc);
  if (any_defined(rep.ap_int)) rep.map_interaction = mean_ap(rep.ap_int);
  if (any_defined(all)) rep.map_overall = mean_ap(all);
  return rep;
}

UsageMetrics usage_frame_metrics(const UsageTimeline& predicted,
                                 const std::vector<TimedEvent>& gt_events,
                                 const SessionMeta& meta) {
  if (predicted.fps != meta.fps) {
    throw std::invalid_argument("usage_frame_metrics: fps mismatch");
  }

  FrameIndex span = static_cast<FrameIndex>(predicted.frames());
  for (const TimedEvent& e : gt_events) {
    span = std::max(span, e.end + 1);
  }

  // Dense ground-truth payload per (frame, side); Empty outside all events.
  std::array<std::vector<Payload>, kSideCount> gt;
  for (auto& v : gt) v.assign(static_cast<std::size_t>(span), Payload::Empty);
  for (const TimedEvent& e : gt_events) {
    const Side s = side_of(e.cls);
    const Payload p = payload_of(e.cls);
    for (FrameIndex f = e.start; f <= e.end; ++f) {
      gt[static_cast<int>(s)][static_cast<std::size_t>(f)] = p;
    }
  }

  std::array<std::int64_t, kUsageCategoryCount> tp{}, fp{}, fn{};
  std::int64_t correct = 0;
  for (FrameIndex f = 0; f < span; ++f) {
    for (Side side : {Side::Right, Side::Left}) {
      const auto& states = predicted.states(side);
      const Payload pred =
          f < static_cast<FrameIndex>(states.size())
              ? states[static_cast<std::size_t>(f)].payload
              : Payload::Absent;
      const Payload truth = gt[static_cast<int>(side)][static_cast<std::size_t>(f)];
      const auto truth_cat = category_of(truth, side);
      const auto pred_cat = category_of(pred, side);
      if (pred_cat && truth_cat && *pred_cat == *truth_cat) {
        ++tp[static_cast<int>(*truth_cat)];
        ++correct;
      } else {
        if (truth_cat) ++fn[static_cast<int>(*truth_cat)];
        if (pred_cat) ++fp[static_cast<int>(*pred_cat)];
      }
    }
  }

  UsageMetrics m;
  m.slots = span * 2;
  m.accuracy = m.slots > 0
                   ? static_cast<double>(correct) / static_cast<double>(m.slots)
                   : 0.0;
  double sum_p = 0.0, sum_r = 0.0, sum_f1 = 0.0;
  int engaged = 0;
  for (int c = 0; c < kUsageCategoryCount; ++c) {
    if (tp[c] + fp[c] + fn[c] == 0) continue;
    CategoryScore s;
    s.tp = tp[c];
    s.fp = fp[c];
    s.fn = fn[c];
    s.precision = tp[c] + fp[c] > 0
                      ? static_cast<double>(tp[c]) /
                            static_cast<double>(tp[c] + fp[c])
                      : 0.0;
    s.recall = tp[c] + fn[c] > 0 ? static_cast<double>(tp[c]) /
                                       static_cast<double>(tp[c] + fn[c])
                                 : 0.0;
    s.f1 = s.precision + s.recall > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    m.per_category[c] = s;
    sum_p += s.precision;
    sum_r += s.recall;
    sum_f1 += s.f1;
    ++engaged;
  }
  if (engaged > 0) {
    m.mean_precision = sum_p / engaged;
    m.mean_recall = sum_r / engaged;
    m.mean_f1 = sum_f1 / engaged;
  }
  return m;
}

}  // namespace opskill

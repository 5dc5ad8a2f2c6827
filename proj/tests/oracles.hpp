// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written in a different shape from the
// production code paths it verifies.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "opskill/types.hpp"

namespace oracle {

using opskill::Box;
using opskill::Detection;

// IoU from corner coordinates rather than width/height arithmetic.
inline double iou(const Box& a, const Box& b) {
  const double ax2 = a.x + a.w, ay2 = a.y + a.h;
  const double bx2 = b.x + b.w, by2 = b.y + b.h;
  const double iw = std::min(ax2, bx2) - std::max(a.x, b.x);
  const double ih = std::min(ay2, by2) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return inter / uni;
}

// Greedy NMS by repeated global argmax over the unprocessed set.
inline std::vector<Detection> standard_nms(const std::vector<Detection>& dets,
                                           double thresh) {
  const std::size_t n = dets.size();
  std::vector<int> state(n, 0);  // 0 open, 1 kept, 2 suppressed
  for (;;) {
    std::ptrdiff_t best = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] != 0) continue;
      if (best < 0 ||
          dets[i].confidence > dets[static_cast<std::size_t>(best)].confidence)
        best = static_cast<std::ptrdiff_t>(i);
    }
    if (best < 0) break;
    const auto b = static_cast<std::size_t>(best);
    state[b] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] != 0 || !(dets[i].cls == dets[b].cls)) continue;
      if (oracle::iou(dets[i].box, dets[b].box) >= thresh) state[i] = 2;
    }
  }
  // kept, ordered by confidence descending with input order on ties
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (state[i] == 1) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return dets[a].confidence > dets[b].confidence;
  });
  std::vector<Detection> out;
  for (std::size_t i : order) out.push_back(dets[i]);
  return out;
}

// Cross-class suppression among tool classes only; hands pass through.
inline std::vector<Detection> tool_nms(const std::vector<Detection>& dets,
                                       double thresh) {
  const std::size_t n = dets.size();
  const auto is_tool_det = [](const Detection& d) {
    const auto* l = std::get_if<opskill::LocClass>(&d.cls);
    return l && opskill::is_tool(*l);
  };
  std::vector<int> state(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_tool_det(dets[i])) state[i] = 3;  // not participating
  }
  for (;;) {
    std::ptrdiff_t best = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] != 0) continue;
      if (best < 0 ||
          dets[i].confidence > dets[static_cast<std::size_t>(best)].confidence)
        best = static_cast<std::ptrdiff_t>(i);
    }
    if (best < 0) break;
    const auto b = static_cast<std::size_t>(best);
    state[b] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] != 0) continue;
      if (oracle::iou(dets[i].box, dets[b].box) >= thresh) state[i] = 2;
    }
  }
  std::vector<Detection> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (state[i] != 2) out.push_back(dets[i]);
  }
  return out;
}

// Exhaustive AP at one IoU threshold: greedy confidence-ordered matching,
// then the precision envelope integrated point by point in O(n^2).
inline std::optional<double> average_precision(
    std::vector<Detection> dets, const std::vector<Detection>& gts,
    double iou_thresh) {
  if (gts.empty()) return std::nullopt;

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return dets[a].confidence > dets[b].confidence;
  });

  std::vector<bool> taken(gts.size(), false);
  std::vector<double> precision, recall;
  int tp = 0;
  int seen = 0;
  for (std::size_t oi : order) {
    const Detection& d = dets[oi];
    ++seen;
    double best_iou = -1.0;
    std::ptrdiff_t best = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].frame != d.frame) continue;
      const double ov = oracle::iou(d.box, gts[g].box);
      if (ov > best_iou) {
        best_iou = ov;
        best = static_cast<std::ptrdiff_t>(g);
      }
    }
    if (best >= 0 && best_iou >= iou_thresh) {
      taken[static_cast<std::size_t>(best)] = true;
      ++tp;
    }
    precision.push_back(static_cast<double>(tp) / seen);
    recall.push_back(static_cast<double>(tp) /
                     static_cast<double>(gts.size()));
  }

  double ap = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    const double r_prev = i == 0 ? 0.0 : recall[i - 1];
    if (recall[i] <= r_prev) continue;
    double env = 0.0;
    for (std::size_t j = i; j < precision.size(); ++j) {
      env = std::max(env, precision[j]);
    }
    ap += (recall[i] - r_prev) * env;
  }
  return ap;
}

// Trailing-window plurality vote, recounted from scratch for every frame.
inline std::vector<opskill::Payload> smooth_payloads(
    const std::vector<opskill::UsageState>& states,
    const std::vector<opskill::VelocitySample>& vel, int window,
    double fast_gate) {
  using opskill::Payload;
  std::vector<Payload> out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const bool fast = i < vel.size() && vel[i].defined && vel[i].v > fast_gate;
    if (fast && !out.empty()) {
      out.push_back(out.back());
      continue;
    }
    int counts[4] = {0, 0, 0, 0};
    const std::size_t lo =
        i + 1 >= static_cast<std::size_t>(window)
            ? i + 1 - static_cast<std::size_t>(window)
            : 0;
    for (std::size_t j = lo; j <= i; ++j) {
      if (states[j].payload != Payload::Absent) {
        ++counts[static_cast<int>(states[j].payload)];
      }
    }
    int max_count = *std::max_element(counts, counts + 4);
    int winners = 0;
    Payload winner = Payload::Empty;
    for (int p = 0; p < 4; ++p) {
      if (counts[p] == max_count && max_count > 0) {
        ++winners;
        winner = static_cast<Payload>(p);
      }
    }
    if (max_count > 0 && winners == 1) {
      out.push_back(winner);
    } else if (!out.empty()) {
      out.push_back(out.back());
    } else {
      out.push_back(states[i].payload);
    }
  }
  return out;
}

// Movement count as the number of maximal above-threshold runs that are
// fully enclosed by below-threshold samples within the same defined
// stretch of the series.
inline std::int64_t enclosed_runs(const std::vector<opskill::VelocitySample>& vel,
                                  opskill::FrameIndex lo,
                                  opskill::FrameIndex hi, double thresh) {
  std::int64_t runs = 0;
  std::size_t i = static_cast<std::size_t>(std::max<opskill::FrameIndex>(lo, 0));
  const std::size_t end =
      std::min<std::size_t>(vel.size(), static_cast<std::size_t>(hi) + 1);
  while (i < end) {
    if (!vel[i].defined) {
      ++i;
      continue;
    }
    // one maximal defined stretch
    std::size_t j = i;
    while (j + 1 < end && vel[j + 1].defined) ++j;
    std::size_t k = i;
    while (k <= j) {
      if (vel[k].v > thresh) {
        const std::size_t run_start = k;
        while (k <= j && vel[k].v > thresh) ++k;
        const bool preceded = run_start > i;
        const bool followed = k <= j;
        if (preceded && followed) ++runs;
      } else {
        ++k;
      }
    }
    i = j + 1;
  }
  return runs;
}

}  // namespace oracle

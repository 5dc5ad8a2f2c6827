#pragma once

#include <algorithm>

#include "opskill/types.hpp"

namespace opskill {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double intersection_area(const Box& a, const Box& b) {
  const double iw =
      std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih =
      std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  // Boxes are closed regions; zero-width intersections contribute zero area.
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

/// Intersection over union. Symmetric, in [0,1], 0 when disjoint.
inline double iou(const Box& a, const Box& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  // rounding may nudge the quotient past 1 for near-identical boxes
  return uni > 0.0 ? std::min(1.0, inter / uni) : 0.0;
}

/// Intersection over the smaller box's area; 1 when one box contains the
/// other. Containment-tolerant overlap used to match tools held inside a
/// hand box, where IoU would be small.
inline double overlap_over_min(const Box& a, const Box& b) {
  const double inter = intersection_area(a, b);
  const double min_area = std::min(a.area(), b.area());
  return min_area > 0.0 ? std::min(1.0, inter / min_area) : 0.0;
}

inline Point center(const Box& b) { return {b.x + b.w / 2.0, b.y + b.h / 2.0}; }

/// width / height
inline double aspect_ratio(const Box& b) { return b.w / b.h; }

}  // namespace opskill

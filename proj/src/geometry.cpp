#include "sctracker/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sct {

BoundingBox BoundingBox::fromTlwh(double left, double top, double width, double height) {
  return {left, top, width / height, height};
}

BoundingBox BoundingBox::fromXyxy(double x1, double y1, double x2, double y2) {
  return fromTlwh(x1, y1, x2 - x1, y2 - y1);
}

bool BoundingBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(a) && std::isfinite(h) &&
         a > 0.0 && h > 0.0;
}

double iou(const BoundingBox& b1, const BoundingBox& b2) {
  const double iw = std::min(b1.right(), b2.right()) - std::max(b1.x, b2.x);
  const double ih = std::min(b1.bottom(), b2.bottom()) - std::max(b1.y, b2.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;

  // Areas use the same corner arithmetic as the overlap so that identical
  // boxes give exactly 1.
  const double area1 = (b1.right() - b1.x) * (b1.bottom() - b1.y);
  const double area2 = (b2.right() - b2.x) * (b2.bottom() - b2.y);
  const double inter = iw * ih;
  const double uni = area1 + area2 - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

BoundingBox enclosingBox(const BoundingBox& b1, const BoundingBox& b2) {
  return BoundingBox::fromXyxy(std::min(b1.x, b2.x), std::min(b1.y, b2.y),
                               std::max(b1.right(), b2.right()),
                               std::max(b1.bottom(), b2.bottom()));
}

double heightConstraint(const BoundingBox& b1, const BoundingBox& b2, double epsilon) {
  const double hu = std::max(b1.bottom(), b2.bottom()) - std::min(b1.y, b2.y);
  const double dh = b1.h - b2.h;
  return (dh * dh) / ((hu + epsilon) * (hu + epsilon));
}

double areaConstraint(const BoundingBox& b1, const BoundingBox& b2, double epsilon) {
  const double wu = std::max(b1.right(), b2.right()) - std::min(b1.x, b2.x);
  const double hu = std::max(b1.bottom(), b2.bottom()) - std::min(b1.y, b2.y);
  const double su = wu * hu;
  const double ds = b1.area() - b2.area();
  return (ds * ds) / ((su + epsilon) * (su + epsilon));
}

double shapeIouDistance(const BoundingBox& b1, const BoundingBox& b2,
                        const ShapeIoUParams& params) {
  double d = 1.0 - iou(b1, b2);
  if (params.use_height_term) d += heightConstraint(b1, b2, params.epsilon);
  if (params.use_area_term) d += areaConstraint(b1, b2, params.epsilon);
  return d;
}

CostMatrix costMatrix(std::span<const BoundingBox> tracks,
                      std::span<const BoundingBox> detections,
                      const ShapeIoUParams& params) {
  CostMatrix costs(static_cast<Eigen::Index>(tracks.size()),
                   static_cast<Eigen::Index>(detections.size()));
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    for (std::size_t j = 0; j < detections.size(); ++j) {
      costs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          shapeIouDistance(tracks[i], detections[j], params);
    }
  }
  return costs;
}

}  // namespace sct

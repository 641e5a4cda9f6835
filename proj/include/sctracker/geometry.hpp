#pragma once

#include <Eigen/Dense>

#include <span>

namespace sct {

/// Axis-aligned box in tracker measurement form: top-left corner, aspect
/// ratio (w / h) and height. All conversions to and from tlwh / corner form
/// go through this type.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double a = 1.0;
  double h = 1.0;

  static BoundingBox fromTlwh(double left, double top, double width, double height);
  static BoundingBox fromXyxy(double x1, double y1, double x2, double y2);

  double width() const { return a * h; }
  double height() const { return h; }
  double area() const { return width() * h; }
  double right() const { return x + width(); }
  double bottom() const { return y + h; }

  /// h > 0, a > 0 and every field finite.
  bool valid() const;

  BoundingBox translated(double dx, double dy) const { return {x + dx, y + dy, a, h}; }

  bool operator==(const BoundingBox&) const = default;
};

struct ShapeIoUParams {
  double epsilon = 1e-7;
  bool use_height_term = true;
  bool use_area_term = true;

  /// Plain IoU distance (1 - IoU), no shape constraints.
  static ShapeIoUParams plainIoU() { return {1e-7, false, false}; }
};

/// Intersection over union. Boxes that only touch along an edge give 0.
double iou(const BoundingBox& b1, const BoundingBox& b2);

/// Smallest axis-aligned box containing both inputs.
BoundingBox enclosingBox(const BoundingBox& b1, const BoundingBox& b2);

/// Squared height difference normalized by the enclosing box height.
double heightConstraint(const BoundingBox& b1, const BoundingBox& b2, double epsilon);

/// Squared area difference normalized by the enclosing box area.
double areaConstraint(const BoundingBox& b1, const BoundingBox& b2, double epsilon);

/// 1 - IoU plus the enabled shape constraint terms. Lies in [0, 3].
double shapeIouDistance(const BoundingBox& b1, const BoundingBox& b2,
                        const ShapeIoUParams& params = {});

using CostMatrix = Eigen::MatrixXd;

/// Pairwise shape-IoU distances, rows = tracks, cols = detections.
CostMatrix costMatrix(std::span<const BoundingBox> tracks,
                      std::span<const BoundingBox> detections,
                      const ShapeIoUParams& params = {});

}  // namespace sct

#pragma once

#include "lsto/grid.hpp"

namespace lsto {

// One zero-isocontour vertex: lies on the grid edge (node_a, node_b) at
// parameter t in (0,1), t = phi_a / (phi_a - phi_b).
struct InterfaceVertex {
  int node_a = -1;
  int node_b = -1;
  double t = 0.0;
  double dt_da = 0.0;  // dt / d(phi_a)
  double dt_db = 0.0;  // dt / d(phi_b)
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
};

struct InterfaceSegment {
  int elem = -1;
  InterfaceVertex a, b;

  double length() const { return (a.p - b.p).norm(); }
};

struct Interface {
  std::vector<InterfaceSegment> segments;

  bool empty() const { return segments.empty(); }
  double total_length() const;
};

// Per-element area fraction of the phi > 0 region, with the analytic
// derivative of each cut element's fraction w.r.t. its nodal phi values.
struct SolidFractionField {
  Vector f;
  std::vector<std::vector<std::pair<int, double>>> df_dphi;  // per element: (node, d f_e/d phi)
};

struct TargetLSF {
  Vector phi_tilde;
  double phi_up = 0.0;
  double phi_low = 0.0;

  double band() const { return phi_up - phi_low; }
};

struct PerimeterResult {
  double value = 0.0;  // total interface length / design-domain boundary length
  Vector d_by_dphi;    // nodal gradient
};

Interface extract_interface(const StructuredGrid& grid, const Vector& phi);

SolidFractionField solid_fractions(const StructuredGrid& grid, const Vector& phi);

PerimeterResult perimeter(const StructuredGrid& grid, const Interface& interface);

TargetLSF signed_distance_target(const StructuredGrid& grid, const Interface& interface,
                                 const Vector& phi, double phi_low, double phi_up);

// Axis-aligned box in physical coordinates, used to exclude load/support pads
// from the feature-size measurement.
struct Box2d {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

// Diagnostic: thickness of the thinnest member of {indicator > threshold},
// measured as twice the distance-to-boundary at medial-axis pixels of a
// rasterization at resolution h/4. Throws if the solid phase is empty.
double minimum_feature_diameter(const StructuredGrid& grid, const Vector& nodal_indicator,
                                double threshold, const std::vector<Box2d>& exclude = {});

}  // namespace lsto

#include "lsto/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lsto {

double Interface::total_length() const {
  double sum = 0.0;
  for (const auto& s : segments) sum += s.length();
  return sum;
}

namespace {

struct ElemCut {
  int elem = -1;
  std::array<int, 4> nodes{};             // CCW corners
  std::array<Eigen::Vector2d, 4> pos{};   // corner coordinates
  std::array<double, 4> v{};              // nudged nodal phi
  std::array<bool, 4> has_cross{};        // crossing on edge k = (corner k, corner k+1)
  std::array<InterfaceVertex, 4> cross{};
  int n_cross = 0;
  bool saddle = false;
  double center = 0.0;
};

ElemCut cut_element(const StructuredGrid& grid, const Vector& phi, int e) {
  ElemCut c;
  c.elem = e;
  c.nodes = grid.elem_conn(e);
  const double eps = 1e-10 * grid.h;
  for (int k = 0; k < 4; ++k) {
    c.pos[k] = grid.node_coords(c.nodes[k]);
    double val = phi[c.nodes[k]];
    if (std::abs(val) < eps) val = eps;  // removes degenerate marching-squares cases
    c.v[k] = val;
    c.center += 0.25 * val;
  }
  for (int k = 0; k < 4; ++k) {
    const int kn = (k + 1) % 4;
    if ((c.v[k] > 0.0) != (c.v[kn] > 0.0)) {
      InterfaceVertex vx;
      vx.node_a = c.nodes[k];
      vx.node_b = c.nodes[kn];
      const double denom = c.v[k] - c.v[kn];
      vx.t = c.v[k] / denom;
      vx.dt_da = -c.v[kn] / (denom * denom);
      vx.dt_db = c.v[k] / (denom * denom);
      vx.p = c.pos[k] + vx.t * (c.pos[kn] - c.pos[k]);
      c.cross[k] = vx;
      c.has_cross[k] = true;
      ++c.n_cross;
    }
  }
  c.saddle = (c.n_cross == 4);
  return c;
}

// Segment pairing for a cut element; the saddle ambiguity is resolved by the
// sign of the bilinear value at the element center.
void append_segments(const ElemCut& c, std::vector<InterfaceSegment>& out) {
  if (c.n_cross == 0) return;
  if (!c.saddle) {
    InterfaceSegment s;
    s.elem = c.elem;
    int found = 0;
    for (int k = 0; k < 4; ++k) {
      if (!c.has_cross[k]) continue;
      (found == 0 ? s.a : s.b) = c.cross[k];
      ++found;
    }
    out.push_back(s);
    return;
  }
  const bool corner0_positive = c.v[0] > 0.0;
  // Pairs of edge indices forming the two segments.
  int pair[2][2];
  const bool connect_through_center = (c.center > 0.0) == corner0_positive;
  if (connect_through_center) {
    pair[0][0] = 0; pair[0][1] = 1;
    pair[1][0] = 2; pair[1][1] = 3;
  } else {
    pair[0][0] = 3; pair[0][1] = 0;
    pair[1][0] = 1; pair[1][1] = 2;
  }
  for (auto& pr : pair) {
    InterfaceSegment s;
    s.elem = c.elem;
    s.a = c.cross[pr[0]];
    s.b = c.cross[pr[1]];
    out.push_back(s);
  }
}

struct PolyVertex {
  Eigen::Vector2d p;
  int cross_edge = -1;  // -1 for fixed corners
};

// Shoelace area of a CCW polygon plus, for crossing vertices, the chain of
// d(area)/d(phi) through the crossing parameter t.
void accumulate_polygon(const ElemCut& c, const std::vector<PolyVertex>& poly, double inv_h2,
                        double& frac, std::array<double, 4>& dfrac_dv) {
  const int m = static_cast<int>(poly.size());
  double area2 = 0.0;
  for (int i = 0; i < m; ++i) {
    const auto& a = poly[i].p;
    const auto& b = poly[(i + 1) % m].p;
    area2 += a.x() * b.y() - b.x() * a.y();
  }
  frac += 0.5 * area2 * inv_h2;

  for (int i = 0; i < m; ++i) {
    const int k = poly[i].cross_edge;
    if (k < 0) continue;
    const auto& prev = poly[(i + m - 1) % m].p;
    const auto& next = poly[(i + 1) % m].p;
    const Eigen::Vector2d dA_dp(0.5 * (next.y() - prev.y()), 0.5 * (prev.x() - next.x()));
    const int kn = (k + 1) % 4;
    const Eigen::Vector2d dp_dt = c.pos[kn] - c.pos[k];
    const double denom = c.v[k] - c.v[kn];
    const double dt_da = -c.v[kn] / (denom * denom);
    const double dt_db = c.v[k] / (denom * denom);
    const double dA_dt = dA_dp.dot(dp_dt);
    dfrac_dv[k] += dA_dt * dt_da * inv_h2;
    dfrac_dv[kn] += dA_dt * dt_db * inv_h2;
  }
}

}  // namespace

Interface extract_interface(const StructuredGrid& grid, const Vector& phi) {
  if (phi.size() != grid.num_nodes())
    throw std::invalid_argument("extract_interface: phi size mismatch");
  Interface itf;
  for (int e = 0; e < grid.num_elements(); ++e) {
    const ElemCut c = cut_element(grid, phi, e);
    append_segments(c, itf.segments);
  }
  return itf;
}

SolidFractionField solid_fractions(const StructuredGrid& grid, const Vector& phi) {
  if (phi.size() != grid.num_nodes())
    throw std::invalid_argument("solid_fractions: phi size mismatch");
  SolidFractionField out;
  out.f.resize(grid.num_elements());
  out.df_dphi.resize(grid.num_elements());
  const double inv_h2 = 1.0 / (grid.h * grid.h);

  for (int e = 0; e < grid.num_elements(); ++e) {
    const ElemCut c = cut_element(grid, phi, e);
    if (c.n_cross == 0) {
      out.f[e] = c.v[0] > 0.0 ? 1.0 : 0.0;
      continue;
    }

    double frac = 0.0;
    std::array<double, 4> dfrac_dv{};
    const bool split_saddle = c.saddle && ((c.center > 0.0) != (c.v[0] > 0.0));
    if (split_saddle) {
      // Two disconnected corner triangles of the phase holding corners 0/2 or 1/3.
      for (int k = 0; k < 4; ++k) {
        if (!(c.v[k] > 0.0)) continue;
        const int kp = (k + 3) % 4;
        std::vector<PolyVertex> tri = {
            {c.cross[kp].p, kp}, {c.pos[k], -1}, {c.cross[k].p, k}};
        accumulate_polygon(c, tri, inv_h2, frac, dfrac_dv);
      }
    } else {
      std::vector<PolyVertex> poly;
      for (int k = 0; k < 4; ++k) {
        if (c.v[k] > 0.0) poly.push_back({c.pos[k], -1});
        if (c.has_cross[k]) poly.push_back({c.cross[k].p, k});
      }
      accumulate_polygon(c, poly, inv_h2, frac, dfrac_dv);
    }

    out.f[e] = std::clamp(frac, 0.0, 1.0);
    auto& g = out.df_dphi[e];
    for (int k = 0; k < 4; ++k)
      if (dfrac_dv[k] != 0.0) g.emplace_back(c.nodes[k], dfrac_dv[k]);
  }
  return out;
}

PerimeterResult perimeter(const StructuredGrid& grid, const Interface& interface) {
  PerimeterResult res;
  res.d_by_dphi = Vector::Zero(grid.num_nodes());
  const double norm = 1.0 / grid.boundary_length();

  double total = 0.0;
  for (const auto& s : interface.segments) {
    const Eigen::Vector2d d = s.a.p - s.b.p;
    const double len = d.norm();
    total += len;
    if (len < 1e-14 * grid.h) continue;
    const Eigen::Vector2d u = d / len;
    for (int end = 0; end < 2; ++end) {
      const InterfaceVertex& vx = end == 0 ? s.a : s.b;
      const double sgn = end == 0 ? 1.0 : -1.0;
      const Eigen::Vector2d pa = grid.node_coords(vx.node_a);
      const Eigen::Vector2d pb = grid.node_coords(vx.node_b);
      const Eigen::Vector2d dp_dt = pb - pa;
      const double dL_dt = sgn * u.dot(dp_dt);
      res.d_by_dphi[vx.node_a] += dL_dt * vx.dt_da;
      res.d_by_dphi[vx.node_b] += dL_dt * vx.dt_db;
    }
  }
  res.value = total * norm;
  res.d_by_dphi *= norm;
  return res;
}

TargetLSF signed_distance_target(const StructuredGrid& grid, const Interface& interface,
                                 const Vector& phi, double phi_low, double phi_up) {
  TargetLSF t;
  t.phi_low = phi_low;
  t.phi_up = phi_up;
  const int n = grid.num_nodes();
  t.phi_tilde.resize(n);

  if (interface.empty()) {
    for (int i = 0; i < n; ++i) t.phi_tilde[i] = phi[i] > 0.0 ? phi_up : phi_low;
    return t;
  }

  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d x = grid.node_coords(i);
    double d2 = std::numeric_limits<double>::infinity();
    for (const auto& s : interface.segments) {
      const Eigen::Vector2d ab = s.b.p - s.a.p;
      const double len2 = ab.squaredNorm();
      double u = 0.0;
      if (len2 > 0.0) u = std::clamp((x - s.a.p).dot(ab) / len2, 0.0, 1.0);
      d2 = std::min(d2, (x - s.a.p - u * ab).squaredNorm());
    }
    const double d = std::sqrt(d2);
    const double sd = phi[i] > 0.0 ? d : -d;
    t.phi_tilde[i] = std::clamp(sd, phi_low, phi_up);
  }
  return t;
}

namespace {

// 1D squared distance transform (Felzenszwalb & Huttenlocher).
void edt_1d(const std::vector<double>& f, std::vector<double>& d) {
  const int n = static_cast<int>(f.size());
  d.assign(n, 0.0);
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    d[q] = double(q - v[k]) * (q - v[k]) + f[v[k]];
  }
}

}  // namespace

double minimum_feature_diameter(const StructuredGrid& grid, const Vector& nodal_indicator,
                                double threshold, const std::vector<Box2d>& exclude) {
  if (nodal_indicator.size() != grid.num_nodes())
    throw std::invalid_argument("minimum_feature_diameter: field size mismatch");

  const int sub = 4;
  const double pix = grid.h / sub;
  // No padding: the domain edge cuts members instead of ending them, so it
  // must not register as a material boundary (a chord hugging the edge would
  // otherwise measure half its width). Distances to actual void pixels only
  // are exactly the mirror-extension semantics, since a reflected void is
  // never closer than its in-domain original.
  const int w = grid.nx * sub;
  const int hgt = grid.ny * sub;

  auto sample = [&](int px, int py) -> double {
    // pixel centers
    const double x = (px + 0.5) * pix;
    const double y = (py + 0.5) * pix;
    const int ei = std::min(grid.nx - 1, static_cast<int>(x / grid.h));
    const int ej = std::min(grid.ny - 1, static_cast<int>(y / grid.h));
    const double xi = x / grid.h - ei;
    const double eta = y / grid.h - ej;
    const auto c = grid.elem_conn(grid.elem_id(ei, ej));
    return (1 - xi) * (1 - eta) * nodal_indicator[c[0]] + xi * (1 - eta) * nodal_indicator[c[1]] +
           xi * eta * nodal_indicator[c[2]] + (1 - xi) * eta * nodal_indicator[c[3]];
  };

  const double inf = 1e18;
  std::vector<double> sq(static_cast<size_t>(w) * hgt, inf);
  bool any_solid = false, any_void = false;
  for (int py = 0; py < hgt; ++py) {
    for (int px = 0; px < w; ++px) {
      const bool solid = sample(px, py) > threshold;
      sq[static_cast<size_t>(py) * w + px] = solid ? inf : 0.0;
      any_solid = any_solid || solid;
      any_void = any_void || !solid;
    }
  }
  if (!any_solid) throw std::runtime_error("minimum_feature_diameter: empty solid phase");
  if (!any_void) return std::min(grid.width(), grid.height());

  // Exact Euclidean squared distance transform, columns then rows.
  std::vector<double> col(hgt), tmp(hgt);
  for (int px = 0; px < w; ++px) {
    for (int py = 0; py < hgt; ++py) col[py] = sq[static_cast<size_t>(py) * w + px];
    edt_1d(col, tmp);
    for (int py = 0; py < hgt; ++py) sq[static_cast<size_t>(py) * w + px] = tmp[py];
  }
  std::vector<double> row(w), rtmp(w);
  for (int py = 0; py < hgt; ++py) {
    for (int px = 0; px < w; ++px) row[px] = sq[static_cast<size_t>(py) * w + px];
    edt_1d(row, rtmp);
    for (int px = 0; px < w; ++px) sq[static_cast<size_t>(py) * w + px] = rtmp[px];
  }

  auto dt = [&](int px, int py) { return std::sqrt(sq[static_cast<size_t>(py) * w + px]); };

  // Medial-axis pixels: strict local maxima of the distance transform (ties
  // allowed, so even-width plateaus survive), away from excluded pads. Any
  // strictly larger neighbor means the maximal ball continues uphill, which
  // prunes staircase artifacts along shallow boundaries. Neighbor reads are
  // clamped at the image edge, which is the mirror image of the edge row.
  double min_diam = std::numeric_limits<double>::infinity();
  for (int py = 0; py < hgt; ++py) {
    for (int px = 0; px < w; ++px) {
      const double d0 = dt(px, py);
      if (d0 <= 0.0) continue;
      const double x = (px + 0.5) * pix + grid.origin.x();
      const double y = (py + 0.5) * pix + grid.origin.y();
      bool excluded = false;
      for (const auto& b : exclude)
        if (b.contains(x, y)) { excluded = true; break; }
      if (excluded) continue;
      bool ridge = true;
      for (int dy = -1; dy <= 1 && ridge; ++dy)
        for (int dx = -1; dx <= 1 && ridge; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int qx = std::clamp(px + dx, 0, w - 1);
          const int qy = std::clamp(py + dy, 0, hgt - 1);
          if (dt(qx, qy) > d0 + 1e-9) ridge = false;
        }
      if (!ridge) continue;
      min_diam = std::min(min_diam, 2.0 * d0 * pix);
    }
  }
  if (!std::isfinite(min_diam))
    throw std::runtime_error("minimum_feature_diameter: no medial-axis pixels found");
  return min_diam;
}

}  // namespace lsto

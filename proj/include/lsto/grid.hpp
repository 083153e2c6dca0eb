#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <map>
#include <string>
#include <vector>

namespace lsto {

using Vector = Eigen::VectorXd;

// Structured quadrilateral mesh with lexicographic node numbering:
// node (i, j) -> j*(nx+1) + i, located at origin + (i*h, j*h).
// Element (i, j) -> j*nx + i with counterclockwise connectivity.
struct StructuredGrid {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();

  std::map<std::string, std::vector<int>> node_sets;
  std::map<std::string, std::vector<int>> side_sets;  // boundary element edges as node pairs packed flat

  int num_nodes() const { return (nx + 1) * (ny + 1); }
  int num_elements() const { return nx * ny; }

  int node_id(int i, int j) const { return j * (nx + 1) + i; }
  int elem_id(int i, int j) const { return j * nx + i; }

  Eigen::Vector2d node_coords(int n) const {
    const int i = n % (nx + 1);
    const int j = n / (nx + 1);
    return origin + Eigen::Vector2d(i * h, j * h);
  }

  // 4 node ids, counterclockwise starting at the lower-left corner.
  std::array<int, 4> elem_conn(int e) const {
    const int i = e % nx;
    const int j = e / nx;
    return {node_id(i, j), node_id(i + 1, j), node_id(i + 1, j + 1), node_id(i, j + 1)};
  }

  double width() const { return nx * h; }
  double height() const { return ny * h; }
  double area() const { return width() * height(); }
  double boundary_length() const { return 2.0 * (width() + height()); }
};

// Row-normalized linear distance-weight filter, w_ij = max(0, r_f - |X_i - X_j|).
// Rows sum to one; weights are symmetric before normalization.
struct FilterOperator {
  Eigen::SparseMatrix<double, Eigen::RowMajor> F;
  double radius = 0.0;

  int size() const { return static_cast<int>(F.rows()); }
};

StructuredGrid build_grid(int nx, int ny, double h,
                          const Eigen::Vector2d& origin = Eigen::Vector2d::Zero());

FilterOperator build_filter(const StructuredGrid& grid, double r_f);

Vector apply_filter(const FilterOperator& F, const Vector& s);
Vector apply_filter_transpose(const FilterOperator& F, const Vector& g);

}  // namespace lsto

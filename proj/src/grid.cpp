#include "lsto/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace lsto {

StructuredGrid build_grid(int nx, int ny, double h, const Eigen::Vector2d& origin) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_grid: nx and ny must be >= 1");
  if (!(h > 0.0)) throw std::invalid_argument("build_grid: h must be > 0");
  StructuredGrid g;
  g.nx = nx;
  g.ny = ny;
  g.h = h;
  g.origin = origin;
  return g;
}

FilterOperator build_filter(const StructuredGrid& grid, double r_f) {
  if (!(r_f > 0.0)) throw std::invalid_argument("build_filter: r_f must be > 0");

  const int nxn = grid.nx + 1;
  const int nyn = grid.ny + 1;
  const int n = nxn * nyn;
  const double h = grid.h;

  // Lattice offsets strictly inside the radius; shared by every row.
  const int reach = static_cast<int>(std::ceil(r_f / h));
  struct Offset {
    int di, dj;
    double w;
  };
  std::vector<Offset> offsets;
  for (int dj = -reach; dj <= reach; ++dj) {
    for (int di = -reach; di <= reach; ++di) {
      const double dist = h * std::sqrt(double(di) * di + double(dj) * dj);
      const double w = r_f - dist;
      if (w > 0.0) offsets.push_back({di, dj, w});
    }
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(n) * offsets.size());
  for (int j = 0; j < nyn; ++j) {
    for (int i = 0; i < nxn; ++i) {
      const int row = j * nxn + i;
      double wsum = 0.0;
      for (const auto& o : offsets) {
        const int ii = i + o.di;
        const int jj = j + o.dj;
        if (ii < 0 || ii >= nxn || jj < 0 || jj >= nyn) continue;
        wsum += o.w;
      }
      for (const auto& o : offsets) {
        const int ii = i + o.di;
        const int jj = j + o.dj;
        if (ii < 0 || ii >= nxn || jj < 0 || jj >= nyn) continue;
        trips.emplace_back(row, jj * nxn + ii, o.w / wsum);
      }
    }
  }

  FilterOperator op;
  op.radius = r_f;
  op.F.resize(n, n);
  op.F.setFromTriplets(trips.begin(), trips.end());
  op.F.makeCompressed();
  return op;
}

Vector apply_filter(const FilterOperator& F, const Vector& s) {
  if (s.size() != F.F.cols()) throw std::invalid_argument("apply_filter: length mismatch");
  return F.F * s;
}

Vector apply_filter_transpose(const FilterOperator& F, const Vector& g) {
  if (g.size() != F.F.rows()) throw std::invalid_argument("apply_filter_transpose: length mismatch");
  return F.F.transpose() * g;
}

}  // namespace lsto

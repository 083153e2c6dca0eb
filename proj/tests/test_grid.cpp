#include <random>

#include "doctest.h"
#include "lsto/grid.hpp"

using namespace lsto;

TEST_CASE("grid indexing and sizes") {
  const StructuredGrid g = build_grid(4, 3, 0.5);
  CHECK(g.num_nodes() == 20);
  CHECK(g.num_elements() == 12);
  CHECK(g.node_id(0, 0) == 0);
  CHECK(g.node_id(4, 3) == 19);
  CHECK(g.node_coords(g.node_id(2, 1)).x() == doctest::Approx(1.0));
  CHECK(g.node_coords(g.node_id(2, 1)).y() == doctest::Approx(0.5));
  const auto c = g.elem_conn(g.elem_id(1, 1));
  CHECK(c[0] == g.node_id(1, 1));
  CHECK(c[1] == g.node_id(2, 1));
  CHECK(c[2] == g.node_id(2, 2));
  CHECK(c[3] == g.node_id(1, 2));
  CHECK(g.width() == doctest::Approx(2.0));
  CHECK(g.boundary_length() == doctest::Approx(7.0));
}

TEST_CASE("grid rejects bad dimensions") {
  CHECK_THROWS_AS(build_grid(0, 3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(3, -1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(3, 3, 0.0), std::invalid_argument);
}

TEST_CASE("filter rows sum to one for several radii") {
  const StructuredGrid g = build_grid(16, 12, 1.0);
  for (double r : {1.5, 4.0, 8.0}) {
    const FilterOperator F = build_filter(g, r);
    for (int i = 0; i < F.size(); ++i) {
      double row = 0.0;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(F.F, i); it; ++it)
        row += it.value();
      CHECK(std::abs(row - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("filter interior stencil at r = 1.5h") {
  // Weights before normalization: self 1.5, axial 0.5, diagonal 1.5 - sqrt(2).
  const StructuredGrid g = build_grid(10, 10, 1.0);
  const FilterOperator F = build_filter(g, 1.5);
  const int node = g.node_id(5, 5);
  int nnz = 0;
  double self_w = 0.0;
  for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(F.F, node); it; ++it) {
    ++nnz;
    if (it.col() == node) self_w = it.value();
  }
  CHECK(nnz == 9);
  const double diag = 1.5 - std::sqrt(2.0);
  CHECK(self_w == doctest::Approx(1.5 / (1.5 + 4 * 0.5 + 4 * diag)).epsilon(1e-12));
}

TEST_CASE("filter preserves constants and stays in bounds") {
  const StructuredGrid g = build_grid(12, 7, 0.8);
  const FilterOperator F = build_filter(g, 3.2);
  Vector s = Vector::Constant(g.num_nodes(), 0.37);
  Vector fs = apply_filter(F, s);
  CHECK((fs.array() - 0.37).abs().maxCoeff() <= 1e-13);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < s.size(); ++i) s[i] = unif(rng);
  fs = apply_filter(F, s);
  CHECK(fs.minCoeff() >= s.minCoeff() - 1e-13);
  CHECK(fs.maxCoeff() <= s.maxCoeff() + 1e-13);
}

TEST_CASE("filter transpose is the adjoint") {
  const StructuredGrid g = build_grid(9, 6, 1.0);
  const FilterOperator F = build_filter(g, 2.5);
  std::mt19937 rng(3);
  std::normal_distribution<double> gauss;
  Vector a(g.num_nodes()), b(g.num_nodes());
  for (int i = 0; i < a.size(); ++i) {
    a[i] = gauss(rng);
    b[i] = gauss(rng);
  }
  const double lhs = apply_filter(F, a).dot(b);
  const double rhs = a.dot(apply_filter_transpose(F, b));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("filter application rejects mismatched lengths") {
  const StructuredGrid g = build_grid(4, 4, 1.0);
  const FilterOperator F = build_filter(g, 1.5);
  CHECK_THROWS(apply_filter(F, Vector::Zero(3)));
  CHECK_THROWS(apply_filter_transpose(F, Vector::Zero(g.num_nodes() + 1)));
}

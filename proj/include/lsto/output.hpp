#pragma once

#include <map>
#include <string>
#include <vector>

#include "lsto/driver.hpp"
#include "lsto/grid.hpp"

namespace lsto {

// Field bundle for one snapshot of the optimization state. Point arrays have
// (nx+1)*(ny+1) entries, cell arrays nx*ny.
struct Snapshot {
  std::vector<std::pair<std::string, Vector>> point_scalars;
  std::vector<std::pair<std::string, Vector>> point_vectors;  // 2 components per node
  std::vector<std::pair<std::string, Vector>> cell_scalars;
};

Snapshot make_snapshot(const Evaluation& ev);

// Legacy ASCII VTK STRUCTURED_POINTS file. Values are written with enough
// digits to reproduce the doubles exactly on read-back.
void write_vtk(const std::string& path, const StructuredGrid& grid, const Snapshot& snap);

struct VtkFile {
  int nx = 0, ny = 0;  // element counts
  double h = 0.0;
  std::map<std::string, Vector> point_scalars;
  std::map<std::string, Vector> point_vectors;
  std::map<std::string, Vector> cell_scalars;
};

VtkFile read_vtk(const std::string& path);

void write_history_csv(const std::string& path, const std::vector<IterationRecord>& history);

}  // namespace lsto

#include "lsto/output.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace lsto {

namespace {

void write_array(std::ostream& os, const Vector& v, int per_line = 6) {
  os << std::setprecision(17);
  for (int i = 0; i < v.size(); ++i) {
    os << v[i];
    os << (((i + 1) % per_line == 0 || i + 1 == v.size()) ? '\n' : ' ');
  }
}

}  // namespace

Snapshot make_snapshot(const Evaluation& ev) {
  Snapshot s;
  s.point_scalars.emplace_back("phi", ev.fields.phi);
  s.point_scalars.emplace_back("phi_target", ev.target.phi_tilde);
  s.point_scalars.emplace_back("s_hat_rho", ev.fields.s_hat_rho);
  s.point_scalars.emplace_back("rho_hat", ev.fields.rho_hat);
  s.point_scalars.emplace_back("rho_bar", ev.fields.rho_bar);
  if (ev.u.size() > 0) s.point_vectors.emplace_back("displacement", ev.u);
  s.cell_scalars.emplace_back("solid_fraction", ev.fractions.f);
  s.cell_scalars.emplace_back("elem_rho_hat", ev.fields.elem_rho_hat);
  if (ev.elem_modulus.size() > 0) s.cell_scalars.emplace_back("youngs_modulus", ev.elem_modulus);
  return s;
}

void write_vtk(const std::string& path, const StructuredGrid& grid, const Snapshot& snap) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  const int npx = grid.nx + 1, npy = grid.ny + 1;
  const int np = npx * npy;
  const int ne = grid.nx * grid.ny;

  os << "# vtk DataFile Version 3.0\n";
  os << "level-set topology optimization state\n";
  os << "ASCII\n";
  os << "DATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << npx << " " << npy << " 1\n";
  os << std::setprecision(17);
  os << "ORIGIN " << grid.origin.x() << " " << grid.origin.y() << " 0\n";
  os << "SPACING " << grid.h << " " << grid.h << " 1\n";

  os << "POINT_DATA " << np << "\n";
  for (const auto& [name, v] : snap.point_scalars) {
    if (v.size() != np)
      throw std::runtime_error("point array " + name + " has wrong length");
    os << "SCALARS " << name << " double 1\n";
    os << "LOOKUP_TABLE default\n";
    write_array(os, v);
  }
  for (const auto& [name, v] : snap.point_vectors) {
    if (v.size() != 2 * np)
      throw std::runtime_error("vector array " + name + " has wrong length");
    os << "VECTORS " << name << " double\n";
    os << std::setprecision(17);
    for (int i = 0; i < np; ++i) os << v[2 * i] << " " << v[2 * i + 1] << " 0\n";
  }

  if (!snap.cell_scalars.empty()) {
    os << "CELL_DATA " << ne << "\n";
    for (const auto& [name, v] : snap.cell_scalars) {
      if (v.size() != ne)
        throw std::runtime_error("cell array " + name + " has wrong length");
      os << "SCALARS " << name << " double 1\n";
      os << "LOOKUP_TABLE default\n";
      write_array(os, v);
    }
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

VtkFile read_vtk(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open vtk file: " + path);
  VtkFile out;
  std::string line;
  int np = 0, ne = 0;
  enum { None, Point, Cell } mode = None;

  auto read_values = [&is](Vector& v) {
    for (int i = 0; i < v.size(); ++i)
      if (!(is >> v[i])) throw std::runtime_error("truncated vtk data array");
    std::string rest;
    std::getline(is, rest);  // consume trailing newline
  };

  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "DIMENSIONS") {
      int dx = 0, dy = 0, dz = 0;
      ls >> dx >> dy >> dz;
      out.nx = dx - 1;
      out.ny = dy - 1;
      np = dx * dy;
      ne = out.nx * out.ny;
    } else if (tok == "SPACING") {
      ls >> out.h;
    } else if (tok == "POINT_DATA") {
      mode = Point;
    } else if (tok == "CELL_DATA") {
      mode = Cell;
    } else if (tok == "SCALARS") {
      std::string name;
      ls >> name;
      std::getline(is, line);  // LOOKUP_TABLE line
      Vector v(mode == Cell ? ne : np);
      read_values(v);
      (mode == Cell ? out.cell_scalars : out.point_scalars)[name] = v;
    } else if (tok == "VECTORS") {
      std::string name;
      ls >> name;
      Vector v(2 * np);
      for (int i = 0; i < np; ++i) {
        double x = 0, y = 0, z = 0;
        if (!(is >> x >> y >> z)) throw std::runtime_error("truncated vtk vector array");
        v[2 * i] = x;
        v[2 * i + 1] = y;
      }
      std::getline(is, line);
      out.point_vectors[name] = v;
    }
  }
  if (np == 0) throw std::runtime_error("not a structured-points vtk file: " + path);
  return out;
}

void write_history_csv(const std::string& path, const std::vector<IterationRecord>& history) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << "iter,z,F_term,P_per,P_reg,P_hs,P_vddr,g1,Psi,mass,gamma_pr,beta_rho,rho_th_hs,w2,"
        "wall_ms\n";
  os << std::setprecision(17);
  for (const auto& r : history) {
    os << r.iter << ',' << r.z << ',' << r.f_term << ',' << r.p_per << ',' << r.p_reg << ','
       << r.p_hs << ',' << r.p_vddr << ',' << r.g1 << ',' << r.psi << ',' << r.mass << ','
       << r.gamma_pr << ',' << r.beta_rho << ',' << r.rho_th_hs << ',' << r.w2 << ','
       << r.wall_ms << '\n';
  }
}

}  // namespace lsto

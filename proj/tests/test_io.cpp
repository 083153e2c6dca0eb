#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lsto/config.hpp"
#include "lsto/output.hpp"

using namespace lsto;

TEST_CASE("config parsing, defaults, and echo round trip") {
  const std::string text =
      "[grid]\n"
      "nx = 60\n"
      "ny = 20\n"
      "# a comment\n"
      "[filter]\n"
      "density_filter_radius = 6.0   # trailing comment\n"
      "[weights]\n"
      "w4 = 0\n";
  const RunConfig cfg = parse_config_text(text);
  CHECK(cfg.nx == 60);
  CHECK(cfg.ny == 20);
  CHECK(cfg.h == 1.0);
  CHECK(cfg.resolved_ls_radius() == doctest::Approx(1.5));
  CHECK(cfg.resolved_density_radius() == doctest::Approx(6.0));
  CHECK(cfg.w4 == 0.0);
  CHECK(cfg.resolved_initial_density() == doctest::Approx(0.40));

  const std::string echoed = echo_config(cfg);
  const RunConfig cfg2 = parse_config_text(echoed);
  CHECK(echo_config(cfg2) == echoed);
}

TEST_CASE("config rejects unknown keys with a line number") {
  CHECK_THROWS_WITH_AS(parse_config_text("[grid]\nnnx = 3\n"),
                       doctest::Contains("line 2"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config_text("[grid]\nnx 3\n"),
                       doctest::Contains("key = value"), std::runtime_error);
}

TEST_CASE("config validation messages name the offending key") {
  CHECK_THROWS_WITH_AS(parse_config_text("[schedule]\ngamma_pr_final = -1\n"),
                       doctest::Contains("gamma_pr_final"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config_text("[problem]\nvariant = bogus\n"),
                       doctest::Contains("variant"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config_text("[grid]\nh = 0\n"),
                       doctest::Contains("h must be"), std::runtime_error);
}

TEST_CASE("config builds a consistent problem") {
  RunConfig cfg;
  cfg.nx = 24;
  cfg.ny = 8;
  cfg.hole_pattern_nx = 4;
  cfg.hole_pattern_ny = 2;
  const ProblemSpec spec = build_problem(cfg);
  CHECK(spec.grid.nx == 24);
  CHECK(spec.filter_rho.radius == doctest::Approx(4.0));
  CHECK(spec.bounds.phi_up == doctest::Approx(3.0));
  CHECK(spec.schedule.rho_th0 == doctest::Approx(0.25 * 0.40));
  CHECK(spec.schedule.rho_thf == doctest::Approx(0.9 * 0.40));
  CHECK(spec.initial_holes.size() == 8);
  CHECK(spec.phi_th_fs == doctest::Approx(-1.5));
}

TEST_CASE("vtk writer and reader round trip bit-exactly") {
  ProblemSpec spec = make_beam2d_spec(12, 4, 1.0, 1.5, 4.0);
  Driver driver(spec);
  const Evaluation ev = driver.evaluate(driver.initial_design(), 3);
  const Snapshot snap = make_snapshot(ev);

  const std::string path = (std::filesystem::temp_directory_path() / "state_rt.vtk").string();
  write_vtk(path, spec.grid, snap);
  const VtkFile back = read_vtk(path);
  std::remove(path.c_str());

  CHECK(back.nx == 12);
  CHECK(back.ny == 4);
  CHECK(back.h == 1.0);
  for (const auto& [name, v] : snap.point_scalars) {
    REQUIRE(back.point_scalars.count(name) == 1);
    CHECK((back.point_scalars.at(name) - v).cwiseAbs().maxCoeff() == 0.0);
  }
  REQUIRE(back.point_vectors.count("displacement") == 1);
  CHECK((back.point_vectors.at("displacement") - ev.u).cwiseAbs().maxCoeff() == 0.0);
  for (const auto& [name, v] : snap.cell_scalars) {
    REQUIRE(back.cell_scalars.count(name) == 1);
    CHECK((back.cell_scalars.at(name) - v).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("history csv has the full header and one row per iterate") {
  std::vector<IterationRecord> hist(3);
  for (int i = 0; i < 3; ++i) {
    hist[i].iter = i + 1;
    hist[i].z = 1.0 / (i + 1);
  }
  const std::string path = (std::filesystem::temp_directory_path() / "hist.csv").string();
  write_history_csv(path, hist);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "iter,z,F_term,P_per,P_reg,P_hs,P_vddr,g1,Psi,mass,gamma_pr,beta_rho,rho_th_hs,w2,"
        "wall_ms");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3);
  in.close();
  std::remove(path.c_str());
}

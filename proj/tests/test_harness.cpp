#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "enip/harness.hpp"

using namespace enip;
namespace fs = std::filesystem;

TEST_CASE("case names") {
  for (auto c : {CaseName::SquareAdvection, CaseName::Rotation, CaseName::FreeDrop, CaseName::Sod}) {
    CHECK(case_from_string(to_string(c)) == c);
  }
  CHECK_FALSE(case_from_string("dam_break"));
}

TEST_CASE("config text") {
  const auto kv = parse_config_text("# comment\n  NX = 80  \n\nreconstruction=nip # trailing\n");
  REQUIRE(kv.size() == 2);
  CHECK(kv[0].first == "nx");
  CHECK(kv[0].second == "80");
  CHECK(kv[1].second == "nip");
  CHECK_THROWS_AS(parse_config_text("nx 80\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(" = 3\n"), ConfigError);
}

TEST_CASE("settings overrides") {
  Settings s = case_defaults(CaseName::SquareAdvection);
  apply_settings(s, {{"cfl", "0.3"}, {"reconstruction", "nip"}, {"tend", "0.1"}});
  CHECK(s.cfl == 0.3);
  CHECK(s.reconstruction == Reconstruction::NIP);
  CHECK(s.t_end == 0.1);
  CHECK_THROWS_AS(apply_settings(s, {{"colour", "red"}}), ConfigError);
  CHECK_THROWS_AS(apply_settings(s, {{"nx", "forty"}}), ConfigError);
  CHECK_THROWS_AS(apply_settings(s, {{"cfl", "0.3x"}}), ConfigError);
}

TEST_CASE("resolution order and mesh scaling") {
  const Settings s = resolve_settings({{"case", "rotation"}, {"nx", "50"}}, {{"case", "square_advection"}, {"nx", "80"}});
  CHECK(s.name == CaseName::SquareAdvection);
  CHECK(s.nx == 80);
  CHECK(s.ny == 120);
  const Settings sod = resolve_settings({}, {{"case", "sod"}, {"nx", "200"}});
  CHECK(sod.ny == 1);
  CHECK_THROWS_AS(resolve_settings({}, {{"case", "sod"}, {"mode", "advection"}}), ConfigError);
  CHECK_THROWS_AS(resolve_settings({}, {{"case", "rotation"}, {"mode", "hydro"}}), ConfigError);
  CHECK_THROWS_AS(resolve_settings({}, {{"case", "nowhere"}}), ConfigError);
}

TEST_CASE("rectangle fractions") {
  const Grid g = Grid::make(10, 10, 1.0, 1.0);
  const auto f = rect_fractions(g, {0.15, 0.2, 0.55, 0.43});
  double area = 0.0;
  for (double a : f) area += a * g.dx * g.dy;
  CHECK(area == doctest::Approx(0.4 * 0.23).epsilon(1e-13));
  CHECK(f[g.index(1, 2)] == doctest::Approx(0.5));
  CHECK(f[g.index(3, 3)] == doctest::Approx(1.0));
  const auto s = sample_rect(g, {0.15, 0.2, 0.55, 0.45});
  CHECK(s[g.index(1, 2)] == 1.0);
  CHECK(s[g.index(5, 4)] == 1.0);
  CHECK(s[g.index(5, 5)] == 0.0);
}

TEST_CASE("free drop set-up") {
  const CaseSetup c = make_case(case_defaults(CaseName::FreeDrop));
  const Grid& g = c.initial.grid;
  CHECK(g.nx == 100);
  CHECK(g.ny == 150);
  double liquid = 0.0;
  for (const auto& cell : c.initial.cells) liquid += cell.fraction(0) * g.dx * g.dy;
  CHECK(liquid == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(c.config.gravity.y == -9.81);

  Settings other = case_defaults(CaseName::FreeDrop);
  apply_settings(other, {{"liquid_rect", "0, 5, 2, 10"}});
  CHECK(other.liquid.x1 == 2.0);
  CHECK(other.liquid.y0 == 5.0);
  CHECK_THROWS_AS(apply_settings(other, {{"liquid_rect", "0, 5, 2"}}), ConfigError);
  CHECK_THROWS_AS(apply_settings(other, {{"liquid_rect", "2, 5, 0, 10"}}), ConfigError);
}

TEST_CASE("exact density of the square") {
  const Settings s = case_defaults(CaseName::SquareAdvection);
  const Grid g = Grid::make(s.nx, s.ny, 0.4, 0.6);
  CHECK(exact_density(s, g, 0.0) == sample_rect(g, s.square));
  double moved = 0.0;
  for (double v : exact_density(s, g, 0.05)) moved += v;
  double start = 0.0;
  for (double v : sample_rect(g, s.square)) start += v;
  CHECK(moved == start);
}

TEST_CASE("exact Riemann solver") {
  const ExactRiemann sod({1.0, 0.0, 0.0, 1.0, 0.0}, {0.125, 0.0, 0.0, 0.1, 0.0}, 1.4);
  CHECK(sod.p_star() == doctest::Approx(0.30313).epsilon(1e-5));
  CHECK(sod.u_star() == doctest::Approx(0.92745).epsilon(1e-5));
  CHECK(std::abs(sod.pressure_function(sod.p_star())) < 1e-13);
  CHECK(sod.sample(-5.0).rho == 1.0);
  CHECK(sod.sample(5.0).rho == 0.125);

  const ExactRiemann sym({1.0, 0.5, 0.0, 1.0, 0.0}, {1.0, -0.5, 0.0, 1.0, 0.0}, 1.4);
  CHECK(std::abs(sym.u_star()) < 1e-14);
  CHECK(sym.p_star() > 1.0);

  CHECK_THROWS_AS(ExactRiemann({1.0, -10.0, 0.0, 1.0, 0.0}, {1.0, 10.0, 0.0, 1.0, 0.0}, 1.4), std::domain_error);
}

TEST_CASE("log-log slopes") {
  const std::vector<double> dx{0.1, 0.05, 0.025};
  const std::vector<double> e{0.01, 0.0025, 0.000625};
  REQUIRE(loglog_slope(dx, e));
  CHECK(*loglog_slope(dx, e) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(loglog_slope(std::vector<double>{0.1}, std::vector<double>{0.2}));
  CHECK_FALSE(loglog_slope(std::vector<double>{0.1, 0.05}, std::vector<double>{0.0, 0.1}));
  CHECK_FALSE(loglog_slope(std::vector<double>{0.1, 0.1}, std::vector<double>{0.2, 0.1}));
  CHECK(advection_mesh_ladder() == std::vector<int>{20, 30, 40, 80, 120});
}

TEST_CASE("component count") {
  const Grid g = Grid::make(6, 3, 6.0, 3.0);
  std::vector<CellContent> cells(g.size(), CellContent::pure(1, {1.0, 0, 0, 1}));
  cells[g.index(0, 0)] = CellContent::pure(0, {1.0, 0, 0, 1});
  cells[g.index(1, 1)] = CellContent::pure(0, {1.0, 0, 0, 1});
  cells[g.index(4, 1)] = CellContent::mixed(0.7, {1.0, 0, 0, 1}, {1.0, 0, 0, 1}, {1.0, 0.0});
  cells[g.index(5, 1)] = CellContent::mixed(0.4, {1.0, 0, 0, 1}, {1.0, 0, 0, 1}, {1.0, 0.0});
  CHECK(count_components(g, cells, 0) == 3);
  CHECK(count_components(g, cells, 0, 0.3) == 3);
  CHECK(count_components(g, cells, 1) == 1);
}

TEST_CASE("snapshot and ledger files") {
  const fs::path dir = fs::temp_directory_path() / "enip_test_io";
  fs::create_directories(dir);
  const Grid g = Grid::make(3, 2, 0.3, 0.2);
  const auto gas = MaterialModel::ideal_gas(1.4);
  const std::vector<MaterialModel> models{gas, gas};
  std::vector<CellContent> cells(g.size(), CellContent::pure(1, conserved_from_primitive(gas, 1.0 / 3.0, 0.1, -0.7, 2.0)));
  cells[2] = CellContent::mixed(0.3, conserved_from_primitive(gas, 2.0, 0.0, 0.0, 1.0),
                                conserved_from_primitive(gas, 0.5, 0.0, 0.0, 1.0), {1.0, 0.0});
  const auto rows = snapshot_rows(g, cells, models, Mode::Hydro, nullptr, 0.0);
  write_snapshot(rows, g, dir / "s.csv", SnapshotFormat::CSV);
  write_snapshot(rows, g, dir / "s.vtk", SnapshotFormat::Grid);
  const auto back = read_snapshot_csv(dir / "s.csv");
  REQUIRE(back.size() == rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(back[k].x == rows[k].x);
    CHECK(back[k].rho == rows[k].rho);
    CHECK(back[k].p == rows[k].p);
    CHECK(back[k].alpha_1 == rows[k].alpha_1);
    CHECK(back[k].material == rows[k].material);
  }
  CHECK(rows[2].material == 0);
  CHECK(rows[2].rho == doctest::Approx(0.3 * 2.0 + 0.7 * 0.5));
  CHECK(rows[0].material == 2);

  std::ifstream vtk(dir / "s.vtk");
  std::string first;
  std::getline(vtk, first);
  CHECK(first.rfind("# vtk DataFile", 0) == 0);

  LedgerEntry e;
  e.time = 0.5;
  write_ledger(std::vector<LedgerEntry>{e}, dir / "ledger.csv");
  std::ifstream led(dir / "ledger.csv");
  std::string header;
  std::getline(led, header);
  CHECK(header == "t,mass_1,mass_2,momx,momy,energy");
  fs::remove_all(dir);
}

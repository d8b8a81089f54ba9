#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "enip/flux.hpp"

using namespace enip;

namespace {

Eigen::Vector4d vec(const DirectedFlux& f) { return {f.rho, f.mom_x, f.mom_y, f.rhoE}; }

// Characteristic flux rebuilt from the conservative Jacobian at the mean
// primitive state, with sign(A) taken through a numerical eigensolver.
Eigen::Vector4d oracle_flux(const ConservedState& l, const ConservedState& r, const MaterialModel& m, Vec2 n) {
  const Primitive wl = primitive_from_conserved(l, m);
  const Primitive wr = primitive_from_conserved(r, m);
  const ConservedState mean = conserved_from_primitive(m, 0.5 * (wl.rho + wr.rho), 0.5 * (wl.u + wr.u),
                                                       0.5 * (wl.v + wr.v), 0.5 * (wl.p + wr.p));
  const double g = m.gamma();
  const double rho = mean.rho;
  const double u = mean.mom_x / rho;
  const double v = mean.mom_y / rho;
  const double p = (g - 1.0) * (mean.rhoE - 0.5 * rho * (u * u + v * v)) - g * m.p_inf();
  const double un = u * n.x + v * n.y;
  const double H = (mean.rhoE + p) / rho;
  const double p_rho = 0.5 * (g - 1.0) * (u * u + v * v);
  const double p_mx = -(g - 1.0) * u;
  const double p_my = -(g - 1.0) * v;
  const double p_e = g - 1.0;
  Eigen::Matrix4d A;
  A << 0.0, n.x, n.y, 0.0,
      -u * un + n.x * p_rho, un + u * n.x + n.x * p_mx, u * n.y + n.x * p_my, n.x * p_e,
      -v * un + n.y * p_rho, v * n.x + n.y * p_mx, un + v * n.y + n.y * p_my, n.y * p_e,
      un * (p_rho - H), H * n.x + p_mx * un, H * n.y + p_my * un, (1.0 + p_e) * un;
  Eigen::EigenSolver<Eigen::Matrix4d> es(A);
  Eigen::Matrix4cd R = es.eigenvectors();
  Eigen::Vector4cd s;
  for (int k = 0; k < 4; ++k) {
    const double lam = es.eigenvalues()[k].real();
    s[k] = lam > 0.0 ? 1.0 : (lam < 0.0 ? -1.0 : 0.0);
  }
  const Eigen::Matrix4d sign = (R * s.asDiagonal() * R.inverse()).real();
  const Eigen::Vector4d fl = vec(physical_flux(l, m, n));
  const Eigen::Vector4d fr = vec(physical_flux(r, m, n));
  return 0.5 * (fl + fr) - 0.5 * sign * (fr - fl);
}

double scale(const ConservedState& s) { return std::abs(s.rho) + std::abs(s.mom_x) + std::abs(s.mom_y) + std::abs(s.rhoE); }

}  // namespace

TEST_CASE("physical flux") {
  const auto gas = MaterialModel::ideal_gas(1.4);
  const ConservedState s{1.0, 2.0, 0.0, 3.0};
  const DirectedFlux f = physical_flux(s, gas, {1.0, 0.0});
  CHECK(f.rho == doctest::Approx(2.0));
  CHECK(f.mom_x == doctest::Approx(4.4));
  CHECK(f.mom_y == doctest::Approx(0.0));
  CHECK(f.rhoE == doctest::Approx(6.8));

  const ConservedState rest = conserved_from_primitive(gas, 1.0, 0.0, 0.0, 0.7);
  CHECK(physical_flux(rest, gas, {1.0, 0.0}) == DirectedFlux{0.0, 0.7, 0.0, 0.0});
  const DirectedFlux up = physical_flux(rest, gas, {0.0, 1.0});
  CHECK(up.mom_y == doctest::Approx(0.7));
  CHECK(up.mom_x == 0.0);
}

TEST_CASE("numerical flux consistency") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const auto gas = MaterialModel::ideal_gas(1.4);
  for (int k = 0; k < 500; ++k) {
    const double t = 6.283185307179586 * uni(rng);
    const Vec2 n{std::cos(t), std::sin(t)};
    const ConservedState s = conserved_from_primitive(gas, 0.1 + uni(rng), uni(rng) - 0.5, uni(rng) - 0.5, 0.1 + uni(rng));
    const Eigen::Vector4d diff = vec(numerical_flux(s, s, gas, n)) - vec(physical_flux(s, gas, n));
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-12 * scale(s));
  }
}

TEST_CASE("numerical flux matches an eigensolver oracle") {
  const auto gas = MaterialModel::ideal_gas(1.4);
  const ConservedState l = conserved_from_primitive(gas, 1.0, 0.0, 0.0, 1.0);
  const ConservedState r = conserved_from_primitive(gas, 0.125, 0.0, 0.0, 0.1);
  const Eigen::Vector4d d = vec(numerical_flux(l, r, gas, {1.0, 0.0})) - oracle_flux(l, r, gas, {1.0, 0.0});
  CHECK(d.cwiseAbs().maxCoeff() <= 1e-12);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const auto liquid = MaterialModel::stiffened_gas(4.4, 6e8);
  for (int k = 0; k < 300; ++k) {
    const bool stiff = k % 2 == 1;
    const auto& m = stiff ? liquid : gas;
    const double rs = stiff ? 1000.0 : 1.0;
    const double us = stiff ? 100.0 : 1.0;
    const double ps = stiff ? 1e5 : 1.0;
    const double t = 6.283185307179586 * uni(rng);
    const Vec2 n{std::cos(t), std::sin(t)};
    const ConservedState a = conserved_from_primitive(m, rs * (0.5 + uni(rng)), us * (uni(rng) - 0.5),
                                                      us * (uni(rng) - 0.5), ps * (0.5 + uni(rng)));
    const ConservedState b = conserved_from_primitive(m, rs * (0.5 + uni(rng)), us * (uni(rng) - 0.5),
                                                      us * (uni(rng) - 0.5), ps * (0.5 + uni(rng)));
    const Eigen::Vector4d got = vec(numerical_flux(a, b, m, n));
    const Eigen::Vector4d want = oracle_flux(a, b, m, n);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-10 * want.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("supersonic flow is fully upwinded") {
  const auto gas = MaterialModel::ideal_gas(1.4);
  const ConservedState l = conserved_from_primitive(gas, 1.0, 5.0, 0.0, 1.0);
  const ConservedState r = conserved_from_primitive(gas, 0.8, 4.5, 0.1, 0.9);
  const Eigen::Vector4d d = vec(numerical_flux(l, r, gas, {1.0, 0.0})) - vec(physical_flux(l, gas, {1.0, 0.0}));
  CHECK(d.cwiseAbs().maxCoeff() <= 1e-12 * scale(l));
}

TEST_CASE("flux along y equals flux along x of the swapped state") {
  const auto gas = MaterialModel::ideal_gas(1.4);
  const ConservedState l = conserved_from_primitive(gas, 1.0, 0.3, -0.2, 1.0);
  const ConservedState r = conserved_from_primitive(gas, 0.5, -0.1, 0.4, 0.6);
  const DirectedFlux fy = numerical_flux(l, r, gas, {0.0, 1.0});
  const DirectedFlux fx = numerical_flux({l.rho, l.mom_y, l.mom_x, l.rhoE}, {r.rho, r.mom_y, r.mom_x, r.rhoE}, gas, {1.0, 0.0});
  CHECK(fy.rho == doctest::Approx(fx.rho).epsilon(1e-14));
  CHECK(fy.mom_y == doctest::Approx(fx.mom_x).epsilon(1e-14));
  CHECK(fy.mom_x == doctest::Approx(fx.mom_y).epsilon(1e-14));
  CHECK(fy.rhoE == doctest::Approx(fx.rhoE).epsilon(1e-14));
}

TEST_CASE("sweep update keeps uniform rows and stationary contacts") {
  const auto gas = MaterialModel::ideal_gas(1.4);
  const ConservedState s = conserved_from_primitive(gas, 1.0, 0.2, 0.1, 1.0);
  std::vector<ConservedState> row(10, s);
  const auto out = sweep_update(row, gas, {Boundary::Transmissive, Boundary::Transmissive}, 0.01, 0.1, Axis::X);
  for (const auto& c : out) {
    CHECK(std::abs(c.rho - s.rho) <= 1e-15);
    CHECK(std::abs(c.rhoE - s.rhoE) <= 1e-14);
  }

  std::vector<ConservedState> contact;
  for (int i = 0; i < 10; ++i) contact.push_back(conserved_from_primitive(gas, i < 5 ? 1.0 : 0.1, 0.0, 0.0, 1.0));
  const auto kept = sweep_update(contact, gas, {Boundary::Reflective, Boundary::Reflective}, 0.01, 0.1, Axis::X);
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(kept[i].rho - contact[i].rho) <= 1e-15);
    CHECK(std::abs(kept[i].mom_x) <= 1e-15);
  }
}

TEST_CASE("periodic sweep conserves") {
  const auto gas = MaterialModel::ideal_gas(1.4);
  std::vector<ConservedState> row;
  for (int i = 0; i < 32; ++i) {
    row.push_back(conserved_from_primitive(gas, 1.0 + 0.5 * std::sin(0.3 * i), 0.2, 0.0, 1.0 + 0.2 * std::cos(0.2 * i)));
  }
  ConservedState before{};
  for (const auto& s : row) before += s;
  for (int n = 0; n < 50; ++n) row = sweep_update(row, gas, {Boundary::Periodic, Boundary::Periodic}, 0.02, 0.1, Axis::X);
  ConservedState after{};
  for (const auto& s : row) after += s;
  CHECK(std::abs(after.rho - before.rho) <= 1e-13 * before.rho);
  CHECK(std::abs(after.mom_x - before.mom_x) <= 1e-13 * std::abs(before.mom_x));
  CHECK(std::abs(after.rhoE - before.rhoE) <= 1e-13 * before.rhoE);
}

TEST_CASE("sweep update reports negative states") {
  const auto gas = MaterialModel::ideal_gas(1.4);
  std::vector<ConservedState> row{conserved_from_primitive(gas, 1.0, -20.0, 0.0, 1.0),
                                  conserved_from_primitive(gas, 1.0, 20.0, 0.0, 1.0)};
  CHECK_THROWS_AS(sweep_update(row, gas, {Boundary::Transmissive, Boundary::Transmissive}, 1.0, 0.1, Axis::X),
                  NumericalFailure);
}

TEST_CASE("reflective wall passes pressure only") {
  const auto gas = MaterialModel::ideal_gas(1.4);
  const ConservedState s = conserved_from_primitive(gas, 1.0, 0.5, 0.3, 1.0);
  const DirectedFlux f = boundary_flux(s, gas, Boundary::Reflective, {1.0, 0.0}, true);
  CHECK(f.rho == 0.0);
  CHECK(f.rhoE == 0.0);
  CHECK(f.mom_y == 0.0);
  CHECK(f.mom_x > 1.0);
  CHECK_THROWS(boundary_flux(s, gas, Boundary::Periodic, {1.0, 0.0}, true));
}

TEST_CASE("time step") {
  const auto gas = MaterialModel::ideal_gas(1.4);
  const Grid g = Grid::make(1, 1, 0.01, 0.01);
  std::vector<CellContent> cells{CellContent::pure(0, conserved_from_primitive(gas, 1.4, 0.0, 0.0, 1.0))};
  const std::vector<MaterialModel> models{gas};
  CHECK(compute_dt(g, cells, models, 0.45) == doctest::Approx(0.0045).epsilon(1e-14));
  const Grid fine = Grid::make(1, 1, 0.005, 0.005);
  CHECK(compute_dt(fine, cells, models, 0.45) == doctest::Approx(0.00225).epsilon(1e-14));
  CHECK_THROWS(compute_dt(g, std::vector<CellContent>{}, models, 0.45));

  const auto liquid = MaterialModel::stiffened_gas(4.4, 6e8);
  const std::vector<MaterialModel> two{liquid, gas};
  const ConservedState l = conserved_from_primitive(liquid, 1000.0, 0.0, 0.0, 1e5);
  const ConservedState a = conserved_from_primitive(gas, 1.2, 0.0, 0.0, 1e5);
  std::vector<CellContent> sliver{CellContent::mixed(1e-9, l, a, {1.0, 0.0})};
  std::vector<CellContent> pure{CellContent::pure(0, l)};
  CHECK(compute_dt(g, sliver, two, 0.45) == compute_dt(g, pure, two, 0.45));
}

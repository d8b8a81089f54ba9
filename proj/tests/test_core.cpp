#include <doctest.h>

#include <cmath>
#include <random>

#include "enip/core.hpp"

using namespace enip;

TEST_CASE("ideal gas pressure and sound speed") {
  const auto gas = MaterialModel::ideal_gas(1.4);
  CHECK(pressure(gas, 1.0, 2.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pressure(gas, 1.0, 0.0) == 0.0);
  CHECK(sound_speed(gas, 1.0, 1.0) == doctest::Approx(std::sqrt(1.4)).epsilon(1e-15));
  CHECK(sound_speed(gas, 1.4, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("stiffened gas closure") {
  const auto liquid = MaterialModel::stiffened_gas(4.4, 6e8);
  const double e = (1e5 + 4.4 * 6e8) / (3.4 * 1000.0);
  // p is recovered by cancelling a 2.6e9 term, so a few ulps of it remain.
  CHECK(std::abs(pressure(liquid, 1000.0, e) - 1e5) <= 4.0 * 2.64e9 * 1.1e-16);
  CHECK(liquid.internal_energy(1000.0, 1e5) == doctest::Approx(e).epsilon(1e-14));
  CHECK(sound_speed(liquid, 1000.0, 1e5) == doctest::Approx(std::sqrt(4.4 * (6e8 + 1e5) / 1000.0)).epsilon(1e-15));
}

TEST_CASE("inadmissible states are reported") {
  const auto liquid = MaterialModel::stiffened_gas(4.4, 6e8);
  CHECK_THROWS_AS(pressure(liquid, 1000.0, -1e6), InadmissibleState);
  CHECK_THROWS_AS(sound_speed(MaterialModel::ideal_gas(1.4), 1.0, -1.0), InadmissibleState);
  CHECK_THROWS_AS(primitive_from_conserved({0.0, 0.0, 0.0, 1.0}, MaterialModel::ideal_gas(1.4)), InadmissibleState);
  CHECK_THROWS(MaterialModel::ideal_gas(1.0));
  CHECK_THROWS(MaterialModel::stiffened_gas(1.4, -1.0));
}

TEST_CASE("primitive conversion") {
  const auto gas = MaterialModel::ideal_gas(1.4);
  const Primitive a = primitive_from_conserved({1.0, 0.0, 0.0, 2.5}, gas);
  CHECK(a.p == doctest::Approx(1.0));
  CHECK(a.e == doctest::Approx(2.5));
  const Primitive b = primitive_from_conserved({2.0, 2.0, 0.0, 6.0}, gas);
  CHECK(b.u == 1.0);
  CHECK(b.e == doctest::Approx(2.5));
  CHECK(b.p == doctest::Approx(2.0));
}

TEST_CASE("conserved/primitive round trip") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(0.1, 2.0);
  const auto liquid = MaterialModel::stiffened_gas(4.4, 6e8);
  const auto gas = MaterialModel::ideal_gas(1.4);
  for (int k = 0; k < 1000; ++k) {
    const auto& m = k % 2 ? liquid : gas;
    const double rho = uni(rng) * (k % 2 ? 1000.0 : 1.0);
    const double p = uni(rng) * 1e5;
    const ConservedState s = conserved_from_primitive(m, rho, uni(rng) - 1.0, uni(rng) - 1.0, p);
    const Primitive w = primitive_from_conserved(s, m);
    const ConservedState back = conserved_from_primitive(m, w.rho, w.u, w.v, w.p);
    CHECK(std::abs(back.rhoE - s.rhoE) <= 1e-13 * std::abs(s.rhoE));
    CHECK(std::abs(w.p - p) <= 1e-13 * (p + m.p_inf()));
  }
}

TEST_CASE("pressure increases with internal energy") {
  const auto liquid = MaterialModel::stiffened_gas(4.4, 6e8);
  double last = -1e300;
  for (double e = 7e5; e < 3e6; e += 1e4) {
    const double p = liquid.pressure(1000.0, e);
    CHECK(p > last);
    last = p;
  }
}

TEST_CASE("grid geometry") {
  const Grid g = Grid::make(4, 2, 2.0, 1.0, {1.0, -1.0});
  CHECK(g.dx == 0.5);
  CHECK(g.dy == 0.5);
  CHECK(g.cell_volume() == 0.25);
  CHECK(g.center(0, 0) == Vec2{1.25, -0.75});
  CHECK(g.index(3, 1) == 7);
  CHECK_THROWS(Grid::make(0, 1, 1.0, 1.0));
}

TEST_CASE("totals over pure and mixed cells") {
  const Grid one = Grid::make(1, 1, 1.0, 1.0);
  const ConservedState s{1.0, 2.0, 3.0, 4.0};
  std::vector<CellContent> cells{CellContent::pure(0, s)};
  CHECK(total_conserved(one, cells).global == s);
  cells[0] = CellContent::mixed(0.5, s, s, {1.0, 0.0});
  const MaterialTotals t = total_conserved(one, cells);
  CHECK(t.global == s);
  CHECK(t.per_material[0] == s * 0.5);
}

TEST_CASE("cell invariants") {
  CellContent c;
  c.alpha = 1.5;
  CHECK_THROWS(validate(c));
  CHECK_THROWS(CellContent::mixed(0.5, {}, {}, {1.0, 1.0}));
  const CellContent m = CellContent::mixed(0.25, {}, {}, {0.6, 0.8});
  CHECK(m.is_mixed());
  CHECK(m.fraction(0) + m.fraction(1) == 1.0);
}

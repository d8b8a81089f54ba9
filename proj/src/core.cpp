#include "enip/core.hpp"

#include <sstream>

namespace enip {

MaterialModel::MaterialModel(EosKind kind, double gamma, double p_inf, int label)
    : kind_(kind), gamma_(gamma), p_inf_(p_inf), label_(label) {
  if (!(gamma > 1.0)) throw std::invalid_argument("material gamma must be > 1");
  if (!(p_inf >= 0.0)) throw std::invalid_argument("material p_inf must be >= 0");
}

MaterialModel MaterialModel::ideal_gas(double gamma, int label) {
  return MaterialModel(EosKind::IdealGas, gamma, 0.0, label);
}

MaterialModel MaterialModel::stiffened_gas(double gamma, double p_inf, int label) {
  return MaterialModel(EosKind::StiffenedGas, gamma, p_inf, label);
}

double MaterialModel::pressure(double rho, double e) const {
  if (!(rho > 0.0)) {
    throw InadmissibleState("pressure: non-positive density " + std::to_string(rho));
  }
  const double p = (gamma_ - 1.0) * rho * e - gamma_ * p_inf_;
  // p + p_inf = 0 is the cold limit (e = 0 for an ideal gas); below it the
  // state has no real sound speed.
  if (p + p_inf_ < 0.0 || !std::isfinite(p)) {
    std::ostringstream msg;
    msg << "pressure: inadmissible state rho=" << rho << " e=" << e << " gives p+p_inf=" << p + p_inf_;
    throw InadmissibleState(msg.str());
  }
  return p;
}

double MaterialModel::internal_energy(double rho, double p) const {
  if (!(rho > 0.0)) throw InadmissibleState("internal_energy: non-positive density");
  return (p + gamma_ * p_inf_) / ((gamma_ - 1.0) * rho);
}

double MaterialModel::sound_speed(double rho, double p) const {
  if (!(rho > 0.0)) throw InadmissibleState("sound_speed: non-positive density");
  const double c2 = gamma_ * (p + p_inf_) / rho;
  if (c2 < 0.0 || !std::isfinite(c2)) {
    std::ostringstream msg;
    msg << "sound_speed: negative radicand (rho=" << rho << ", p=" << p << ")";
    throw InadmissibleState(msg.str());
  }
  return std::sqrt(c2);
}

std::string MaterialModel::describe() const {
  std::ostringstream out;
  if (kind_ == EosKind::IdealGas) {
    out << "ideal_gas(gamma=" << gamma_ << ")";
  } else {
    out << "stiffened_gas(gamma=" << gamma_ << ", p_inf=" << p_inf_ << ")";
  }
  return out.str();
}

double pressure(const MaterialModel& model, double rho, double e) { return model.pressure(rho, e); }

double sound_speed(const MaterialModel& model, double rho, double p) {
  return model.sound_speed(rho, p);
}

Primitive primitive_from_conserved(const ConservedState& s, const MaterialModel& model) {
  if (!(s.rho > 0.0)) {
    throw InadmissibleState("primitive_from_conserved: non-positive density " + std::to_string(s.rho));
  }
  Primitive w;
  w.rho = s.rho;
  w.u = s.mom_x / s.rho;
  w.v = s.mom_y / s.rho;
  w.e = s.rhoE / s.rho - 0.5 * (w.u * w.u + w.v * w.v);
  w.p = model.pressure(s.rho, w.e);
  return w;
}

ConservedState conserved_from_primitive(const MaterialModel& model, double rho, double u, double v,
                                        double p) {
  const double e = model.internal_energy(rho, p);
  return {rho, rho * u, rho * v, rho * (e + 0.5 * (u * u + v * v))};
}

Grid Grid::make(int nx, int ny, double width, double height, Vec2 origin) {
  Grid g{nx, ny, width / nx, height / ny, origin};
  g.validate();
  return g;
}

void Grid::validate() const {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid: nx and ny must be >= 1");
  if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("grid: dx and dy must be > 0");
}

CellContent CellContent::pure(int material, const ConservedState& s) {
  CellContent c;
  c.alpha = material == 0 ? 1.0 : 0.0;
  c.state[material == 0 ? 0 : 1] = s;
  return c;
}

CellContent CellContent::mixed(double alpha, const ConservedState& s0, const ConservedState& s1,
                               Vec2 normal) {
  CellContent c;
  c.alpha = alpha;
  c.state = {s0, s1};
  c.normal = normal;
  c.has_normal = true;
  validate(c);
  return c;
}

ConservedState CellContent::integral(double cell_volume) const {
  if (alpha >= 1.0) return state[0] * cell_volume;
  if (alpha <= 0.0) return state[1] * cell_volume;
  return state[0] * (alpha * cell_volume) + state[1] * ((1.0 - alpha) * cell_volume);
}

void validate(const CellContent& cell) {
  if (!(cell.alpha >= 0.0 && cell.alpha <= 1.0)) {
    throw std::invalid_argument("cell: volume fraction outside [0, 1]");
  }
  if (cell.is_mixed() && cell.has_normal && std::abs(norm(cell.normal) - 1.0) > 1e-12) {
    throw std::invalid_argument("cell: interface normal is not a unit vector");
  }
}

MaterialTotals total_conserved(const Grid& grid, std::span<const CellContent> contents) {
  MaterialTotals totals;
  const double vol = grid.cell_volume();
  for (const auto& cell : contents) {
    for (int k = 0; k < 2; ++k) {
      const double f = cell.fraction(k);
      if (f > 0.0) totals.per_material[k] += cell.state[k] * (f * vol);
    }
  }
  totals.global = totals.per_material[0] + totals.per_material[1];
  return totals;
}

}  // namespace enip

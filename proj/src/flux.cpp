#include "enip/flux.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace enip {
namespace {

// State expressed in the (normal, tangent) frame of a face, t = (-n.y, n.x).
struct FrameState {
  double rho, mn, mt, rhoE;
};

FrameState to_frame(const ConservedState& s, Vec2 n) {
  return {s.rho, s.mom_x * n.x + s.mom_y * n.y, -s.mom_x * n.y + s.mom_y * n.x, s.rhoE};
}

DirectedFlux from_frame(double f_rho, double f_mn, double f_mt, double f_e, Vec2 n) {
  return {f_rho, f_mn * n.x - f_mt * n.y, f_mn * n.y + f_mt * n.x, f_e};
}

double sign(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

}  // namespace

DirectedFlux physical_flux(const ConservedState& state, const MaterialModel& model, Vec2 n) {
  const Primitive w = primitive_from_conserved(state, model);
  const double un = w.u * n.x + w.v * n.y;
  return {state.rho * un, state.mom_x * un + w.p * n.x, state.mom_y * un + w.p * n.y,
          (state.rhoE + w.p) * un};
}

DirectedFlux numerical_flux(const ConservedState& left, const ConservedState& right,
                            const MaterialModel& model, Vec2 n) {
  const DirectedFlux fl = physical_flux(left, model, n);
  const DirectedFlux fr = physical_flux(right, model, n);
  if (left == right) return fl;

  const Primitive wl = primitive_from_conserved(left, model);
  const Primitive wr = primitive_from_conserved(right, model);
  const double rho = 0.5 * (wl.rho + wr.rho);
  const double u = 0.5 * (wl.u + wr.u);
  const double v = 0.5 * (wl.v + wr.v);
  const double p = 0.5 * (wl.p + wr.p);
  const double c = model.sound_speed(rho, p);
  if (!(c > 0.0)) throw InadmissibleState("numerical_flux: degenerate eigensystem (c = 0)");

  const double gm1 = model.gamma() - 1.0;
  const double un = u * n.x + v * n.y;
  const double ut = -u * n.y + v * n.x;
  const double q2 = un * un + ut * ut;
  const double h = c * c / gm1 + 0.5 * q2;
  const double b1 = gm1 / (c * c);
  const double b2 = 0.5 * q2 * b1;

  // Jump of the normal flux, in the face frame.
  const FrameState fjl = to_frame(fl.as_state(), n);
  const FrameState fjr = to_frame(fr.as_state(), n);
  const double d[4] = {fjr.rho - fjl.rho, fjr.mn - fjl.mn, fjr.mt - fjl.mt, fjr.rhoE - fjl.rhoE};

  // Characteristic amplitudes l_k . d.
  const double a1 = 0.5 * ((b2 + un / c) * d[0] + (-b1 * un - 1.0 / c) * d[1] - b1 * ut * d[2] + b1 * d[3]);
  const double a2 = (1.0 - b2) * d[0] + b1 * un * d[1] + b1 * ut * d[2] - b1 * d[3];
  const double a3 = -ut * d[0] + d[2];
  const double a4 = 0.5 * ((b2 - un / c) * d[0] + (-b1 * un + 1.0 / c) * d[1] - b1 * ut * d[2] + b1 * d[3]);

  const double s1 = sign(un - c) * a1;
  const double s2 = sign(un) * a2;
  const double s3 = sign(un) * a3;
  const double s4 = sign(un + c) * a4;

  // sign(A) d = sum_k sign(lambda_k) a_k r_k.
  const double sd0 = s1 + s2 + s4;
  const double sd1 = s1 * (un - c) + s2 * un + s4 * (un + c);
  const double sd2 = (s1 + s2 + s4) * ut + s3;
  const double sd3 = s1 * (h - un * c) + s2 * 0.5 * q2 + s3 * ut + s4 * (h + un * c);

  const double avg[4] = {0.5 * (fjl.rho + fjr.rho), 0.5 * (fjl.mn + fjr.mn), 0.5 * (fjl.mt + fjr.mt),
                         0.5 * (fjl.rhoE + fjr.rhoE)};
  return from_frame(avg[0] - 0.5 * sd0, avg[1] - 0.5 * sd1, avg[2] - 0.5 * sd2, avg[3] - 0.5 * sd3, n);
}

ConservedState mirror_state(const ConservedState& s, Vec2 n) {
  const double mn = s.mom_x * n.x + s.mom_y * n.y;
  return {s.rho, s.mom_x - 2.0 * mn * n.x, s.mom_y - 2.0 * mn * n.y, s.rhoE};
}

DirectedFlux boundary_flux(const ConservedState& inner, const MaterialModel& model, Boundary bc,
                           Vec2 n, bool inner_on_left) {
  switch (bc) {
    case Boundary::Transmissive:
      return physical_flux(inner, model, n);
    case Boundary::Reflective: {
      const ConservedState ghost = mirror_state(inner, n);
      const DirectedFlux f = inner_on_left ? numerical_flux(inner, ghost, model, n)
                                           : numerical_flux(ghost, inner, model, n);
      // A wall transmits pressure only.
      const double pn = f.mom_x * n.x + f.mom_y * n.y;
      return {0.0, pn * n.x, pn * n.y, 0.0};
    }
    case Boundary::Periodic:
      break;
  }
  throw std::logic_error("boundary_flux: periodic faces are resolved by the caller");
}

std::vector<ConservedState> sweep_update(std::span<const ConservedState> row,
                                         const MaterialModel& model, BoundaryPair bc, double dt,
                                         double spacing, Axis axis) {
  const std::size_t n = row.size();
  if (n == 0) return {};
  const Vec2 e = axis_vector(axis);
  std::vector<DirectedFlux> faces(n + 1);
  for (std::size_t f = 1; f < n; ++f) faces[f] = numerical_flux(row[f - 1], row[f], model, e);
  if (bc.lo == Boundary::Periodic || bc.hi == Boundary::Periodic) {
    faces[0] = numerical_flux(row[n - 1], row[0], model, e);
    faces[n] = faces[0];
  } else {
    faces[0] = boundary_flux(row[0], model, bc.lo, e, false);
    faces[n] = boundary_flux(row[n - 1], model, bc.hi, e, true);
  }

  const double ratio = dt / spacing;
  std::vector<ConservedState> out(row.begin(), row.end());
  for (std::size_t i = 0; i < n; ++i) {
    out[i] -= (faces[i + 1].as_state() - faces[i].as_state()) * ratio;
    try {
      (void)primitive_from_conserved(out[i], model);
    } catch (const InadmissibleState& err) {
      std::ostringstream msg;
      msg << "sweep_update: cell " << i << " became inadmissible: " << err.what();
      throw NumericalFailure(msg.str());
    }
  }
  return out;
}

double compute_dt(const Grid& grid, std::span<const CellContent> contents,
                  std::span<const MaterialModel> models, double cfl) {
  if (contents.empty()) throw std::invalid_argument("compute_dt: empty grid");
  if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("compute_dt: cfl must lie in (0, 1)");
  double max_speed = 0.0;
  for (const auto& cell : contents) {
    for (int k = 0; k < 2; ++k) {
      if (!cell.contains(k)) continue;
      const MaterialModel& model = models[static_cast<std::size_t>(k) < models.size() ? k : 0];
      const Primitive w = primitive_from_conserved(cell.state[k], model);
      const double c = model.sound_speed(w.rho, w.p);
      max_speed = std::max(max_speed, std::abs(w.u) + std::abs(w.v) + c);
    }
  }
  if (max_speed == 0.0) return std::numeric_limits<double>::infinity();
  return cfl * std::min(grid.dx, grid.dy) / max_speed;
}

}  // namespace enip

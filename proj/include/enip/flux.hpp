#ifndef ENIP_FLUX_HPP
#define ENIP_FLUX_HPP

#include <span>
#include <vector>

#include "enip/core.hpp"

namespace enip {

/// Flux density through a face of unit area, oriented by the outgoing normal.
struct DirectedFlux {
  double rho = 0.0;
  double mom_x = 0.0;
  double mom_y = 0.0;
  double rhoE = 0.0;

  ConservedState as_state() const { return {rho, mom_x, mom_y, rhoE}; }
  static DirectedFlux from_state(const ConservedState& s) { return {s.rho, s.mom_x, s.mom_y, s.rhoE}; }
  DirectedFlux operator-() const { return {-rho, -mom_x, -mom_y, -rhoE}; }
  bool operator==(const DirectedFlux&) const = default;
};

enum class Boundary { Transmissive, Reflective, Periodic };
enum class Axis { X, Y };

struct BoundaryPair {
  Boundary lo = Boundary::Transmissive;
  Boundary hi = Boundary::Transmissive;
};

struct BoundarySet {
  BoundaryPair x;
  BoundaryPair y;

  const BoundaryPair& along(Axis a) const { return a == Axis::X ? x : y; }
};

inline Vec2 axis_vector(Axis a) { return a == Axis::X ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0}; }

/// F(V).n for the Euler equations.
DirectedFlux physical_flux(const ConservedState& state, const MaterialModel& model, Vec2 n);

/// Characteristic (FVCF) flux:
///   phi = (F_L + F_R).n / 2 - sign(A(mean)) (F_R - F_L).n / 2
/// with A the Euler Jacobian along n at the arithmetic mean of the primitive
/// variables and sign(A) applied through its eigendecomposition.
DirectedFlux numerical_flux(const ConservedState& left, const ConservedState& right,
                            const MaterialModel& model, Vec2 n);

/// Mirror image of a state across a wall of normal n.
ConservedState mirror_state(const ConservedState& s, Vec2 n);

/// Flux through a domain-boundary face with normal n. `inner_on_left` tells
/// whether the interior cell sits on the tail side of n. Periodic boundaries
/// are resolved by the caller and are rejected here.
DirectedFlux boundary_flux(const ConservedState& inner, const MaterialModel& model, Boundary bc,
                           Vec2 n, bool inner_on_left);

/// First-order directional update of a row of pure cells of one material:
///   V_i <- V_i - dt/spacing (phi_{i+1/2} - phi_{i-1/2}).
/// Throws NumericalFailure when a density or pressure becomes inadmissible.
std::vector<ConservedState> sweep_update(std::span<const ConservedState> row,
                                         const MaterialModel& model, BoundaryPair bc, double dt,
                                         double spacing, Axis axis);

/// CFL time step: cfl * min(dx, dy) / max(|u| + |v| + c) over cells and the
/// materials present in them. Partial volumes do not shrink the step.
double compute_dt(const Grid& grid, std::span<const CellContent> contents,
                  std::span<const MaterialModel> models, double cfl);

}  // namespace enip

#endif  // ENIP_FLUX_HPP

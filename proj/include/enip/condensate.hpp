#ifndef ENIP_CONDENSATE_HPP
#define ENIP_CONDENSATE_HPP

#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "enip/core.hpp"
#include "enip/flux.hpp"
#include "enip/geom.hpp"

// Condensates: one-dimensional systems built along a sweep line from runs of
// mixed cells and their flanking pure cells. Everything in this header works
// in the sweep frame of one line: the sweep coordinate is x, the transverse
// coordinate is y, and cell k covers [k s, (k+1) s] x [0, h] with s the cell
// size along the sweep and h the transverse size. States and normals are
// expected in that frame (for a y-sweep, swap the x/y components first).

namespace enip {

enum class Reconstruction { NIP, ENIP };

enum class Side { Left, Right, Full };

/// Inclusive range of cell indices along a line.
struct CellRange {
  int first = 0;
  int last = 0;

  int size() const { return last - first + 1; }
  bool operator==(const CellRange&) const = default;
};

struct LineGeometry {
  double spacing = 1.0;
  double transverse = 1.0;

  double cell_volume() const { return spacing * transverse; }
  double face(int k) const { return k * spacing; }
};

/// Part of a layer that originates from one Eulerian cell.
struct SubVolume {
  int cell = 0;
  double volume = 0.0;
  Vec2 frozen_normal{1.0, 0.0};
  Side side = Side::Full;
};

/// One material slab of a condensate, bounded by x_minus < x_plus.
/// u_minus/u_plus are the boundary velocities, filled in by evolve_layers.
struct Layer {
  int material = 0;
  double x_minus = 0.0;
  double x_plus = 0.0;
  double u_minus = 0.0;
  double u_plus = 0.0;
  ConservedState state{};
  std::vector<SubVolume> subvolumes;

  double length() const { return x_plus - x_minus; }
};

struct Condensate {
  CellRange cells;
  std::vector<Layer> layers;
  DirectedFlux flux_left{};
  DirectedFlux flux_right{};
};

/// Cell ranges needing condensate treatment along one line.
///
/// Seeds are mixed cells and both cells of a face separating pure cells of
/// different materials. Each maximal seed run is extended by one pure cell at
/// every end whose cell is mixed; ranges that would share a cell are merged.
std::vector<CellRange> detect_condensates(std::span<const CellContent> line);

/// Representation + construction: places the partial volumes of each mixed
/// cell on its left or right side from the interface normal, glues contiguous
/// same-material pieces into layers and averages their conserved variables.
/// Outer fluxes are left zero for the caller to fill.
Condensate build_condensate(CellRange range, std::span<const CellContent> line,
                            const LineGeometry& geometry);

struct StarState {
  double u = 0.0;
  double p = 0.0;
};

/// Acoustic two-material interface solution; u is the sweep component.
StarState interface_star_state(const ConservedState& left, const ConservedState& right,
                               const MaterialModel& model_left, const MaterialModel& model_right);

struct HydroEvolution {
  std::span<const MaterialModel> models;
};

/// Prescribed velocity: returns the sweep velocity at a sweep coordinate of
/// the line (taken at the transverse midpoint).
struct AdvectionEvolution {
  std::function<double(double)> velocity;
};

using EvolutionMode = std::variant<HydroEvolution, AdvectionEvolution>;

/// A condensate after its Lagrangian step. `start` keeps the t^n geometry
/// with the boundary velocities set; `states` holds the t^{n+1} layer states.
struct EvolvedCondensate {
  Condensate start;
  std::vector<ConservedState> states;
  double dt = 0.0;

  double x_minus_new(std::size_t c) const { return start.layers[c].x_minus + dt * start.layers[c].u_minus; }
  double x_plus_new(std::size_t c) const { return start.layers[c].x_plus + dt * start.layers[c].u_plus; }
};

/// Lagrangian evolution of the layers. The two outer faces stay fixed and
/// exchange the Eulerian fluxes flux_left / flux_right; internal interfaces
/// move with the star (hydro) or prescribed (advection) velocity.
EvolvedCondensate evolve_layers(const Condensate& cond, double dt, const EvolutionMode& mode,
                                const LineGeometry& geometry);

/// Velocity of a point of a layer under the linear displacement assumption.
double node_velocity(double x, const Layer& layer);

/// (dVol_minus, dVol_plus) = (lambda_plus, lambda_minus) * dVol where dVol is
/// the compression rate of the whole layer.
std::pair<double, double> compression_rates(const Layer& layer, double x, double dt);

struct MaterialPolygon {
  int material = 0;
  int layer = 0;
  int lagrangian_cell = 0;
  Polygon shape;
  double volume = 0.0;
};

/// Material polygons inside the Lagrangian cells at t^{n+1}.
/// NIP keeps interfaces transverse to the sweep; ENIP cuts each Lagrangian
/// cell with the normal frozen at t^n.
std::vector<MaterialPolygon> reconstruct(const EvolvedCondensate& evolved, Reconstruction method,
                                         const LineGeometry& geometry);

/// Exact intersection of the polygons with the Eulerian cells of the range.
/// Overwrites fractions and states of line[range]; nearly pure cells
/// (fraction >= 1 - kPureSnap) are snapped with their residual merged.
void project(std::span<const MaterialPolygon> polygons, const EvolvedCondensate& evolved,
             const LineGeometry& geometry, std::span<CellContent> line);

inline constexpr double kPureSnap = 1e-13;

/// Youngs normals for every mixed cell of the grid. Degenerate gradients keep
/// the previous normal, or the fallback axis when the cell has none.
void refresh_normals(const Grid& grid, std::span<CellContent> contents, const BoundarySet& bcs,
                     Axis fallback);

}  // namespace enip

#endif  // ENIP_CONDENSATE_HPP

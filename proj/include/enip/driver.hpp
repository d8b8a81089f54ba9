#ifndef ENIP_DRIVER_HPP
#define ENIP_DRIVER_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "enip/condensate.hpp"
#include "enip/core.hpp"
#include "enip/flux.hpp"

namespace enip {

enum class Mode { Hydro, Advection };

/// Prescribed velocity for advection runs.
class VelocityField {
 public:
  enum class Kind { Uniform, Reversing, Rotation };

  static VelocityField uniform(Vec2 velocity);
  /// `velocity` until `reverse_time`, then its opposite.
  static VelocityField reversing(Vec2 velocity, double reverse_time);
  /// Rigid rotation u = -omega (y - cy), v = omega (x - cx).
  static VelocityField rotation(Vec2 center, double omega);

  Kind kind() const { return kind_; }
  Vec2 at(Vec2 point, double time) const;
  /// Times at which the field changes discontinuously; steps land on them.
  std::vector<double> breakpoints() const;

 private:
  Kind kind_ = Kind::Uniform;
  Vec2 velocity_{};
  double reverse_time_ = 0.0;
  Vec2 center_{};
  double omega_ = 0.0;
};

struct SimulationConfig {
  Grid grid;
  std::vector<MaterialModel> materials;
  std::string initial_condition;
  BoundarySet boundaries;
  double cfl = 0.45;
  double t_end = 1.0;
  Mode mode = Mode::Hydro;
  VelocityField velocity = VelocityField::uniform({});
  Reconstruction reconstruction = Reconstruction::ENIP;
  Vec2 gravity{};
  /// Snapshot cadence in simulated seconds; 0 writes the initial and final frames only.
  double snapshot_every = 0.0;
  /// Extra snapshot times.
  std::vector<double> snapshot_times;
  double density_floor = 1e-12;

  void validate() const;
};

struct World {
  Grid grid;
  std::vector<MaterialModel> materials;
  std::vector<CellContent> cells;
  double time = 0.0;

  CellContent& at(int i, int j) { return cells[grid.index(i, j)]; }
  const CellContent& at(int i, int j) const { return cells[grid.index(i, j)]; }
};

/// Integrated sources of the conserved totals during a step or a run.
struct Budget {
  ConservedState boundary_inflow{};
  ConservedState gravity{};

  Budget& operator+=(const Budget& o) {
    boundary_inflow += o.boundary_inflow;
    gravity += o.gravity;
    return *this;
  }
};

struct StepSettings {
  Mode mode = Mode::Hydro;
  Reconstruction reconstruction = Reconstruction::ENIP;
  BoundarySet boundaries;
  Vec2 gravity{};
  const VelocityField* velocity = nullptr;

  static StepSettings from(const SimulationConfig& config);
};

/// One x-sweep, normal refresh, y-sweep, normal refresh, then gravity.
/// Throws NumericalFailure with the failing cell in the message.
Budget step(World& world, const StepSettings& settings, double dt);

/// The advection variant of step: prescribed interface velocities, passive
/// material markers, no equation of state and no gravity.
Budget advect_step(World& world, const VelocityField& field, double dt, Reconstruction method,
                   const BoundarySet& boundaries);

/// CFL step of a run (hydro: wave speeds; advection: prescribed speeds).
double stable_dt(const World& world, const SimulationConfig& config);

struct LedgerEntry {
  double time = 0.0;
  double dt = 0.0;
  MaterialTotals totals;
  Budget budget;  // accumulated since t = 0
};

struct Snapshot {
  double time = 0.0;
  std::vector<CellContent> cells;
};

struct RunResult {
  World final_world;
  std::vector<Snapshot> snapshots;
  std::vector<LedgerEntry> ledger;
  Budget budget;
  int steps = 0;
  std::optional<std::string> failure;
};

/// Advances to config.t_end, landing exactly on snapshot times, velocity
/// breakpoints and t_end. A failing step stops the run; the last good state
/// is returned with the failure message.
RunResult run(const SimulationConfig& config, World initial,
              const std::function<void(const World&)>& on_step = {});

/// Cell density averaged over the materials present.
double mixture_density(const CellContent& cell);

/// sum |f - f_exact|^a / sum |f_exact|^a for a in {1, 2}.
double error_norm(std::span<const double> field, std::span<const double> exact, int alpha);

}  // namespace enip

#endif  // ENIP_DRIVER_HPP

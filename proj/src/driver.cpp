#include "enip/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace enip {
namespace {

ConservedState swap_xy(const ConservedState& s) { return {s.rho, s.mom_y, s.mom_x, s.rhoE}; }
Vec2 swap_xy(Vec2 v) { return {v.y, v.x}; }

CellContent to_line_frame(const CellContent& c, Axis axis) {
  if (axis == Axis::X) return c;
  CellContent out = c;
  out.state = {swap_xy(c.state[0]), swap_xy(c.state[1])};
  out.normal = swap_xy(c.normal);
  std::swap(out.low_side[0], out.low_side[1]);
  return out;
}

const MaterialModel& model_of(std::span<const MaterialModel> models, int material) {
  return models[static_cast<std::size_t>(material) < models.size() ? static_cast<std::size_t>(material) : 0];
}

struct LineContext {
  LineGeometry geometry;
  BoundaryPair bc;
  double dt = 0.0;
  Mode mode = Mode::Hydro;
  Reconstruction reconstruction = Reconstruction::ENIP;
  std::span<const MaterialModel> models;
  // Advection: sweep velocity at a sweep coordinate of the line.
  std::function<double(double)> velocity;
};

struct LineFluxes {
  DirectedFlux lo;
  DirectedFlux hi;
};

DirectedFlux advective_flux(const ConservedState& left, const ConservedState& right, double u) {
  return DirectedFlux::from_state((u >= 0.0 ? left : right) * u);
}

DirectedFlux face_flux(const CellContent& left, const CellContent& right, double s, const LineContext& ctx) {
  const int m = left.material();
  if (right.material() != m) throw std::logic_error("face_flux: material change across an Eulerian face");
  if (ctx.mode == Mode::Advection) return advective_flux(left.state[m], right.state[m], ctx.velocity(s));
  return numerical_flux(left.state[m], right.state[m], model_of(ctx.models, m), {1.0, 0.0});
}

DirectedFlux wall_face_flux(const ConservedState& inner, int material, Boundary bc, double s,
                            bool inner_on_left, const LineContext& ctx) {
  if (ctx.mode == Mode::Advection) {
    if (bc == Boundary::Reflective) return {};
    return advective_flux(inner, inner, ctx.velocity(s));
  }
  return boundary_flux(inner, model_of(ctx.models, material), bc, {1.0, 0.0}, inner_on_left);
}

/// One directional update of a line in its sweep frame.
LineFluxes sweep_line(std::vector<CellContent>& line, const LineContext& ctx) {
  const int n = static_cast<int>(line.size());
  const LineGeometry& geo = ctx.geometry;
  const std::vector<CellRange> ranges = detect_condensates(line);

  std::vector<int> owner(line.size(), -1);
  for (std::size_t r = 0; r < ranges.size(); ++r) {
    for (int k = ranges[r].first; k <= ranges[r].last; ++k) owner[k] = static_cast<int>(r);
  }
  const bool periodic = ctx.bc.lo == Boundary::Periodic || ctx.bc.hi == Boundary::Periodic;
  if (periodic && (owner.front() >= 0 || owner.back() >= 0)) {
    throw NumericalFailure("material interface at a periodic boundary is not supported");
  }

  std::vector<DirectedFlux> face(line.size() + 1);
  std::vector<char> known(line.size() + 1, 0);
  for (int f = 1; f < n; ++f) {
    if (owner[f - 1] >= 0 && owner[f - 1] == owner[f]) continue;
    face[f] = face_flux(line[f - 1], line[f], geo.face(f), ctx);
    known[f] = 1;
  }
  if (periodic) {
    face[0] = face_flux(line[n - 1], line[0], geo.face(0), ctx);
    face[n] = face[0];
    known[0] = known[n] = 1;
  } else {
    if (!line.front().is_mixed()) {
      const int m = line.front().material();
      face[0] = wall_face_flux(line.front().state[m], m, ctx.bc.lo, geo.face(0), false, ctx);
      known[0] = 1;
    }
    if (!line.back().is_mixed()) {
      const int m = line.back().material();
      face[n] = wall_face_flux(line.back().state[m], m, ctx.bc.hi, geo.face(n), true, ctx);
      known[n] = 1;
    }
  }

  const double ratio = ctx.dt / geo.spacing;
  for (int k = 0; k < n; ++k) {
    if (owner[k] >= 0) continue;
    CellContent& cell = line[k];
    const int m = cell.material();
    cell.state[m] -= (face[k + 1].as_state() - face[k].as_state()) * ratio;
    if (ctx.mode == Mode::Hydro) {
      try {
        (void)primitive_from_conserved(cell.state[m], model_of(ctx.models, m));
      } catch (const InadmissibleState& err) {
        std::ostringstream msg;
        msg << "line cell " << k << ": " << err.what();
        throw NumericalFailure(msg.str());
      }
    }
  }

  EvolutionMode mode = HydroEvolution{ctx.models};
  if (ctx.mode == Mode::Advection) mode = AdvectionEvolution{ctx.velocity};
  for (const CellRange& range : ranges) {
    Condensate cond = build_condensate(range, line, geo);
    if (!known[range.first]) {
      const Layer& first = cond.layers.front();
      face[range.first] = wall_face_flux(first.state, first.material, ctx.bc.lo, geo.face(0), false, ctx);
      known[range.first] = 1;
    }
    if (!known[range.last + 1]) {
      const Layer& last = cond.layers.back();
      face[range.last + 1] = wall_face_flux(last.state, last.material, ctx.bc.hi, geo.face(n), true, ctx);
      known[range.last + 1] = 1;
    }
    cond.flux_left = face[range.first];
    cond.flux_right = face[range.last + 1];
    const EvolvedCondensate evolved = evolve_layers(cond, ctx.dt, mode, geo);
    const std::vector<MaterialPolygon> polygons = reconstruct(evolved, ctx.reconstruction, geo);
    project(polygons, evolved, geo, line);
    for (const Layer& layer : cond.layers) {
      for (const SubVolume& sv : layer.subvolumes) {
        if (sv.side == Side::Left) line[sv.cell].low_side[0] = layer.material;
      }
    }
  }
  return {face[0], face[n]};
}

void sweep(World& world, const StepSettings& settings, Axis axis, double dt, Budget& budget) {
  const Grid& g = world.grid;
  const bool along_x = axis == Axis::X;
  const int lines = along_x ? g.ny : g.nx;
  const int length = along_x ? g.nx : g.ny;

  LineContext ctx;
  ctx.geometry = along_x ? LineGeometry{g.dx, g.dy} : LineGeometry{g.dy, g.dx};
  ctx.bc = settings.boundaries.along(axis);
  ctx.dt = dt;
  ctx.mode = settings.mode;
  ctx.reconstruction = settings.reconstruction;
  ctx.models = world.materials;

  std::vector<CellContent> line(static_cast<std::size_t>(length));
  for (int l = 0; l < lines; ++l) {
    for (int k = 0; k < length; ++k) {
      line[k] = to_line_frame(along_x ? world.at(k, l) : world.at(l, k), axis);
    }
    if (settings.mode == Mode::Advection) {
      const VelocityField& field = *settings.velocity;
      const double t = world.time;
      if (along_x) {
        const double y = g.origin.y + (l + 0.5) * g.dy;
        ctx.velocity = [&field, t, y, x0 = g.origin.x](double s) { return field.at({x0 + s, y}, t).x; };
      } else {
        const double x = g.origin.x + (l + 0.5) * g.dx;
        ctx.velocity = [&field, t, x, y0 = g.origin.y](double s) { return field.at({x, y0 + s}, t).y; };
      }
    }
    LineFluxes fluxes;
    try {
      fluxes = sweep_line(line, ctx);
    } catch (const NumericalFailure& err) {
      std::ostringstream msg;
      msg << (along_x ? "x-sweep row " : "y-sweep column ") << l << ": " << err.what();
      throw NumericalFailure(msg.str());
    } catch (const InadmissibleState& err) {
      std::ostringstream msg;
      msg << (along_x ? "x-sweep row " : "y-sweep column ") << l << ": " << err.what();
      throw NumericalFailure(msg.str());
    }
    for (int k = 0; k < length; ++k) {
      (along_x ? world.at(k, l) : world.at(l, k)) = to_line_frame(line[k], axis);
    }
    ConservedState inflow = (fluxes.lo.as_state() - fluxes.hi.as_state()) * (dt * ctx.geometry.transverse);
    budget.boundary_inflow += along_x ? inflow : swap_xy(inflow);
  }
}

void apply_gravity(World& world, Vec2 g, double dt, Budget& budget) {
  if (g.x == 0.0 && g.y == 0.0) return;
  const double vol = world.grid.cell_volume();
  for (CellContent& cell : world.cells) {
    for (int k = 0; k < 2; ++k) {
      const double f = cell.fraction(k);
      if (f <= 0.0) continue;
      ConservedState& s = cell.state[k];
      const double mx = s.mom_x;
      const double my = s.mom_y;
      s.mom_x += s.rho * g.x * dt;
      s.mom_y += s.rho * g.y * dt;
      // Work of the midpoint momentum leaves the internal energy untouched.
      const double work = 0.5 * ((mx + s.mom_x) * g.x + (my + s.mom_y) * g.y) * dt;
      s.rhoE += work;
      budget.gravity += ConservedState{0.0, s.rho * g.x * dt, s.rho * g.y * dt, work} * (f * vol);
    }
  }
}

}  // namespace

VelocityField VelocityField::uniform(Vec2 velocity) {
  VelocityField f;
  f.kind_ = Kind::Uniform;
  f.velocity_ = velocity;
  return f;
}

VelocityField VelocityField::reversing(Vec2 velocity, double reverse_time) {
  VelocityField f;
  f.kind_ = Kind::Reversing;
  f.velocity_ = velocity;
  f.reverse_time_ = reverse_time;
  return f;
}

VelocityField VelocityField::rotation(Vec2 center, double omega) {
  VelocityField f;
  f.kind_ = Kind::Rotation;
  f.center_ = center;
  f.omega_ = omega;
  return f;
}

Vec2 VelocityField::at(Vec2 p, double t) const {
  switch (kind_) {
    case Kind::Uniform:
      return velocity_;
    case Kind::Reversing:
      return t < reverse_time_ ? velocity_ : -velocity_;
    case Kind::Rotation:
      return {-omega_ * (p.y - center_.y), omega_ * (p.x - center_.x)};
  }
  return {};
}

std::vector<double> VelocityField::breakpoints() const {
  if (kind_ == Kind::Reversing) return {reverse_time_};
  return {};
}

void SimulationConfig::validate() const {
  grid.validate();
  if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("cfl must lie in (0, 1)");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  if (materials.empty() || materials.size() > 2) throw std::invalid_argument("one or two materials required");
  if (snapshot_every < 0.0) throw std::invalid_argument("snapshot cadence must be >= 0");
  auto check_periodic = [](const BoundaryPair& p) {
    if ((p.lo == Boundary::Periodic) != (p.hi == Boundary::Periodic)) {
      throw std::invalid_argument("periodic boundaries must be paired");
    }
  };
  check_periodic(boundaries.x);
  check_periodic(boundaries.y);
}

StepSettings StepSettings::from(const SimulationConfig& config) {
  StepSettings s;
  s.mode = config.mode;
  s.reconstruction = config.reconstruction;
  s.boundaries = config.boundaries;
  s.gravity = config.gravity;
  s.velocity = &config.velocity;
  return s;
}

Budget step(World& world, const StepSettings& settings, double dt) {
  if (settings.mode == Mode::Advection && settings.velocity == nullptr) {
    throw std::invalid_argument("step: advection requires a velocity field");
  }
  Budget budget;
  sweep(world, settings, Axis::X, dt, budget);
  refresh_normals(world.grid, world.cells, settings.boundaries, Axis::X);
  sweep(world, settings, Axis::Y, dt, budget);
  refresh_normals(world.grid, world.cells, settings.boundaries, Axis::Y);
  if (settings.mode == Mode::Hydro) apply_gravity(world, settings.gravity, dt, budget);
  return budget;
}

Budget advect_step(World& world, const VelocityField& field, double dt, Reconstruction method,
                   const BoundarySet& boundaries) {
  StepSettings s;
  s.mode = Mode::Advection;
  s.reconstruction = method;
  s.boundaries = boundaries;
  s.velocity = &field;
  return step(world, s, dt);
}

double stable_dt(const World& world, const SimulationConfig& config) {
  if (config.mode == Mode::Hydro) return compute_dt(world.grid, world.cells, world.materials, config.cfl);
  const Grid& g = world.grid;
  double max_speed = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Vec2 u = config.velocity.at(g.center(i, j), world.time);
      max_speed = std::max(max_speed, std::abs(u.x) + std::abs(u.y));
    }
  }
  if (max_speed == 0.0) return std::numeric_limits<double>::infinity();
  return config.cfl * std::min(g.dx, g.dy) / max_speed;
}

RunResult run(const SimulationConfig& config, World initial,
              const std::function<void(const World&)>& on_step) {
  config.validate();
  RunResult result;
  result.final_world = std::move(initial);
  World& world = result.final_world;
  const StepSettings settings = StepSettings::from(config);

  // Times every step must land on.
  std::vector<double> targets = config.snapshot_times;
  if (config.snapshot_every > 0.0) {
    for (int k = 1;; ++k) {
      const double t = k * config.snapshot_every;
      if (t >= config.t_end) break;
      targets.push_back(t);
    }
  }
  std::vector<double> snaps = targets;
  snaps.push_back(config.t_end);
  for (double b : config.velocity.breakpoints()) targets.push_back(b);
  targets.push_back(config.t_end);
  std::erase_if(targets, [&](double t) { return !(t > world.time) || t > config.t_end; });
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  auto record = [&](double dt) {
    result.ledger.push_back({world.time, dt, total_conserved(world.grid, world.cells), result.budget});
  };
  record(0.0);
  result.snapshots.push_back({world.time, world.cells});

  std::size_t next = 0;
  while (next < targets.size()) {
    const double target = targets[next];
    double dt = stable_dt(world, config);
    const bool hits = !(world.time + dt < target);
    if (hits) dt = target - world.time;
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      result.failure = "non-positive time step at t=" + std::to_string(world.time);
      break;
    }
    World trial = world;
    try {
      result.budget += step(trial, settings, dt);
    } catch (const std::exception& err) {
      std::ostringstream msg;
      msg << "t=" << world.time << " dt=" << dt << ": " << err.what();
      result.failure = msg.str();
      break;
    }
    world = std::move(trial);
    world.time = hits ? target : world.time + dt;
    ++result.steps;
    record(dt);
    if (on_step) on_step(world);
    if (hits) {
      if (std::find(snaps.begin(), snaps.end(), target) != snaps.end()) {
        result.snapshots.push_back({world.time, world.cells});
      }
      ++next;
    }
  }
  return result;
}

double mixture_density(const CellContent& cell) {
  double rho = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double f = cell.fraction(k);
    if (f > 0.0) rho += f * cell.state[k].rho;
  }
  return rho;
}

double error_norm(std::span<const double> field, std::span<const double> exact, int alpha) {
  if (field.size() != exact.size()) throw std::invalid_argument("error_norm: field sizes differ");
  if (alpha != 1 && alpha != 2) throw std::invalid_argument("error_norm: alpha must be 1 or 2");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < field.size(); ++k) {
    const double d = std::abs(field[k] - exact[k]);
    const double e = std::abs(exact[k]);
    num += alpha == 1 ? d : d * d;
    den += alpha == 1 ? e : e * e;
  }
  if (den == 0.0) throw std::invalid_argument("error_norm: exact field is identically zero");
  return num / den;
}

}  // namespace enip

#include "enip/condensate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace enip {
namespace {

constexpr double kTransverseTie = 1e-12;

// Volume-weighted mean that returns identical inputs bit for bit.
struct RunningMean {
  ConservedState mean{};
  double weight = 0.0;
  void add(const ConservedState& s, double w) {
    weight += w;
    mean += (s - mean) * (w / weight);
  }
};

struct Piece {
  int cell;
  int material;
  double volume;
  Side side;
  Vec2 normal;
  double x_begin;
  double x_end;
};

const MaterialModel& model_of(std::span<const MaterialModel> models, int material) {
  return models[static_cast<std::size_t>(material) < models.size() ? static_cast<std::size_t>(material) : 0];
}

std::string where(int cell) {
  std::ostringstream out;
  out << "line cell " << cell;
  return out.str();
}

}  // namespace

std::vector<CellRange> detect_condensates(std::span<const CellContent> line) {
  const int n = static_cast<int>(line.size());
  std::vector<char> seed(line.size(), 0);
  for (int k = 0; k < n; ++k) seed[k] = line[k].is_mixed() ? 1 : 0;
  for (int k = 0; k + 1 < n; ++k) {
    const CellContent& a = line[k];
    const CellContent& b = line[k + 1];
    if (!a.is_mixed() && !b.is_mixed() && a.material() != b.material()) seed[k] = seed[k + 1] = 1;
  }

  std::vector<CellRange> ranges;
  for (int k = 0; k < n;) {
    if (!seed[k]) {
      ++k;
      continue;
    }
    CellRange r{k, k};
    while (r.last + 1 < n && seed[r.last + 1]) ++r.last;
    k = r.last + 1;
    if (line[r.first].is_mixed() && r.first > 0) --r.first;
    if (line[r.last].is_mixed() && r.last + 1 < n) ++r.last;
    if (!ranges.empty() && r.first <= ranges.back().last) {
      ranges.back().last = std::max(ranges.back().last, r.last);
    } else {
      ranges.push_back(r);
    }
  }
  return ranges;
}

Condensate build_condensate(CellRange range, std::span<const CellContent> line,
                            const LineGeometry& geometry) {
  if (range.first < 0 || range.last >= static_cast<int>(line.size()) || range.first > range.last) {
    throw std::invalid_argument("build_condensate: invalid cell range");
  }
  const double s = geometry.spacing;

  // Representation.
  std::vector<Piece> pieces;
  pieces.reserve(2 * static_cast<std::size_t>(range.size()));
  for (int k = range.first; k <= range.last; ++k) {
    const CellContent& cell = line[k];
    const double x0 = geometry.face(k);
    const double x1 = geometry.face(k + 1);
    if (!cell.is_mixed()) {
      const int m = cell.material();
      pieces.push_back({k, m, geometry.cell_volume(), Side::Full, cell.normal, x0, x1});
      continue;
    }
    // The normal points out of material 0, so material 0 sits on the side
    // opposite to the normal's sweep component.
    int first = cell.normal.x < 0.0 ? 1 : 0;
    if (std::abs(cell.normal.x) < kTransverseTie) first = cell.low_side[0] >= 0 ? cell.low_side[0] : 0;
    const int second = 1 - first;
    const double split = x0 + cell.fraction(first) * s;
    pieces.push_back({k, first, cell.fraction(first) * geometry.cell_volume(), Side::Left, cell.normal, x0, split});
    pieces.push_back({k, second, cell.fraction(second) * geometry.cell_volume(), Side::Right, cell.normal, split, x1});
  }

  // Construction.
  Condensate cond;
  cond.cells = range;
  for (const Piece& p : pieces) {
    if (cond.layers.empty() || cond.layers.back().material != p.material) {
      Layer layer;
      layer.material = p.material;
      layer.x_minus = p.x_begin;
      cond.layers.push_back(std::move(layer));
    }
    Layer& layer = cond.layers.back();
    layer.x_plus = p.x_end;
    layer.subvolumes.push_back({p.cell, p.volume, p.normal, p.side});
  }
  for (std::size_t c = 0; c < cond.layers.size(); ++c) {
    Layer& layer = cond.layers[c];
    RunningMean acc;
    for (const SubVolume& sv : layer.subvolumes) acc.add(line[sv.cell].state[layer.material], sv.volume);
    layer.state = acc.mean;
    if (!(layer.length() > 0.0)) {
      throw NumericalFailure("build_condensate: empty layer at " + where(layer.subvolumes.front().cell));
    }
    if (c > 0 && cond.layers[c - 1].material == layer.material) {
      throw NumericalFailure("build_condensate: non-alternating layers at " + where(layer.subvolumes.front().cell));
    }
  }
  return cond;
}

StarState interface_star_state(const ConservedState& left, const ConservedState& right,
                               const MaterialModel& model_left, const MaterialModel& model_right) {
  const Primitive wl = primitive_from_conserved(left, model_left);
  const Primitive wr = primitive_from_conserved(right, model_right);
  const double zl = wl.rho * model_left.sound_speed(wl.rho, wl.p);
  const double zr = wr.rho * model_right.sound_speed(wr.rho, wr.p);
  const double z = zl + zr;
  if (!(z > 0.0)) throw InadmissibleState("interface_star_state: zero acoustic impedance");
  // Written as corrections of the left state so that equilibria are exact.
  StarState star;
  star.u = wl.u + (zr * (wr.u - wl.u) + (wl.p - wr.p)) / z;
  star.p = wl.p + (zl * (wr.p - wl.p) + zl * zr * (wl.u - wr.u)) / z;
  return star;
}

EvolvedCondensate evolve_layers(const Condensate& cond, double dt, const EvolutionMode& mode,
                                const LineGeometry& /*geometry*/) {
  const std::size_t n_layers = cond.layers.size();
  if (n_layers == 0) throw std::invalid_argument("evolve_layers: empty condensate");

  EvolvedCondensate out;
  out.start = cond;
  out.dt = dt;
  auto& layers = out.start.layers;

  // Boundary b sits between layers b-1 and b; b = 0 and b = n are the fixed
  // outer faces of the condensate.
  std::vector<double> u(n_layers + 1, 0.0);
  std::vector<double> p(n_layers + 1, 0.0);
  const auto* hydro = std::get_if<HydroEvolution>(&mode);
  const auto* advection = std::get_if<AdvectionEvolution>(&mode);
  for (std::size_t b = 1; b < n_layers; ++b) {
    if (hydro) {
      const Layer& l = layers[b - 1];
      const Layer& r = layers[b];
      const StarState star = interface_star_state(l.state, r.state, model_of(hydro->models, l.material),
                                                  model_of(hydro->models, r.material));
      u[b] = star.u;
      p[b] = star.p;
    } else {
      u[b] = advection->velocity(layers[b].x_minus);
    }
  }
  if (hydro) {
    // Layers crossed by sound within the step cannot follow their own star
    // states. A run of them moves rigidly with the star state of the layers
    // around it, or stays attached to an outer face.
    std::vector<char> thin(n_layers, 0);
    for (std::size_t c = 0; c < n_layers; ++c) {
      const Primitive w = primitive_from_conserved(layers[c].state, model_of(hydro->models, layers[c].material));
      thin[c] = layers[c].length() < dt * model_of(hydro->models, layers[c].material).sound_speed(w.rho, w.p);
    }
    for (std::size_t a = 0; a < n_layers;) {
      if (!thin[a]) {
        ++a;
        continue;
      }
      std::size_t b = a;
      while (b + 1 < n_layers && thin[b + 1]) ++b;
      double ub = 0.0;
      double pb = 0.0;
      if (a == 0) {
        pb = cond.flux_left.mom_x;
      } else if (b + 1 == n_layers) {
        pb = cond.flux_right.mom_x;
      } else {
        const Layer& l = layers[a - 1];
        const Layer& r = layers[b + 1];
        const StarState star = interface_star_state(l.state, r.state, model_of(hydro->models, l.material),
                                                    model_of(hydro->models, r.material));
        ub = star.u;
        pb = star.p;
      }
      for (std::size_t k = std::max<std::size_t>(a, 1); k <= std::min(b + 1, n_layers - 1); ++k) {
        u[k] = ub;
        p[k] = pb;
      }
      a = b + 1;
    }
  }
  for (std::size_t c = 0; c < n_layers; ++c) {
    layers[c].u_minus = u[c];
    layers[c].u_plus = u[c + 1];
  }

  out.states.resize(n_layers);
  for (std::size_t c = 0; c < n_layers; ++c) {
    const Layer& layer = layers[c];
    ConservedState net = c == 0 ? cond.flux_left.as_state() : ConservedState{0.0, p[c], 0.0, p[c] * u[c]};
    net -= c + 1 == n_layers ? cond.flux_right.as_state()
                             : ConservedState{0.0, p[c + 1], 0.0, p[c + 1] * u[c + 1]};
    const double new_length = out.x_plus_new(c) - out.x_minus_new(c);
    if (!(new_length > 0.0)) {
      std::ostringstream msg;
      msg << "evolve_layers: layer collapse at " << where(layer.subvolumes.front().cell)
          << " (length " << layer.length() << " -> " << new_length << ")";
      throw NumericalFailure(msg.str());
    }
    out.states[c] = layer.state * (layer.length() / new_length) + net * (dt / new_length);
    if (hydro) {
      try {
        (void)primitive_from_conserved(out.states[c], model_of(hydro->models, layer.material));
      } catch (const InadmissibleState& err) {
        throw NumericalFailure("evolve_layers: inadmissible layer at " +
                               where(layer.subvolumes.front().cell) + ": " + err.what());
      }
    }
  }
  return out;
}

double node_velocity(double x, const Layer& layer) {
  const double len = layer.length();
  const double tol = 1e-12 * std::max(len, std::abs(layer.x_plus));
  if (x < layer.x_minus - tol || x > layer.x_plus + tol) {
    throw std::invalid_argument("node_velocity: point outside the layer");
  }
  const double lambda_minus = (layer.x_plus - x) / len;
  const double lambda_plus = (x - layer.x_minus) / len;
  return lambda_minus * layer.u_minus + lambda_plus * layer.u_plus;
}

std::pair<double, double> compression_rates(const Layer& layer, double x, double dt) {
  const double len = layer.length();
  const double rate = 1.0 + dt * (layer.u_plus - layer.u_minus) / len;
  if (!(rate > 0.0)) throw NumericalFailure("compression_rates: layer inversion");
  const double lambda_minus = (layer.x_plus - x) / len;
  const double lambda_plus = (x - layer.x_minus) / len;
  return {lambda_plus * rate, lambda_minus * rate};
}

std::vector<MaterialPolygon> reconstruct(const EvolvedCondensate& evolved, Reconstruction method,
                                         const LineGeometry& geometry) {
  const Condensate& cond = evolved.start;
  const CellRange range = cond.cells;
  const double h = geometry.transverse;
  const double dt = evolved.dt;
  const int n = range.size();

  // Pieces of every cell: (layer, subvolume) in sweep order.
  struct Ref {
    int layer;
    const SubVolume* sub;
  };
  std::vector<std::vector<Ref>> by_cell(static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < cond.layers.size(); ++c) {
    for (const SubVolume& sv : cond.layers[c].subvolumes) {
      by_cell[static_cast<std::size_t>(sv.cell - range.first)].push_back({static_cast<int>(c), &sv});
    }
  }

  // Lagrangian faces.
  std::vector<double> face(static_cast<std::size_t>(n) + 1);
  face.front() = geometry.face(range.first);
  face.back() = geometry.face(range.last + 1);
  for (int f = 1; f < n; ++f) {
    const double x = geometry.face(range.first + f);
    const Ref& before = by_cell[f - 1].back();
    const Ref& after = by_cell[f].front();
    const double vel = before.layer != after.layer ? cond.layers[after.layer].u_minus
                                                   : node_velocity(x, cond.layers[before.layer]);
    face[f] = x + dt * vel;
  }
  for (int f = 0; f < n; ++f) {
    if (!(face[f] < face[f + 1])) {
      throw NumericalFailure("reconstruct: Lagrangian cell inverted at " + where(range.first + f));
    }
  }

  std::vector<MaterialPolygon> polys;
  polys.reserve(2 * static_cast<std::size_t>(n));
  for (int f = 0; f < n; ++f) {
    const int cell = range.first + f;
    const Rect lag{face[f], 0.0, face[f + 1], h};
    const auto& refs = by_cell[f];
    if (refs.size() == 1) {
      polys.push_back({cond.layers[refs[0].layer].material, refs[0].layer, cell, lag.polygon(), lag.area()});
      continue;
    }
    const Ref& left = refs[0];
    const Ref& right = refs[1];
    const Layer& left_layer = cond.layers[left.layer];
    const Layer& right_layer = cond.layers[right.layer];
    const double x_if = left_layer.x_plus + dt * left_layer.u_plus;
    if (!(face[f] < x_if && x_if < face[f + 1])) {
      std::ostringstream msg;
      msg << "reconstruct: interface left its Lagrangian cell at " << where(cell) << " (" << face[f]
          << " < " << x_if << " < " << face[f + 1] << " violated)";
      throw NumericalFailure(msg.str());
    }
    const double left_volume = (x_if - face[f]) * h;
    const double right_volume = (face[f + 1] - x_if) * h;

    // The same volumes through the layer compression rates.
    const double x0 = geometry.face(cell);
    const double x1 = geometry.face(cell + 1);
    const double left_rate = compression_rates(left_layer, x0, dt).second * left_layer.length() * h;
    const double right_rate = compression_rates(right_layer, x1, dt).first * right_layer.length() * h;
    const double cell_volume = lag.area();
    const double tol = 1e-12 * geometry.cell_volume();
    if (left_rate > cell_volume + tol || right_rate > cell_volume + tol ||
        std::abs(left_rate - left_volume) > 1e-9 * geometry.cell_volume() ||
        std::abs(right_rate - right_volume) > 1e-9 * geometry.cell_volume()) {
      throw NumericalFailure("reconstruct: partial volume not included in its Lagrangian cell at " + where(cell));
    }

    if (method == Reconstruction::NIP) {
      polys.push_back({left_layer.material, left.layer, cell, Rect{face[f], 0.0, x_if, h}.polygon(), left_volume});
      polys.push_back({right_layer.material, right.layer, cell, Rect{x_if, 0.0, face[f + 1], h}.polygon(), right_volume});
      continue;
    }
    // ENIP: material 0 lies on n . x <= d with the normal frozen at t^n.
    const Vec2 normal = left.sub->frozen_normal;
    const bool zero_left = left_layer.material == 0;
    const double volume0 = zero_left ? left_volume : right_volume;
    const double volume1 = zero_left ? right_volume : left_volume;
    const InterfaceLine line = line_from_volume(normal, std::min(volume0, cell_volume), lag);
    const Polygon shape0 = clip_polygon(lag.polygon(), {normal, line.offset});
    const Polygon shape1 = clip_polygon(lag.polygon(), {-normal, -line.offset});
    const int layer0 = zero_left ? left.layer : right.layer;
    const int layer1 = zero_left ? right.layer : left.layer;
    polys.push_back({0, layer0, cell, shape0, volume0});
    polys.push_back({1, layer1, cell, shape1, volume1});
  }
  return polys;
}

void project(std::span<const MaterialPolygon> polygons, const EvolvedCondensate& evolved,
             const LineGeometry& geometry, std::span<CellContent> line) {
  const CellRange range = evolved.start.cells;
  const int n = range.size();
  const double s = geometry.spacing;
  const double cell_volume = geometry.cell_volume();

  std::vector<std::array<double, 2>> vol(static_cast<std::size_t>(n), {0.0, 0.0});
  std::vector<std::array<RunningMean, 2>> mean(static_cast<std::size_t>(n));
  std::vector<double> parts;

  for (const MaterialPolygon& poly : polygons) {
    if (poly.shape.empty() || poly.volume <= 0.0) continue;
    double lo = poly.shape.front().x;
    double hi = lo;
    for (const Vec2& v : poly.shape) {
      lo = std::min(lo, v.x);
      hi = std::max(hi, v.x);
    }
    const int k0 = std::max(range.first, static_cast<int>(std::floor(lo / s)));
    const int k1 = std::min(range.last, static_cast<int>(std::floor(hi / s)));
    parts.assign(static_cast<std::size_t>(std::max(0, k1 - k0 + 1)), 0.0);
    double covered = 0.0;
    for (int k = k0; k <= k1; ++k) {
      Polygon piece = clip_polygon(poly.shape, {{-1.0, 0.0}, -geometry.face(k)});
      piece = clip_polygon(piece, {{1.0, 0.0}, geometry.face(k + 1)});
      const double a = polygon_area(piece);
      parts[static_cast<std::size_t>(k - k0)] = a;
      covered += a;
    }
    if (!(covered > 0.0)) {
      if (poly.volume > 1e-12 * cell_volume) {
        throw NumericalFailure("project: polygon outside the condensate at " + where(poly.lagrangian_cell));
      }
      continue;
    }
    // Rescale so that every polygon hands out exactly its layer volume.
    const double scale = poly.volume / covered;
    const ConservedState& state = evolved.states[static_cast<std::size_t>(poly.layer)];
    for (int k = k0; k <= k1; ++k) {
      const double v = parts[static_cast<std::size_t>(k - k0)] * scale;
      if (v <= 0.0) continue;
      auto idx = static_cast<std::size_t>(k - range.first);
      vol[idx][poly.material] += v;
      mean[idx][poly.material].add(state, v);
    }
  }

  double total = 0.0;
  for (const auto& v : vol) total += v[0] + v[1];
  const double expected = n * cell_volume;
  if (std::abs(total - expected) > 1e-10 * expected) {
    std::ostringstream msg;
    msg << "project: projected volume " << total << " differs from range volume " << expected << " at "
        << where(range.first);
    throw NumericalFailure(msg.str());
  }

  for (int k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    CellContent& cell = line[range.first + k];
    const double v0 = vol[idx][0];
    const double v1 = vol[idx][1];
    const double alpha = v0 / (v0 + v1);
    if (alpha >= 1.0 - kPureSnap || alpha <= kPureSnap) {
      // The residual of the other material is merged into the dominant one.
      const int keep = alpha >= 1.0 - kPureSnap ? 0 : 1;
      RunningMean merged = mean[idx][keep];
      if (mean[idx][1 - keep].weight > 0.0) merged.add(mean[idx][1 - keep].mean, mean[idx][1 - keep].weight);
      cell.alpha = keep == 0 ? 1.0 : 0.0;
      cell.state[keep] = merged.mean;
    } else {
      cell.alpha = alpha;
      cell.state[0] = mean[idx][0].mean;
      cell.state[1] = mean[idx][1].mean;
    }
  }
}

void refresh_normals(const Grid& grid, std::span<CellContent> contents, const BoundarySet& bcs,
                     Axis fallback) {
  const bool wrap_x = bcs.x.lo == Boundary::Periodic;
  const bool wrap_y = bcs.y.lo == Boundary::Periodic;
  auto alpha_at = [&](int i, int j) {
    if (i < 0 || i >= grid.nx) i = wrap_x ? (i + grid.nx) % grid.nx : std::clamp(i, 0, grid.nx - 1);
    if (j < 0 || j >= grid.ny) j = wrap_y ? (j + grid.ny) % grid.ny : std::clamp(j, 0, grid.ny - 1);
    return contents[grid.index(i, j)].alpha;
  };
  std::vector<Vec2> fresh(contents.size());
  std::vector<char> changed(contents.size(), 0);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t idx = grid.index(i, j);
      if (!contents[idx].is_mixed()) continue;
      AlphaStencil st;
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) st[di + 1][dj + 1] = alpha_at(i + di, j + dj);
      }
      if (auto n = youngs_normal(st, grid.dx, grid.dy)) {
        fresh[idx] = *n;
        changed[idx] = 1;
      }
    }
  }
  for (std::size_t idx = 0; idx < contents.size(); ++idx) {
    CellContent& cell = contents[idx];
    if (!cell.is_mixed()) continue;
    if (changed[idx]) {
      cell.normal = fresh[idx];
      cell.has_normal = true;
    } else if (!cell.has_normal) {
      cell.normal = axis_vector(fallback);
      cell.has_normal = true;
    }
  }
}

}  // namespace enip

#include "enip/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace enip {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& value) {
  const char* first = value.data();
  const char* last = value.data() + value.size();
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || !std::isfinite(out)) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  }
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = lower(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected true|false, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) continue;
    out.push_back(parse_double(key, t));
  }
  return out;
}

Vec2 domain_size(CaseName name, int nx, int ny) {
  switch (name) {
    case CaseName::SquareAdvection:
      return {0.4, 0.6};
    case CaseName::Rotation:
      return {1.0, 1.0};
    case CaseName::FreeDrop:
      return {10.0, 15.0};
    case CaseName::Sod:
      return {1.0, static_cast<double>(ny) / nx};
  }
  return {1.0, 1.0};
}

double rotation_period(const Settings& s) { return 2.0 * std::numbers::pi / s.omega; }

// Marker states of the advection runs.
constexpr ConservedState kInside{1.0, 0.0, 0.0, 0.0};
constexpr ConservedState kOutside{0.0, 0.0, 0.0, 0.0};

std::vector<CellContent> two_material_cells(const Grid& grid, const std::vector<double>& frac,
                                            const std::function<ConservedState(int, Vec2)>& state) {
  std::vector<CellContent> cells(grid.size());
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t idx = grid.index(i, j);
      const Vec2 c = grid.center(i, j);
      CellContent& cell = cells[idx];
      cell.alpha = frac[idx];
      cell.state = {state(0, c), state(1, c)};
      if (cell.alpha >= 1.0) cell.state[1] = {};
      if (cell.alpha <= 0.0) cell.state[0] = {};
      cell.has_normal = false;
    }
  }
  return cells;
}

}  // namespace

std::string to_string(CaseName name) {
  switch (name) {
    case CaseName::SquareAdvection:
      return "square_advection";
    case CaseName::Rotation:
      return "rotation";
    case CaseName::FreeDrop:
      return "free_drop";
    case CaseName::Sod:
      return "sod";
  }
  return "unknown";
}

std::optional<CaseName> case_from_string(std::string_view text) {
  const std::string t = lower(trim(text));
  for (CaseName n : {CaseName::SquareAdvection, CaseName::Rotation, CaseName::FreeDrop, CaseName::Sod}) {
    if (t == to_string(n)) return n;
  }
  return std::nullopt;
}

Settings case_defaults(CaseName name) {
  Settings s;
  s.name = name;
  switch (name) {
    case CaseName::SquareAdvection:
      break;
    case CaseName::Rotation:
      s.nx = 100;
      s.ny = 100;
      s.square = {0.06, 0.3, 0.46, 0.7};
      s.t_end = 3.0 * rotation_period(s);
      s.snapshot_times = {0.625 * rotation_period(s), rotation_period(s)};
      break;
    case CaseName::FreeDrop:
      s.nx = 100;
      s.ny = 150;
      s.mode = Mode::Hydro;
      s.t_end = 0.7;
      s.snapshot_times = {0.6, 0.64};
      break;
    case CaseName::Sod:
      s.nx = 400;
      s.ny = 1;
      s.mode = Mode::Hydro;
      s.t_end = 0.2;
      break;
  }
  return s;
}

KeyValues parse_config_text(std::string_view text) {
  KeyValues out;
  std::stringstream ss{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected 'key = value'");
    }
    std::string key = lower(trim(std::string_view(t).substr(0, eq)));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void apply_settings(Settings& s, const KeyValues& values) {
  for (const auto& [raw_key, value] : values) {
    const std::string key = lower(raw_key);
    if (key == "case") continue;
    if (key == "nx") {
      s.nx = parse_int(key, value);
    } else if (key == "ny") {
      s.ny = parse_int(key, value);
    } else if (key == "cfl") {
      s.cfl = parse_double(key, value);
    } else if (key == "reconstruction") {
      const std::string v = lower(value);
      if (v == "nip") {
        s.reconstruction = Reconstruction::NIP;
      } else if (v == "enip") {
        s.reconstruction = Reconstruction::ENIP;
      } else {
        throw ConfigError("key 'reconstruction': expected nip|enip, got '" + value + "'");
      }
    } else if (key == "tend" || key == "t_end") {
      s.t_end = parse_double(key, value);
    } else if (key == "mode") {
      const std::string v = lower(value);
      if (v == "hydro") {
        s.mode = Mode::Hydro;
      } else if (v == "advection") {
        s.mode = Mode::Advection;
      } else {
        throw ConfigError("key 'mode': expected hydro|advection, got '" + value + "'");
      }
    } else if (key == "snapshot_every" || key == "snapshot-every") {
      s.snapshot_every = parse_double(key, value);
    } else if (key == "snapshot_times") {
      s.snapshot_times = parse_list(key, value);
    } else if (key == "omega") {
      s.omega = parse_double(key, value);
    } else if (key == "gravity") {
      s.gravity = parse_double(key, value);
    } else if (key == "liquid_rect") {
      const std::vector<double> r = parse_list(key, value);
      if (r.size() != 4 || !(r[2] > r[0]) || !(r[3] > r[1])) {
        throw ConfigError("key 'liquid_rect': expected x0,y0,x1,y1 with x1 > x0 and y1 > y0");
      }
      s.liquid = {r[0], r[1], r[2], r[3]};
    } else if (key == "liquid_density") {
      s.liquid_density = parse_double(key, value);
    } else if (key == "liquid_gamma") {
      s.liquid_gamma = parse_double(key, value);
    } else if (key == "liquid_pinf") {
      s.liquid_pinf = parse_double(key, value);
    } else if (key == "air_density") {
      s.air_density = parse_double(key, value);
    } else if (key == "air_gamma") {
      s.air_gamma = parse_double(key, value);
    } else if (key == "pressure") {
      s.pressure = parse_double(key, value);
    } else if (key == "hydrostatic") {
      s.hydrostatic = parse_bool(key, value);
    } else if (key == "gamma") {
      s.gamma = parse_double(key, value);
    } else {
      throw ConfigError("unknown key '" + raw_key + "'");
    }
  }
}

Settings resolve_settings(const KeyValues& file, const KeyValues& flags) {
  std::optional<std::string> name;
  bool ny_given = false;
  for (const KeyValues* kv : {&file, &flags}) {
    for (const auto& [k, v] : *kv) {
      const std::string key = lower(k);
      if (key == "case") name = v;
      if (key == "ny") ny_given = true;
    }
  }
  if (!name) throw ConfigError("no case given (expected square_advection|rotation|free_drop|sod)");
  const auto parsed = case_from_string(*name);
  if (!parsed) {
    throw ConfigError("key 'case': expected square_advection|rotation|free_drop|sod, got '" + *name + "'");
  }
  Settings s = case_defaults(*parsed);
  const int default_nx = s.nx;
  apply_settings(s, file);
  apply_settings(s, flags);
  if (!ny_given && s.nx != default_nx && s.name != CaseName::Sod) {
    const Vec2 size = domain_size(s.name, 1, 1);
    s.ny = static_cast<int>(std::lround(s.nx * size.y / size.x));
  }
  validate_settings(s);
  return s;
}

void validate_settings(const Settings& s) {
  if (s.nx < 1 || s.ny < 1) throw ConfigError("keys 'nx'/'ny': expected positive integers");
  if (!(s.cfl > 0.0 && s.cfl < 1.0)) throw ConfigError("key 'cfl': expected a number in (0, 1)");
  if (!(s.t_end > 0.0)) throw ConfigError("key 'tend': expected a positive number");
  if (s.snapshot_every < 0.0) throw ConfigError("key 'snapshot_every': expected a number >= 0");
  const bool advection_case = s.name == CaseName::SquareAdvection || s.name == CaseName::Rotation;
  if (s.name == CaseName::Sod && s.mode == Mode::Advection) {
    throw ConfigError("key 'mode': sod is a hydro-only case");
  }
  if (s.name == CaseName::FreeDrop && s.mode == Mode::Advection) {
    throw ConfigError("key 'mode': free_drop is a hydro-only case");
  }
  if (advection_case && s.mode == Mode::Hydro) {
    throw ConfigError("key 'mode': " + to_string(s.name) + " is an advection-only case");
  }
  if (s.name == CaseName::Rotation && !(s.omega != 0.0)) throw ConfigError("key 'omega': expected nonzero");
}

std::vector<double> rect_fractions(const Grid& grid, const Rect& rect) {
  std::vector<double> out(grid.size(), 0.0);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double x0 = grid.origin.x + i * grid.dx;
      const double y0 = grid.origin.y + j * grid.dy;
      const double wx = std::max(0.0, std::min(x0 + grid.dx, rect.x1) - std::max(x0, rect.x0));
      const double wy = std::max(0.0, std::min(y0 + grid.dy, rect.y1) - std::max(y0, rect.y0));
      double f = wx * wy / grid.cell_volume();
      if (f >= 1.0 - kPureSnap) f = 1.0;
      if (f <= kPureSnap) f = 0.0;
      out[grid.index(i, j)] = f;
    }
  }
  return out;
}

std::vector<double> sample_rect(const Grid& grid, const Rect& rect) {
  const double tx = 1e-9 * grid.dx;
  const double ty = 1e-9 * grid.dy;
  std::vector<double> out(grid.size(), 0.0);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 c = grid.center(i, j);
      const bool in = c.x >= rect.x0 - tx && c.x <= rect.x1 + tx && c.y >= rect.y0 - ty && c.y <= rect.y1 + ty;
      out[grid.index(i, j)] = in ? 1.0 : 0.0;
    }
  }
  return out;
}

std::vector<double> exact_density(const Settings& s, const Grid& grid, double t) {
  if (s.name == CaseName::SquareAdvection) {
    const double forward = std::min(t, s.reverse_time);
    const double back = std::max(0.0, t - s.reverse_time);
    const Vec2 shift = s.velocity * (forward - back);
    return sample_rect(grid, {s.square.x0 + shift.x, s.square.y0 + shift.y, s.square.x1 + shift.x,
                              s.square.y1 + shift.y});
  }
  if (s.name == CaseName::Rotation) {
    // Pull each center back along the rotation.
    const double a = -s.omega * t;
    const double ca = std::cos(a);
    const double sa = std::sin(a);
    std::vector<double> out(grid.size(), 0.0);
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        const Vec2 r = grid.center(i, j) - s.center;
        const Vec2 p = s.center + Vec2{ca * r.x - sa * r.y, sa * r.x + ca * r.y};
        const bool in = p.x >= s.square.x0 && p.x <= s.square.x1 && p.y >= s.square.y0 && p.y <= s.square.y1;
        out[grid.index(i, j)] = in ? 1.0 : 0.0;
      }
    }
    return out;
  }
  throw std::invalid_argument("exact_density: " + to_string(s.name) + " has no advected exact solution");
}

std::vector<double> density_field(std::span<const CellContent> cells) {
  std::vector<double> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(mixture_density(c));
  return out;
}

std::vector<double> alpha_field(std::span<const CellContent> cells) {
  std::vector<double> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back(c.alpha);
  return out;
}

CaseSetup make_case(const Settings& s) {
  validate_settings(s);
  CaseSetup out;
  SimulationConfig& cfg = out.config;
  const Vec2 size = domain_size(s.name, s.nx, s.ny);
  cfg.grid = Grid::make(s.nx, s.ny, size.x, size.y);
  cfg.initial_condition = to_string(s.name);
  cfg.cfl = s.cfl;
  cfg.t_end = s.t_end;
  cfg.mode = s.mode;
  cfg.reconstruction = s.reconstruction;
  cfg.snapshot_every = s.snapshot_every;
  cfg.snapshot_times = s.snapshot_times;
  const Grid& g = cfg.grid;

  switch (s.name) {
    case CaseName::SquareAdvection:
    case CaseName::Rotation: {
      cfg.materials = {MaterialModel::ideal_gas(1.4, 1), MaterialModel::ideal_gas(1.4, 2)};
      cfg.velocity = s.name == CaseName::SquareAdvection ? VelocityField::reversing(s.velocity, s.reverse_time)
                                                         : VelocityField::rotation(s.center, s.omega);
      out.initial.cells = two_material_cells(g, rect_fractions(g, s.square),
                                             [](int k, Vec2) { return k == 0 ? kInside : kOutside; });
      break;
    }
    case CaseName::FreeDrop: {
      const MaterialModel liquid = MaterialModel::stiffened_gas(s.liquid_gamma, s.liquid_pinf, 1);
      const MaterialModel air = MaterialModel::ideal_gas(s.air_gamma, 2);
      cfg.materials = {liquid, air};
      cfg.gravity = {0.0, s.gravity};
      cfg.boundaries = {{Boundary::Reflective, Boundary::Reflective}, {Boundary::Reflective, Boundary::Reflective}};
      const double top = size.y;
      auto state = [&](int k, Vec2 c) {
        const double p = s.hydrostatic ? s.pressure - s.air_density * s.gravity * (top - c.y) : s.pressure;
        return k == 0 ? conserved_from_primitive(liquid, s.liquid_density, 0.0, 0.0, p)
                      : conserved_from_primitive(air, s.air_density, 0.0, 0.0, p);
      };
      out.initial.cells = two_material_cells(g, rect_fractions(g, s.liquid), state);
      break;
    }
    case CaseName::Sod: {
      const MaterialModel gas = MaterialModel::ideal_gas(s.gamma, 1);
      cfg.materials = {gas};
      out.initial.cells.resize(g.size());
      for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
          const Primitive& w = g.center(i, j).x < s.sod_interface ? s.sod_left : s.sod_right;
          out.initial.cells[g.index(i, j)] = CellContent::pure(0, conserved_from_primitive(gas, w.rho, w.u, w.v, w.p));
        }
      }
      break;
    }
  }
  out.initial.grid = g;
  out.initial.materials = cfg.materials;
  out.initial.time = 0.0;
  refresh_normals(g, out.initial.cells, cfg.boundaries, Axis::X);
  cfg.validate();
  return out;
}

ExactRiemann::ExactRiemann(const Primitive& left, const Primitive& right, double gamma, double tolerance)
    : left_(left), right_(right), gamma_(gamma) {
  if (!(gamma > 1.0)) throw std::invalid_argument("ExactRiemann: gamma must exceed 1");
  if (!(left.rho > 0.0 && right.rho > 0.0 && left.p > 0.0 && right.p > 0.0)) {
    throw std::invalid_argument("ExactRiemann: states must have positive density and pressure");
  }
  c_left_ = std::sqrt(gamma * left.p / left.rho);
  c_right_ = std::sqrt(gamma * right.p / right.rho);
  const double du = right.u - left.u;
  if (2.0 * (c_left_ + c_right_) / (gamma - 1.0) <= du) {
    throw std::domain_error("ExactRiemann: the initial data generate a vacuum");
  }
  // Two-rarefaction guess, then Newton on the pressure function.
  const double z = (gamma - 1.0) / (2.0 * gamma);
  double p = std::pow((c_left_ + c_right_ - 0.5 * (gamma - 1.0) * du) /
                          (c_left_ / std::pow(left.p, z) + c_right_ / std::pow(right.p, z)),
                      1.0 / z);
  p = std::max(p, 1e-14);
  for (iterations_ = 1; iterations_ <= 100; ++iterations_) {
    const double f = pressure_function(p);
    const double df = side_derivative(p, left_, c_left_) + side_derivative(p, right_, c_right_);
    double next = p - f / df;
    if (next <= 0.0) next = 0.5 * p;
    const double change = 2.0 * std::abs(next - p) / (next + p);
    p = next;
    if (change < tolerance) break;
  }
  p_star_ = p;
  u_star_ = 0.5 * (left.u + right.u) +
            0.5 * (side_function(p, right_, c_right_) - side_function(p, left_, c_left_));
}

double ExactRiemann::side_function(double p, const Primitive& s, double c) const {
  const double g = gamma_;
  if (p > s.p) {
    const double a = 2.0 / ((g + 1.0) * s.rho);
    const double b = (g - 1.0) / (g + 1.0) * s.p;
    return (p - s.p) * std::sqrt(a / (p + b));
  }
  return 2.0 * c / (g - 1.0) * (std::pow(p / s.p, (g - 1.0) / (2.0 * g)) - 1.0);
}

double ExactRiemann::side_derivative(double p, const Primitive& s, double c) const {
  const double g = gamma_;
  if (p > s.p) {
    const double a = 2.0 / ((g + 1.0) * s.rho);
    const double b = (g - 1.0) / (g + 1.0) * s.p;
    return std::sqrt(a / (p + b)) * (1.0 - 0.5 * (p - s.p) / (p + b));
  }
  return std::pow(p / s.p, -(g + 1.0) / (2.0 * g)) / (s.rho * c);
}

double ExactRiemann::pressure_function(double p) const {
  return side_function(p, left_, c_left_) + side_function(p, right_, c_right_) + right_.u - left_.u;
}

Primitive ExactRiemann::sample(double xi) const {
  const double g = gamma_;
  const double gm = (g - 1.0) / (g + 1.0);
  const bool left_side = xi <= u_star_;
  const Primitive& s = left_side ? left_ : right_;
  const double c = left_side ? c_left_ : c_right_;
  const double sign = left_side ? 1.0 : -1.0;  // mirror the right wave onto the left formulas
  const double u = sign * s.u;
  const double x = sign * xi;
  const double us = sign * u_star_;
  Primitive out{s.rho, s.u, s.v, s.p, 0.0};

  if (p_star_ > s.p) {
    const double shock = u - c * std::sqrt((g + 1.0) / (2.0 * g) * p_star_ / s.p + (g - 1.0) / (2.0 * g));
    if (x >= shock) {
      out.rho = s.rho * (p_star_ / s.p + gm) / (gm * p_star_ / s.p + 1.0);
      out.u = u_star_;
      out.p = p_star_;
    }
  } else {
    const double c_star = c * std::pow(p_star_ / s.p, (g - 1.0) / (2.0 * g));
    const double head = u - c;
    const double tail = us - c_star;
    if (x >= tail) {
      out.rho = s.rho * std::pow(p_star_ / s.p, 1.0 / g);
      out.u = u_star_;
      out.p = p_star_;
    } else if (x > head) {
      const double k = 2.0 / (g + 1.0) + gm / c * (u - x);
      out.rho = s.rho * std::pow(k, 2.0 / (g - 1.0));
      out.u = sign * 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * u + x);
      out.p = s.p * std::pow(k, 2.0 * g / (g - 1.0));
    }
  }
  out.e = out.p / ((g - 1.0) * out.rho);
  return out;
}

std::optional<double> loglog_slope(std::span<const double> dx, std::span<const double> err) {
  if (dx.size() != err.size()) throw std::invalid_argument("loglog_slope: size mismatch");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t k = 0; k < dx.size(); ++k) {
    if (!(dx[k] > 0.0) || !(err[k] > 0.0)) return std::nullopt;
    lx.push_back(std::log(dx[k]));
    ly.push_back(std::log(err[k]));
  }
  if (lx.size() < 2) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k] / n;
    my += ly[k] / n;
  }
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx <= 1e-300) return std::nullopt;
  return sxy / sxx;
}

std::vector<int> advection_mesh_ladder() { return {20, 30, 40, 80, 120}; }

ConvergenceTable convergence_study(const Settings& base, std::span<const int> nx_list, Reconstruction method) {
  ConvergenceTable table;
  for (int nx : nx_list) {
    Settings s = base;
    s.reconstruction = method;
    const Vec2 size = domain_size(s.name, 1, 1);
    s.nx = nx;
    s.ny = static_cast<int>(std::lround(nx * size.y / size.x));
    s.snapshot_every = 0.0;
    s.snapshot_times.clear();
    CaseSetup setup = make_case(s);
    const RunResult result = run(setup.config, std::move(setup.initial));
    if (result.failure) {
      table.failure = "nx=" + std::to_string(nx) + ": " + *result.failure;
      break;
    }
    const Grid& g = result.final_world.grid;
    const std::vector<double> rho = density_field(result.final_world.cells);
    const std::vector<double> exact = exact_density(s, g, result.final_world.time);
    table.rows.push_back({g.dx, error_norm(rho, exact, 1), error_norm(rho, exact, 2)});
  }
  std::vector<double> dx;
  std::vector<double> l1;
  std::vector<double> l2;
  for (const auto& r : table.rows) {
    dx.push_back(r.dx);
    l1.push_back(r.l1);
    l2.push_back(r.l2);
  }
  table.slope_l1 = loglog_slope(dx, l1);
  table.slope_l2 = loglog_slope(dx, l2);
  return table;
}

int count_components(const Grid& grid, std::span<const CellContent> cells, int material, double threshold) {
  std::vector<int> label(grid.size(), -1);
  int count = 0;
  std::vector<std::pair<int, int>> stack;
  auto inside = [&](int i, int j) { return cells[grid.index(i, j)].fraction(material) > threshold; };
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      if (label[grid.index(i, j)] >= 0 || !inside(i, j)) continue;
      stack.push_back({i, j});
      label[grid.index(i, j)] = count;
      while (!stack.empty()) {
        const auto [a, b] = stack.back();
        stack.pop_back();
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const int u = a + di[d];
          const int v = b + dj[d];
          if (u < 0 || v < 0 || u >= grid.nx || v >= grid.ny) continue;
          const std::size_t idx = grid.index(u, v);
          if (label[idx] >= 0 || !inside(u, v)) continue;
          label[idx] = count;
          stack.push_back({u, v});
        }
      }
      ++count;
    }
  }
  return count;
}

std::vector<SnapshotRow> snapshot_rows(const Grid& grid, std::span<const CellContent> cells,
                                       std::span<const MaterialModel> materials, Mode mode,
                                       const VelocityField* field, double time) {
  std::vector<SnapshotRow> rows;
  rows.reserve(grid.size());
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const CellContent& cell = cells[grid.index(i, j)];
      SnapshotRow r;
      const Vec2 c = grid.center(i, j);
      r.x = c.x;
      r.y = c.y;
      r.alpha_1 = cell.alpha;
      r.material = cell.is_mixed() ? 0 : cell.material() + 1;
      for (int k = 0; k < 2; ++k) {
        const double f = cell.fraction(k);
        if (f <= 0.0) continue;
        r.rho += f * cell.state[k].rho;
        if (mode == Mode::Hydro) {
          const Primitive w = primitive_from_conserved(cell.state[k], materials[std::min<std::size_t>(k, materials.size() - 1)]);
          r.u += f * w.u;
          r.v += f * w.v;
          r.p += f * w.p;
        }
      }
      if (mode == Mode::Advection && field != nullptr) {
        const Vec2 u = field->at(c, time);
        r.u = u.x;
        r.v = u.y;
      }
      rows.push_back(r);
    }
  }
  return rows;
}

void write_snapshot(const std::vector<SnapshotRow>& rows, const Grid& grid, const std::filesystem::path& path,
                    SnapshotFormat format) {
  if (rows.size() != grid.size()) throw std::invalid_argument("write_snapshot: row count does not match the grid");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  char buf[512];
  if (format == SnapshotFormat::CSV) {
    out << "x,y,rho,u,v,p,alpha_1,material\n";
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.x, r.y, r.rho, r.u, r.v,
                    r.p, r.alpha_1, r.material);
      out << buf;
    }
  } else {
    out << "# vtk DataFile Version 3.0\nenip snapshot\nASCII\nDATASET RECTILINEAR_GRID\n";
    out << "DIMENSIONS " << grid.nx + 1 << ' ' << grid.ny + 1 << " 1\n";
    auto coords = [&](const char* name, int n, double o, double d) {
      out << name << ' ' << n + 1 << " double\n";
      for (int k = 0; k <= n; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g\n", o + k * d);
        out << buf;
      }
    };
    coords("X_COORDINATES", grid.nx, grid.origin.x, grid.dx);
    coords("Y_COORDINATES", grid.ny, grid.origin.y, grid.dy);
    out << "Z_COORDINATES 1 double\n0\n";
    out << "CELL_DATA " << rows.size() << '\n';
    auto scalar = [&](const char* name, auto get) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g\n", static_cast<double>(get(r)));
        out << buf;
      }
    };
    scalar("rho", [](const SnapshotRow& r) { return r.rho; });
    scalar("u", [](const SnapshotRow& r) { return r.u; });
    scalar("v", [](const SnapshotRow& r) { return r.v; });
    scalar("p", [](const SnapshotRow& r) { return r.p; });
    scalar("alpha_1", [](const SnapshotRow& r) { return r.alpha_1; });
    scalar("material", [](const SnapshotRow& r) { return r.material; });
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<SnapshotRow> read_snapshot_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "x,y,rho,u,v,p,alpha_1,material") {
    throw std::runtime_error(path.string() + ": unexpected header");
  }
  std::vector<SnapshotRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    SnapshotRow r;
    std::stringstream ss(line);
    std::string f[8];
    for (auto& s : f) {
      if (!std::getline(ss, s, ',')) throw std::runtime_error(path.string() + ": short row");
    }
    r.x = std::stod(f[0]);
    r.y = std::stod(f[1]);
    r.rho = std::stod(f[2]);
    r.u = std::stod(f[3]);
    r.v = std::stod(f[4]);
    r.p = std::stod(f[5]);
    r.alpha_1 = std::stod(f[6]);
    r.material = std::stoi(f[7]);
    rows.push_back(r);
  }
  return rows;
}

void write_ledger(std::span<const LedgerEntry> ledger, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "t,mass_1,mass_2,momx,momy,energy\n";
  char buf[256];
  for (const auto& e : ledger) {
    const auto& t = e.totals;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.time, t.per_material[0].rho,
                  t.per_material[1].rho, t.global.mom_x, t.global.mom_y, t.global.rhoE);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_convergence(const ConvergenceTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "dx,l1,l2\n";
  char buf[128];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.dx, r.l1, r.l2);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace enip

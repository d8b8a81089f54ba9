#ifndef ENIP_HARNESS_HPP
#define ENIP_HARNESS_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "enip/driver.hpp"
#include "enip/geom.hpp"

namespace enip {

/// Invalid configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CaseName { SquareAdvection, Rotation, FreeDrop, Sod };

std::string to_string(CaseName name);
std::optional<CaseName> case_from_string(std::string_view text);

/// Every tunable of a built-in case. case_defaults() gives the frozen values.
struct Settings {
  CaseName name = CaseName::SquareAdvection;
  int nx = 40;
  int ny = 60;
  double cfl = 0.45;
  Reconstruction reconstruction = Reconstruction::ENIP;
  double t_end = 0.2;
  Mode mode = Mode::Advection;
  double snapshot_every = 0.0;
  std::vector<double> snapshot_times;

  // square_advection
  Rect square{0.1, 0.1, 0.2, 0.2};
  Vec2 velocity{1.0, 3.0};
  double reverse_time = 0.1;

  // rotation
  double omega = 100.0;
  Vec2 center{0.5, 0.5};

  // free_drop
  Rect liquid{0.0, 2.0, 5.0, 10.0};
  double gravity = -9.81;
  double liquid_density = 1000.0;
  double liquid_gamma = 4.4;
  double liquid_pinf = 6e8;
  double air_density = 1.2;
  double air_gamma = 1.4;
  double pressure = 1e5;
  bool hydrostatic = true;

  // sod
  double gamma = 1.4;
  Primitive sod_left{1.0, 0.0, 0.0, 1.0, 0.0};
  Primitive sod_right{0.125, 0.0, 0.0, 0.1, 0.0};
  double sod_interface = 0.5;
};

Settings case_defaults(CaseName name);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Flat `key = value` lines, `#` comments, keys lower-cased.
KeyValues parse_config_text(std::string_view text);
KeyValues read_config_file(const std::filesystem::path& path);

/// Applies overrides in order. Unknown keys and malformed values throw
/// ConfigError naming the key and the expected format. `case` is ignored.
void apply_settings(Settings& settings, const KeyValues& values);

/// Case defaults, then `file`, then `flags`; the case name comes from the
/// flags, else the file.
Settings resolve_settings(const KeyValues& file, const KeyValues& flags);

void validate_settings(const Settings& settings);

struct CaseSetup {
  SimulationConfig config;
  World initial;
};

CaseSetup make_case(const Settings& settings);

/// Exact volume fractions of a rectangle in every cell.
std::vector<double> rect_fractions(const Grid& grid, const Rect& rect);

/// Indicator of a rectangle sampled at cell centers. Centers on an edge
/// (within 1e-9 of the cell size) count as inside.
std::vector<double> sample_rect(const Grid& grid, const Rect& rect);

/// Exact advected density for the advection cases at time t.
std::vector<double> exact_density(const Settings& settings, const Grid& grid, double t);

std::vector<double> density_field(std::span<const CellContent> cells);
std::vector<double> alpha_field(std::span<const CellContent> cells);

/// Exact solution of the Riemann problem for one ideal gas.
class ExactRiemann {
 public:
  /// Throws std::domain_error when the data generate a vacuum.
  ExactRiemann(const Primitive& left, const Primitive& right, double gamma, double tolerance = 1e-14);

  double p_star() const { return p_star_; }
  double u_star() const { return u_star_; }
  int iterations() const { return iterations_; }

  /// Solution on the ray x/t = xi.
  Primitive sample(double xi) const;

  /// f_L(p) + f_R(p) + u_R - u_L; its root is p_star.
  double pressure_function(double p) const;

 private:
  double side_function(double p, const Primitive& s, double c) const;
  double side_derivative(double p, const Primitive& s, double c) const;

  Primitive left_;
  Primitive right_;
  double gamma_;
  double c_left_;
  double c_right_;
  double p_star_ = 0.0;
  double u_star_ = 0.0;
  int iterations_ = 0;
};

struct ConvergenceRow {
  double dx = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::optional<double> slope_l1;
  std::optional<double> slope_l2;
  std::optional<std::string> failure;
};

/// Least-squares slope of log(err) against log(dx). Empty when fewer than
/// two usable points, a zero error, or identical spacings make it degenerate.
std::optional<double> loglog_slope(std::span<const double> dx, std::span<const double> err);

/// Mesh sizes nx of the advection error ladder (dx = 0.4 / nx).
std::vector<int> advection_mesh_ladder();

/// Runs the case on each nx (ny scaled with the domain aspect ratio) and
/// measures the advected-density errors at t_end. Stops at the first failure.
ConvergenceTable convergence_study(const Settings& base, std::span<const int> nx_list,
                                   Reconstruction method);

/// Number of 4-connected groups of cells whose fraction of `material`
/// exceeds `threshold`.
int count_components(const Grid& grid, std::span<const CellContent> cells, int material,
                     double threshold = 0.5);

enum class SnapshotFormat { CSV, Grid };

struct SnapshotRow {
  double x = 0.0;
  double y = 0.0;
  double rho = 0.0;
  double u = 0.0;
  double v = 0.0;
  double p = 0.0;
  double alpha_1 = 0.0;
  int material = 0;
};

/// Cell-center rows with volume-averaged primitives. `field` supplies u, v in
/// advection mode (pressure is then 0).
std::vector<SnapshotRow> snapshot_rows(const Grid& grid, std::span<const CellContent> cells,
                                       std::span<const MaterialModel> materials, Mode mode,
                                       const VelocityField* field, double time);

/// CSV with header `x,y,rho,u,v,p,alpha_1,material`, or a legacy VTK
/// rectilinear grid with the same cell fields. Throws std::runtime_error on
/// I/O failure.
void write_snapshot(const std::vector<SnapshotRow>& rows, const Grid& grid,
                    const std::filesystem::path& path, SnapshotFormat format);

std::vector<SnapshotRow> read_snapshot_csv(const std::filesystem::path& path);

/// `t,mass_1,mass_2,momx,momy,energy`.
void write_ledger(std::span<const LedgerEntry> ledger, const std::filesystem::path& path);

/// `dx,l1,l2`.
void write_convergence(const ConvergenceTable& table, const std::filesystem::path& path);

}  // namespace enip

#endif  // ENIP_HARNESS_HPP

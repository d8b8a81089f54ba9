#ifndef ENIP_CORE_HPP
#define ENIP_CORE_HPP

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace enip {

/// Raised when a state leaves the admissible set of its equation of state.
class InadmissibleState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a time step cannot be completed (layer collapse, lost
/// conservation, ...). The message carries the offending location.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Conservative variables (rho, rho u, rho v, rho E) per unit volume.
struct ConservedState {
  double rho = 0.0;
  double mom_x = 0.0;
  double mom_y = 0.0;
  double rhoE = 0.0;

  ConservedState& operator+=(const ConservedState& o) {
    rho += o.rho;
    mom_x += o.mom_x;
    mom_y += o.mom_y;
    rhoE += o.rhoE;
    return *this;
  }
  ConservedState& operator-=(const ConservedState& o) {
    rho -= o.rho;
    mom_x -= o.mom_x;
    mom_y -= o.mom_y;
    rhoE -= o.rhoE;
    return *this;
  }
  ConservedState& operator*=(double s) {
    rho *= s;
    mom_x *= s;
    mom_y *= s;
    rhoE *= s;
    return *this;
  }
  friend ConservedState operator+(ConservedState a, const ConservedState& b) { return a += b; }
  friend ConservedState operator-(ConservedState a, const ConservedState& b) { return a -= b; }
  friend ConservedState operator*(ConservedState a, double s) { return a *= s; }
  friend ConservedState operator*(double s, ConservedState a) { return a *= s; }
  bool operator==(const ConservedState&) const = default;
};

struct Primitive {
  double rho = 0.0;
  double u = 0.0;
  double v = 0.0;
  double p = 0.0;
  double e = 0.0;
};

enum class EosKind { IdealGas, StiffenedGas };

/// Equation of state closure of one material.
///
/// Ideal gas:     p = (gamma - 1) rho e
/// Stiffened gas: p = (gamma - 1) rho e - gamma p_inf
///
/// Both share c^2 = gamma (p + p_inf) / rho, with p_inf = 0 for the ideal gas.
class MaterialModel {
 public:
  static MaterialModel ideal_gas(double gamma, int label = 1);
  static MaterialModel stiffened_gas(double gamma, double p_inf, int label = 1);

  EosKind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  double p_inf() const { return p_inf_; }
  int label() const { return label_; }

  double pressure(double rho, double e) const;
  double internal_energy(double rho, double p) const;
  double sound_speed(double rho, double p) const;

  std::string describe() const;

 private:
  MaterialModel(EosKind kind, double gamma, double p_inf, int label);

  EosKind kind_;
  double gamma_;
  double p_inf_;
  int label_;
};

double pressure(const MaterialModel& model, double rho, double e);
double sound_speed(const MaterialModel& model, double rho, double p);
Primitive primitive_from_conserved(const ConservedState& state, const MaterialModel& model);
ConservedState conserved_from_primitive(const MaterialModel& model, double rho, double u, double v,
                                        double p);

/// Uniform Cartesian grid. Cell (i, j) covers
/// [origin.x + i dx, origin.x + (i+1) dx] x [origin.y + j dy, origin.y + (j+1) dy].
struct Grid {
  int nx = 1;
  int ny = 1;
  double dx = 1.0;
  double dy = 1.0;
  Vec2 origin{};

  static Grid make(int nx, int ny, double width, double height, Vec2 origin = {});

  void validate() const;
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  double cell_volume() const { return dx * dy; }
  Vec2 center(int i, int j) const {
    return {origin.x + (i + 0.5) * dx, origin.y + (j + 0.5) * dy};
  }
};

/// Content of one Eulerian cell: one or two materials.
///
/// `alpha` is the volume fraction of material index 0; a cell is pure when it
/// is exactly 0 or 1. `state[k]` is only meaningful when material k is present.
/// `normal` points out of material 0 and is carried by mixed cells.
struct CellContent {
  double alpha = 1.0;
  std::array<ConservedState, 2> state{};
  Vec2 normal{1.0, 0.0};
  bool has_normal = false;
  /// Material the last representation along x ([0]) or y ([1]) placed on
  /// the low side of the cell; -1 before any.
  std::array<int, 2> low_side{-1, -1};

  static CellContent pure(int material, const ConservedState& s);
  static CellContent mixed(double alpha, const ConservedState& s0, const ConservedState& s1,
                           Vec2 normal);

  bool is_mixed() const { return alpha > 0.0 && alpha < 1.0; }
  /// Material of a pure cell.
  int material() const { return alpha >= 1.0 ? 0 : 1; }
  double fraction(int k) const { return k == 0 ? alpha : 1.0 - alpha; }
  bool contains(int k) const { return fraction(k) > 0.0; }
  /// Integral of the conserved variables over a cell of the given volume.
  ConservedState integral(double cell_volume) const;
};

/// Checks the CellContent invariants; throws std::invalid_argument.
void validate(const CellContent& cell);

struct MaterialTotals {
  std::array<ConservedState, 2> per_material{};
  ConservedState global{};
};

MaterialTotals total_conserved(const Grid& grid, std::span<const CellContent> contents);

}  // namespace enip

#endif  // ENIP_CORE_HPP

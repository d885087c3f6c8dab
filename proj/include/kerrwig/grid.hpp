#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace kerrwig {

/// Uniform (x, p) lattice. Node (i, j) sits at (x_min + i·hx, p_min + j·hp).
struct PhaseGrid {
  double x_min = -6.0;
  double x_max = 6.0;
  double p_min = -6.0;
  double p_max = 6.0;
  int nx = 257;
  int np = 257;

  /// Square box [-half_width, half_width]² with n points per axis.
  static PhaseGrid symmetric(double half_width, int n);

  /// Throws std::invalid_argument unless nx, np >= 33, both odd, and the box is non-empty.
  void validate() const;

  double hx() const { return (x_max - x_min) / (nx - 1); }
  double hp() const { return (p_max - p_min) / (np - 1); }
  double x(int i) const { return x_min + i * hx(); }
  double p(int j) const { return p_min + j * hp(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(np); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * np + j; }
  bool contains(double x, double p) const { return x >= x_min && x <= x_max && p >= p_min && p <= p_max; }

  bool operator==(const PhaseGrid&) const = default;
};

/// Real field sampled on a PhaseGrid, stored x-major: values[i·np + j].
struct ScalarField {
  PhaseGrid grid;
  std::vector<double> values;
  std::string label;
  /// Non-fatal validity findings (e.g. probability mass at the box edge).
  std::vector<std::string> warnings;

  ScalarField() = default;
  ScalarField(PhaseGrid g, std::string lbl);
  ScalarField(PhaseGrid g, std::vector<double> v, std::string lbl);

  double& at(int i, int j) { return values[grid.index(i, j)]; }
  double at(int i, int j) const { return values[grid.index(i, j)]; }

  double max() const;
  double min() const;
  double max_abs() const;
  /// Max |value| over the outermost ring of nodes.
  double edge_max_abs() const;
  /// Trapezoidal ∬ f dx dp, summed in fixed row order.
  double integral() const;
};

/// Two-component field (Jx, Jp) on a shared grid.
struct VectorField {
  PhaseGrid grid;
  std::vector<double> jx;
  std::vector<double> jp;
  std::string label;

  VectorField() = default;
  VectorField(PhaseGrid g, std::string lbl);

  ScalarField x_component() const;
  ScalarField p_component() const;
  /// max over nodes of sqrt(Jx² + Jp²)
  double max_norm() const;
};

void require_same_grid(const PhaseGrid& a, const PhaseGrid& b, const char* where);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);
double max_abs_difference(const ScalarField& a, const ScalarField& b);

/// Finite-difference weights for derivative `order` at offset 0 from `nodes`
/// (in units of the grid spacing), by Fornberg's recursion.
std::vector<double> fd_weights(int order, const std::vector<double>& nodes);

inline constexpr int kDefaultFdAccuracy = 8;

/// ∂x^dx_order ∂p^dp_order of the field. Central stencils of the given
/// accuracy in the interior, one-sided stencils of the same accuracy near the
/// edges. dx_order + dp_order must not exceed 3.
ScalarField differentiate(const ScalarField& field, int dx_order, int dp_order,
                          int accuracy = kDefaultFdAccuracy);

/// Bicubic Hermite interpolant. Node derivatives come from `differentiate`, so
/// the interpolant is exact at nodes and reproduces bilinear functions.
class Interpolator {
 public:
  explicit Interpolator(const ScalarField& field);
  /// Throws std::out_of_range outside the grid box.
  double operator()(double x, double p) const;
  const PhaseGrid& grid() const { return grid_; }

 private:
  PhaseGrid grid_;
  std::vector<double> f_, fx_, fp_, fxp_;
};

double interpolate(const ScalarField& field, double x, double p);

}  // namespace kerrwig

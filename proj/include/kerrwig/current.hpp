#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kerrwig/grid.hpp"
#include "kerrwig/kerr.hpp"

namespace kerrwig {

/// W together with the grid derivatives the current formulas need.
struct FieldDerivatives {
  ScalarField w, wx, wp, wxx, wpp, wxp;
};
FieldDerivatives derivatives_of(const ScalarField& w, int accuracy = kDefaultFdAccuracy);

/// J = j_classical + J_quantum on one grid.
struct CurrentBundle {
  VectorField total;
  VectorField classical;
  VectorField quantum;
  double sigma = 0.0;
  KerrParams params;
};

/// Wigner current for general (M, k, Λ², λ²) with the σ-interpolated
/// divergence-free addition. Terms without ħ go to `classical`, the ħ² terms
/// (including the σ terms) to `quantum`. σ must lie in [0, 1].
CurrentBundle current_general(const FieldDerivatives& d, const KerrParams& params, double sigma = 0.0);
CurrentBundle current_general(const ScalarField& w, const KerrParams& params, double sigma = 0.0);

/// Circularly symmetric form J = (p, -x)[(1 + Λ²r²)W - Λ²(ħ²/4)ΔW] for M = k = 1, λ = Λ.
CurrentBundle current_polar(const FieldDerivatives& d, const KerrParams& params);
CurrentBundle current_polar(const ScalarField& w, const KerrParams& params);

ScalarField divergence(const VectorField& j, int accuracy = kDefaultFdAccuracy);

struct ContinuityReport {
  ScalarField residual;        // ∂tW + ∇·J
  double max_residual = 0.0;
  double max_divergence = 0.0;  // max |∇·J|
  double dt = 0.0;
};

inline constexpr double kDefaultTimeStep = 1e-4;

/// Checks ∂tW + ∇·J = 0 with ∂tW from a central difference of exact evolution.
ContinuityReport continuity_residual(const StateVector& state, double t, const PhaseGrid& grid,
                                     const KerrParams& params, double dt = kDefaultTimeStep);

struct VelocityField {
  VectorField w;
  /// 1 where |W| > threshold, else 0 (w is zero there).
  std::vector<std::uint8_t> mask;
  /// Lower-left node (i, j) of every grid cell whose corner values of W change sign.
  std::vector<std::pair<int, int>> singular_set;
  double threshold = 0.0;
  /// Quotient-rule ∇·w = ∇·J/W - J·∇W/W² on masked nodes.
  ScalarField divergence;
  /// max |∇·w| over masked nodes within two cells of the singular set.
  double max_divergence_near_singular = 0.0;
};

/// Relative default threshold: |W| > 1e-6 · max W.
inline constexpr double kDefaultVelocityThreshold = 1e-6;

VelocityField velocity_field(const CurrentBundle& bundle, const ScalarField& w, double threshold);
VelocityField velocity_field(const CurrentBundle& bundle, const ScalarField& w);

/// Lagrange split of the continuity equation on the masked region (zero elsewhere).
struct LagrangeTerms {
  ScalarField convective;               // w·∇W
  ScalarField expansion;                // W∇·w
  ScalarField total_derivative;         // -W∇·w
  ScalarField total_derivative_closed;  // -(Λ²ħ²/4) W ∂θ(ΔW/W)
  ScalarField discrepancy;              // total_derivative - total_derivative_closed
  ScalarField convective_closed;        // (Λ²[-r² + ħ²ΔW/(4W)] - 1) ∂θW
  std::vector<std::uint8_t> mask;
};

/// Requires M = k = 1 and λ = Λ for the closed forms. ∂θ is x∂p - p∂x.
LagrangeTerms lagrange_terms(const ScalarField& w, const VelocityField& vel, const KerrParams& params);

struct StagnationPoint {
  double x = 0.0;
  double p = 0.0;
  int cells = 0;
};

struct StagnationReport {
  /// Compact clusters (isolated zeros of J).
  std::vector<StagnationPoint> points;
  /// Extended clusters: lines of stagnation or regions of negligible current.
  std::vector<StagnationPoint> extended;
  /// True when J vanishes identically and every node is flagged.
  bool degenerate = false;
};

/// Flags nodes with |J| < tol·max|J| and cells in which both components change
/// sign, then clusters them (8-connectivity). Clusters spanning at most
/// `max_point_extent` cells per axis are reported as points.
StagnationReport stagnation_points(const VectorField& j, double tol, int max_point_extent = 4);

}  // namespace kerrwig

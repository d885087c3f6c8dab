#pragma once

#include <array>
#include <variant>

#include "kerrwig/grid.hpp"
#include "kerrwig/kerr.hpp"

namespace kerrwig {

/// v = (p, -x)(1 + Λ²r²), the classical Kerr flow for M = k = 1.
std::array<double, 2> classical_velocity(double x, double p, const KerrParams& params);

/// Normalized Gaussian density with center (x0, p0) and covariance
/// [[var_x, cov_xp], [cov_xp, var_p]].
struct GaussianDensity {
  double x0 = 0.0;
  double p0 = 0.0;
  double var_x = 0.5;
  double var_p = 0.5;
  double cov_xp = 0.0;

  void validate() const;
  bool isotropic() const { return var_x == var_p && cov_xp == 0.0; }
  double operator()(double x, double p) const;
};

/// Gaussian with the t = 0 Wigner function of |α⟩: center √(2ħ)(Re α, Im α), variance ħ/2.
GaussianDensity classical_twin(complex alpha, double hbar = 1.0);

/// Initial density for Liouville transport: closed form or sampled snapshot.
/// Snapshots are read through the bicubic interpolant and vanish outside their box.
struct ClassicalDensity {
  std::variant<GaussianDensity, ScalarField> source;
};

/// Exact transport along characteristics: ρ(r, θ, t) = ρ0(r, θ + (1 + Λ²r²)t).
/// Requires M = k = 1 and λ = Λ.
ScalarField liouville_pullback(const ClassicalDensity& rho0, double t, const PhaseGrid& grid,
                               const KerrParams& params);

/// s(r) = ∂r(-∇×v) = 8Λ²r (positive for clockwise shear).
double classical_shear(double r, const KerrParams& params);

/// ∬ ρ ∂r(-∇×j) dx dp with j = ρv, from grid derivatives of the sampled ρ.
/// ∂r = (x∂x + p∂p)/r, taken as zero at the origin node.
double classical_shear_measure(const ScalarField& rho, const KerrParams& params);

/// The same average for a transported isotropic Gaussian, evaluated in
/// co-rotating polar coordinates with exact derivatives. Stays accurate when
/// the spiral is far finer than any practical grid.
double classical_shear_measure(const GaussianDensity& rho0, double t, const KerrParams& params);

}  // namespace kerrwig

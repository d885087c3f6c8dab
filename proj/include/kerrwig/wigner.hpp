#pragma once

#include <complex>

#include "kerrwig/grid.hpp"
#include "kerrwig/kerr.hpp"

namespace kerrwig {

/// Cross-Wigner function of |m⟩⟨n|, so that W_ρ = Σ ρ_{mn} W_{mn}.
///
/// Uses the generalized-Laguerre closed form in a normalized three-term
/// recurrence that never forms factorials, so m, n up to the hard cutoff cap
/// stay finite. W_{nm} = conj(W_{mn}). Throws NumericalError on a non-finite result.
complex fock_wigner_kernel(int m, int n, double x, double p, double hbar = 1.0);

/// Brute-force quadrature of the defining Fourier integral over the shift y,
/// with Hermite-function wavefunctions. Independent of the Laguerre route and
/// used to check it. Gauss-Legendre on [-Y, Y], Y = 8√((N+1)ħ), starting at
/// 2048 nodes and doubling until successive values agree to 1e-11.
double wigner_quadrature(const DensityMatrix& rho, double x, double p, double hbar = 1.0);

/// Same integral for a single |m⟩⟨n| term (complex valued).
complex wigner_quadrature_element(int m, int n, double x, double p, double hbar = 1.0);

/// Wigner distribution on a grid by kernel summation. A warning is attached
/// when |W| on the box edge exceeds kEdgeTolerance.
inline constexpr double kEdgeTolerance = 1e-9;
ScalarField wigner_grid(const DensityMatrix& rho, const PhaseGrid& grid, double hbar = 1.0);
/// Pure-state shortcut; identical to wigner_grid(density_matrix(state), ...).
ScalarField wigner_grid(const StateVector& state, const PhaseGrid& grid, double hbar = 1.0);

/// Box half-width L = max(6, 2·max(|α|, e^{|ζ|}) + 4)·√ħ used when no grid is given.
double default_half_width(const StateSpec& spec, double hbar = 1.0);
inline constexpr int kDefaultGridPoints = 257;
PhaseGrid default_grid(const StateSpec& spec, double hbar = 1.0);

}  // namespace kerrwig

#pragma once

#include <complex>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace kerrwig {

using complex = std::complex<double>;

inline constexpr double kDefaultTruncationTol = 1e-12;
inline constexpr int kHardCutoffCap = 512;

/// Constants of the Kerr oscillator H = h + (Λ p²/2M + λ k x²/2)², h = p²/2M + k x²/2.
///
/// lambda2_p holds Λ² and lambda2_x holds λ². Both are signed: a negative
/// value stands for a formally imaginary Λ (soft nonlinearity). The physical
/// Kerr oscillator has lambda2_x == lambda2_p; use KerrParams::kerr() to build one.
struct KerrParams {
  double mass = 1.0;
  double spring = 1.0;
  double hbar = 1.0;
  double lambda2_p = 0.0;
  double lambda2_x = 0.0;

  static KerrParams kerr(double lambda2, double hbar = 1.0) {
    return KerrParams{1.0, 1.0, hbar, lambda2, lambda2};
  }

  /// Throws std::invalid_argument unless M, k, ħ > 0 and the nonlinearities are finite.
  void validate() const;
  bool symmetric() const { return lambda2_x == lambda2_p; }
  bool atomic_units() const { return mass == 1.0 && spring == 1.0; }
  double omega() const;
  /// Product Λλ entering the cross terms of the current. Requires Λ² and λ²
  /// not to have opposite signs (the product would be imaginary).
  double cross_coupling() const;
};

/// Pure state in the Fock basis, normalized on construction.
class StateVector {
 public:
  /// Normalizes the amplitudes. truncation_residual is the probability that
  /// was discarded beyond the cutoff before renormalization.
  explicit StateVector(std::vector<complex> amplitudes, double truncation_residual = 0.0);

  int cutoff() const { return static_cast<int>(amps_.size()) - 1; }
  std::span<const complex> amplitudes() const { return amps_; }
  const complex& operator[](int n) const { return amps_[static_cast<std::size_t>(n)]; }
  double truncation_residual() const { return residual_; }

  double norm() const;
  double mean_photon_number() const;
  /// Σ_{n > N-4} |c_n|², probability held in the top four retained levels.
  double edge_mass() const;

 private:
  std::vector<complex> amps_;
  double residual_;
};

/// Dense (N+1)×(N+1) density matrix, row-major, ρ_{mn} = ⟨m|ρ|n⟩.
class DensityMatrix {
 public:
  explicit DensityMatrix(int dim);

  int dim() const { return dim_; }
  int cutoff() const { return dim_ - 1; }
  complex& operator()(int m, int n) { return data_[static_cast<std::size_t>(m * dim_ + n)]; }
  const complex& operator()(int m, int n) const {
    return data_[static_cast<std::size_t>(m * dim_ + n)];
  }

  complex trace() const;
  /// max |ρ_{mn} - conj(ρ_{nm})|
  double hermiticity_defect() const;
  double max_abs_difference(const DensityMatrix& other) const;

 private:
  int dim_;
  std::vector<complex> data_;
};

// State recipes understood by auto_cutoff and the CLI.
struct CoherentSpec {
  complex alpha;
};
struct SqueezedSpec {
  double zeta;
};
struct FockSpec {
  std::vector<std::pair<int, complex>> terms;
};
using StateSpec = std::variant<CoherentSpec, SqueezedSpec, FockSpec>;

StateVector coherent_state(complex alpha, int cutoff, double tol = kDefaultTruncationTol);
/// Position-squeezed vacuum for zeta > 0: x variance scaled by e^{-2ζ}.
StateVector squeezed_vacuum(double zeta, int cutoff, double tol = kDefaultTruncationTol);
StateVector fock_superposition(std::span<const std::pair<int, complex>> terms, int cutoff);

/// Probability beyond Fock level `cutoff` for the untruncated state.
double tail_mass(const StateSpec& spec, int cutoff);
/// Smallest cutoff whose tail mass is below tol (doubling, then bisection).
int auto_cutoff(const StateSpec& spec, double tol = kDefaultTruncationTol, int hard_cap = kHardCutoffCap);
/// Builds the state with the automatically chosen cutoff (or `cutoff` if >= 0).
StateVector make_state(const StateSpec& spec, int cutoff = -1, double tol = kDefaultTruncationTol);

double kerr_energy(int n, const KerrParams& params);
double recurrence_time(const KerrParams& params);
StateVector evolve(const StateVector& state, double t, const KerrParams& params);

DensityMatrix density_matrix(const StateVector& state);
/// Convex mixture Σ w_i |ψ_i⟩⟨ψ_i|; weights must be nonnegative and sum to one.
DensityMatrix density_matrix(std::span<const std::pair<double, StateVector>> mixture);

}  // namespace kerrwig

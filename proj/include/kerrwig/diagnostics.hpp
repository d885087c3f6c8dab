#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kerrwig/current.hpp"
#include "kerrwig/grid.hpp"
#include "kerrwig/kerr.hpp"

namespace kerrwig {

inline constexpr int kDefaultRingPoints = 512;

/// W sampled at θ_k = 2πk/Nθ on a circle of radius r.
struct RingTrace {
  double radius = 0.0;
  double time = 0.0;
  std::vector<double> thetas;
  std::vector<double> values;
  /// Classical rotation angle (1 + Λ²r²)t removed, if any.
  std::optional<double> classical_shift;

  /// -θ - shift wrapped to (-π, π]: constant for a point riding the classical
  /// flow, increasing for one that runs ahead of it.
  double minus_theta_shifted(std::size_t k) const;
};

/// Throws std::out_of_range when the circle leaves the grid box or n_theta < 64.
RingTrace ring_trace(const ScalarField& w, double r, int n_theta = kDefaultRingPoints,
                     std::optional<double> classical_shift = std::nullopt, double time = 0.0);
/// Classical phase (1 + Λ²r²)t for the co-rotating view.
double classical_phase(double r, double t, const KerrParams& params);

/// ∮ W dθ by the periodic trapezoid rule.
double ring_probability(const ScalarField& w, double r, int n_theta = kDefaultRingPoints);
double ring_probability(const RingTrace& trace);

/// ∂θ^order of the trace by its discrete Fourier series.
std::vector<double> ring_theta_derivative(const RingTrace& trace, int order);

/// Circular mean of the co-rotating angle, weighted by the positive part of W.
double pulse_mean_angle(const RingTrace& trace);

/// w(r, θ) = r[1 + Λ²(r² - (ħ²/4r²) ∂θ²W / W)] at one point, with ∂θ²W built
/// from grid derivatives and interpolated. Throws std::domain_error where
/// |W| < floor·max W.
inline constexpr double kDefaultRingVelocityFloor = 1e-6;
double ring_velocity_approx(const ScalarField& w, double r, double theta, const KerrParams& params,
                            double floor = kDefaultRingVelocityFloor);

/// δ = -∇×J^Q = ∂p J^Q_x - ∂x J^Q_p.
ScalarField vorticity(const VectorField& j_quantum);

/// π = W ∂rδ with ∂r = (x∂x + p∂p)/r, zero at the origin node.
ScalarField shear_polarization_local(const ScalarField& w, const ScalarField& delta);
/// Π = ∬ π dx dp (trapezoid, fixed summation order).
double shear_polarization(const ScalarField& w, const ScalarField& delta);
/// Π of one Wigner snapshot: σ = 0 current, quantum part, δ, π, Π.
double shear_polarization_of(const ScalarField& w, const KerrParams& params);

struct SpecialEvent {
  double time = 0.0;
  int index = 0;
  std::string kind;  // "recurrence" or "fractional-revival"
  double score = 0.0;  // |deviation|
  int numerator = 0;   // nearest p/q of the recurrence time, q <= 8
  int denominator = 1;
};

struct ShearSeries {
  std::vector<double> times;
  std::vector<double> pi_values;
  std::vector<double> smoothed;
  std::vector<double> deviation;
  std::vector<SpecialEvent> events;
  int window = 5;
  /// T_Λ used to annotate events; 0 when the dynamics is harmonic.
  double period = 0.0;
};

inline constexpr int kDefaultSmoothingWindow = 5;
inline constexpr int kDefaultBaselineWindow = 51;
inline constexpr double kDefaultMadFactor = 3.0;

/// Centered moving average over an odd window. The series is mirrored about
/// its end samples, so an extremum sitting on an end stays there.
std::vector<double> moving_average(const std::vector<double>& values, int window);
/// Centered running median with the same mirrored ends.
std::vector<double> running_median(const std::vector<double>& values, int window);

ShearSeries pi_series(const StateVector& state0, const KerrParams& params, const std::vector<double>& times,
                      const PhaseGrid& grid, int window = kDefaultSmoothingWindow);

/// Fills series.deviation = smoothed - running median over baseline_window and
/// returns local extrema of |deviation| above mad_factor × MAD, sorted by
/// decreasing score. The baseline window has to be wider than the features
/// it should expose, otherwise the median follows them. Throws
/// std::invalid_argument for fewer than 3·baseline_window samples.
std::vector<SpecialEvent> detect_special_states(ShearSeries& series, int baseline_window = kDefaultBaselineWindow,
                                                double mad_factor = kDefaultMadFactor);

struct Negativity {
  double min_value = 0.0;
  double negative_volume = 0.0;
};
Negativity negativity(const ScalarField& w);

struct SpectralSummary {
  std::vector<double> bin_edges;  // wavenumber, cycles per unit length
  std::vector<double> power;      // summed |FFT|² per bin
  double centroid = 0.0;
  double high_fraction = 0.0;     // share of power above cutoff
  double cutoff = 0.0;
};
inline constexpr int kDefaultSpectralBins = 64;
/// Radially binned 2D power spectrum of W. Needs nx == np and hx == hp.
/// cutoff <= 0 selects 4/√ħ.
SpectralSummary spectral_content(const ScalarField& w, double hbar = 1.0, double cutoff = 0.0,
                                 int bins = kDefaultSpectralBins);

}  // namespace kerrwig

#include "kerrwig/diagnostics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "kerrwig/wigner.hpp"

namespace kerrwig {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  return a <= -std::numbers::pi ? a + kTwoPi : a;
}

void require_circle_inside(const PhaseGrid& g, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("ring: radius must be nonnegative");
  if (g.x_min > -r || g.x_max < r || g.p_min > -r || g.p_max < r)
    throw std::out_of_range("ring: circle of radius " + std::to_string(r) + " leaves the grid box");
}

// Unnormalized DFT coefficients c_0..c_{N/2} of a real periodic sequence.
std::vector<std::complex<double>> real_dft(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  std::vector<double> in(values);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

// Value of ∂θ^order of the trigonometric interpolant at angle theta.
double fourier_series_derivative(const std::vector<std::complex<double>>& c, int n, int order, double theta) {
  double sum = order == 0 ? c[0].real() : 0.0;
  for (int k = 1; k <= n / 2; ++k) {
    const bool nyquist = (n % 2 == 0 && k == n / 2);
    if (nyquist && order % 2 == 1) continue;
    std::complex<double> factor = std::pow(std::complex<double>(0.0, k), order);
    const double term = (c[static_cast<std::size_t>(k)] * factor * std::polar(1.0, k * theta)).real();
    sum += nyquist ? term : 2.0 * term;
  }
  return sum / n;
}

}  // namespace

double RingTrace::minus_theta_shifted(std::size_t k) const {
  return wrap_angle(-thetas[k] - classical_shift.value_or(0.0));
}

RingTrace ring_trace(const ScalarField& w, double r, int n_theta, std::optional<double> classical_shift, double time) {
  if (n_theta < 64) throw std::out_of_range("ring_trace: n_theta must be at least 64");
  require_circle_inside(w.grid, r);
  const Interpolator interp(w);
  RingTrace trace;
  trace.radius = r;
  trace.time = time;
  trace.classical_shift = classical_shift;
  trace.thetas.resize(static_cast<std::size_t>(n_theta));
  trace.values.resize(static_cast<std::size_t>(n_theta));
  for (int k = 0; k < n_theta; ++k) {
    const double theta = kTwoPi * k / n_theta;
    trace.thetas[static_cast<std::size_t>(k)] = theta;
    trace.values[static_cast<std::size_t>(k)] = interp(r * std::cos(theta), r * std::sin(theta));
  }
  return trace;
}

double classical_phase(double r, double t, const KerrParams& params) {
  return (1.0 + params.lambda2_p * r * r) * t;
}

double ring_probability(const RingTrace& trace) {
  double sum = 0.0;
  for (double v : trace.values) sum += v;
  return sum * kTwoPi / static_cast<double>(trace.values.size());
}

double ring_probability(const ScalarField& w, double r, int n_theta) {
  return ring_probability(ring_trace(w, r, n_theta));
}

std::vector<double> ring_theta_derivative(const RingTrace& trace, int order) {
  if (order < 0) throw std::invalid_argument("ring_theta_derivative: order must be nonnegative");
  const int n = static_cast<int>(trace.values.size());
  const auto c = real_dft(trace.values);
  std::vector<double> out(trace.values.size());
  for (int k = 0; k < n; ++k)
    out[static_cast<std::size_t>(k)] = fourier_series_derivative(c, n, order, trace.thetas[static_cast<std::size_t>(k)]);
  return out;
}

double pulse_mean_angle(const RingTrace& trace) {
  double s = 0.0, c = 0.0;
  for (std::size_t k = 0; k < trace.values.size(); ++k) {
    const double weight = std::max(trace.values[k], 0.0);
    const double a = trace.minus_theta_shifted(k);
    s += weight * std::sin(a);
    c += weight * std::cos(a);
  }
  return std::atan2(s, c);
}

double ring_velocity_approx(const ScalarField& w, double r, double theta, const KerrParams& params, double floor) {
  params.validate();
  if (!params.atomic_units() || !params.symmetric())
    throw std::invalid_argument("ring_velocity_approx: requires mass = spring = 1 and lambda2_x == lambda2_p");
  if (!(r > 0.0)) throw std::invalid_argument("ring_velocity_approx: r must be positive");
  const double x = r * std::cos(theta), p = r * std::sin(theta);
  if (!w.grid.contains(x, p)) throw std::out_of_range("ring_velocity_approx: point outside the grid");
  const double value = interpolate(w, x, p);
  if (std::abs(value) < floor * w.max())
    throw std::domain_error("ring_velocity_approx: W too close to zero, approximation invalid");
  // ∂θ² = x²∂p² - 2xp∂x∂p + p²∂x² - x∂x - p∂p
  const double curvature = x * x * interpolate(differentiate(w, 0, 2), x, p) -
                           2 * x * p * interpolate(differentiate(w, 1, 1), x, p) +
                           p * p * interpolate(differentiate(w, 2, 0), x, p) -
                           x * interpolate(differentiate(w, 1, 0), x, p) - p * interpolate(differentiate(w, 0, 1), x, p);
  const double hb2 = params.hbar * params.hbar;
  return r * (1.0 + params.lambda2_p * (r * r - hb2 / (4.0 * r * r) * curvature / value));
}

ScalarField vorticity(const VectorField& j_quantum) {
  ScalarField delta =
      differentiate(j_quantum.x_component(), 0, 1) - differentiate(j_quantum.p_component(), 1, 0);
  delta.label = "delta";
  return delta;
}

ScalarField shear_polarization_local(const ScalarField& w, const ScalarField& delta) {
  require_same_grid(w.grid, delta.grid, "shear_polarization_local");
  const PhaseGrid& g = w.grid;
  const ScalarField dx = differentiate(delta, 1, 0), dp = differentiate(delta, 0, 1);
  ScalarField out(g, "pi");
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j) {
      const double x = g.x(i), p = g.p(j);
      const double r = std::hypot(x, p);
      if (r == 0.0) continue;
      const std::size_t n = g.index(i, j);
      out.values[n] = w.values[n] * (x * dx.values[n] + p * dp.values[n]) / r;
    }
  return out;
}

double shear_polarization(const ScalarField& w, const ScalarField& delta) {
  return shear_polarization_local(w, delta).integral();
}

double shear_polarization_of(const ScalarField& w, const KerrParams& params) {
  const CurrentBundle bundle = (params.atomic_units() && params.symmetric()) ? current_polar(w, params)
                                                                             : current_general(w, params, 0.0);
  return shear_polarization(w, vorticity(bundle.quantum));
}

namespace {

// Mirror index about the end samples (the end sample itself is not repeated).
int mirror_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

std::vector<double> mirrored_window(const std::vector<double>& values, int center, int half) {
  const int n = static_cast<int>(values.size());
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(2 * half + 1));
  for (int k = center - half; k <= center + half; ++k) w.push_back(values[static_cast<std::size_t>(mirror_index(k, n))]);
  return w;
}

}  // namespace

std::vector<double> moving_average(const std::vector<double>& values, int window) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("moving_average: window must be odd and positive");
  const int n = static_cast<int>(values.size());
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (double v : mirrored_window(values, i, window / 2)) sum += v;
    out[static_cast<std::size_t>(i)] = sum / window;
  }
  return out;
}

namespace {

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

std::vector<double> running_median(const std::vector<double>& values, int window) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("running_median: window must be odd and positive");
  const int n = static_cast<int>(values.size());
  std::vector<double> out(values.size());
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = median_of(mirrored_window(values, i, window / 2));
  return out;
}

ShearSeries pi_series(const StateVector& state0, const KerrParams& params, const std::vector<double>& times,
                      const PhaseGrid& grid, int window) {
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("pi_series: times must be strictly increasing");
  ShearSeries series;
  series.times = times;
  series.window = window;
  series.period = params.lambda2_p != 0.0 ? recurrence_time(params) : 0.0;
  series.pi_values.reserve(times.size());
  for (double t : times)
    series.pi_values.push_back(shear_polarization_of(wigner_grid(evolve(state0, t, params), grid, params.hbar), params));
  series.smoothed = moving_average(series.pi_values, window);
  series.deviation.assign(times.size(), 0.0);
  return series;
}

std::vector<SpecialEvent> detect_special_states(ShearSeries& series, int baseline_window, double mad_factor) {
  if (baseline_window < 1) throw std::invalid_argument("detect_special_states: baseline_window must be positive");
  const int n = static_cast<int>(series.smoothed.size());
  if (n < 3 * baseline_window)
    throw std::invalid_argument("detect_special_states: need at least 3*baseline_window samples");
  if (series.times.size() != series.smoothed.size())
    throw std::invalid_argument("detect_special_states: times and smoothed values differ in length");

  const std::vector<double> baseline = running_median(series.smoothed, baseline_window);
  series.deviation.resize(series.smoothed.size());
  std::vector<double> magnitude(series.smoothed.size());
  for (std::size_t k = 0; k < series.smoothed.size(); ++k) {
    series.deviation[k] = series.smoothed[k] - baseline[k];
    magnitude[k] = std::abs(series.deviation[k]);
  }
  const double center = median_of(series.deviation);
  std::vector<double> spread(series.deviation.size());
  for (std::size_t k = 0; k < spread.size(); ++k) spread[k] = std::abs(series.deviation[k] - center);
  const double threshold = mad_factor * median_of(spread);

  std::vector<SpecialEvent> events;
  for (int i = 0; i < n; ++i) {
    const double m = magnitude[static_cast<std::size_t>(i)];
    if (!(m > threshold) || m == 0.0) continue;
    // on an exact plateau only the first sample counts
    if (i > 0 && magnitude[static_cast<std::size_t>(i - 1)] >= m) continue;
    if (i + 1 < n && magnitude[static_cast<std::size_t>(i + 1)] > m) continue;
    SpecialEvent e;
    e.time = series.times[static_cast<std::size_t>(i)];
    e.index = i;
    e.score = m;
    if (series.period > 0.0) {
      const double frac = e.time / series.period;
      double best = std::numeric_limits<double>::infinity();
      for (int q = 1; q <= 8; ++q) {
        const int p = static_cast<int>(std::lround(frac * q));
        const double err = std::abs(frac - static_cast<double>(p) / q);
        if (err < best - 1e-12) {
          best = err;
          e.numerator = p;
          e.denominator = q;
        }
      }
      e.kind = e.denominator == 1 ? "recurrence" : "fractional-revival";
    } else {
      e.kind = "extremum";
    }
    events.push_back(e);
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const SpecialEvent& a, const SpecialEvent& b) { return a.score > b.score; });
  series.events = events;
  return events;
}

Negativity negativity(const ScalarField& w) {
  ScalarField negative_part(w.grid, "negative_part");
  for (std::size_t k = 0; k < w.values.size(); ++k) negative_part.values[k] = std::max(-w.values[k], 0.0);
  return Negativity{w.min(), negative_part.integral()};
}

SpectralSummary spectral_content(const ScalarField& w, double hbar, double cutoff, int bins) {
  const PhaseGrid& g = w.grid;
  if (g.nx != g.np || std::abs(g.hx() - g.hp()) > 1e-12 * g.hx())
    throw std::invalid_argument("spectral_content: grid must be square with equal spacings");
  if (bins < 1) throw std::invalid_argument("spectral_content: bins must be positive");
  if (!(hbar > 0.0)) throw std::invalid_argument("spectral_content: hbar must be positive");
  const int n = g.nx;
  const int half = n / 2 + 1;
  std::vector<double> in(w.values);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n) * half);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_2d(n, n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  SpectralSummary s;
  s.cutoff = cutoff > 0.0 ? cutoff : 4.0 / std::sqrt(hbar);
  const double dk = 1.0 / (n * g.hx());
  const double k_max = dk * std::hypot(n / 2, n / 2);
  s.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) s.bin_edges[static_cast<std::size_t>(b)] = k_max * b / bins;
  s.power.assign(static_cast<std::size_t>(bins), 0.0);

  double total = 0.0, moment = 0.0, high = 0.0;
  for (int i = 0; i < n; ++i) {
    const double kx = dk * (i <= n / 2 ? i : i - n);
    for (int j = 0; j < half; ++j) {
      const double kp = dk * j;
      // the half spectrum stores each conjugate pair once
      const double mult = (j == 0 || (n % 2 == 0 && j == n / 2)) ? 1.0 : 2.0;
      const double power = mult * std::norm(out[static_cast<std::size_t>(i) * half + j]);
      const double k = std::hypot(kx, kp);
      const int b = std::min(bins - 1, static_cast<int>(k / k_max * bins));
      s.power[static_cast<std::size_t>(b)] += power;
      total += power;
      moment += k * power;
      if (k > s.cutoff) high += power;
    }
  }
  if (total > 0.0) {
    s.centroid = moment / total;
    s.high_fraction = high / total;
  }
  return s;
}

}  // namespace kerrwig

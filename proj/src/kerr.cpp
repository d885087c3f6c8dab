#include "kerrwig/kerr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kerrwig/errors.hpp"

namespace kerrwig {

void KerrParams::validate() const {
  if (!(mass > 0.0) || !(spring > 0.0) || !(hbar > 0.0))
    throw std::invalid_argument("KerrParams: mass, spring and hbar must be positive");
  if (!std::isfinite(mass) || !std::isfinite(spring) || !std::isfinite(hbar) ||
      !std::isfinite(lambda2_p) || !std::isfinite(lambda2_x))
    throw std::invalid_argument("KerrParams: non-finite parameter");
}

double KerrParams::omega() const { return std::sqrt(spring / mass); }

double KerrParams::cross_coupling() const {
  if (lambda2_p * lambda2_x < 0.0)
    throw std::invalid_argument(
        "KerrParams: lambda2_p and lambda2_x of opposite sign give an imaginary cross coupling");
  const double magnitude = std::sqrt(std::abs(lambda2_p * lambda2_x));
  return (lambda2_p < 0.0 || lambda2_x < 0.0) ? -magnitude : magnitude;
}

StateVector::StateVector(std::vector<complex> amplitudes, double truncation_residual)
    : amps_(std::move(amplitudes)), residual_(truncation_residual) {
  if (amps_.empty()) throw std::invalid_argument("StateVector: no amplitudes");
  double total = 0.0;
  for (const auto& c : amps_) total += std::norm(c);
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::invalid_argument("StateVector: amplitudes have zero or non-finite norm");
  const double scale = 1.0 / std::sqrt(total);
  for (auto& c : amps_) c *= scale;
}

double StateVector::norm() const {
  double total = 0.0;
  for (const auto& c : amps_) total += std::norm(c);
  return std::sqrt(total);
}

double StateVector::mean_photon_number() const {
  double mean = 0.0;
  for (std::size_t n = 0; n < amps_.size(); ++n) mean += static_cast<double>(n) * std::norm(amps_[n]);
  return mean;
}

double StateVector::edge_mass() const {
  double mass = 0.0;
  const int first = std::max(0, cutoff() - 3);
  for (int n = first; n <= cutoff(); ++n) mass += std::norm(amps_[static_cast<std::size_t>(n)]);
  return mass;
}

DensityMatrix::DensityMatrix(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim) {
  if (dim <= 0) throw std::invalid_argument("DensityMatrix: dimension must be positive");
}

complex DensityMatrix::trace() const {
  complex tr = 0.0;
  for (int n = 0; n < dim_; ++n) tr += (*this)(n, n);
  return tr;
}

double DensityMatrix::hermiticity_defect() const {
  double worst = 0.0;
  for (int m = 0; m < dim_; ++m)
    for (int n = 0; n < dim_; ++n)
      worst = std::max(worst, std::abs((*this)(m, n) - std::conj((*this)(n, m))));
  return worst;
}

double DensityMatrix::max_abs_difference(const DensityMatrix& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("DensityMatrix: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) worst = std::max(worst, std::abs(data_[i] - other.data_[i]));
  return worst;
}

namespace {

// |c_n|² of a coherent state, evaluated in log space.
double poisson_weight(double mean, int n) {
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
}

// |c_{2m}|² of the squeezed vacuum.
double squeezed_weight(double zeta, int m) {
  if (zeta == 0.0) return m == 0 ? 1.0 : 0.0;
  const double th = std::tanh(std::abs(zeta));
  return std::exp(2.0 * m * std::log(th) + std::lgamma(2.0 * m + 1.0) - 2.0 * m * std::log(2.0) -
                  2.0 * std::lgamma(m + 1.0) - std::log(std::cosh(zeta)));
}

double coherent_tail(double mean, int cutoff) {
  if (mean == 0.0) return 0.0;
  double tail = 0.0;
  for (int n = cutoff + 1;; ++n) {
    const double w = poisson_weight(mean, n);
    tail += w;
    if (n > mean && (w < 1e-300 || w < tail * 1e-17)) break;
  }
  return tail;
}

double squeezed_tail(double zeta, int cutoff) {
  if (zeta == 0.0) return 0.0;
  double tail = 0.0;
  for (int m = cutoff / 2 + 1;; ++m) {
    const double w = squeezed_weight(zeta, m);
    tail += w;
    // Weights decay at least geometrically with ratio tanh²ζ once m is past the peak.
    if (w < 1e-300 || (m > 4 && w < tail * 1e-17)) break;
  }
  return tail;
}

void refuse_if_truncated(const char* what, int cutoff, double tail, double tol) {
  if (tail >= tol) {
    std::ostringstream msg;
    msg << what << ": cutoff " << cutoff << " leaves tail mass " << tail << " (tolerance " << tol
        << "); use auto_cutoff";
    throw TruncationError(msg.str(), cutoff, tail, tol);
  }
}

}  // namespace

StateVector coherent_state(complex alpha, int cutoff, double tol) {
  if (cutoff < 0) throw std::invalid_argument("coherent_state: negative cutoff");
  const double mean = std::norm(alpha);
  const double tail = coherent_tail(mean, cutoff);
  refuse_if_truncated("coherent_state", cutoff, tail, tol);
  std::vector<complex> c(static_cast<std::size_t>(cutoff) + 1);
  const double phase = std::arg(alpha);
  for (int n = 0; n <= cutoff; ++n) {
    const double mag = std::sqrt(poisson_weight(mean, n));
    c[static_cast<std::size_t>(n)] = std::polar(mag, n * phase);
  }
  return StateVector(std::move(c), tail);
}

StateVector squeezed_vacuum(double zeta, int cutoff, double tol) {
  if (cutoff < 0) throw std::invalid_argument("squeezed_vacuum: negative cutoff");
  if (!std::isfinite(zeta)) throw std::invalid_argument("squeezed_vacuum: non-finite zeta");
  const double tail = squeezed_tail(zeta, cutoff);
  refuse_if_truncated("squeezed_vacuum", cutoff, tail, tol);
  std::vector<complex> c(static_cast<std::size_t>(cutoff) + 1);
  // c_{2m} ∝ (-tanh ζ)^m √((2m)!) / (2^m m!)
  for (int m = 0; 2 * m <= cutoff; ++m) {
    const double mag = std::sqrt(squeezed_weight(zeta, m));
    const bool negative = (m % 2 == 1) && zeta > 0.0;
    c[static_cast<std::size_t>(2 * m)] = negative ? -mag : mag;
  }
  return StateVector(std::move(c), tail);
}

StateVector fock_superposition(std::span<const std::pair<int, complex>> terms, int cutoff) {
  if (terms.empty()) throw std::invalid_argument("fock_superposition: empty term list");
  if (cutoff < 0) throw std::invalid_argument("fock_superposition: negative cutoff");
  std::vector<complex> c(static_cast<std::size_t>(cutoff) + 1);
  for (const auto& [n, a] : terms) {
    if (n < 0 || n > cutoff)
      throw std::invalid_argument("fock_superposition: level " + std::to_string(n) + " outside [0, cutoff]");
    c[static_cast<std::size_t>(n)] += a;
  }
  return StateVector(std::move(c));
}

double tail_mass(const StateSpec& spec, int cutoff) {
  return std::visit(
      [cutoff](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CoherentSpec>) {
          return coherent_tail(std::norm(s.alpha), cutoff);
        } else if constexpr (std::is_same_v<T, SqueezedSpec>) {
          return squeezed_tail(s.zeta, cutoff);
        } else {
          if (s.terms.empty()) throw std::invalid_argument("tail_mass: empty Fock term list");
          double total = 0.0, beyond = 0.0;
          for (const auto& [n, a] : s.terms) {
            total += std::norm(a);
            if (n > cutoff) beyond += std::norm(a);
          }
          return total > 0.0 ? beyond / total : 0.0;
        }
      },
      spec);
}

int auto_cutoff(const StateSpec& spec, double tol, int hard_cap) {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("auto_cutoff: tol must lie in (0, 1)");
  if (tail_mass(spec, 0) < tol) return 0;
  int hi = 1;
  while (tail_mass(spec, hi) >= tol) {
    if (hi >= hard_cap) {
      std::ostringstream msg;
      msg << "auto_cutoff: tail mass still " << tail_mass(spec, hard_cap) << " at hard cap " << hard_cap;
      throw TruncationError(msg.str(), hard_cap, tail_mass(spec, hard_cap), tol);
    }
    hi = std::min(2 * hi, hard_cap);
  }
  int lo = hi / 2;  // tail(lo) >= tol
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (tail_mass(spec, mid) < tol)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

StateVector make_state(const StateSpec& spec, int cutoff, double tol) {
  if (cutoff < 0) cutoff = auto_cutoff(spec, tol);
  return std::visit(
      [&](const auto& s) -> StateVector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CoherentSpec>) {
          return coherent_state(s.alpha, cutoff, tol);
        } else if constexpr (std::is_same_v<T, SqueezedSpec>) {
          return squeezed_vacuum(s.zeta, cutoff, tol);
        } else {
          return fock_superposition(s.terms, cutoff);
        }
      },
      spec);
}

double kerr_energy(int n, const KerrParams& params) {
  params.validate();
  if (!params.symmetric())
    throw std::invalid_argument("kerr_energy: eigenbasis requires lambda2_x == lambda2_p");
  if (n < 0) throw std::invalid_argument("kerr_energy: negative level");
  const double level = n + 0.5;
  return params.hbar * params.omega() * (level + params.lambda2_p * level * level);
}

double recurrence_time(const KerrParams& params) {
  if (params.lambda2_p == 0.0)
    throw std::domain_error("recurrence_time: no recurrence scale (harmonic, lambda2 = 0)");
  return std::numbers::pi / std::abs(params.lambda2_p);
}

StateVector evolve(const StateVector& state, double t, const KerrParams& params) {
  params.validate();
  if (!params.symmetric())
    throw std::invalid_argument("evolve: eigenbasis evolution requires lambda2_x == lambda2_p");
  std::vector<complex> c(state.amplitudes().begin(), state.amplitudes().end());
  if (t != 0.0) {
    for (int n = 0; n <= state.cutoff(); ++n)
      c[static_cast<std::size_t>(n)] *= std::polar(1.0, -kerr_energy(n, params) * t / params.hbar);
  }
  return StateVector(std::move(c), state.truncation_residual());
}

DensityMatrix density_matrix(const StateVector& state) {
  const int dim = state.cutoff() + 1;
  DensityMatrix rho(dim);
  for (int m = 0; m < dim; ++m)
    for (int n = 0; n < dim; ++n) rho(m, n) = state[m] * std::conj(state[n]);
  return rho;
}

DensityMatrix density_matrix(std::span<const std::pair<double, StateVector>> mixture) {
  if (mixture.empty()) throw std::invalid_argument("density_matrix: empty mixture");
  int dim = 0;
  double total = 0.0;
  for (const auto& [w, s] : mixture) {
    if (w < 0.0) throw std::invalid_argument("density_matrix: negative mixture weight");
    total += w;
    dim = std::max(dim, s.cutoff() + 1);
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("density_matrix: weights must sum to one");
  DensityMatrix rho(dim);
  for (const auto& [w, s] : mixture)
    for (int m = 0; m <= s.cutoff(); ++m)
      for (int n = 0; n <= s.cutoff(); ++n) rho(m, n) += w * s[m] * std::conj(s[n]);
  return rho;
}

}  // namespace kerrwig

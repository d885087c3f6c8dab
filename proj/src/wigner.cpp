#include "kerrwig/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kerrwig/errors.hpp"
#include "kerrwig/parallel.hpp"
#include "quadrature.hpp"

namespace kerrwig {

namespace {

constexpr double kRescaleAbove = 1e150;
const double kRescaleLog = std::log(1e150);

// Normalized Laguerre functions h_j^k(u) = √(j!/(j+k)!) u^{k/2} e^{-u/2} L_j^{(k)}(u),
// generated for j = 0.. by the three-term recurrence. The running values are
// kept as mantissa·exp(log_scale) so that neither underflow of the seed nor
// growth along the recurrence loses the result.
class LaguerreSweep {
 public:
  LaguerreSweep(int k, double u) : k_(k), u_(u) {
    if (u == 0.0) {
      zero_ = k > 0;
      prev_ = 0.0;
      cur_ = 1.0;
      log_scale_ = 0.0;
    } else {
      prev_ = 0.0;
      cur_ = 1.0;
      log_scale_ = 0.5 * k * std::log(u) - 0.5 * u - 0.5 * std::lgamma(k + 1.0);
    }
  }

  bool identically_zero() const { return zero_; }
  int index() const { return j_; }
  double mantissa() const { return cur_; }
  double log_scale() const { return log_scale_; }

  // Advances j -> j+1. Returns true when the mantissa was rescaled by 1e-150.
  bool advance() {
    const double j = j_;
    const double next = ((2.0 * j + k_ + 1.0 - u_) * cur_ - std::sqrt(j * (j + k_)) * prev_) /
                        std::sqrt((j + 1.0) * (j + k_ + 1.0));
    prev_ = cur_;
    cur_ = next;
    ++j_;
    if (std::abs(cur_) > kRescaleAbove) {
      cur_ /= kRescaleAbove;
      prev_ /= kRescaleAbove;
      log_scale_ += kRescaleLog;
      return true;
    }
    return false;
  }

 private:
  int k_;
  double u_;
  bool zero_ = false;
  int j_ = 0;
  double prev_, cur_;
  double log_scale_;
};

}  // namespace

complex fock_wigner_kernel(int m, int n, double x, double p, double hbar) {
  if (m < 0 || n < 0) throw std::invalid_argument("fock_wigner_kernel: negative Fock index");
  if (!(hbar > 0.0)) throw std::invalid_argument("fock_wigner_kernel: hbar must be positive");
  if (m < n) return std::conj(fock_wigner_kernel(n, m, x, p, hbar));
  const int k = m - n;
  const double r2 = x * x + p * p;
  const double u = 2.0 * r2 / hbar;
  LaguerreSweep sweep(k, u);
  if (sweep.identically_zero()) return 0.0;
  while (sweep.index() < n) sweep.advance();
  const double log_mag = sweep.log_scale();
  const double h = sweep.mantissa() * std::exp(log_mag);
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  const complex result = sign / (std::numbers::pi * hbar) * h * std::polar(1.0, -k * std::atan2(p, x));
  if (!std::isfinite(result.real()) || !std::isfinite(result.imag())) {
    std::ostringstream msg;
    msg << "fock_wigner_kernel: precision lost for (m, n) = (" << m << ", " << n << ") at r² = " << r2;
    throw NumericalError(msg.str(), log_mag);
  }
  return result;
}

namespace {

// Recurrence coefficients of LaguerreSweep, tabulated once per grid.
struct SweepTables {
  explicit SweepTables(int dim) : dim(dim), lead(static_cast<std::size_t>(dim) * dim), lag(lead.size()), half_lgamma(dim) {
    for (int k = 0; k < dim; ++k) {
      half_lgamma[static_cast<std::size_t>(k)] = 0.5 * std::lgamma(k + 1.0);
      for (int j = 0; j + k < dim; ++j) {
        lead[at(k, j)] = 1.0 / std::sqrt((j + 1.0) * (j + k + 1.0));
        lag[at(k, j)] = std::sqrt(static_cast<double>(j) * (j + k));
      }
    }
  }
  std::size_t at(int k, int j) const { return static_cast<std::size_t>(k) * dim + j; }
  int dim;
  std::vector<double> lead, lag, half_lgamma;
};

// Wigner value at one point from the density matrix, O(N²).
double wigner_point(const DensityMatrix& rho, const SweepTables& tab, double x, double p, double hbar) {
  const int dim = rho.dim();
  const double u = 2.0 * (x * x + p * p) / hbar;
  const double log_u = u > 0.0 ? std::log(u) : 0.0;
  const complex rot = std::polar(1.0, -std::atan2(p, x));
  complex phase = 1.0;  // e^{-ikθ}
  double total = 0.0;
  for (int k = 0; k < dim; ++k, phase *= rot) {
    if (u == 0.0 && k > 0) continue;
    double log_scale = u > 0.0 ? 0.5 * k * log_u - 0.5 * u - tab.half_lgamma[static_cast<std::size_t>(k)] : 0.0;
    // S_k = Σ_j ρ_{j+k, j} (-1)^j h_j^k, accumulated in the recurrence's scaled units.
    double prev = 0.0, cur = 1.0;
    complex sum = rho(k, 0);
    for (int j = 0; j + k + 1 < dim; ++j) {
      const std::size_t c = tab.at(k, j);
      const double next = ((2.0 * j + k + 1.0 - u) * cur - tab.lag[c] * prev) * tab.lead[c];
      prev = cur;
      cur = next;
      if (std::abs(cur) > kRescaleAbove) {
        cur /= kRescaleAbove;
        prev /= kRescaleAbove;
        sum /= kRescaleAbove;
        log_scale += kRescaleLog;
      }
      sum += rho(j + k + 1, j + 1) * ((j % 2 == 0) ? -cur : cur);
    }
    const complex s_k = sum * std::exp(log_scale);
    total += (k == 0) ? s_k.real() : 2.0 * (s_k * phase).real();
  }
  return total / (std::numbers::pi * hbar);
}

}  // namespace

ScalarField wigner_grid(const DensityMatrix& rho, const PhaseGrid& grid, double hbar) {
  grid.validate();
  if (!(hbar > 0.0)) throw std::invalid_argument("wigner_grid: hbar must be positive");
  ScalarField field(grid, "W");
  const SweepTables tables(rho.dim());
  parallel_for(0, static_cast<std::size_t>(grid.nx), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    const double x = grid.x(i);
    for (int j = 0; j < grid.np; ++j) field.at(i, j) = wigner_point(rho, tables, x, grid.p(j), hbar);
  });
  const double edge = field.edge_max_abs();
  if (edge > kEdgeTolerance) {
    std::ostringstream msg;
    msg << "edge-mass: |W| reaches " << edge << " on the box boundary (limit " << kEdgeTolerance << ")";
    field.warnings.push_back(msg.str());
  }
  return field;
}

ScalarField wigner_grid(const StateVector& state, const PhaseGrid& grid, double hbar) {
  return wigner_grid(density_matrix(state), grid, hbar);
}

namespace {

// Hermite functions ψ_0..ψ_N at q, scaled by ħ.
void hermite_functions(double q, double hbar, std::vector<double>& out) {
  const double s = q / std::sqrt(hbar);
  out[0] = std::pow(std::numbers::pi * hbar, -0.25) * std::exp(-0.5 * s * s);
  if (out.size() > 1) out[1] = std::sqrt(2.0) * s * out[0];
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    const double nn = static_cast<double>(n);
    out[n + 1] = std::sqrt(2.0 / (nn + 1.0)) * s * out[n] - std::sqrt(nn / (nn + 1.0)) * out[n - 1];
  }
}

constexpr int kQuadratureStartNodes = 2048;
constexpr int kQuadratureMaxNodes = 32768;
constexpr double kQuadratureTol = 1e-11;

// (1/πħ) ∫ dy F(ψ(x+y), ψ(x-y)) e^{-2ipy/ħ} with doubling Gauss-Legendre.
template <class Bilinear>
complex quadrature(int cutoff, double x, double p, double hbar, Bilinear&& form) {
  const double half_span = 8.0 * std::sqrt((cutoff + 1.0) * hbar);
  std::vector<double> plus(static_cast<std::size_t>(cutoff) + 1), minus(plus.size());
  complex previous = 0.0;
  double change = 0.0;
  for (int nodes = kQuadratureStartNodes; nodes <= kQuadratureMaxNodes; nodes *= 2) {
    const detail::GaussLegendre& gl = detail::gauss_legendre(nodes);
    complex sum = 0.0;
    for (int q = 0; q < nodes; ++q) {
      const double y = half_span * gl.nodes[static_cast<std::size_t>(q)];
      hermite_functions(x + y, hbar, plus);
      hermite_functions(x - y, hbar, minus);
      sum += gl.weights[static_cast<std::size_t>(q)] * form(plus, minus) * std::polar(1.0, -2.0 * p * y / hbar);
    }
    sum *= half_span / (std::numbers::pi * hbar);
    if (nodes > kQuadratureStartNodes) {
      change = std::abs(sum - previous);
      if (change < kQuadratureTol) return sum;
    }
    previous = sum;
  }
  throw NumericalError("wigner_quadrature: no convergence after node doubling", change);
}

}  // namespace

complex wigner_quadrature_element(int m, int n, double x, double p, double hbar) {
  if (m < 0 || n < 0) throw std::invalid_argument("wigner_quadrature_element: negative Fock index");
  return quadrature(std::max(m, n), x, p, hbar,
                    [m, n](const std::vector<double>& a, const std::vector<double>& b) {
                      return complex(a[static_cast<std::size_t>(m)] * b[static_cast<std::size_t>(n)]);
                    });
}

double wigner_quadrature(const DensityMatrix& rho, double x, double p, double hbar) {
  const int dim = rho.dim();
  const complex value = quadrature(dim - 1, x, p, hbar, [&](const std::vector<double>& a, const std::vector<double>& b) {
    complex acc = 0.0;
    for (int m = 0; m < dim; ++m) {
      complex row = 0.0;
      for (int n = 0; n < dim; ++n) row += rho(m, n) * b[static_cast<std::size_t>(n)];
      acc += a[static_cast<std::size_t>(m)] * row;
    }
    return acc;
  });
  return value.real();
}

double default_half_width(const StateSpec& spec, double hbar) {
  double amplitude = 1.0;
  if (const auto* c = std::get_if<CoherentSpec>(&spec)) {
    amplitude = std::max(1.0, std::abs(c->alpha));
  } else if (const auto* s = std::get_if<SqueezedSpec>(&spec)) {
    amplitude = std::exp(std::abs(s->zeta));
  } else if (const auto* f = std::get_if<FockSpec>(&spec)) {
    // A Fock level n has the phase-space radius of a coherent state with |α|² = n.
    int top = 0;
    for (const auto& term : f->terms) top = std::max(top, term.first);
    amplitude = std::max(1.0, std::sqrt(static_cast<double>(top)));
  }
  return std::max(6.0, 2.0 * amplitude + 4.0) * std::sqrt(hbar);
}

PhaseGrid default_grid(const StateSpec& spec, double hbar) {
  return PhaseGrid::symmetric(default_half_width(spec, hbar), kDefaultGridPoints);
}

}  // namespace kerrwig

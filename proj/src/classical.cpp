#include "kerrwig/classical.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kerrwig/parallel.hpp"
#include "quadrature.hpp"

namespace kerrwig {

namespace {

void require_kerr_flow(const KerrParams& params, const char* where) {
  params.validate();
  if (!params.atomic_units() || !params.symmetric())
    throw std::invalid_argument(std::string(where) + ": requires mass = spring = 1 and lambda2_x == lambda2_p");
}

}  // namespace

std::array<double, 2> classical_velocity(double x, double p, const KerrParams& params) {
  require_kerr_flow(params, "classical_velocity");
  const double f = 1.0 + params.lambda2_p * (x * x + p * p);
  return {p * f, -x * f};
}

void GaussianDensity::validate() const {
  if (!(var_x > 0.0) || !(var_p > 0.0) || !(var_x * var_p - cov_xp * cov_xp > 0.0) || !std::isfinite(x0) ||
      !std::isfinite(p0))
    throw std::invalid_argument("GaussianDensity: covariance must be positive definite");
}

double GaussianDensity::operator()(double x, double p) const {
  const double det = var_x * var_p - cov_xp * cov_xp;
  const double dx = x - x0, dp = p - p0;
  const double q = (var_p * dx * dx - 2.0 * cov_xp * dx * dp + var_x * dp * dp) / det;
  return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
}

GaussianDensity classical_twin(complex alpha, double hbar) {
  if (!(hbar > 0.0)) throw std::invalid_argument("classical_twin: hbar must be positive");
  const double s = std::sqrt(2.0 * hbar);
  return GaussianDensity{s * alpha.real(), s * alpha.imag(), hbar / 2.0, hbar / 2.0, 0.0};
}

ScalarField liouville_pullback(const ClassicalDensity& rho0, double t, const PhaseGrid& grid,
                               const KerrParams& params) {
  require_kerr_flow(params, "liouville_pullback");
  grid.validate();
  const double L2 = params.lambda2_p;
  ScalarField out(grid, "rho");

  auto fill = [&](auto&& density) {
    parallel_for(0, static_cast<std::size_t>(grid.nx), [&](std::size_t row) {
      const int i = static_cast<int>(row);
      const double x = grid.x(i);
      for (int j = 0; j < grid.np; ++j) {
        const double p = grid.p(j);
        const double r2 = x * x + p * p;
        const double angle = (1.0 + L2 * r2) * t;
        const double c = std::cos(angle), s = std::sin(angle);
        // rotate (x, p) counter-clockwise by the angle the flow turns clockwise
        out.at(i, j) = density(c * x - s * p, s * x + c * p);
      }
    });
  };

  if (const auto* g = std::get_if<GaussianDensity>(&rho0.source)) {
    g->validate();
    fill(*g);
  } else {
    const auto& snapshot = std::get<ScalarField>(rho0.source);
    const Interpolator interp(snapshot);
    const PhaseGrid& box = snapshot.grid;
    fill([&](double x, double p) { return box.contains(x, p) ? interp(x, p) : 0.0; });
  }
  return out;
}

double classical_shear(double r, const KerrParams& params) {
  require_kerr_flow(params, "classical_shear");
  if (!(r >= 0.0)) throw std::invalid_argument("classical_shear: r must be nonnegative");
  return 8.0 * params.lambda2_p * r;
}

double classical_shear_measure(const ScalarField& rho, const KerrParams& params) {
  require_kerr_flow(params, "classical_shear_measure");
  const PhaseGrid& g = rho.grid;
  const double L2 = params.lambda2_p;
  VectorField j(g, "j");
  for (int i = 0; i < g.nx; ++i)
    for (int k = 0; k < g.np; ++k) {
      const double x = g.x(i), p = g.p(k);
      const double f = 1.0 + L2 * (x * x + p * p);
      const std::size_t n = g.index(i, k);
      j.jx[n] = p * f * rho.values[n];
      j.jp[n] = -x * f * rho.values[n];
    }
  // -∇×j = ∂p jx - ∂x jp
  const ScalarField neg_curl = differentiate(j.x_component(), 0, 1) - differentiate(j.p_component(), 1, 0);
  const ScalarField gx = differentiate(neg_curl, 1, 0), gp = differentiate(neg_curl, 0, 1);
  ScalarField weighted(g, "rho_dr_neg_curl_j");
  for (int i = 0; i < g.nx; ++i)
    for (int k = 0; k < g.np; ++k) {
      const double x = g.x(i), p = g.p(k);
      const double r = std::hypot(x, p);
      const std::size_t n = g.index(i, k);
      if (r == 0.0) continue;
      weighted.values[n] = rho.values[n] * (x * gx.values[n] + p * gp.values[n]) / r;
    }
  return weighted.integral();
}

double classical_shear_measure(const GaussianDensity& rho0, double t, const KerrParams& params) {
  require_kerr_flow(params, "classical_shear_measure");
  rho0.validate();
  if (!rho0.isotropic()) throw std::invalid_argument("classical_shear_measure: analytic route needs an isotropic Gaussian");

  const double L2 = params.lambda2_p;
  const double s = rho0.var_x;
  const double r0 = std::hypot(rho0.x0, rho0.p0);
  const double phi0 = std::atan2(rho0.p0, rho0.x0);
  const double reach = 12.0 * std::sqrt(s);
  const double r_lo = std::max(0.0, r0 - reach), r_hi = r0 + reach;
  constexpr int kRadialNodes = 256;
  constexpr int kAngularNodes = 2048;
  const detail::GaussLegendre& gl = detail::gauss_legendre(kRadialNodes);
  const double norm = 1.0 / (2.0 * std::numbers::pi * s);
  const double dphi = 2.0 * std::numbers::pi / kAngularNodes;

  // In co-rotating angle φ = θ + f(r)t the density is ρ0(r, φ) and ∂r at
  // fixed θ becomes ∂r + f'(r)t ∂φ.
  double total = 0.0;
  for (int a = 0; a < kRadialNodes; ++a) {
    const double r = 0.5 * (r_hi + r_lo) + 0.5 * (r_hi - r_lo) * gl.nodes[static_cast<std::size_t>(a)];
    const double wr = 0.5 * (r_hi - r_lo) * gl.weights[static_cast<std::size_t>(a)];
    const double f = 1.0 + L2 * r * r, f1 = 2.0 * L2 * r, f2 = 2.0 * L2;
    const double c = 2.0 + 4.0 * L2 * r * r, c1 = 8.0 * L2 * r;
    const double shear_t = f1 * t;
    double ring = 0.0;
    for (int b = 0; b < kAngularNodes; ++b) {
      const double psi = b * dphi - phi0;
      const double cs = std::cos(psi), sn = std::sin(psi);
      const double rho = norm * std::exp(-(r * r + r0 * r0 - 2.0 * r * r0 * cs) / (2.0 * s));
      const double u_r = -(r - r0 * cs) / s, u_f = -r * r0 * sn / s;
      const double u_rr = -1.0 / s, u_rf = -r0 * sn / s, u_ff = -r * r0 * cs / s;
      const double rho_r = rho * u_r, rho_f = rho * u_f;
      const double rho_rr = rho * (u_rr + u_r * u_r);
      const double rho_rf = rho * (u_rf + u_r * u_f);
      const double rho_ff = rho * (u_ff + u_f * u_f);
      const double d_r = rho_r + shear_t * rho_f;
      const double d_rr = rho_rr + 2.0 * shear_t * rho_rf + f2 * t * rho_f + shear_t * shear_t * rho_ff;
      const double dr_neg_curl = c1 * rho + (c + f + r * f1) * d_r + r * f * d_rr;
      ring += rho * dr_neg_curl;
    }
    total += wr * r * ring * dphi;
  }
  return total;
}

}  // namespace kerrwig

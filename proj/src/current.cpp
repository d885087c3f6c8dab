#include "kerrwig/current.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "kerrwig/wigner.hpp"

namespace kerrwig {

FieldDerivatives derivatives_of(const ScalarField& w, int accuracy) {
  return FieldDerivatives{w,
                          differentiate(w, 1, 0, accuracy),
                          differentiate(w, 0, 1, accuracy),
                          differentiate(w, 2, 0, accuracy),
                          differentiate(w, 0, 2, accuracy),
                          differentiate(w, 1, 1, accuracy)};
}

namespace {

CurrentBundle empty_bundle(const PhaseGrid& g, const KerrParams& params, double sigma) {
  return CurrentBundle{VectorField(g, "J"), VectorField(g, "j"), VectorField(g, "JQ"), sigma, params};
}

void sum_parts(CurrentBundle& b) {
  for (std::size_t k = 0; k < b.total.jx.size(); ++k) {
    b.total.jx[k] = b.classical.jx[k] + b.quantum.jx[k];
    b.total.jp[k] = b.classical.jp[k] + b.quantum.jp[k];
  }
}

}  // namespace

CurrentBundle current_general(const FieldDerivatives& d, const KerrParams& params, double sigma) {
  params.validate();
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw std::invalid_argument("current_general: sigma must lie in [0, 1]");
  const PhaseGrid& g = d.w.grid;
  for (const ScalarField* f : {&d.wx, &d.wp, &d.wxx, &d.wpp, &d.wxp}) require_same_grid(g, f->grid, "current_general");

  const double M = params.mass, k = params.spring, hb2 = params.hbar * params.hbar;
  const double L2 = params.lambda2_p, l2 = params.lambda2_x, Ll = params.cross_coupling();
  const double sigma_coef = sigma * Ll * hb2 * k / (4.0 * M);

  CurrentBundle b = empty_bundle(g, params, sigma);
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x(i);
    for (int j = 0; j < g.np; ++j) {
      const double p = g.p(j);
      const std::size_t n = g.index(i, j);
      const double W = d.w.values[n], Wxx = d.wxx.values[n], Wpp = d.wpp.values[n], Wxp = d.wxp.values[n];
      // curly-bracket (classical) terms
      b.classical.jx[n] = (L2 * p * p * p / (M * M) + Ll * k * x * x * p / M + p / M) * W;
      b.classical.jp[n] = -(l2 * k * k * x * x * x + Ll * k * x * p * p / M + k * x) * W;
      // round-bracket ħ² terms plus the σ family
      b.quantum.jx[n] = hb2 * (-L2 / (4.0 * M * M) * p * Wxx - Ll * k / (4.0 * M) * p * Wpp) +
                        sigma_coef * (x * Wxp + p * Wpp);
      b.quantum.jp[n] = hb2 * (l2 * k * k / 4.0 * x * Wpp + Ll * k / (4.0 * M) * x * Wxx) -
                        sigma_coef * (x * Wxx + p * Wxp);
    }
  }
  sum_parts(b);
  return b;
}

CurrentBundle current_general(const ScalarField& w, const KerrParams& params, double sigma) {
  return current_general(derivatives_of(w), params, sigma);
}

CurrentBundle current_polar(const FieldDerivatives& d, const KerrParams& params) {
  params.validate();
  if (!params.atomic_units() || !params.symmetric())
    throw std::invalid_argument("current_polar: requires mass = spring = 1 and lambda2_x == lambda2_p");
  const PhaseGrid& g = d.w.grid;
  require_same_grid(g, d.wxx.grid, "current_polar");
  require_same_grid(g, d.wpp.grid, "current_polar");
  const double L2 = params.lambda2_p;
  const double q = L2 * params.hbar * params.hbar / 4.0;

  CurrentBundle b = empty_bundle(g, params, 0.0);
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x(i);
    for (int j = 0; j < g.np; ++j) {
      const double p = g.p(j);
      const std::size_t n = g.index(i, j);
      const double speed = (1.0 + L2 * (x * x + p * p)) * d.w.values[n];
      const double lap = q * (d.wxx.values[n] + d.wpp.values[n]);
      b.classical.jx[n] = p * speed;
      b.classical.jp[n] = -x * speed;
      b.quantum.jx[n] = -p * lap;
      b.quantum.jp[n] = x * lap;
    }
  }
  sum_parts(b);
  return b;
}

CurrentBundle current_polar(const ScalarField& w, const KerrParams& params) {
  return current_polar(derivatives_of(w), params);
}

ScalarField divergence(const VectorField& j, int accuracy) {
  ScalarField out = differentiate(j.x_component(), 1, 0, accuracy) + differentiate(j.p_component(), 0, 1, accuracy);
  out.label = "div" + j.label;
  return out;
}

ContinuityReport continuity_residual(const StateVector& state, double t, const PhaseGrid& grid,
                                     const KerrParams& params, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("continuity_residual: dt must be positive");
  const double hbar = params.hbar;
  const ScalarField w_now = wigner_grid(evolve(state, t, params), grid, hbar);
  const ScalarField w_plus = wigner_grid(evolve(state, t + dt, params), grid, hbar);
  const ScalarField w_minus = wigner_grid(evolve(state, t - dt, params), grid, hbar);
  const CurrentBundle bundle = (params.atomic_units() && params.symmetric()) ? current_polar(w_now, params)
                                                                             : current_general(w_now, params, 0.0);
  const ScalarField div = divergence(bundle.total);

  ContinuityReport report;
  report.dt = dt;
  report.residual = ScalarField(grid, "continuity_residual");
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double dwdt = (w_plus.values[n] - w_minus.values[n]) / (2.0 * dt);
    report.residual.values[n] = dwdt + div.values[n];
  }
  report.max_residual = report.residual.max_abs();
  report.max_divergence = div.max_abs();
  return report;
}

namespace {

// Sign changes below this fraction of max|W| are treated as round-off.
constexpr double kSignNoiseFloor = 1e-10;

std::vector<std::pair<int, int>> sign_change_cells(const ScalarField& w) {
  const PhaseGrid& g = w.grid;
  const double floor = kSignNoiseFloor * w.max_abs();
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i + 1 < g.nx; ++i) {
    for (int j = 0; j + 1 < g.np; ++j) {
      const double c[4] = {w.at(i, j), w.at(i + 1, j), w.at(i, j + 1), w.at(i + 1, j + 1)};
      const double lo = *std::min_element(c, c + 4), hi = *std::max_element(c, c + 4);
      if (lo < 0.0 && hi > 0.0 && std::max(-lo, hi) > floor) cells.emplace_back(i, j);
    }
  }
  return cells;
}

}  // namespace

VelocityField velocity_field(const CurrentBundle& bundle, const ScalarField& w, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("velocity_field: threshold must be positive");
  const PhaseGrid& g = w.grid;
  require_same_grid(g, bundle.total.grid, "velocity_field");

  VelocityField v;
  v.threshold = threshold;
  v.w = VectorField(g, "w");
  v.mask.assign(g.size(), 0);
  v.divergence = ScalarField(g, "div_w");
  v.singular_set = sign_change_cells(w);

  const ScalarField div_j = divergence(bundle.total);
  const ScalarField wx = differentiate(w, 1, 0), wp = differentiate(w, 0, 1);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double W = w.values[n];
    if (std::abs(W) <= threshold) continue;
    v.mask[n] = 1;
    const double jx = bundle.total.jx[n], jp = bundle.total.jp[n];
    v.w.jx[n] = jx / W;
    v.w.jp[n] = jp / W;
    v.divergence.values[n] = div_j.values[n] / W - (jx * wx.values[n] + jp * wp.values[n]) / (W * W);
  }

  std::vector<std::uint8_t> near(g.size(), 0);
  constexpr int reach = 2;
  for (const auto& [ci, cj] : v.singular_set)
    for (int i = std::max(0, ci - reach + 1); i <= std::min(g.nx - 1, ci + reach); ++i)
      for (int j = std::max(0, cj - reach + 1); j <= std::min(g.np - 1, cj + reach); ++j) near[g.index(i, j)] = 1;
  for (std::size_t n = 0; n < g.size(); ++n)
    if (near[n] && v.mask[n])
      v.max_divergence_near_singular = std::max(v.max_divergence_near_singular, std::abs(v.divergence.values[n]));
  return v;
}

VelocityField velocity_field(const CurrentBundle& bundle, const ScalarField& w) {
  return velocity_field(bundle, w, kDefaultVelocityThreshold * w.max());
}

LagrangeTerms lagrange_terms(const ScalarField& w, const VelocityField& vel, const KerrParams& params) {
  params.validate();
  if (!params.atomic_units() || !params.symmetric())
    throw std::invalid_argument("lagrange_terms: closed Kerr forms require mass = spring = 1 and lambda2_x == lambda2_p");
  const PhaseGrid& g = w.grid;
  require_same_grid(g, vel.w.grid, "lagrange_terms");

  const ScalarField wx = differentiate(w, 1, 0), wp = differentiate(w, 0, 1);
  const ScalarField lap = differentiate(w, 2, 0) + differentiate(w, 0, 2);
  const ScalarField lap_x = differentiate(lap, 1, 0), lap_p = differentiate(lap, 0, 1);
  const double L2 = params.lambda2_p, hb2 = params.hbar * params.hbar;

  LagrangeTerms out{ScalarField(g, "convective"),
                    ScalarField(g, "expansion"),
                    ScalarField(g, "total_derivative"),
                    ScalarField(g, "total_derivative_closed"),
                    ScalarField(g, "total_derivative_discrepancy"),
                    ScalarField(g, "convective_closed"),
                    vel.mask};
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x(i);
    for (int j = 0; j < g.np; ++j) {
      const double p = g.p(j);
      const std::size_t n = g.index(i, j);
      if (!vel.mask[n]) continue;
      const double W = w.values[n];
      const double dtheta_w = x * wp.values[n] - p * wx.values[n];
      const double dtheta_lap = x * lap_p.values[n] - p * lap_x.values[n];
      out.convective.values[n] = vel.w.jx[n] * wx.values[n] + vel.w.jp[n] * wp.values[n];
      out.expansion.values[n] = W * vel.divergence.values[n];
      out.total_derivative.values[n] = -out.expansion.values[n];
      // W ∂θ(ΔW/W) = ∂θΔW - ΔW ∂θW / W
      out.total_derivative_closed.values[n] = -(L2 * hb2 / 4.0) * (dtheta_lap - lap.values[n] * dtheta_w / W);
      out.discrepancy.values[n] = out.total_derivative.values[n] - out.total_derivative_closed.values[n];
      out.convective_closed.values[n] =
          (L2 * (-(x * x + p * p) + hb2 * lap.values[n] / (4.0 * W)) - 1.0) * dtheta_w;
    }
  }
  return out;
}

StagnationReport stagnation_points(const VectorField& j, double tol, int max_point_extent) {
  const PhaseGrid& g = j.grid;
  StagnationReport report;
  const double peak = j.max_norm();
  std::vector<std::uint8_t> flagged(g.size(), 0);
  if (peak == 0.0) {
    report.degenerate = true;
    std::fill(flagged.begin(), flagged.end(), 1);
  } else {
    const double floor = tol * peak;
    for (std::size_t n = 0; n < g.size(); ++n)
      if (std::hypot(j.jx[n], j.jp[n]) < floor) flagged[n] = 1;
    auto changes_sign = [&](const std::vector<double>& c, int i, int k) {
      const double v[4] = {c[g.index(i, k)], c[g.index(i + 1, k)], c[g.index(i, k + 1)], c[g.index(i + 1, k + 1)]};
      return *std::min_element(v, v + 4) < 0.0 && *std::max_element(v, v + 4) > 0.0;
    };
    for (int i = 0; i + 1 < g.nx; ++i)
      for (int k = 0; k + 1 < g.np; ++k)
        if (changes_sign(j.jx, i, k) && changes_sign(j.jp, i, k))
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) flagged[g.index(i + a, k + b)] = 1;
  }

  std::vector<std::uint8_t> seen(g.size(), 0);
  for (int i0 = 0; i0 < g.nx; ++i0) {
    for (int k0 = 0; k0 < g.np; ++k0) {
      const std::size_t start = g.index(i0, k0);
      if (!flagged[start] || seen[start]) continue;
      std::deque<std::pair<int, int>> queue{{i0, k0}};
      seen[start] = 1;
      int imin = i0, imax = i0, kmin = k0, kmax = k0, count = 0;
      double sx = 0.0, sp = 0.0;
      while (!queue.empty()) {
        const auto [i, k] = queue.front();
        queue.pop_front();
        ++count;
        sx += g.x(i);
        sp += g.p(k);
        imin = std::min(imin, i), imax = std::max(imax, i);
        kmin = std::min(kmin, k), kmax = std::max(kmax, k);
        for (int di = -1; di <= 1; ++di)
          for (int dk = -1; dk <= 1; ++dk) {
            const int ni = i + di, nk = k + dk;
            if (ni < 0 || nk < 0 || ni >= g.nx || nk >= g.np) continue;
            const std::size_t m = g.index(ni, nk);
            if (flagged[m] && !seen[m]) {
              seen[m] = 1;
              queue.emplace_back(ni, nk);
            }
          }
      }
      const StagnationPoint pt{sx / count, sp / count, count};
      if (imax - imin <= max_point_extent && kmax - kmin <= max_point_extent)
        report.points.push_back(pt);
      else
        report.extended.push_back(pt);
    }
  }
  return report;
}

}  // namespace kerrwig

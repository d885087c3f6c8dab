#include "kerrwig/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kerrwig/parallel.hpp"

namespace kerrwig {

PhaseGrid PhaseGrid::symmetric(double half_width, int n) {
  PhaseGrid g{-half_width, half_width, -half_width, half_width, n, n};
  g.validate();
  return g;
}

void PhaseGrid::validate() const {
  if (nx < 33 || np < 33 || nx % 2 == 0 || np % 2 == 0)
    throw std::invalid_argument("PhaseGrid: nx and np must be odd and at least 33");
  if (!(x_max > x_min) || !(p_max > p_min) || !std::isfinite(x_min) || !std::isfinite(x_max) ||
      !std::isfinite(p_min) || !std::isfinite(p_max))
    throw std::invalid_argument("PhaseGrid: empty or non-finite box");
}

ScalarField::ScalarField(PhaseGrid g, std::string lbl)
    : grid(g), values(g.size(), 0.0), label(std::move(lbl)) {}

ScalarField::ScalarField(PhaseGrid g, std::vector<double> v, std::string lbl)
    : grid(g), values(std::move(v)), label(std::move(lbl)) {
  if (values.size() != grid.size()) throw std::invalid_argument("ScalarField: value count does not match grid");
}

double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }
double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::edge_max_abs() const {
  double m = 0.0;
  for (int i = 0; i < grid.nx; ++i) m = std::max({m, std::abs(at(i, 0)), std::abs(at(i, grid.np - 1))});
  for (int j = 0; j < grid.np; ++j) m = std::max({m, std::abs(at(0, j)), std::abs(at(grid.nx - 1, j))});
  return m;
}

double ScalarField::integral() const {
  double total = 0.0;
  for (int i = 0; i < grid.nx; ++i) {
    const double wi = (i == 0 || i == grid.nx - 1) ? 0.5 : 1.0;
    double row = 0.0;
    for (int j = 0; j < grid.np; ++j) {
      const double wj = (j == 0 || j == grid.np - 1) ? 0.5 : 1.0;
      row += wj * at(i, j);
    }
    total += wi * row;
  }
  return total * grid.hx() * grid.hp();
}

VectorField::VectorField(PhaseGrid g, std::string lbl)
    : grid(g), jx(g.size(), 0.0), jp(g.size(), 0.0), label(std::move(lbl)) {}

ScalarField VectorField::x_component() const { return ScalarField(grid, jx, label + "_x"); }
ScalarField VectorField::p_component() const { return ScalarField(grid, jp, label + "_p"); }

double VectorField::max_norm() const {
  double m = 0.0;
  for (std::size_t k = 0; k < jx.size(); ++k) m = std::max(m, std::hypot(jx[k], jp[k]));
  return m;
}

void require_same_grid(const PhaseGrid& a, const PhaseGrid& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "operator+");
  ScalarField out(a.grid, a.label);
  for (std::size_t k = 0; k < a.values.size(); ++k) out.values[k] = a.values[k] + b.values[k];
  return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "operator-");
  ScalarField out(a.grid, a.label);
  for (std::size_t k = 0; k < a.values.size(); ++k) out.values[k] = a.values[k] - b.values[k];
  return out;
}

ScalarField operator*(double s, const ScalarField& a) {
  ScalarField out(a.grid, a.label);
  for (std::size_t k = 0; k < a.values.size(); ++k) out.values[k] = s * a.values[k];
  return out;
}

double max_abs_difference(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "max_abs_difference");
  double m = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
  return m;
}

std::vector<double> fd_weights(int order, const std::vector<double>& nodes) {
  const int n = static_cast<int>(nodes.size());
  if (order < 0 || order >= n) throw std::invalid_argument("fd_weights: need more nodes than the derivative order");
  // c[j][k]: weight of node j for the k-th derivative.
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][order];
  return w;
}

namespace {

// Stencils for one derivative order along one axis of length `len`.
struct AxisStencils {
  int central_half = 0;
  std::vector<double> central;                // offsets -half..half
  std::vector<std::vector<double>> edge_lo;   // for positions 0..half-1, nodes 0..width-1
  std::vector<std::vector<double>> edge_hi;   // for positions len-1-k, nodes len-width..len-1
  int edge_width = 0;
};

AxisStencils make_stencils(int order, int accuracy, int len) {
  AxisStencils s;
  // Symmetric stencils gain one order for free on even derivatives.
  const int central_points = 2 * ((order + 1) / 2) - 1 + accuracy;
  s.central_half = central_points / 2;
  s.edge_width = order + accuracy;
  if (len < std::max(central_points, s.edge_width))
    throw std::invalid_argument("differentiate: grid smaller than finite-difference stencil");
  std::vector<double> nodes;
  for (int k = -s.central_half; k <= s.central_half; ++k) nodes.push_back(k);
  s.central = fd_weights(order, nodes);
  for (int pos = 0; pos < s.central_half; ++pos) {
    std::vector<double> lo, hi;
    for (int k = 0; k < s.edge_width; ++k) {
      lo.push_back(static_cast<double>(k - pos));
      hi.push_back(static_cast<double>(pos - k));
    }
    s.edge_lo.push_back(fd_weights(order, lo));
    s.edge_hi.push_back(fd_weights(order, hi));
  }
  return s;
}

// Derivative of `order` along x (axis 0) or p (axis 1).
std::vector<double> derive_axis(const std::vector<double>& f, const PhaseGrid& g, int axis, int order,
                                int accuracy) {
  if (order == 0) return f;
  const int len = axis == 0 ? g.nx : g.np;
  const double h = axis == 0 ? g.hx() : g.hp();
  const AxisStencils st = make_stencils(order, accuracy, len);
  const double scale = 1.0 / std::pow(h, order);
  std::vector<double> out(f.size(), 0.0);
  const int other = axis == 0 ? g.np : g.nx;
  parallel_for(0, static_cast<std::size_t>(other), [&](std::size_t line) {
    auto value = [&](int k) {
      return axis == 0 ? f[g.index(k, static_cast<int>(line))] : f[g.index(static_cast<int>(line), k)];
    };
    for (int k = 0; k < len; ++k) {
      double acc = 0.0;
      if (k < st.central_half) {
        const auto& w = st.edge_lo[static_cast<std::size_t>(k)];
        for (int m = 0; m < st.edge_width; ++m) acc += w[static_cast<std::size_t>(m)] * value(m);
      } else if (k >= len - st.central_half) {
        const int pos = len - 1 - k;
        const auto& w = st.edge_hi[static_cast<std::size_t>(pos)];
        for (int m = 0; m < st.edge_width; ++m) acc += w[static_cast<std::size_t>(m)] * value(len - 1 - m);
      } else {
        for (int m = -st.central_half; m <= st.central_half; ++m)
          acc += st.central[static_cast<std::size_t>(m + st.central_half)] * value(k + m);
      }
      const std::size_t idx = axis == 0 ? g.index(k, static_cast<int>(line)) : g.index(static_cast<int>(line), k);
      out[idx] = acc * scale;
    }
  });
  return out;
}

}  // namespace

ScalarField differentiate(const ScalarField& field, int dx_order, int dp_order, int accuracy) {
  if (dx_order < 0 || dp_order < 0 || dx_order + dp_order > 3)
    throw std::invalid_argument("differentiate: total derivative order must lie in [0, 3]");
  if (accuracy < 2 || accuracy % 2 != 0) throw std::invalid_argument("differentiate: accuracy must be even and >= 2");
  auto values = derive_axis(field.values, field.grid, 0, dx_order, accuracy);
  values = derive_axis(values, field.grid, 1, dp_order, accuracy);
  std::string label = "d" + field.label;
  if (dx_order) label += "_x" + std::to_string(dx_order);
  if (dp_order) label += "_p" + std::to_string(dp_order);
  return ScalarField(field.grid, std::move(values), label);
}

Interpolator::Interpolator(const ScalarField& field)
    : grid_(field.grid),
      f_(field.values),
      fx_(differentiate(field, 1, 0).values),
      fp_(differentiate(field, 0, 1).values),
      fxp_(differentiate(field, 1, 1).values) {}

double Interpolator::operator()(double x, double p) const {
  if (!grid_.contains(x, p)) throw std::out_of_range("interpolate: point outside grid box");
  const double hx = grid_.hx(), hp = grid_.hp();
  const double sx = (x - grid_.x_min) / hx;
  const double sp = (p - grid_.p_min) / hp;
  const int i = std::clamp(static_cast<int>(std::floor(sx)), 0, grid_.nx - 2);
  const int j = std::clamp(static_cast<int>(std::floor(sp)), 0, grid_.np - 2);
  const double u = sx - i;
  const double v = sp - j;

  // Cubic Hermite basis on [0, 1].
  auto basis = [](double t, double b[4]) {
    const double t2 = t * t, t3 = t2 * t;
    b[0] = 2 * t3 - 3 * t2 + 1;
    b[1] = t3 - 2 * t2 + t;
    b[2] = -2 * t3 + 3 * t2;
    b[3] = t3 - t2;
  };
  double bu[4], bv[4];
  basis(u, bu);
  basis(v, bv);

  double result = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const std::size_t k = grid_.index(i + a, j + b);
      const double wu0 = bu[2 * a], wu1 = bu[2 * a + 1] * hx;
      const double wv0 = bv[2 * b], wv1 = bv[2 * b + 1] * hp;
      result += wu0 * wv0 * f_[k] + wu1 * wv0 * fx_[k] + wu0 * wv1 * fp_[k] + wu1 * wv1 * fxp_[k];
    }
  }
  return result;
}

double interpolate(const ScalarField& field, double x, double p) { return Interpolator(field)(x, p); }

}  // namespace kerrwig

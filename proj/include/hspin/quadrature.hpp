#ifndef HSPIN_QUADRATURE_HPP
#define HSPIN_QUADRATURE_HPP

#include <hspin/spin_group.hpp>
#include <hspin/spinor.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hspin {

// Probability-normalized rule on the unit sphere in R^n; nodes stay away
// from -e_n so the group section below is defined at every node.
struct QuadratureRule {
  int n = 0;
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;
};

// Plain quadrature over R^{n-1}; weights carry the chart Jacobian, so
// sum_i w_i f(v_i) approximates the flat integral of a decaying f.
struct ChartRule {
  int n = 0;
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;
};

namespace detail {

inline void gauss_legendre(int q, std::vector<double>& x,
                           std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(q, q);
  for (int k = 1; k < q; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k - 1, k) = b;
    J(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(q);
  w.resize(q);
  for (int i = 0; i < q; ++i) {
    x[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    w[i] = 2.0 * v0 * v0;
  }
}

constexpr double quad_pi = 3.14159265358979323846;

} // namespace detail

// Recursive polar product rule. The polar variable is sampled through the
// half angle, which keeps every integrand built from the group section
// analytic in the quadrature variable, so smooth integrands converge
// spectrally; weights are normalized to total mass 1.
inline QuadratureRule product_rule(int n, int order) {
  if (n < 2)
    throw std::invalid_argument("product_rule: need n >= 2");
  if (order < 2)
    throw std::invalid_argument("product_rule: need order >= 2");
  QuadratureRule rule;
  rule.n = n;
  if (n == 2) {
    int M = 2 * order;
    rule.nodes.reserve(M);
    rule.weights.assign(M, 1.0 / M);
    for (int k = 0; k < M; ++k) {
      // Half-step offset keeps the antipode -e_2 off the grid.
      double phi = 2.0 * detail::quad_pi * (k + 0.5) / M;
      Eigen::VectorXd x(2);
      x << std::sin(phi), std::cos(phi);
      rule.nodes.push_back(std::move(x));
    }
    return rule;
  }
  QuadratureRule sub = product_rule(n - 1, order);
  std::vector<double> gx, gw;
  detail::gauss_legendre(order, gx, gw);
  rule.nodes.reserve(std::size_t(order) * sub.nodes.size());
  rule.weights.reserve(std::size_t(order) * sub.nodes.size());
  double total = 0.0;
  for (int i = 0; i < order; ++i) {
    double psi = detail::quad_pi * 0.25 * (gx[i] + 1.0);
    double theta = 2.0 * psi;
    double wpol = gw[i] * std::pow(std::sin(theta), n - 2);
    for (std::size_t j = 0; j < sub.nodes.size(); ++j) {
      Eigen::VectorXd x(n);
      x.head(n - 1) = std::sin(theta) * sub.nodes[j];
      x(n - 1) = std::cos(theta);
      rule.nodes.push_back(std::move(x));
      double w = wpol * sub.weights[j];
      rule.weights.push_back(w);
      total += w;
    }
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

// Polar rule with independent resolutions: polar_order nodes in the last
// coordinate and a coarser inner-sphere rule for the remaining directions.
// Integrands whose stiff dependence enters only through x_n (every radial
// kernel built from the group section is of this kind, since the inner
// directions carry only low-degree matrix coefficients) converge at the
// polar resolution while the node count stays near-linear in polar_order.
inline QuadratureRule polar_refined_rule(int n, int polar_order,
                                         int inner_order) {
  if (n < 2)
    throw std::invalid_argument("polar_refined_rule: need n >= 2");
  if (polar_order < 2 || inner_order < 2)
    throw std::invalid_argument("polar_refined_rule: need orders >= 2");
  if (n == 2) return product_rule(2, polar_order);
  QuadratureRule rule;
  rule.n = n;
  QuadratureRule sub = product_rule(n - 1, inner_order);
  std::vector<double> gx, gw;
  detail::gauss_legendre(polar_order, gx, gw);
  rule.nodes.reserve(std::size_t(polar_order) * sub.nodes.size());
  rule.weights.reserve(std::size_t(polar_order) * sub.nodes.size());
  double total = 0.0;
  for (int i = 0; i < polar_order; ++i) {
    double psi = detail::quad_pi * 0.25 * (gx[i] + 1.0);
    double theta = 2.0 * psi;
    double wpol = gw[i] * std::pow(std::sin(theta), n - 2);
    for (std::size_t j = 0; j < sub.nodes.size(); ++j) {
      Eigen::VectorXd x(n);
      x.head(n - 1) = std::sin(theta) * sub.nodes[j];
      x(n - 1) = std::cos(theta);
      rule.nodes.push_back(std::move(x));
      double w = wpol * sub.weights[j];
      rule.weights.push_back(w);
      total += w;
    }
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

// Radial-angular rule on R^{n-1}: a double-exponential substitution
// r = scale * exp((pi/2) sinh u) in the radius handles algebraic tails of
// any fractional order spectrally, while the sphere rule above covers the
// direction; scale sets the length scale of the node cloud.
inline ChartRule boundary_chart_rule(int n, int order, double scale) {
  if (n < 2)
    throw std::invalid_argument("boundary_chart_rule: need n >= 2");
  if (order < 2)
    throw std::invalid_argument("boundary_chart_rule: need order >= 2");
  if (!(scale > 0.0))
    throw std::invalid_argument("boundary_chart_rule: need scale > 0");
  const int d = n - 1;
  const int radial = std::max(32, 2 * order);
  const double cutoff = 4.0;
  const double h = 2.0 * cutoff / (radial - 1);
  std::vector<double> rr(radial), rw(radial);
  for (int k = 0; k < radial; ++k) {
    double u = -cutoff + k * h;
    double r = scale * std::exp(detail::quad_pi * 0.5 * std::sinh(u));
    double w = detail::quad_pi * 0.5 * std::cosh(u) * r * h;
    if (k == 0 || k == radial - 1) w *= 0.5;
    rr[k] = r;
    rw[k] = w;
  }
  ChartRule rule;
  rule.n = n;
  if (d == 1) {
    rule.nodes.reserve(2 * radial);
    rule.weights.reserve(2 * radial);
    for (int k = 0; k < radial; ++k)
      for (double s : {-1.0, 1.0}) {
        Eigen::VectorXd v(1);
        v << s * rr[k];
        rule.nodes.push_back(std::move(v));
        rule.weights.push_back(rw[k]);
      }
    return rule;
  }
  QuadratureRule ang = product_rule(d, order);
  double surface = 2.0 * std::pow(detail::quad_pi, d / 2.0) /
                   std::tgamma(d / 2.0);
  rule.nodes.reserve(std::size_t(radial) * ang.nodes.size());
  rule.weights.reserve(std::size_t(radial) * ang.nodes.size());
  for (int k = 0; k < radial; ++k) {
    double shell = rw[k] * std::pow(rr[k], d - 1) * surface;
    for (std::size_t j = 0; j < ang.nodes.size(); ++j) {
      rule.nodes.push_back(rr[k] * ang.nodes[j]);
      rule.weights.push_back(shell * ang.weights[j]);
    }
  }
  return rule;
}

// Total mass of (1+|v|^2)^{-(n-1)} over R^{n-1}; dividing by it makes the
// boundary density a probability measure matching the normalized sphere.
inline double kmeasure_normalizer(int n) {
  if (n < 2)
    throw std::invalid_argument("kmeasure_normalizer: need n >= 2");
  double d = n - 1.0;
  return std::pow(detail::quad_pi, d / 2.0) * std::tgamma(d / 2.0) /
         std::tgamma(d);
}

// Section of the sphere into the compact spin group: an even unit-norm
// element rotating e_n to x, undefined only at the antipode -e_n.
inline Multivector section_k(const Eigen::VectorXd& x) {
  return rotor_from_pole(int(x.size()), x);
}

// Deterministic weighted sum of a vector- or matrix-valued node function;
// the fixed summation order keeps reports byte-reproducible.
template <class Rule, class F>
auto integrate_covariant(const Rule& rule, F&& f) {
  if (rule.nodes.empty())
    throw std::invalid_argument("integrate_covariant: empty rule");
  auto acc = f(rule.nodes[0]);
  acc *= rule.weights[0];
  for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
    auto val = f(rule.nodes[i]);
    val *= rule.weights[i];
    acc += val;
  }
  return acc;
}

} // namespace hspin

#endif

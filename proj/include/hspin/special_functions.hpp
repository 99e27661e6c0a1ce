#ifndef HSPIN_SPECIAL_FUNCTIONS_HPP
#define HSPIN_SPECIAL_FUNCTIONS_HPP

#include <hspin/spinor.hpp>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace hspin {

namespace detail {

inline void ensure_gsl_quiet() {
  static const int once = [] {
    gsl_set_error_handler_off();
    return 0;
  }();
  (void)once;
}

inline bool near_nonpositive_integer(cplx z, double tol = 1e-9) {
  double r = std::round(z.real());
  return r <= 0.5 && std::abs(z.real() - r) < tol && std::abs(z.imag()) < tol;
}

constexpr double pi_value = 3.14159265358979323846;

} // namespace detail

// log Gamma(z); the imaginary part is only defined modulo 2*pi, which is
// harmless because every consumer exponentiates a sum of these.
inline cplx log_gamma(cplx z) {
  detail::ensure_gsl_quiet();
  if (detail::near_nonpositive_integer(z))
    throw std::domain_error("log_gamma: pole at nonpositive integer near " +
                            std::to_string(z.real()));
  if (z.real() >= 0.5) {
    gsl_sf_result lnr, arg;
    if (gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg) != 0)
      throw std::runtime_error("log_gamma: evaluation failed");
    return {lnr.val, arg.val};
  }
  // Reflection keeps the evaluation in the well conditioned half plane.
  cplx s = std::sin(detail::pi_value * z);
  return std::log(cplx(detail::pi_value)) - std::log(s) - log_gamma(1.0 - z);
}

inline cplx gamma_complex(cplx z) { return std::exp(log_gamma(z)); }

namespace detail {

// Gauss series at argument |w| < 1; truncates on two consecutive small terms
// so alternating tails cannot fake convergence.
inline cplx gauss_series(cplx a, cplx b, cplx c, double w) {
  if (near_nonpositive_integer(c))
    throw std::domain_error("hyp2f1: lower parameter at a pole");
  cplx term = 1.0, sum = 1.0;
  int small_run = 0;
  for (int k = 0; k < 200000; ++k) {
    term *= (a + double(k)) * (b + double(k)) /
            ((c + double(k)) * double(k + 1)) * w;
    sum += term;
    if (std::abs(term) < 1e-16 * std::max(1.0, std::abs(sum))) {
      if (++small_run == 2) return sum;
    } else {
      small_run = 0;
    }
  }
  throw std::runtime_error("hyp2f1: series did not converge");
}

} // namespace detail

// Gauss hypergeometric function, restricted to real argument z <= 0; the
// Pfaff substitution w = z/(z-1) keeps the series argument inside [0,1).
inline cplx hyp2f1(cplx a, cplx b, cplx c, double z) {
  if (z > 0.0)
    throw std::domain_error("hyp2f1: argument must be <= 0");
  if (detail::near_nonpositive_integer(c))
    throw std::domain_error("hyp2f1: lower parameter at a pole");
  if (z == 0.0) return 1.0;
  if (z < -0.5) {
    double w = z / (z - 1.0);
    return std::pow(cplx(1.0 - z), -a) * detail::gauss_series(a, c - b, c, w);
  }
  return detail::gauss_series(a, b, c, z);
}

// Constant governing the large-t transition of the radial profile below:
//   2^{a+b+1-il} Gamma(a+1) Gamma(il) / (Gamma((il+a+b+1)/2) Gamma((il+a-b+1)/2)).
inline cplx c_simple(cplx alpha, cplx beta, cplx lambda) {
  const cplx il = cplx(0.0, 1.0) * lambda;
  const cplx rho = alpha + beta + 1.0;
  const cplx num1 = alpha + 1.0, num2 = il;
  const cplx den1 = (il + rho) * 0.5, den2 = (il + alpha - beta + 1.0) * 0.5;
  for (cplx arg : {num1, num2, den1, den2})
    if (detail::near_nonpositive_integer(arg))
      throw std::domain_error("c_simple: Gamma factor at a pole");
  cplx ln = (rho - il) * std::log(2.0) + log_gamma(num1) + log_gamma(num2) -
            log_gamma(den1) - log_gamma(den2);
  return std::exp(ln);
}

namespace detail {

// Small-t branch: direct hypergeometric evaluation at -sinh^2 t.
inline cplx jacobi_phi_series(cplx alpha, cplx beta, cplx lambda, double t) {
  cplx rho = alpha + beta + 1.0;
  cplx il = cplx(0.0, 1.0) * lambda;
  double sh = std::sinh(t);
  return hyp2f1((rho + il) * 0.5, (rho - il) * 0.5, alpha + 1.0, -sh * sh);
}

// Large-t branch: two decaying exponential branches with transition
// coefficients, each corrected by a hypergeometric factor in 1/sinh^2 t.
inline cplx jacobi_phi_asymptotic(cplx alpha, cplx beta, cplx lambda,
                                  double t) {
  cplx rho = alpha + beta + 1.0;
  double sh = std::sinh(t);
  double z = -1.0 / (sh * sh);
  auto branch = [&](cplx nu) {
    cplx inu = cplx(0.0, 1.0) * nu;
    return c_simple(alpha, beta, nu) *
           std::exp((inu - rho) * std::log(2.0 * sh)) *
           hyp2f1((rho - inu) * 0.5, (beta - alpha + 1.0 - inu) * 0.5,
                  1.0 - inu, z);
  };
  return branch(lambda) + branch(-lambda);
}

inline bool asymptotic_branch_defined(cplx lambda) {
  cplx il = cplx(0.0, 1.0) * lambda;
  // An integer i*lambda collides with a pole in either branch.
  return !(std::abs(il.imag()) < 1e-8 &&
           std::abs(il.real() - std::round(il.real())) < 1e-8) &&
         std::abs(il) > 1e-8;
}

} // namespace detail

// Radial hypergeometric profile phi_lambda^{(alpha,beta)}(t), normalized to
// 1 at t = 0 and even in lambda.
inline cplx jacobi_phi(cplx alpha, cplx beta, cplx lambda, double t) {
  if (t < 0.0)
    throw std::domain_error("jacobi_phi: t must be >= 0");
  if (detail::near_nonpositive_integer(alpha + 1.0))
    throw std::domain_error("jacobi_phi: alpha at a negative integer");
  if (t == 0.0) return 1.0;
  if (t < 1.5) return detail::jacobi_phi_series(alpha, beta, lambda, t);
  if (!detail::asymptotic_branch_defined(lambda)) {
    if (t <= 4.0) return detail::jacobi_phi_series(alpha, beta, lambda, t);
    throw std::runtime_error(
        "jacobi_phi: integer spectral parameter beyond the series range");
  }
  return detail::jacobi_phi_asymptotic(alpha, beta, lambda, t);
}

// Boundary transition constant for the full module in rank n; one formula
// covers both parities and the value never depends on the half-spin labels.
// It is pinned numerically by the boundary integral and the large-time
// limit of the transform, both regression-tested downstream.
inline cplx c_tau_closed(int n, cplx lambda) {
  if (n < 2 || n > 16)
    throw std::invalid_argument("c_tau_closed: n out of range");
  return 0.5 * c_simple(cplx(n * 0.5 - 1.0), cplx(n * 0.5), 2.0 * lambda);
}

inline cplx c_tau_closed(const RepLabel& lab, cplx lambda) {
  lab.validate();
  return c_tau_closed(lab.n, lambda);
}

// Envelope constant: the supremum over t >= 0 of the weighted profile
// e^{(rho-s)t} phi_{-is}^{(rho-1/2,-1/2)}(t) with s = Re(i lambda), taken
// over a logarithmic grid plus the exact tail limit.
inline double gamma_lambda_const(int n, cplx lambda) {
  const double s = (cplx(0.0, 1.0) * lambda).real();
  if (s <= 0.0)
    throw std::domain_error("gamma_lambda_const: needs Re(i lambda) > 0");
  const double rho = (n - 1) * 0.5;
  const cplx alpha(rho - 0.5), beta(-0.5);
  const cplx nu(0.0, -s);
  double best = 1.0;
  for (int k = 0; k < 399; ++k) {
    double t = 1e-3 * std::pow(3e4, k / 398.0);
    double v = std::abs(jacobi_phi(alpha, beta, nu, t));
    best = std::max(best, std::exp((rho - s) * t) * v);
  }
  return std::max(best, std::abs(c_simple(alpha, beta, nu)));
}

// Spectral parameter with the decay validation required by transforms,
// limits, and norm statements.
struct SpectralParameter {
  cplx lambda{0.0, -1.0};
  int n = 3;

  double rho() const { return (n - 1) * 0.5; }
  double decay() const { return (cplx(0.0, 1.0) * lambda).real(); }
  void validate() const {
    if (n < 2 || n > 16)
      throw std::invalid_argument("SpectralParameter: n out of range");
    if (decay() <= 0.0)
      throw std::domain_error("SpectralParameter: needs Re(i lambda) > 0");
  }
};

} // namespace hspin

#endif

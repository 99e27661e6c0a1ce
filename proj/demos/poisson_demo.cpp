/* End-to-end tour: start from a coherent boundary datum on the sphere,
   apply the transform, and check the three ways of computing the scalar
   boundary constant against each other along the way. */

#include <hspin/poisson.hpp>

#include <cstdio>
#include <random>

using namespace hspin;

int main() {
  const int n = 3;
  const cplx lambda(0.0, -0.7);
  RepLabel lab{n, HalfLabel::full, HalfLabel::plus};
  std::printf("hyperbolic dimension n = %d, spinor label (%s, %s), "
              "lambda = %.2f%+.2fi\n\n",
              n, half_label_name(lab.tau).c_str(),
              half_label_name(lab.sigma).c_str(),
              lambda.real(), lambda.imag());

  /* radial matrix vs its closed scalar forms */
  std::printf("spherical function, quadrature vs closed form\n");
  for (double t : {0.4, 0.9, 1.6}) {
    Eigen::MatrixXcd Phi = spherical_function_auto(lab, lambda, t, 28);
    std::vector<cplx> comp = scalar_components(lab, Phi);
    std::vector<cplx> want = spherical_closed_form(lab, lambda, t);
    double rel = 0.0;
    for (std::size_t b = 0; b < comp.size(); ++b)
      rel = std::max(rel, std::abs(comp[b] - want[b]) / std::abs(want[b]));
    std::printf("  t = %.1f   block values (%.6f%+.6fi, %.6f%+.6fi)   "
                "rel err %.1e\n",
                t, comp[0].real(), comp[0].imag(), comp[1].real(),
                comp[1].imag(), rel);
  }

  /* the boundary constant three ways */
  cplx closed = c_tau_closed(lab, lambda);
  ChartRule chart = boundary_chart_rule(n, 40, 1.0);
  std::vector<cplx> nb = scalar_components(lab, cfun_by_nbar(lab, lambda, chart));
  LimitEstimate fat = cfun_by_fatou(lab, lambda, {10.0, 12.0, 14.0}, 28);
  std::printf("\nboundary constant\n");
  std::printf("  closed form        %.10f%+.10fi\n", closed.real(),
              closed.imag());
  std::printf("  chart integral     %.10f%+.10fi\n", nb[0].real(),
              nb[0].imag());
  std::printf("  weighted limit     %.10f%+.10fi  (converged: %s)\n",
              fat.value.real(), fat.value.imag(),
              fat.converged ? "yes" : "no");

  /* transform of a two-term coherent datum: growth against the sandwich */
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  Signature sig = lorentz_sig(n);
  std::vector<CoherentTerm> terms;
  for (int j = 0; j < 2; ++j) {
    CoherentTerm term;
    term.weight = cplx(g(rng), g(rng));
    term.v = Eigen::VectorXcd::NullaryExpr(
        dim_tau(lab), [&](Eigen::Index) { return cplx(g(rng), g(rng)); });
    Multivector b = Multivector::blade(sig, {1, 2}) * cplx(g(rng)) +
                    Multivector::blade(sig, {1, 3}) * cplx(g(rng)) +
                    Multivector::blade(sig, {2, 3}) * cplx(g(rng));
    term.k0 = exp_bivector(b);
    terms.push_back(term);
  }
  BoundaryDatum f(lab, terms);
  QuadratureRule krule = product_rule(n, 24);
  double kap = kappa_const(n);
  double gam = gamma_lambda_const(n, lambda);
  std::printf("\ntwo-sided norm bounds for a coherent datum, p = 2\n");
  double fnorm = lp_norm(f, 2.0, krule);
  double hnorm = hardy_norm(lambda, f, 2.0, {0.5, 1.0, 2.0, 4.0, 8.0}, 24);
  std::printf("  lower  %.8f  <=  transform norm  %.8f  <=  upper  %.8f\n",
              kap * std::abs(closed) * fnorm, hnorm, kap * gam * fnorm);

  /* read the datum back off the transform */
  std::printf("\ninversion from a single far slice\n");
  for (double t : {6.0, 8.0, 10.0}) {
    InversionResult inv = boundary_inversion(lambda, f, t, 28, 10);
    std::printf("  slice t = %4.1f   relative L2 error %.2e\n", t,
                inv.rel_l2);
  }
  return 0;
}

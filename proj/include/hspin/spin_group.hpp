#ifndef HSPIN_SPIN_GROUP_HPP
#define HSPIN_SPIN_GROUP_HPP

#include <hspin/clifford.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hspin {

/* Group elements are even multivectors of unit spinorial norm.  In Cl(1,n)
   generator 0 is the timelike e0 and generators 1..n span the Euclidean
   factor, so Spin(n) sits inside as the even elements without index 0. */
using SpinElement = Multivector;

inline Signature lorentz_sig(int n) {
  Signature s{1, n};
  s.validate();
  return s;
}

inline Signature euclid_sig(int n) {
  Signature s{0, n};
  s.validate();
  return s;
}

/* Inverse of a unit-norm element: conj(g) g = N(g) = 1. */
inline Multivector spin_inverse(const Multivector& g) {
  return clifford_conjugation(g);
}

inline void spin_check(const Multivector& g, double tol = 1e-8) {
  if (!g.is_even())
    throw std::invalid_argument("spin element must be even");
  Multivector nrm = spinorial_norm(g);
  if (std::abs(nrm.coeff(0) - 1.0) > tol || nrm.inf_norm_off_scalar() > tol)
    throw std::invalid_argument("spin element must have unit spinorial norm");
}

/* exp of a bivector by scaling and squaring; the series alone converges for
   any argument but loses digits once the 1-norm passes ~1. */
inline Multivector exp_bivector(const Multivector& b, double tol = 1e-17) {
  if (!b.empty() && !b.is_grade(2))
    throw std::invalid_argument("exp_bivector: argument must be grade 2");
  double amp = 0.0;
  for (const auto& [mask, c] : b.terms()) amp += std::abs(c);
  int s = 0;
  while (amp > 0.5) {
    amp *= 0.5;
    ++s;
  }
  Multivector bs = b * cplx(std::ldexp(1.0, -s), 0.0);
  Multivector sum = Multivector::scalar(b.sig(), 1.0);
  Multivector term = sum;
  for (int k = 1; k <= 60; ++k) {
    term = geometric_product(term, bs) * cplx(1.0 / k, 0.0);
    sum = sum + term;
    if (term.inf_norm() < tol) break;
    if (k == 60)
      throw std::runtime_error("exp_bivector: series did not converge");
  }
  for (int i = 0; i < s; ++i) sum = geometric_product(sum, sum);
  return sum.pruned(1e-300);
}

/* One-parameter boost subgroup: a_t = exp((t/2) e0 en), rapidity t. */
inline Multivector a_t(int n, double t) {
  Signature sig = lorentz_sig(n);
  Multivector g = Multivector::scalar(sig, std::cosh(t / 2));
  g.set_coeff((1u << 0) | (1u << n), std::sinh(t / 2));
  return g;
}

/* Unipotent factors: 1 + (1/2) sum v_j e_j (e0 +- en).  Both are exact
   exponentials since the generators square to zero. */
inline Multivector nbar(int n, const Eigen::VectorXd& v) {
  if (v.size() != n - 1) throw std::invalid_argument("nbar: v must have size n-1");
  Signature sig = lorentz_sig(n);
  Multivector g = Multivector::scalar(sig, 1.0);
  for (int j = 1; j < n; ++j) {
    /* e_j(e0+en) = -e0 e_j + e_j en in canonical order */
    g.set_coeff((1u << 0) | (1u << j), -0.5 * v(j - 1));
    g.set_coeff((1u << j) | (1u << n), 0.5 * v(j - 1));
  }
  return g;
}

inline Multivector n_plus(int n, const Eigen::VectorXd& v) {
  if (v.size() != n - 1)
    throw std::invalid_argument("n_plus: v must have size n-1");
  Signature sig = lorentz_sig(n);
  Multivector g = Multivector::scalar(sig, 1.0);
  for (int j = 1; j < n; ++j) {
    /* e_j(e0-en) = -e0 e_j - e_j en */
    g.set_coeff((1u << 0) | (1u << j), -0.5 * v(j - 1));
    g.set_coeff((1u << j) | (1u << n), -0.5 * v(j - 1));
  }
  return g;
}

/* Matrix of x -> g x g^{-1} on the generator span, columns indexed by
   generators.  Requires an even unit-norm element so the grade is preserved. */
inline Eigen::MatrixXd vector_rep(const Multivector& g) {
  spin_check(g);
  const Signature& sig = g.sig();
  int d = sig.total();
  Multivector ginv = spin_inverse(g);
  Eigen::MatrixXd R(d, d);
  for (int j = 0; j < d; ++j) {
    Multivector img = geometric_product(
        geometric_product(g, Multivector::basis_vector(sig, j)), ginv);
    for (int i = 0; i < d; ++i) {
      cplx c = img.coeff(1u << i);
      if (std::abs(c.imag()) > 1e-9)
        throw std::runtime_error("vector_rep: non-real action");
      R(i, j) = c.real();
      img.set_coeff(1u << i, 0.0);
    }
    if (img.inf_norm() > 1e-9)
      throw std::runtime_error("vector_rep: image not grade 1");
  }
  return R;
}

/* Product of unit vectors given by generator coordinates; an even count is
   required so the result lies in the spin group. */
inline Multivector spin_from_vectors(const Signature& sig,
                                     const std::vector<Eigen::VectorXd>& vecs) {
  if (vecs.size() % 2 != 0)
    throw std::invalid_argument("spin_from_vectors: need an even number of vectors");
  Multivector g = Multivector::scalar(sig, 1.0);
  for (const auto& v : vecs) {
    if (v.size() != sig.total())
      throw std::invalid_argument("spin_from_vectors: coordinate size mismatch");
    Multivector x(sig);
    for (int i = 0; i < sig.total(); ++i) x.set_coeff(1u << i, v(i));
    cplx q = geometric_product(x, x).coeff(0);
    if (std::abs(std::abs(q.real()) - 1.0) > 1e-9 || std::abs(q.imag()) > 1e-12)
      throw std::invalid_argument("spin_from_vectors: vector is not unit");
    g = geometric_product(g, x);
  }
  return g;
}

namespace detail {

/* Pick the lift branch: nearest to ref if given, else first nonzero
   coefficient positive. */
inline Multivector canonical_sign(const Multivector& g, const Multivector* ref) {
  Multivector neg = g * cplx(-1.0, 0.0);
  if (ref) {
    return ((g - *ref).inf_norm() <= (neg - *ref).inf_norm()) ? g : neg;
  }
  if (g.terms().empty()) return g;
  cplx c = g.terms().front().second;
  if (c.real() < 0.0 || (std::abs(c.real()) < 1e-14 && c.imag() < 0.0))
    return neg;
  return g;
}

}  // namespace detail

/* Lift of a rotation matrix acting on generators first..first+d-1 to the spin
   group, via factorization into an even number of hyperplane reflections. */
inline Multivector so_lift(const Signature& sig, const Eigen::MatrixXd& R,
                           int first, const Multivector* ref = nullptr) {
  int d = static_cast<int>(R.rows());
  if (R.cols() != d || first < 0 || first + d > sig.total())
    throw std::invalid_argument("so_lift: matrix does not fit the signature");
  if (first < sig.plus)
    throw std::invalid_argument("so_lift: rotation block must be Euclidean");
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  if ((R.transpose() * R - I).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("so_lift: matrix is not orthogonal");
  if (std::abs(R.determinant() - 1.0) > 1e-8)
    throw std::invalid_argument("so_lift: determinant must be +1");

  Eigen::MatrixXd M = R;
  std::vector<Eigen::VectorXd> us;
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd x = M.col(j);
    if ((x - I.col(j)).norm() < 1e-12) continue;
    if (x(j) <= 0.5) {
      Eigen::VectorXd u = (x - I.col(j)).normalized();
      M -= 2.0 * u * (u.transpose() * M);
      us.push_back(u);
    } else {
      /* near-identity column: x - e_j is cancellation-prone, so reflect
         through x + e_j (norm >= sqrt(3) here) onto -e_j, then through the
         axis itself; both steps are exact where the single step loses all
         precision */
      Eigen::VectorXd u = (x + I.col(j)).normalized();
      M -= 2.0 * u * (u.transpose() * M);
      us.push_back(u);
      Eigen::VectorXd w = I.col(j);
      M -= 2.0 * w * (w.transpose() * M);
      us.push_back(w);
    }
  }
  if ((M - I).cwiseAbs().maxCoeff() > 1e-9)
    throw std::runtime_error("so_lift: reflection sweep failed");
  if (us.size() % 2 != 0)
    throw std::runtime_error("so_lift: odd reflection count at det +1");

  Multivector g = Multivector::scalar(sig, 1.0);
  for (const auto& u : us) {
    Multivector x(sig);
    for (int i = 0; i < d; ++i) x.set_coeff(1u << (first + i), u(i));
    g = geometric_product(g, x);
  }
  return detail::canonical_sign(g.pruned(1e-300), ref);
}

inline Multivector so_lift(const Signature& sig, const Eigen::MatrixXd& R,
                           int first, const Multivector& ref) {
  return so_lift(sig, R, first, &ref);
}

/* Rotor k with vector_rep(k) e_n = x for a unit spatial x given in e_1..e_n
   coordinates; smooth except at the antipode, which is rejected. */
inline Multivector rotor_from_pole(int n, const Eigen::VectorXd& x) {
  if (x.size() != n)
    throw std::invalid_argument("rotor_from_pole: x must have size n");
  if (std::abs(x.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("rotor_from_pole: x must be unit");
  if (x(n - 1) < -1.0 + 1e-8)
    throw std::domain_error("rotor_from_pole: undefined near the antipode");
  Signature sig = lorentz_sig(n);
  Eigen::VectorXd w = x;
  w(n - 1) += 1.0;
  w.normalize();
  Multivector wmv(sig);
  for (int i = 0; i < n; ++i) wmv.set_coeff(1u << (i + 1), w(i));
  return geometric_product(wmv, Multivector::basis_vector(sig, n)) *
         cplx(-1.0, 0.0);
}

/* Compact factor of nbar(u) in closed form,
     kappa(nbar(u)) = (1 + sum_j u_j e_j e_n) / sqrt(1 + |u|^2),
   rotating the pole e_n to (-2u, 1-|u|^2)/(1+|u|^2); the corresponding
   height is log(1+|u|^2).  Agreement with the general decomposition is
   covered by tests. */
inline Multivector chart_section(int n, const Eigen::VectorXd& u) {
  if (u.size() != n - 1)
    throw std::invalid_argument("chart_section: u must have size n-1");
  Signature sig = lorentz_sig(n);
  Multivector g = Multivector::scalar(sig, 1.0);
  for (int j = 1; j < n; ++j)
    if (u(j - 1) != 0.0) g.set_coeff((1u << j) | (1u << n), u(j - 1));
  return g * cplx(1.0 / std::sqrt(1.0 + u.squaredNorm()), 0.0);
}

struct IwasawaFactors {
  Multivector k;      /* compact factor in Spin(n) */
  double h = 0.0;     /* boost parameter: g = k a_h n */
  Multivector n;      /* unipotent factor in N */
  Eigen::VectorXd v;  /* coordinates with n = n_plus(v) */
};

/* Unique decomposition g = k a_h n over the identity component.  The height
   comes from the expansion factor on the null ray e0-en, the compact factor
   from the sphere point and a lifted residual rotation, and the unipotent
   part by elimination; everything is verified by reconstruction. */
inline IwasawaFactors iwasawa(const Multivector& g, double tol = 1e-10) {
  const Signature& sig = g.sig();
  if (sig.plus != 1) throw std::invalid_argument("iwasawa: need Cl(1,n)");
  int n = sig.minus;
  spin_check(g);

  Eigen::MatrixXd R = vector_rep(g);
  Eigen::VectorXd l = R.col(0) - R.col(n);
  if (l(0) <= 0.0)
    throw std::invalid_argument("iwasawa: not in the identity component");
  double h = std::log(l(0));

  /* sphere point of the compact factor: vector_rep(k) e_n = e0 - e^{-h} R l- */
  Eigen::VectorXd x(n);
  for (int i = 1; i <= n; ++i) x(i - 1) = -l(i) / l(0);
  x.normalize();

  if (x(n - 1) < -1.0 + 1e-6) {
    /* antipodal chart: pre-rotate by pi in the (n-1,n)-plane */
    Multivector r = Multivector::blade(sig, {n - 1, n});
    IwasawaFactors f = iwasawa(geometric_product(spin_inverse(r), g), tol);
    f.k = geometric_product(r, f.k);
    return f;
  }

  Multivector k0 = rotor_from_pole(n, x);
  Multivector gp = geometric_product(spin_inverse(k0), g);
  Eigen::MatrixXd Rp = vector_rep(gp);
  Eigen::MatrixXd mu = Rp.block(1, 1, n - 1, n - 1);
  Multivector mhat = (n >= 2) ? so_lift(sig, mu, 1)
                              : Multivector::scalar(sig, 1.0);

  Multivector nil = geometric_product(
      geometric_product(a_t(n, -h), spin_inverse(mhat)), gp);
  if (nil.coeff(0).real() < 0.0) {
    mhat = mhat * cplx(-1.0, 0.0);
    nil = nil * cplx(-1.0, 0.0);
  }
  nil = nil.pruned(1e-13);

  IwasawaFactors f;
  f.k = geometric_product(k0, mhat).pruned(1e-14);
  f.h = h;
  f.v = Eigen::VectorXd::Zero(n - 1);
  for (int j = 1; j < n; ++j)
    f.v(j - 1) = -2.0 * nil.coeff((1u << 0) | (1u << j)).real();
  f.n = n_plus(n, f.v);

  if ((nil - f.n).inf_norm() > 100 * tol)
    throw std::runtime_error("iwasawa: unipotent factor malformed");
  Multivector rec =
      geometric_product(geometric_product(f.k, a_t(n, f.h)), f.n);
  if ((rec - g).inf_norm() > tol * std::max(1.0, g.inf_norm()))
    throw std::runtime_error("iwasawa: reconstruction exceeded tolerance");
  return f;
}

}  // namespace hspin

#endif  // HSPIN_SPIN_GROUP_HPP

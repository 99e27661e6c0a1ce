#ifndef HSPIN_SPINOR_HPP
#define HSPIN_SPINOR_HPP

#include <hspin/spin_group.hpp>

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hspin {

/* The spinor module of Cl(n) realized on the exterior algebra of the
   isotropic subspace spanned by f_r = (e_{2r+1} + i e_{2r+2})/sqrt(2).
   Monomial coefficients are indexed by subset bitmask; the basis is
   orthonormal.  Generators act by
     tau(e_{2r+1}) = create_r - annihilate_r,
     tau(e_{2r+2}) = -i (create_r + annihilate_r),
     tau(e_n)      = i(-1)^deg          (n odd only),
   which satisfies tau(x)tau(y) + tau(y)tau(x) = -2<x,y>. */

inline int spin_rank(int nn) { return nn / 2; }
inline int tau_dim_full(int nn) { return 1 << spin_rank(nn); }

namespace detail {

inline double fermi_sign(uint32_t mask, int r) {
  return (std::popcount(mask & ((1u << r) - 1u)) % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace detail

/* Matrix of tau(sum_j x_j e_j) for complex coordinates x over e_1..e_nn. */
inline Eigen::MatrixXcd tau_vector_action(int nn, const Eigen::VectorXcd& x) {
  if (nn < 1 || x.size() != nn)
    throw std::invalid_argument("tau_vector_action: coordinate size mismatch");
  int m = spin_rank(nn);
  int D = 1 << m;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(D, D);
  for (uint32_t S = 0; S < static_cast<uint32_t>(D); ++S) {
    for (int r = 0; r < m; ++r) {
      cplx codd = x(2 * r);
      cplx ceven = x(2 * r + 1);
      double s = detail::fermi_sign(S, r);
      uint32_t T = S ^ (1u << r);
      if (S & (1u << r)) {
        /* annihilate: -codd - i ceven */
        M(T, S) += s * (-codd - cplx(0.0, 1.0) * ceven);
      } else {
        /* create: +codd - i ceven */
        M(T, S) += s * (codd - cplx(0.0, 1.0) * ceven);
      }
    }
    if (nn % 2 == 1) {
      double parity = (std::popcount(S) % 2 == 0) ? 1.0 : -1.0;
      M(S, S) += x(nn - 1) * cplx(0.0, parity);
    }
  }
  return M;
}

namespace detail {

inline const std::vector<Eigen::MatrixXcd>& tau_generators(int nn) {
  static std::map<int, std::vector<Eigen::MatrixXcd>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(nn);
  if (it != cache.end()) return it->second;
  std::vector<Eigen::MatrixXcd> gens;
  for (int j = 1; j <= nn; ++j) {
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(nn);
    x(j - 1) = 1.0;
    gens.push_back(tau_vector_action(nn, x));
  }
  return cache.emplace(nn, std::move(gens)).first->second;
}

}  // namespace detail

/* Module action of an element of Cl(n), n = nn, with generator indices 1..nn
   in Cl(1,n) labeling; index 0 and indices above nn are rejected. */
inline Eigen::MatrixXcd tau_algebra_action(int nn, const Multivector& a) {
  int D = tau_dim_full(nn);
  const auto& gens = detail::tau_generators(nn);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(D, D);
  for (const auto& [mask, c] : a.terms()) {
    if (mask & 1u)
      throw std::invalid_argument(
          "tau_algebra_action: Lorentz generator e0 is not in the module");
    if (mask >> (nn + 1))
      throw std::invalid_argument(
          "tau_algebra_action: generator index outside Cl(n)");
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(D, D);
    uint32_t rest = mask;
    while (rest) {
      int j = std::countr_zero(rest);
      rest &= rest - 1;
      P = P * gens[static_cast<std::size_t>(j - 1)];
    }
    M += c * P;
  }
  return M;
}

/* Degree parity operator gamma = (-1)^deg. */
inline Eigen::MatrixXcd gamma_parity(int nn) {
  int D = tau_dim_full(nn);
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(D, D);
  for (int S = 0; S < D; ++S)
    G(S, S) = (std::popcount(static_cast<uint32_t>(S)) % 2 == 0) ? 1.0 : -1.0;
  return G;
}

inline Eigen::MatrixXcd project_halfspin(int nn, int sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("project_halfspin: sign must be +-1");
  int D = tau_dim_full(nn);
  return 0.5 * (Eigen::MatrixXcd::Identity(D, D) +
                static_cast<double>(sign) * gamma_parity(nn));
}

enum class HalfLabel { full, plus, minus };

inline std::string half_label_name(HalfLabel h) {
  switch (h) {
    case HalfLabel::full: return "full";
    case HalfLabel::plus: return "plus";
    default: return "minus";
  }
}

inline HalfLabel parse_half_label(const std::string& s) {
  if (s == "full") return HalfLabel::full;
  if (s == "plus") return HalfLabel::plus;
  if (s == "minus") return HalfLabel::minus;
  throw std::invalid_argument("unknown label '" + s + "'");
}

/* Index lists of the degree-parity subspaces, ascending. */
inline std::vector<uint32_t> halfspin_masks(int nn, HalfLabel h) {
  int D = tau_dim_full(nn);
  std::vector<uint32_t> out;
  for (uint32_t S = 0; S < static_cast<uint32_t>(D); ++S) {
    int par = std::popcount(S) % 2;
    if (h == HalfLabel::full || (h == HalfLabel::plus && par == 0) ||
        (h == HalfLabel::minus && par == 1))
      out.push_back(S);
  }
  return out;
}

/* Which boundary pair (tau, sigma) is in play.  Odd n: tau is the full spin
   module and sigma one of the half-spin representations of Spin(n-1).
   Even n: tau is a half-spin module and sigma the full spin representation
   of Spin(n-1). */
struct RepLabel {
  int n = 3;
  HalfLabel tau = HalfLabel::full;
  HalfLabel sigma = HalfLabel::plus;

  void validate() const {
    if (n < 2 || n > 16) throw std::invalid_argument("RepLabel: need 2 <= n <= 16");
    if (n % 2 == 1) {
      if (tau != HalfLabel::full || sigma == HalfLabel::full)
        throw std::invalid_argument(
            "RepLabel: odd n takes tau=full and sigma=plus|minus");
    } else {
      if (tau == HalfLabel::full || sigma != HalfLabel::full)
        throw std::invalid_argument(
            "RepLabel: even n takes tau=plus|minus and sigma=full");
    }
  }
};

inline int dim_tau(const RepLabel& lab) {
  lab.validate();
  int m = spin_rank(lab.n);
  return (lab.n % 2 == 1) ? (1 << m) : (1 << (m - 1));
}

inline int dim_sigma(const RepLabel& lab) {
  lab.validate();
  int m = spin_rank(lab.n);
  return 1 << (m - 1);  /* both parities of n */
}

/* kappa^2 = dim tau / dim sigma. */
inline double kappa_const(int n) { return (n % 2 == 1) ? std::sqrt(2.0) : 1.0; }

/* tau matrix in the label's basis: the full module for odd n, the parity
   block for even n.  The element must be even so the block is well defined. */
inline Eigen::MatrixXcd tau_label_matrix(const RepLabel& lab,
                                         const Multivector& g) {
  lab.validate();
  Eigen::MatrixXcd full = tau_algebra_action(lab.n, g);
  if (lab.n % 2 == 1) return full;
  auto idx = halfspin_masks(lab.n, lab.tau);
  int d = static_cast<int>(idx.size());
  Eigen::MatrixXcd blk(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) blk(i, j) = full(idx[i], idx[j]);
  return blk;
}

/* sigma matrix in sigma coordinates for an element of Spin(n-1). */
inline Eigen::MatrixXcd sigma_matrix(const RepLabel& lab, const Multivector& m) {
  lab.validate();
  for (const auto& [mask, c] : m.terms())
    if (mask >> lab.n)
      throw std::invalid_argument("sigma_matrix: element not in Spin(n-1)");
  if (lab.n % 2 == 1) {
    Eigen::MatrixXcd full = tau_algebra_action(lab.n, m);
    auto idx = halfspin_masks(lab.n, lab.sigma);
    int d = static_cast<int>(idx.size());
    Eigen::MatrixXcd blk(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) blk(i, j) = full(idx[i], idx[j]);
    return blk;
  }
  return tau_algebra_action(lab.n - 1, m);
}

namespace detail {

/* Even-n embedding of the Spin(n-1) module into a half-spin block, solved
   once per label as the one-dimensional nullspace of the stacked
   intertwining constraints over the rotation bivectors e_i e_j. */
inline Eigen::MatrixXcd solve_even_embedding(const RepLabel& lab) {
  int n = lab.n;
  int d = dim_tau(lab);
  int ds = dim_sigma(lab);
  if (d == 1 && ds == 1) return Eigen::MatrixXcd::Identity(1, 1);

  Signature sig = lorentz_sig(n);
  std::vector<Eigen::MatrixXcd> A, B;
  for (int i = 1; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Multivector bij = Multivector::blade(sig, {i, j});
      A.push_back(tau_label_matrix(lab, bij));
      B.push_back(sigma_matrix(lab, bij));
    }
  }
  int rows = static_cast<int>(A.size()) * d * ds;
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(rows, d * ds);
  Eigen::MatrixXcd Id = Eigen::MatrixXcd::Identity(d, d);
  Eigen::MatrixXcd Is = Eigen::MatrixXcd::Identity(ds, ds);
  for (std::size_t g = 0; g < A.size(); ++g) {
    /* vec(A T - T B) = (I (x) A - B^T (x) I) vec(T), column-major */
    for (int p = 0; p < ds; ++p)
      for (int q = 0; q < ds; ++q)
        for (int r = 0; r < d; ++r)
          for (int s = 0; s < d; ++s) {
            cplx val = Is(p, q) * A[g](r, s) - B[g](q, p) * Id(r, s);
            K(static_cast<int>(g) * d * ds + p * d + r, q * d + s) += val;
          }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(K, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int last = static_cast<int>(sv.size()) - 1;
  if (sv(last) > 1e-8 || (last >= 1 && sv(last - 1) < 1e-6))
    throw std::runtime_error(
        "embed_sigma: intertwiner nullspace is not one-dimensional");
  Eigen::VectorXcd t = svd.matrixV().col(last);
  Eigen::MatrixXcd T(d, ds);
  for (int q = 0; q < ds; ++q)
    for (int s = 0; s < d; ++s) T(s, q) = t(q * d + s);

  Eigen::MatrixXcd G = T.adjoint() * T;
  double c = G(0, 0).real();
  if (c <= 0.0 || (G - c * Is).cwiseAbs().maxCoeff() > 1e-8 * c)
    throw std::runtime_error("embed_sigma: solution fails to be a scaled isometry");
  T /= std::sqrt(c);
  for (int r = 0; r < d; ++r)
    for (int q = 0; q < ds; ++q)
      if (std::abs(T(r, q)) > 1e-9) {
        cplx ph = T(r, q) / std::abs(T(r, q));
        return T * std::conj(ph);
      }
  throw std::runtime_error("embed_sigma: zero solution");
}

}  // namespace detail

/* Isometric embedding V_sigma -> V_tau intertwining Spin(n-1). */
inline Eigen::MatrixXcd embed_sigma(const RepLabel& lab) {
  lab.validate();
  if (lab.n % 2 == 1) {
    /* literal inclusion of the parity subspace */
    auto idx = halfspin_masks(lab.n, lab.sigma);
    Eigen::MatrixXcd E =
        Eigen::MatrixXcd::Zero(dim_tau(lab), static_cast<int>(idx.size()));
    for (int c = 0; c < static_cast<int>(idx.size()); ++c) E(idx[c], c) = 1.0;
    return E;
  }
  static std::map<std::pair<int, int>, Eigen::MatrixXcd> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(lab.n, static_cast<int>(lab.tau));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXcd T = detail::solve_even_embedding(lab);
  cache.emplace(key, T);
  return T;
}

/* Adjoint of the embedding; orthonormal bases make this the projection. */
inline Eigen::MatrixXcd project_sigma(const RepLabel& lab) {
  return embed_sigma(lab).adjoint();
}

}  // namespace hspin

#endif  // HSPIN_SPINOR_HPP

#ifndef HSPIN_POISSON_HPP
#define HSPIN_POISSON_HPP

#include <hspin/clifford.hpp>
#include <hspin/quadrature.hpp>
#include <hspin/special_functions.hpp>
#include <hspin/spin_group.hpp>
#include <hspin/spinor.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace hspin {

namespace detail {

inline void require_decay(cplx lambda, const char* where) {
  if (!((cplx(0.0, 1.0) * lambda).real() > 0.0))
    throw std::domain_error(std::string(where) +
                            ": spectral parameter must have positive decay");
}

/* Module matrices of e_j e_n, the bivectors spanning the boundary chart. */
inline const std::vector<Eigen::MatrixXcd>& chart_tau_ops(int n) {
  static std::map<int, std::vector<Eigen::MatrixXcd>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const auto& gens = tau_generators(n);
  std::vector<Eigen::MatrixXcd> ops;
  ops.reserve(std::size_t(n - 1));
  for (int j = 1; j < n; ++j) ops.push_back(gens[j - 1] * gens[n - 1]);
  return cache.emplace(n, std::move(ops)).first->second;
}

/* Module matrix of chart_section(n, u) assembled directly from its closed
   form (1 + sum_j u_j e_j e_n)/sqrt(1+|u|^2); avoids the general
   decomposition in quadrature loops. */
inline Eigen::MatrixXcd tau_chart(int n, const Eigen::VectorXd& u) {
  const auto& ops = chart_tau_ops(n);
  int D = tau_dim_full(n);
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(D, D);
  for (int j = 0; j < n - 1; ++j)
    if (u(j) != 0.0) M += u(j) * ops[std::size_t(j)];
  return M / std::sqrt(1.0 + u.squaredNorm());
}

inline Eigen::MatrixXcd restrict_positions(const Eigen::MatrixXcd& M,
                                           const std::vector<uint32_t>& idx) {
  int d = static_cast<int>(idx.size());
  Eigen::MatrixXcd blk(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) blk(i, j) = M(idx[i], idx[j]);
  return blk;
}

/* Full-module matrix cut down to the label's coordinates. */
inline Eigen::MatrixXcd restrict_label(const RepLabel& lab,
                                       const Eigen::MatrixXcd& M) {
  if (lab.n % 2 == 1) return M;
  return restrict_positions(M, halfspin_masks(lab.n, lab.tau));
}

inline int label_index(const RepLabel& lab) {
  if (lab.n % 2 == 1) return lab.sigma == HalfLabel::plus ? 0 : 1;
  return lab.tau == HalfLabel::plus ? 0 : 1;
}

/* Index of the scalar block that survives the weighted boundary limit. */
inline int limit_block_index(const RepLabel& lab) {
  if (lab.n % 2 == 1) return lab.sigma == HalfLabel::plus ? 0 : 1;
  return 0;
}

/* Average over the pole stabilizer: block traces for odd n (the two
   half-spin constituents are inequivalent, so off-blocks die), the full
   normalized trace for even n (the restriction is irreducible). */
inline Eigen::MatrixXcd stabilizer_average(const RepLabel& lab,
                                           const Eigen::MatrixXcd& X) {
  if (lab.n % 2 == 0) {
    int d = static_cast<int>(X.rows());
    return (X.trace() / double(d)) * Eigen::MatrixXcd::Identity(d, d);
  }
  int D = tau_dim_full(lab.n);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(D, D);
  for (HalfLabel h : {HalfLabel::plus, HalfLabel::minus}) {
    auto idx = halfspin_masks(lab.n, h);
    cplx a = 0.0;
    for (uint32_t s : idx) a += X(s, s);
    a /= double(idx.size());
    for (uint32_t s : idx) out(s, s) = a;
  }
  return out;
}

} // namespace detail

/* The two boundary pairs that exist in rank n. */
inline std::vector<RepLabel> boundary_labels(int n) {
  if (n < 2 || n > 16)
    throw std::invalid_argument("boundary_labels: need 2 <= n <= 16");
  if (n % 2 == 1)
    return {RepLabel{n, HalfLabel::full, HalfLabel::plus},
            RepLabel{n, HalfLabel::full, HalfLabel::minus}};
  return {RepLabel{n, HalfLabel::plus, HalfLabel::full},
          RepLabel{n, HalfLabel::minus, HalfLabel::full}};
}

/* One coherent building block of a boundary section: the value profile v
   translated to sit over the base rotation k0, scaled by weight. */
struct CoherentTerm {
  cplx weight{1.0, 0.0};
  Eigen::VectorXcd v;
  Multivector k0;
};

/* Finite sum of coherent terms.  The whole section is determined by the
   single module vector y = sum_j w_j tau(k0_j) v_j; its value at k is the
   sigma-projection of tau(k)^* y, which makes every transform of the datum
   computable through the radial table. */
class BoundaryDatum {
 public:
  BoundaryDatum(const RepLabel& lab, const std::vector<CoherentTerm>& terms)
      : lab_(lab) {
    lab_.validate();
    if (terms.empty())
      throw std::invalid_argument("BoundaryDatum: need at least one term");
    int d = dim_tau(lab_);
    y_ = Eigen::VectorXcd::Zero(d);
    for (const auto& term : terms) {
      if (term.v.size() != d)
        throw std::invalid_argument("BoundaryDatum: profile size mismatch");
      if (term.k0.sig().plus != 1 || term.k0.sig().minus != lab_.n)
        throw std::invalid_argument("BoundaryDatum: base point signature");
      for (const auto& [mask, c] : term.k0.terms())
        if ((mask & 1u) && std::abs(c) > 1e-14)
          throw std::invalid_argument("BoundaryDatum: base point not compact");
      spin_check(term.k0);
      y_ += term.weight * (tau_label_matrix(lab_, term.k0) * term.v);
    }
    proj_ = project_sigma(lab_);
  }

  const RepLabel& label() const { return lab_; }
  const Eigen::VectorXcd& tau_profile() const { return y_; }

  Eigen::VectorXcd evaluate(const Multivector& k) const {
    return proj_ * (tau_label_matrix(lab_, k).adjoint() * y_);
  }

 private:
  RepLabel lab_;
  Eigen::VectorXcd y_;
  Eigen::MatrixXcd proj_;
};

/* Matrix kernel against the boundary point k, seen from g. */
inline Eigen::MatrixXcd poisson_kernel(const RepLabel& lab, cplx lambda,
                                       const Multivector& g,
                                       const Multivector& k) {
  lab.validate();
  double rho = 0.5 * (lab.n - 1);
  IwasawaFactors f = iwasawa(geometric_product(spin_inverse(g), k));
  cplx scal = std::exp(-(cplx(0.0, 1.0) * lambda + rho) * f.h);
  return scal * tau_label_matrix(lab, f.k);
}

/* Boundary action of a group element on a datum, evaluated at k. */
inline Eigen::VectorXcd principal_series_action(const RepLabel& lab,
                                                cplx lambda,
                                                const Multivector& g,
                                                const BoundaryDatum& f,
                                                const Multivector& k) {
  lab.validate();
  const RepLabel& fl = f.label();
  if (fl.n != lab.n || fl.tau != lab.tau || fl.sigma != lab.sigma)
    throw std::invalid_argument("principal_series_action: label mismatch");
  double rho = 0.5 * (lab.n - 1);
  IwasawaFactors w = iwasawa(geometric_product(spin_inverse(g), k));
  return std::exp((cplx(0.0, 1.0) * lambda - rho) * w.h) * f.evaluate(w.k);
}

/* Integral of the kernel against the embedded datum over the given rule. */
inline Eigen::VectorXcd poisson_transform(cplx lambda, const BoundaryDatum& f,
                                          const Multivector& g,
                                          const QuadratureRule& rule) {
  const RepLabel& lab = f.label();
  if (rule.n != lab.n)
    throw std::invalid_argument("poisson_transform: rule dimension mismatch");
  Eigen::MatrixXcd E = embed_sigma(lab);
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(dim_tau(lab));
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    Multivector k = section_k(rule.nodes[i]);
    acc += rule.weights[i] *
           (poisson_kernel(lab, lambda, g, k) * (E * f.evaluate(k)));
  }
  return kappa_const(lab.n) * acc;
}

/* Norm of a datum over the boundary in the normalized measure. */
inline double lp_norm(const BoundaryDatum& f, double p,
                      const QuadratureRule& rule) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: need p >= 1");
  if (rule.n != f.label().n)
    throw std::invalid_argument("lp_norm: rule dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] *
           std::pow(f.evaluate(section_k(rule.nodes[i])).norm(), p);
  return std::pow(acc, 1.0 / p);
}

/* Radial transform matrices for both labels and a batch of spectral
   parameters from one sweep over the nodes. */
struct SphericalTable {
  int n = 0;
  double t = 0.0;
  std::vector<RepLabel> labels;
  std::vector<cplx> lambdas;
  std::vector<std::vector<Eigen::MatrixXcd>> value; /* [label][lambda] */
};

/* Radial transform through the sphere rule.  Per node the compact factors
   of the flowed section are assembled from their closed chart forms, and
   the stabilizer twist of the section cancels between the two factors, so
   no general decomposition is needed. */
inline SphericalTable spherical_table(int n, const std::vector<cplx>& lambdas,
                                      double t, const QuadratureRule& rule) {
  if (rule.n != n)
    throw std::invalid_argument("spherical_table: rule dimension mismatch");
  if (lambdas.empty())
    throw std::invalid_argument("spherical_table: need spectral parameters");
  SphericalTable tab;
  tab.n = n;
  tab.t = t;
  tab.labels = boundary_labels(n);
  tab.lambdas = lambdas;
  const double rho = 0.5 * (n - 1);
  const double kap2 = kappa_const(n) * kappa_const(n);
  const int D = tau_dim_full(n);
  const bool oddn = (n % 2 == 1);
  const std::vector<std::vector<uint32_t>> blocks = {
      halfspin_masks(n, HalfLabel::plus), halfspin_masks(n, HalfLabel::minus)};
  tab.value.assign(2, {});
  for (int li = 0; li < 2; ++li) {
    int d = oddn ? D : static_cast<int>(blocks[std::size_t(li)].size());
    tab.value[std::size_t(li)].assign(lambdas.size(),
                                      Eigen::MatrixXcd::Zero(d, d));
  }
  const double ch = std::cosh(t), sh = std::sinh(t), et = std::exp(t);
  const cplx iu(0.0, 1.0);
  std::vector<cplx> scal(lambdas.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Eigen::VectorXd& x = rule.nodes[i];
    double xn = x(n - 1);
    Eigen::VectorXd v = -x.head(n - 1) / (1.0 + xn);
    double H = std::log(ch - xn * sh);
    Eigen::MatrixXcd big = detail::tau_chart(n, et * v);
    Eigen::MatrixXcd small_adj = detail::tau_chart(n, v).adjoint();
    for (std::size_t j = 0; j < lambdas.size(); ++j)
      scal[j] =
          rule.weights[i] * kap2 * std::exp(-(iu * lambdas[j] + rho) * H);
    for (int li = 0; li < 2; ++li) {
      Eigen::MatrixXcd M;
      if (oddn) {
        M = Eigen::MatrixXcd::Zero(D, D);
        for (uint32_t s : blocks[std::size_t(li)])
          M += big.col(s) * small_adj.row(s);
      } else {
        M = detail::restrict_positions(big, blocks[std::size_t(li)]) *
            detail::restrict_positions(small_adj, blocks[std::size_t(li)]);
      }
      for (std::size_t j = 0; j < lambdas.size(); ++j)
        tab.value[std::size_t(li)][j] += scal[j] * M;
    }
  }
  return tab;
}

/* Radial transform through the flat boundary chart after moving the flow
   into the chart coordinate; exact for every time and uniformly accurate
   deep into the decay regime. */
inline SphericalTable spherical_table_chart(int n,
                                            const std::vector<cplx>& lambdas,
                                            double t, const ChartRule& chart) {
  if (chart.n != n)
    throw std::invalid_argument(
        "spherical_table_chart: rule dimension mismatch");
  if (lambdas.empty())
    throw std::invalid_argument(
        "spherical_table_chart: need spectral parameters");
  SphericalTable tab;
  tab.n = n;
  tab.t = t;
  tab.labels = boundary_labels(n);
  tab.lambdas = lambdas;
  const double rho = 0.5 * (n - 1);
  const double kap2 = kappa_const(n) * kappa_const(n);
  const double Z = kmeasure_normalizer(n);
  const int D = tau_dim_full(n);
  const bool oddn = (n % 2 == 1);
  const std::vector<std::vector<uint32_t>> blocks = {
      halfspin_masks(n, HalfLabel::plus), halfspin_masks(n, HalfLabel::minus)};
  tab.value.assign(2, {});
  for (int li = 0; li < 2; ++li) {
    int d = oddn ? D : static_cast<int>(blocks[std::size_t(li)].size());
    tab.value[std::size_t(li)].assign(lambdas.size(),
                                      Eigen::MatrixXcd::Zero(d, d));
  }
  const double emt = std::exp(-t), em2t = std::exp(-2.0 * t);
  const cplx iu(0.0, 1.0);
  std::vector<cplx> front(lambdas.size());
  for (std::size_t j = 0; j < lambdas.size(); ++j)
    front[j] = kap2 * std::exp((iu * lambdas[j] - rho) * t);
  std::vector<cplx> scal(lambdas.size());
  for (std::size_t i = 0; i < chart.nodes.size(); ++i) {
    const Eigen::VectorXd& w = chart.nodes[i];
    double q = w.squaredNorm();
    double L1 = std::log1p(q);
    double L2 = std::log1p(em2t * q);
    Eigen::MatrixXcd big = detail::tau_chart(n, w);
    Eigen::MatrixXcd small_adj = detail::tau_chart(n, emt * w).adjoint();
    for (std::size_t j = 0; j < lambdas.size(); ++j)
      scal[j] = (chart.weights[i] / Z) * front[j] *
                std::exp(-(iu * lambdas[j] + rho) * L1 +
                         (iu * lambdas[j] - rho) * L2);
    for (int li = 0; li < 2; ++li) {
      Eigen::MatrixXcd M;
      if (oddn) {
        M = Eigen::MatrixXcd::Zero(D, D);
        for (uint32_t s : blocks[std::size_t(li)])
          M += big.col(s) * small_adj.row(s);
      } else {
        M = detail::restrict_positions(big, blocks[std::size_t(li)]) *
            detail::restrict_positions(small_adj, blocks[std::size_t(li)]);
      }
      for (std::size_t j = 0; j < lambdas.size(); ++j)
        tab.value[std::size_t(li)][j] += scal[j] * M;
    }
  }
  return tab;
}

inline Eigen::MatrixXcd spherical_function(const RepLabel& lab, cplx lambda,
                                           double t,
                                           const QuadratureRule& rule) {
  lab.validate();
  SphericalTable tab = spherical_table(lab.n, {lambda}, t, rule);
  return tab.value[std::size_t(detail::label_index(lab))][0];
}

namespace detail {

/* Memoized radial matrices: the sphere path below the handover time, the
   chart path beyond it.  Keyed by exact argument bits, so repeated grid
   sweeps reuse one table. */
inline const SphericalTable& spherical_auto_table(int n, cplx lambda, double t,
                                                  int order) {
  static std::map<std::tuple<int, double, double, double, int>, SphericalTable>
      cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_tuple(n, lambda.real(), lambda.imag(), t, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<cplx> ls = {lambda};
  SphericalTable tab =
      (t <= 2.5)
          ? spherical_table(
                n, ls, t, polar_refined_rule(n, order, std::min(order, 10)))
          : spherical_table_chart(n, ls, t,
                                  boundary_chart_rule(n, order, 1.0));
  return cache.emplace(std::move(key), std::move(tab)).first->second;
}

/* Memoized section data for slice integrals over the boundary: the sphere
   rule together with the adjoint compact-factor matrix at every node. */
struct SectionTauCache {
  QuadratureRule rule;
  std::vector<Eigen::MatrixXcd> tau_adj;
};

inline const SectionTauCache& section_tau_cache(int n, int order) {
  static std::map<std::pair<int, int>, SectionTauCache> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(n, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  SectionTauCache c;
  c.rule = product_rule(n, order);
  c.tau_adj.reserve(c.rule.nodes.size());
  for (const auto& x : c.rule.nodes) {
    Eigen::VectorXd v = -x.head(n - 1) / (1.0 + x(n - 1));
    c.tau_adj.push_back(tau_chart(n, v).adjoint());
  }
  return cache.emplace(std::move(key), std::move(c)).first->second;
}

} // namespace detail

/* Radial matrix with automatic path selection and memoization. */
inline Eigen::MatrixXcd spherical_function_auto(const RepLabel& lab,
                                                cplx lambda, double t,
                                                int order) {
  lab.validate();
  const SphericalTable& tab =
      detail::spherical_auto_table(lab.n, lambda, t, order);
  return tab.value[std::size_t(detail::label_index(lab))][0];
}

/* Per-block scalars of a matrix that commutes with the stabilizer action;
   anything off the scalar structure beyond leak_tol (relative to the matrix
   size) is an error.  Odd n: the two parity blocks in order plus, minus.
   Even n: one block. */
inline std::vector<cplx> scalar_components(const RepLabel& lab,
                                           const Eigen::MatrixXcd& X,
                                           double leak_tol = 1e-8) {
  lab.validate();
  std::vector<std::vector<uint32_t>> blocks;
  int expect;
  if (lab.n % 2 == 1) {
    blocks.push_back(halfspin_masks(lab.n, HalfLabel::plus));
    blocks.push_back(halfspin_masks(lab.n, HalfLabel::minus));
    expect = tau_dim_full(lab.n);
  } else {
    std::vector<uint32_t> all(std::size_t(dim_tau(lab)));
    for (std::size_t i = 0; i < all.size(); ++i)
      all[i] = static_cast<uint32_t>(i);
    blocks.push_back(std::move(all));
    expect = dim_tau(lab);
  }
  if (X.rows() != expect || X.cols() != expect)
    throw std::invalid_argument("scalar_components: size mismatch");
  std::vector<cplx> out;
  Eigen::MatrixXcd R = X;
  for (const auto& b : blocks) {
    cplx a = 0.0;
    for (uint32_t s : b) a += X(s, s);
    a /= double(b.size());
    out.push_back(a);
    for (uint32_t s : b) R(s, s) -= a;
  }
  double scale = std::max(1.0, X.cwiseAbs().maxCoeff());
  if (R.cwiseAbs().maxCoeff() > leak_tol * scale)
    throw std::runtime_error("scalar_components: off-scalar leakage");
  return out;
}

/* Closed radial scalars built from the hypergeometric radial functions; the
   block order matches scalar_components. */
inline std::vector<cplx> spherical_closed_form(const RepLabel& lab,
                                               cplx lambda, double t) {
  lab.validate();
  int n = lab.n;
  double r = 0.5 * t;
  cplx al(0.5 * n - 1.0, 0.0);
  cplx be(0.5 * n, 0.0);
  cplx A = std::cosh(r) * jacobi_phi(al, be, 2.0 * lambda, r);
  if (n % 2 == 0) return {A};
  cplx B = (2.0 * lambda / double(n)) * std::sinh(r) *
           jacobi_phi(be, al, 2.0 * lambda, r);
  cplx iu(0.0, 1.0);
  if (lab.sigma == HalfLabel::plus) return {A + iu * B, A - iu * B};
  return {A - iu * B, A + iu * B};
}

/* Boundary constant from the flat-chart integral; the rule is checked
   against the exact mass of the boundary density first. */
inline Eigen::MatrixXcd cfun_by_nbar(const RepLabel& lab, cplx lambda,
                                     const ChartRule& chart) {
  lab.validate();
  detail::require_decay(lambda, "cfun_by_nbar");
  if (chart.n != lab.n)
    throw std::invalid_argument("cfun_by_nbar: rule dimension mismatch");
  const double rho = 0.5 * (lab.n - 1);
  const double Z = kmeasure_normalizer(lab.n);
  double mass = 0.0;
  for (std::size_t i = 0; i < chart.nodes.size(); ++i)
    mass += chart.weights[i] *
            std::exp(-2.0 * rho * std::log1p(chart.nodes[i].squaredNorm()));
  mass /= Z;
  if (std::abs(mass - 1.0) > 1e-6)
    throw std::runtime_error("cfun_by_nbar: chart rule fails the mass check");
  const cplx iu(0.0, 1.0);
  int d = (lab.n % 2 == 1) ? tau_dim_full(lab.n) : dim_tau(lab);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t i = 0; i < chart.nodes.size(); ++i) {
    const Eigen::VectorXd& w = chart.nodes[i];
    cplx coef = (chart.weights[i] / Z) *
                std::exp(-(iu * lambda + rho) * std::log1p(w.squaredNorm()));
    acc += coef * detail::restrict_label(lab, detail::tau_chart(lab.n, w));
  }
  return acc;
}

struct LimitEstimate {
  cplx value{0.0, 0.0};
  bool converged = false;
  std::vector<cplx> samples;
};

/* Boundary constant as the weighted large-time limit of the surviving
   radial scalar, accelerated by one extrapolation step at the decay rate. */
inline LimitEstimate cfun_by_fatou(const RepLabel& lab, cplx lambda,
                                   const std::vector<double>& t_grid,
                                   int order) {
  lab.validate();
  detail::require_decay(lambda, "cfun_by_fatou");
  if (t_grid.size() < 2)
    throw std::invalid_argument("cfun_by_fatou: need at least two times");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("cfun_by_fatou: times must increase");
  const double rho = 0.5 * (lab.n - 1);
  const double kap2 = kappa_const(lab.n) * kappa_const(lab.n);
  const double s = (cplx(0.0, 1.0) * lambda).real();
  const cplx iu(0.0, 1.0);
  const int blk = detail::limit_block_index(lab);
  LimitEstimate est;
  for (double t : t_grid) {
    Eigen::MatrixXcd Phi = spherical_function_auto(lab, lambda, t, order);
    std::vector<cplx> comp = scalar_components(lab, Phi);
    est.samples.push_back(std::exp((rho - iu * lambda) * t) *
                          comp[std::size_t(blk)] / kap2);
  }
  est.converged = true;
  for (std::size_t i = 0; i + 2 < est.samples.size(); ++i) {
    double d0 = std::abs(est.samples[i + 1] - est.samples[i]);
    double d1 = std::abs(est.samples[i + 2] - est.samples[i + 1]);
    if (d1 > d0 + 1e-12) est.converged = false;
  }
  std::size_t m = est.samples.size();
  double dt = t_grid[m - 1] - t_grid[m - 2];
  double q = std::exp(-2.0 * s * dt);
  est.value = (est.samples[m - 1] - q * est.samples[m - 2]) / (1.0 - q);
  return est;
}

/* Largest weighted slice norm of the transform over the time grid. */
inline double hardy_norm(cplx lambda, const BoundaryDatum& f, double p,
                         const std::vector<double>& t_grid, int order) {
  detail::require_decay(lambda, "hardy_norm");
  if (!(p >= 1.0)) throw std::invalid_argument("hardy_norm: need p >= 1");
  if (t_grid.empty())
    throw std::invalid_argument("hardy_norm: need at least one time");
  const RepLabel& lab = f.label();
  const int n = lab.n;
  const double rho = 0.5 * (n - 1);
  const double s = (cplx(0.0, 1.0) * lambda).real();
  const double kap = kappa_const(n);
  const auto& sc = detail::section_tau_cache(n, order);
  /* stabilizer part of each section node drops inside the norm */
  std::vector<Eigen::VectorXcd> z;
  z.reserve(sc.rule.nodes.size());
  for (const auto& Tadj : sc.tau_adj)
    z.push_back(detail::restrict_label(lab, Tadj) * f.tau_profile());
  double best = 0.0;
  for (double t : t_grid) {
    Eigen::MatrixXcd Phi =
        spherical_function_auto(lab, lambda, t, order) / kap;
    double acc = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
      acc += sc.rule.weights[i] * std::pow((Phi * z[i]).norm(), p);
    best = std::max(best, std::exp((rho - s) * t) * std::pow(acc, 1.0 / p));
  }
  return best;
}

struct HsLimit {
  std::vector<double> weighted;
  double limit = 0.0;
  double reference = 0.0;
};

/* Weighted squared matrix size of the radial family along the grid, its
   last value, and the closed prediction for the boundary limit. */
inline HsLimit hs_limit_eisenstein(const RepLabel& lab, cplx lambda,
                                   const std::vector<double>& t_grid,
                                   int order) {
  lab.validate();
  detail::require_decay(lambda, "hs_limit_eisenstein");
  if (t_grid.empty())
    throw std::invalid_argument("hs_limit_eisenstein: need times");
  const double rho = 0.5 * (lab.n - 1);
  const double s = (cplx(0.0, 1.0) * lambda).real();
  const double kap2 = kappa_const(lab.n) * kappa_const(lab.n);
  HsLimit out;
  for (double t : t_grid) {
    Eigen::MatrixXcd Phi = spherical_function_auto(lab, lambda, t, order);
    out.weighted.push_back(std::exp(2.0 * (rho - s) * t) *
                           (Phi.squaredNorm() / kap2));
  }
  out.limit = out.weighted.back();
  out.reference =
      kap2 * std::norm(c_tau_closed(lab, lambda)) * dim_sigma(lab);
  return out;
}

/* Scalar kernel mass along the flow, evaluated in the flat chart. */
inline double l1_kernel_mass(int n, double s, double t, int order) {
  if (n < 2 || n > 16)
    throw std::invalid_argument("l1_kernel_mass: need 2 <= n <= 16");
  if (!(s > 0.0))
    throw std::domain_error("l1_kernel_mass: need positive decay");
  ChartRule chart = boundary_chart_rule(n, order, 1.0);
  const double rho = 0.5 * (n - 1);
  const double Z = kmeasure_normalizer(n);
  const double em2t = std::exp(-2.0 * t);
  double acc = 0.0;
  for (std::size_t i = 0; i < chart.nodes.size(); ++i) {
    double q = chart.nodes[i].squaredNorm();
    acc += chart.weights[i] * std::exp(-(s + rho) * std::log1p(q) +
                                       (s - rho) * std::log1p(em2t * q));
  }
  return std::exp((s - rho) * t) * acc / Z;
}

struct InversionResult {
  double rel_l2 = 0.0;
  std::vector<Eigen::VectorXcd> recovered;
  std::vector<Eigen::VectorXcd> target;
};

/* Reconstruction of the boundary datum from the transform on one shifted
   slice.  The slice integral reduces to a chart integral against the radial
   matrix; the integrand is only conjugation-covariant under the stabilizer,
   so the average over it is applied after integrating.  Reconstruction is
   sampled against the exact datum over a sphere rule of order
   sample_order. */
inline InversionResult boundary_inversion(cplx lambda, const BoundaryDatum& f,
                                          double t, int order,
                                          int sample_order) {
  detail::require_decay(lambda, "boundary_inversion");
  const RepLabel& lab = f.label();
  const int n = lab.n;
  const double rho = 0.5 * (n - 1);
  const double s = (cplx(0.0, 1.0) * lambda).real();
  const double kap = kappa_const(n);
  const double Z = kmeasure_normalizer(n);
  Eigen::MatrixXcd Phi = spherical_function_auto(lab, lambda, t, order);
  const cplx ilb = cplx(0.0, 1.0) * std::conj(lambda);
  const double emt = std::exp(-t), em2t = std::exp(-2.0 * t);
  ChartRule chart = boundary_chart_rule(n, order, 1.0);
  int d = static_cast<int>(Phi.rows());
  Eigen::MatrixXcd Psi = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t i = 0; i < chart.nodes.size(); ++i) {
    const Eigen::VectorXd& w = chart.nodes[i];
    double q = w.squaredNorm();
    cplx coef = (chart.weights[i] / Z) *
                std::exp(-(rho - ilb) * std::log1p(q) -
                         (rho + ilb) * std::log1p(em2t * q));
    Eigen::MatrixXcd big_adj =
        detail::restrict_label(lab, detail::tau_chart(n, w)).adjoint();
    Eigen::MatrixXcd small =
        detail::restrict_label(lab, detail::tau_chart(n, emt * w));
    Psi += coef * (big_adj * (Phi * small));
  }
  Psi *= std::exp(-(rho + ilb) * t);
  Eigen::MatrixXcd avg = detail::stabilizer_average(lab, Psi);
  cplx cval = c_tau_closed(lab, lambda);
  double front = std::exp(2.0 * (rho - s) * t) / (kap * kap * std::norm(cval));
  Eigen::MatrixXcd proj = project_sigma(lab);
  QuadratureRule sample = product_rule(n, sample_order);
  InversionResult res;
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < sample.nodes.size(); ++j) {
    Multivector k = section_k(sample.nodes[j]);
    Eigen::VectorXcd rec =
        front * (proj * (avg * (tau_label_matrix(lab, k).adjoint() *
                                f.tau_profile())));
    Eigen::VectorXcd targ = f.evaluate(k);
    num += sample.weights[j] * (rec - targ).squaredNorm();
    den += sample.weights[j] * targ.squaredNorm();
    res.recovered.push_back(std::move(rec));
    res.target.push_back(std::move(targ));
  }
  res.rel_l2 = std::sqrt(num / std::max(1e-300, den));
  return res;
}

} // namespace hspin

#endif /* HSPIN_POISSON_HPP */

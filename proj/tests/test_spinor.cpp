#include <catch2/catch_amalgamated.hpp>

#include <hspin/spinor.hpp>

#include <Eigen/Dense>
#include <random>

using namespace hspin;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

VectorXd random_real_vec(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = u(rng);
  return x;
}

Multivector random_rotor(int n, int top_index, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  Signature sig = lorentz_sig(n);
  Multivector b(sig);
  for (int i = 1; i <= top_index; ++i)
    for (int j = i + 1; j <= top_index; ++j)
      b.set_coeff((1u << i) | (1u << j), u(rng));
  return exp_bivector(b);
}

}  // namespace

TEST_CASE("tau satisfies the Clifford module relation", "[spinor]") {
  std::mt19937_64 rng(900);
  for (int n = 2; n <= 6; ++n) {
    int D = tau_dim_full(n);
    MatrixXcd I = MatrixXcd::Identity(D, D);
    for (int rep = 0; rep < 6; ++rep) {
      VectorXd x = random_real_vec(n, rng);
      VectorXd y = random_real_vec(n, rng);
      MatrixXcd tx = tau_vector_action(n, x.cast<cplx>());
      MatrixXcd ty = tau_vector_action(n, y.cast<cplx>());
      MatrixXcd anti = tx * ty + ty * tx;
      MatrixXcd expect = -2.0 * x.dot(y) * I;
      REQUIRE((anti - expect).cwiseAbs().maxCoeff() < 1e-10);
      /* vectors act skew-adjointly, so rotors act unitarily */
      REQUIRE((tx.adjoint() + tx).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("creation on the vacuum and the n=2 weights", "[spinor]") {
  /* tau(f1) 1 = sqrt(2) f1 for f1 = (e1 + i e2)/sqrt(2) */
  VectorXcd f1 = VectorXcd::Zero(2);
  f1(0) = cplx(1.0 / std::sqrt(2.0), 0.0);
  f1(1) = cplx(0.0, 1.0 / std::sqrt(2.0));
  MatrixXcd op = tau_vector_action(2, f1);
  VectorXcd vac = VectorXcd::Zero(2);
  vac(0) = 1.0;
  VectorXcd out = op * vac;
  REQUIRE(std::abs(out(0)) < 1e-14);
  REQUIRE(std::abs(out(1) - cplx(std::sqrt(2.0), 0.0)) < 1e-14);

  /* tau(e1 e2) = diag(i, -i) on the monomial basis (1, f1) */
  Multivector b12 = Multivector::blade(lorentz_sig(2), {1, 2});
  MatrixXcd t12 = tau_algebra_action(2, b12);
  REQUIRE(std::abs(t12(0, 0) - cplx(0.0, 1.0)) < 1e-14);
  REQUIRE(std::abs(t12(1, 1) - cplx(0.0, -1.0)) < 1e-14);
  REQUIRE(std::abs(t12(0, 1)) < 1e-14);
  REQUIRE(std::abs(t12(1, 0)) < 1e-14);

  /* the circle rotor acts with weights e^{+-i theta/2} */
  double th = 0.74;
  Multivector k = exp_bivector(b12 * cplx(th / 2, 0.0));
  MatrixXcd tk = tau_algebra_action(2, k);
  REQUIRE(std::abs(tk(0, 0) - std::exp(cplx(0.0, th / 2))) < 1e-13);
  REQUIRE(std::abs(tk(1, 1) - std::exp(cplx(0.0, -th / 2))) < 1e-13);
}

TEST_CASE("tau is a unitary double-cover representation", "[spinor]") {
  std::mt19937_64 rng(901);
  for (int n : {2, 3, 4, 5}) {
    int D = tau_dim_full(n);
    MatrixXcd I = MatrixXcd::Identity(D, D);
    for (int rep = 0; rep < 5; ++rep) {
      Multivector k1 = random_rotor(n, n, rng);
      Multivector k2 = random_rotor(n, n, rng);
      MatrixXcd t1 = tau_algebra_action(n, k1);
      MatrixXcd t2 = tau_algebra_action(n, k2);
      MatrixXcd t12 = tau_algebra_action(n, geometric_product(k1, k2));
      REQUIRE((t1 * t2 - t12).cwiseAbs().maxCoeff() < 1e-11);
      REQUIRE((t1.adjoint() * t1 - I).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
  /* the nontrivial deck transformation acts as -Id */
  Multivector full_turn = exp_bivector(
      Multivector::blade(lorentz_sig(3), {1, 2}) * cplx(M_PI, 0.0));
  MatrixXcd tm = tau_algebra_action(3, full_turn);
  REQUIRE((tm + MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tau rejects Lorentz generators and foreign indices", "[spinor]") {
  Signature sig = lorentz_sig(4);
  REQUIRE_THROWS_AS(tau_algebra_action(4, Multivector::blade(sig, {0, 1})),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(tau_algebra_action(3, Multivector::basis_vector(sig, 4)),
                    std::invalid_argument);
}

TEST_CASE("parity operator grades the module", "[spinor]") {
  std::mt19937_64 rng(902);
  for (int n : {2, 3, 4, 5, 6}) {
    int D = tau_dim_full(n);
    MatrixXcd g = gamma_parity(n);
    REQUIRE((g * g - MatrixXcd::Identity(D, D)).cwiseAbs().maxCoeff() < 1e-14);
    VectorXd x = random_real_vec(n, rng);
    if (n % 2 == 1) {
      // The last generator acts diagonally in this realization, so the
      // parity operator anticommutes only with the paired-generator span.
      VectorXcd xn = VectorXcd::Zero(n);
      xn(n - 1) = x(n - 1);
      MatrixXcd tn = tau_vector_action(n, xn);
      REQUIRE((g * tn - tn * g).cwiseAbs().maxCoeff() < 1e-12);
      x(n - 1) = 0.0;
    }
    MatrixXcd tx = tau_vector_action(n, x.cast<cplx>());
    REQUIRE((g * tx + tx * g).cwiseAbs().maxCoeff() < 1e-12);
    MatrixXcd pp = project_halfspin(n, +1);
    MatrixXcd pm = project_halfspin(n, -1);
    REQUIRE((pp + pm - MatrixXcd::Identity(D, D)).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE((pp * pp - pp).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE((pp * pm).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE(std::abs(pp.trace().real() - D / 2) < 1e-12);
  }
}

TEST_CASE("label validation enforces the parity pattern", "[spinor]") {
  REQUIRE_NOTHROW((RepLabel{3, HalfLabel::full, HalfLabel::plus}).validate());
  REQUIRE_NOTHROW((RepLabel{4, HalfLabel::minus, HalfLabel::full}).validate());
  RepLabel bad1{3, HalfLabel::plus, HalfLabel::plus};
  RepLabel bad2{4, HalfLabel::full, HalfLabel::full};
  RepLabel bad3{4, HalfLabel::plus, HalfLabel::minus};
  RepLabel bad4{1, HalfLabel::full, HalfLabel::plus};
  REQUIRE_THROWS_AS(bad1.validate(), std::invalid_argument);
  REQUIRE_THROWS_AS(bad2.validate(), std::invalid_argument);
  REQUIRE_THROWS_AS(bad3.validate(), std::invalid_argument);
  REQUIRE_THROWS_AS(bad4.validate(), std::invalid_argument);
}

TEST_CASE("dimensions and the normalizing constant", "[spinor]") {
  REQUIRE(dim_tau((RepLabel{3, HalfLabel::full, HalfLabel::plus})) == 2);
  REQUIRE(dim_sigma((RepLabel{3, HalfLabel::full, HalfLabel::plus})) == 1);
  REQUIRE(dim_tau((RepLabel{4, HalfLabel::plus, HalfLabel::full})) == 2);
  REQUIRE(dim_sigma((RepLabel{4, HalfLabel::plus, HalfLabel::full})) == 2);
  REQUIRE(dim_tau((RepLabel{5, HalfLabel::full, HalfLabel::minus})) == 4);
  REQUIRE(dim_sigma((RepLabel{5, HalfLabel::full, HalfLabel::minus})) == 2);
  REQUIRE(dim_tau((RepLabel{6, HalfLabel::minus, HalfLabel::full})) == 4);
  REQUIRE(dim_sigma((RepLabel{6, HalfLabel::minus, HalfLabel::full})) == 4);
  REQUIRE(kappa_const(3) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-15));
  REQUIRE(kappa_const(4) == Catch::Approx(1.0).epsilon(1e-15));
  for (int n : {2, 3, 4, 5, 6}) {
    double k = kappa_const(n);
    RepLabel lab{n, n % 2 ? HalfLabel::full : HalfLabel::plus,
                 n % 2 ? HalfLabel::plus : HalfLabel::full};
    REQUIRE(k * k * dim_sigma(lab) == Catch::Approx(dim_tau(lab)).epsilon(1e-14));
  }
}

TEST_CASE("embeddings intertwine the subgroup action and are isometric",
          "[spinor]") {
  std::mt19937_64 rng(903);
  for (int n : {2, 3, 4, 5, 6}) {
    std::vector<RepLabel> labels;
    if (n % 2) {
      labels.push_back({n, HalfLabel::full, HalfLabel::plus});
      labels.push_back({n, HalfLabel::full, HalfLabel::minus});
    } else {
      labels.push_back({n, HalfLabel::plus, HalfLabel::full});
      labels.push_back({n, HalfLabel::minus, HalfLabel::full});
    }
    for (const RepLabel& lab : labels) {
      MatrixXcd emb = embed_sigma(lab);
      MatrixXcd prj = project_sigma(lab);
      int ds = dim_sigma(lab);
      REQUIRE(emb.rows() == dim_tau(lab));
      REQUIRE(emb.cols() == ds);
      REQUIRE((prj - emb.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
      REQUIRE((prj * emb - MatrixXcd::Identity(ds, ds)).cwiseAbs().maxCoeff() <
              1e-10);
      MatrixXcd proj = emb * prj;
      REQUIRE((proj * proj - proj).cwiseAbs().maxCoeff() < 1e-10);
      for (int rep = 0; rep < 6; ++rep) {
        Multivector m = random_rotor(n, n - 1, rng);
        MatrixXcd tm = tau_label_matrix(lab, m);
        MatrixXcd sm = sigma_matrix(lab, m);
        REQUIRE((tm * emb - emb * sm).cwiseAbs().maxCoeff() < 1e-10);
        REQUIRE((sm.adjoint() * sm - MatrixXcd::Identity(ds, ds))
                    .cwiseAbs()
                    .maxCoeff() < 1e-10);
      }
    }
  }
}

TEST_CASE("restricted tau blocks preserve the half-spin split for even n",
          "[spinor]") {
  std::mt19937_64 rng(904);
  for (int n : {2, 4, 6}) {
    Multivector k = random_rotor(n, n, rng);
    MatrixXcd full = tau_algebra_action(n, k);
    auto even_masks = halfspin_masks(n, HalfLabel::plus);
    auto odd_masks = halfspin_masks(n, HalfLabel::minus);
    for (uint32_t a : even_masks)
      for (uint32_t b : odd_masks) {
        REQUIRE(std::abs(full(a, b)) < 1e-12);
        REQUIRE(std::abs(full(b, a)) < 1e-12);
      }
    RepLabel lp{n, HalfLabel::plus, HalfLabel::full};
    MatrixXcd blk = tau_label_matrix(lp, k);
    for (int i = 0; i < static_cast<int>(even_masks.size()); ++i)
      for (int j = 0; j < static_cast<int>(even_masks.size()); ++j)
        REQUIRE(std::abs(blk(i, j) - full(even_masks[i], even_masks[j])) <
                1e-14);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <hspin/clifford.hpp>

#include <random>
#include <utility>
#include <vector>

using namespace hspin;

/* Independent sign oracle: concatenate the generator index lists, bubble-sort
   into ascending order counting transpositions, contract adjacent repeats with
   the generator square.  Deliberately naive. */
static std::pair<double, uint32_t> brute_blade_product(uint32_t I, uint32_t J,
                                                       const Signature& sig) {
  std::vector<int> seq;
  for (int i = 0; i < sig.total(); ++i)
    if ((I >> i) & 1u) seq.push_back(i);
  for (int i = 0; i < sig.total(); ++i)
    if ((J >> i) & 1u) seq.push_back(i);
  double sign = 1.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
      if (seq[k] > seq[k + 1]) {
        std::swap(seq[k], seq[k + 1]);
        sign = -sign;
        changed = true;
      } else if (seq[k] == seq[k + 1]) {
        sign *= sig.gen_square(seq[k]);
        seq.erase(seq.begin() + static_cast<long>(k),
                  seq.begin() + static_cast<long>(k) + 2);
        changed = true;
        break;
      }
    }
  }
  uint32_t mask = 0;
  for (int i : seq) mask |= 1u << i;
  return {sign, mask};
}

static Multivector random_mv(const Signature& sig, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Multivector a = Multivector::zero(sig);
  for (uint32_t m = 0; m < (1u << sig.total()); ++m)
    a.set_coeff(m, cplx(u(rng), u(rng)));
  return a;
}

TEST_CASE("blade products match the brute-force transposition oracle",
          "[clifford]") {
  std::vector<Signature> sigs;
  for (int n = 1; n <= 5; ++n) sigs.push_back(Signature{0, n});
  for (int n = 1; n <= 5; ++n) sigs.push_back(Signature{1, n});
  for (const auto& sig : sigs) {
    const uint32_t N = 1u << sig.total();
    for (uint32_t I = 0; I < N; ++I) {
      for (uint32_t J = 0; J < N; ++J) {
        auto [sign, mask] = brute_blade_product(I, J, sig);
        Multivector p = geometric_product(Multivector::blade_mask(sig, I),
                                          Multivector::blade_mask(sig, J));
        for (uint32_t m = 0; m < N; ++m) {
          cplx expect = (m == mask) ? cplx(sign, 0.0) : cplx(0.0, 0.0);
          REQUIRE(std::abs(p.coeff(m) - expect) < 1e-15);
        }
      }
    }
  }
}

TEST_CASE("generator squares and anticommutators follow the quadratic form",
          "[clifford]") {
  Signature sig{1, 4};
  for (int i = 0; i <= 4; ++i) {
    Multivector ei = Multivector::basis_vector(sig, i);
    Multivector sq = geometric_product(ei, ei);
    double expect = (i == 0) ? 1.0 : -1.0;
    REQUIRE(std::abs(sq.coeff(0) - expect) < 1e-15);
    REQUIRE(sq.inf_norm_off_scalar() < 1e-15);
    for (int j = 0; j <= 4; ++j) {
      if (j == i) continue;
      Multivector ej = Multivector::basis_vector(sig, j);
      Multivector anti = geometric_product(ei, ej) + geometric_product(ej, ei);
      REQUIRE(anti.inf_norm() < 1e-15);
    }
  }
}

TEST_CASE("geometric product is associative and distributive", "[clifford]") {
  std::mt19937_64 rng(2026);
  for (const Signature& sig : {Signature{0, 3}, Signature{1, 3}}) {
    for (int rep = 0; rep < 6; ++rep) {
      Multivector a = random_mv(sig, rng);
      Multivector b = random_mv(sig, rng);
      Multivector c = random_mv(sig, rng);
      Multivector lhs = geometric_product(geometric_product(a, b), c);
      Multivector rhs = geometric_product(a, geometric_product(b, c));
      REQUIRE((lhs - rhs).inf_norm() < 1e-12 * (1.0 + lhs.inf_norm()));
      Multivector d1 = geometric_product(a, b + c);
      Multivector d2 = geometric_product(a, b) + geometric_product(a, c);
      REQUIRE((d1 - d2).inf_norm() < 1e-12 * (1.0 + d1.inf_norm()));
    }
  }
}

TEST_CASE("involutions act by the expected grade signs", "[clifford]") {
  Signature sig{1, 4};
  for (uint32_t m = 0; m < (1u << sig.total()); ++m) {
    int k = std::popcount(m);
    Multivector b = Multivector::blade_mask(sig, m);
    double sa = (k % 2 == 0) ? 1.0 : -1.0;
    double sr = ((k * (k - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
    double sc = ((k * (k + 1) / 2) % 2 == 0) ? 1.0 : -1.0;
    REQUIRE(std::abs(main_involution(b).coeff(m) - sa) < 1e-15);
    REQUIRE(std::abs(reversion(b).coeff(m) - sr) < 1e-15);
    REQUIRE(std::abs(clifford_conjugation(b).coeff(m) - sc) < 1e-15);
  }
}

TEST_CASE("involution morphism laws hold on random elements", "[clifford]") {
  std::mt19937_64 rng(7);
  Signature sig{1, 3};
  for (int rep = 0; rep < 8; ++rep) {
    Multivector a = random_mv(sig, rng);
    Multivector b = random_mv(sig, rng);
    Multivector ab = geometric_product(a, b);
    REQUIRE((main_involution(ab) -
             geometric_product(main_involution(a), main_involution(b)))
                .inf_norm() < 1e-12 * (1.0 + ab.inf_norm()));
    REQUIRE((reversion(ab) - geometric_product(reversion(b), reversion(a)))
                .inf_norm() < 1e-12 * (1.0 + ab.inf_norm()));
    REQUIRE((clifford_conjugation(ab) -
             geometric_product(clifford_conjugation(b), clifford_conjugation(a)))
                .inf_norm() < 1e-12 * (1.0 + ab.inf_norm()));
    REQUIRE((clifford_conjugation(a) - reversion(main_involution(a))).inf_norm() <
            1e-13);
  }
}

TEST_CASE("spinorial norm is scalar and multiplicative on vector products",
          "[clifford]") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  Signature sig{0, 4};
  auto unit = [&]() {
    std::vector<double> v(4);
    double s = 0;
    for (auto& x : v) {
      x = g(rng);
      s += x * x;
    }
    Multivector u = Multivector::zero(sig);
    for (int i = 0; i < 4; ++i) u.set_coeff(1u << i, v[i] / std::sqrt(s));
    return u;
  };
  for (int rep = 0; rep < 10; ++rep) {
    Multivector u1 = unit();
    REQUIRE(std::abs(spinorial_norm(u1).coeff(0) - 1.0) < 1e-12);
    Multivector p = Multivector::scalar(sig, 1.0);
    for (int k = 0; k < 4; ++k) p = geometric_product(p, unit());
    Multivector nrm = spinorial_norm(p);
    REQUIRE(std::abs(nrm.coeff(0) - 1.0) < 1e-11);
    REQUIRE(nrm.inf_norm_off_scalar() < 1e-11);
  }
  /* rotor in the 12-plane */
  double th = 0.83;
  Multivector r = Multivector::scalar(sig, std::cos(th));
  r.set_coeff((1u << 0) | (1u << 1), std::sin(th));
  REQUIRE(std::abs(spinorial_norm(r).coeff(0) - 1.0) < 1e-15);
}

TEST_CASE("grade projection partitions an element", "[clifford]") {
  std::mt19937_64 rng(23);
  Signature sig{1, 3};
  Multivector a = random_mv(sig, rng);
  Multivector sum = Multivector::zero(sig);
  for (int k = 0; k <= sig.total(); ++k) {
    Multivector gk = grade_project(a, k);
    for (const auto& [m, c] : gk.terms()) REQUIRE(std::popcount(m) == k);
    sum = sum + gk;
  }
  REQUIRE((sum - a).inf_norm() < 1e-15);
  REQUIRE(grade_project(a, sig.total() + 1).inf_norm() < 1e-15);
}

TEST_CASE("even and odd parts split the algebra", "[clifford]") {
  std::mt19937_64 rng(29);
  Signature sig{1, 4};
  Multivector a = random_mv(sig, rng);
  REQUIRE((even_part(a) + odd_part(a) - a).inf_norm() < 1e-15);
  REQUIRE(even_part(a).is_even());
  Multivector e01 = Multivector::blade(sig, {0, 1});
  REQUIRE(e01.is_even());
  REQUIRE(!Multivector::basis_vector(sig, 2).is_even());
}

#ifndef HSPIN_CLIFFORD_HPP
#define HSPIN_CLIFFORD_HPP

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hspin {

using cplx = std::complex<double>;

/* Real Clifford algebra signatures used here: (0,n) for Cl(n) with all
   generators squaring to -1, and (1,n) for Cl(1,n) where generator 0 squares
   to +1.  Generator i of (1,n) is e_i, so the Euclidean subalgebra Cl(n) sits
   inside as the span of blades not containing index 0. */
struct Signature {
  int plus = 0;
  int minus = 0;

  int total() const { return plus + minus; }
  double gen_square(int i) const { return i < plus ? 1.0 : -1.0; }
  bool operator==(const Signature& o) const {
    return plus == o.plus && minus == o.minus;
  }
  bool operator!=(const Signature& o) const { return !(*this == o); }

  void validate() const {
    if (plus < 0 || plus > 1 || minus < 0 || total() < 1 || total() > 16)
      throw std::invalid_argument("Signature: need plus in {0,1}, 1 <= total <= 16");
  }
};

/* Sparse multivector with complex coefficients over the 2^total blade basis.
   Blades are keyed by generator bitmask in canonical increasing index order;
   the term list stays sorted by mask with exact zeros removed. */
class Multivector {
 public:
  using Term = std::pair<uint32_t, cplx>;

  Multivector() : sig_{0, 1} {}
  explicit Multivector(const Signature& sig) : sig_(sig) { sig.validate(); }

  static Multivector zero(const Signature& sig) { return Multivector(sig); }

  static Multivector scalar(const Signature& sig, cplx z) {
    Multivector a(sig);
    a.set_coeff(0, z);
    return a;
  }

  static Multivector basis_vector(const Signature& sig, int i) {
    Multivector a(sig);
    a.check_index(i);
    a.set_coeff(1u << i, 1.0);
    return a;
  }

  /* Blade from an explicit index list, e.g. {0,2} -> e0 e2.  Indices must be
     distinct; the sign of any reordering is produced by the product rule. */
  static Multivector blade(const Signature& sig, std::initializer_list<int> idx) {
    Multivector a = scalar(sig, 1.0);
    for (int i : idx) a = geometric_product_impl(a, basis_vector(sig, i));
    return a;
  }

  static Multivector blade_mask(const Signature& sig, uint32_t mask) {
    Multivector a(sig);
    if (mask >> sig.total())
      throw std::invalid_argument("blade_mask: mask exceeds signature");
    a.set_coeff(mask, 1.0);
    return a;
  }

  const Signature& sig() const { return sig_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  cplx coeff(uint32_t mask) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), mask,
                               [](const Term& t, uint32_t m) { return t.first < m; });
    return (it != terms_.end() && it->first == mask) ? it->second : cplx(0.0);
  }

  void set_coeff(uint32_t mask, cplx z) {
    if (mask >> sig_.total())
      throw std::invalid_argument("set_coeff: mask exceeds signature");
    auto it = std::lower_bound(terms_.begin(), terms_.end(), mask,
                               [](const Term& t, uint32_t m) { return t.first < m; });
    if (it != terms_.end() && it->first == mask) {
      if (z == cplx(0.0))
        terms_.erase(it);
      else
        it->second = z;
    } else if (z != cplx(0.0)) {
      terms_.insert(it, {mask, z});
    }
  }

  cplx scalar_part() const { return coeff(0); }

  double inf_norm() const {
    double m = 0.0;
    for (const auto& [mask, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  double inf_norm_off_scalar() const {
    double m = 0.0;
    for (const auto& [mask, c] : terms_)
      if (mask != 0) m = std::max(m, std::abs(c));
    return m;
  }

  bool is_even() const {
    for (const auto& [mask, c] : terms_)
      if (std::popcount(mask) % 2 != 0) return false;
    return true;
  }

  bool is_grade(int k) const {
    for (const auto& [mask, c] : terms_)
      if (std::popcount(mask) != k) return false;
    return true;
  }

  int max_grade() const {
    int g = 0;
    for (const auto& [mask, c] : terms_) g = std::max(g, std::popcount(mask));
    return g;
  }

  /* Drop terms below tol; numerical hygiene for iterated products. */
  Multivector pruned(double tol) const {
    Multivector a(sig_);
    for (const auto& [mask, c] : terms_)
      if (std::abs(c) > tol) a.terms_.push_back({mask, c});
    return a;
  }

  Multivector operator+(const Multivector& b) const {
    check_sig(b);
    Multivector out(sig_);
    out.terms_.reserve(terms_.size() + b.terms_.size());
    auto i = terms_.begin();
    auto j = b.terms_.begin();
    while (i != terms_.end() || j != b.terms_.end()) {
      if (j == b.terms_.end() || (i != terms_.end() && i->first < j->first)) {
        out.terms_.push_back(*i++);
      } else if (i == terms_.end() || j->first < i->first) {
        out.terms_.push_back(*j++);
      } else {
        cplx s = i->second + j->second;
        if (s != cplx(0.0)) out.terms_.push_back({i->first, s});
        ++i;
        ++j;
      }
    }
    return out;
  }

  Multivector operator-(const Multivector& b) const { return *this + (b * cplx(-1.0)); }

  Multivector operator*(cplx z) const {
    Multivector out(sig_);
    if (z == cplx(0.0)) return out;
    out.terms_ = terms_;
    for (auto& [mask, c] : out.terms_) c *= z;
    return out;
  }

  friend Multivector operator*(cplx z, const Multivector& a) { return a * z; }

  Multivector operator*(const Multivector& b) const {
    return geometric_product_impl(*this, b);
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [mask, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i)";
      for (int i = 0; i < sig_.total(); ++i)
        if ((mask >> i) & 1u) os << " e" << i;
    }
    return os.str();
  }

  /* Canonical product of basis blades: walk the generators of J in increasing
     order, counting transpositions past the higher generators of the evolving
     left mask and contracting repeats with the generator square. */
  static std::pair<double, uint32_t> blade_product(uint32_t I, uint32_t J,
                                                   const Signature& sig) {
    double sign = 1.0;
    uint32_t M = I;
    uint32_t rest = J;
    while (rest) {
      int b = std::countr_zero(rest);
      rest &= rest - 1;
      uint32_t bit = 1u << b;
      if (std::popcount(M >> (b + 1)) % 2 != 0) sign = -sign;
      if (M & bit) {
        sign *= sig.gen_square(b);
        M &= ~bit;
      } else {
        M |= bit;
      }
    }
    return {sign, M};
  }

 private:
  friend Multivector geometric_product(const Multivector&, const Multivector&);

  static Multivector geometric_product_impl(const Multivector& a,
                                            const Multivector& b) {
    a.check_sig(b);
    std::vector<Term> acc;
    acc.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        auto [sign, mask] = blade_product(ma, mb, a.sig_);
        acc.push_back({mask, sign * ca * cb});
      }
    }
    std::sort(acc.begin(), acc.end(),
              [](const Term& x, const Term& y) { return x.first < y.first; });
    Multivector out(a.sig_);
    out.terms_.reserve(acc.size());
    for (const auto& t : acc) {
      if (!out.terms_.empty() && out.terms_.back().first == t.first)
        out.terms_.back().second += t.second;
      else
        out.terms_.push_back(t);
    }
    std::erase_if(out.terms_, [](const Term& t) { return t.second == cplx(0.0); });
    return out;
  }

  void check_sig(const Multivector& b) const {
    if (sig_ != b.sig_)
      throw std::invalid_argument("Multivector: mixed signatures");
  }

  void check_index(int i) const {
    if (i < 0 || i >= sig_.total())
      throw std::invalid_argument("Multivector: generator index out of range");
  }

  Signature sig_;
  std::vector<Term> terms_;
};

inline Multivector geometric_product(const Multivector& a, const Multivector& b) {
  return Multivector::geometric_product_impl(a, b);
}

namespace detail {
template <typename SignFn>
Multivector map_grade_sign(const Multivector& a, SignFn f) {
  Multivector out(a.sig());
  for (const auto& [mask, c] : a.terms()) {
    int k = std::popcount(mask);
    out.set_coeff(mask, f(k) * c);
  }
  return out;
}
}  // namespace detail

/* Grade involution alpha: sign (-1)^k, an algebra automorphism. */
inline Multivector main_involution(const Multivector& a) {
  return detail::map_grade_sign(a, [](int k) { return (k % 2 == 0) ? 1.0 : -1.0; });
}

/* Reversion: sign (-1)^{k(k-1)/2}, an anti-automorphism. */
inline Multivector reversion(const Multivector& a) {
  return detail::map_grade_sign(
      a, [](int k) { return ((k * (k - 1) / 2) % 2 == 0) ? 1.0 : -1.0; });
}

/* Clifford conjugation = reversion of the grade involution: (-1)^{k(k+1)/2}. */
inline Multivector clifford_conjugation(const Multivector& a) {
  return detail::map_grade_sign(
      a, [](int k) { return ((k * (k + 1) / 2) % 2 == 0) ? 1.0 : -1.0; });
}

/* N(a) = conj(a) a; scalar and equal to 1 on the spin groups used here. */
inline Multivector spinorial_norm(const Multivector& a) {
  return geometric_product(clifford_conjugation(a), a);
}

inline Multivector grade_project(const Multivector& a, int k) {
  Multivector out(a.sig());
  for (const auto& [mask, c] : a.terms())
    if (std::popcount(mask) == k) out.set_coeff(mask, c);
  return out;
}

inline Multivector even_part(const Multivector& a) {
  Multivector out(a.sig());
  for (const auto& [mask, c] : a.terms())
    if (std::popcount(mask) % 2 == 0) out.set_coeff(mask, c);
  return out;
}

inline Multivector odd_part(const Multivector& a) {
  Multivector out(a.sig());
  for (const auto& [mask, c] : a.terms())
    if (std::popcount(mask) % 2 != 0) out.set_coeff(mask, c);
  return out;
}

}  // namespace hspin

#endif  // HSPIN_CLIFFORD_HPP

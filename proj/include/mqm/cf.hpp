#pragma once

// Exact rationals, dyadic rationals and finite continued fractions.
//
// Every value in this library lives in [0, 1]. Integers are GMP integers, so
// none of the arithmetic below can overflow; all comparisons are exact
// integer comparisons.

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mqm {

using Integer = mpz_class;

std::string to_string(const Integer& v);
Integer parse_integer(std::string_view text);

inline std::strong_ordering to_ordering(int c) {
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

/// Reduced fraction num/den with num >= 0 and den > 0.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(Integer num, Integer den);
  Rational(long num, long den) : Rational(Integer(num), Integer(den)) {}

  /// Accepts "p/q" or a bare integer "p".
  static Rational parse(std::string_view text);

  const Integer& num() const { return num_; }
  const Integer& den() const { return den_; }

  std::string to_string() const;

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  struct Unchecked {};
  Rational(Integer num, Integer den, Unchecked) : num_(std::move(num)), den_(std::move(den)) {}
  friend Rational make_reduced_unchecked(Integer num, Integer den);

  Integer num_;
  Integer den_;
};

/// Builds a Rational the caller already knows to be reduced (Farey mediants,
/// convergents). Skips the gcd.
Rational make_reduced_unchecked(Integer num, Integer den);

/// num / 2^exp, canonical: num odd or exp == 0.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(Integer num, std::uint64_t exp);

  const Integer& num() const { return num_; }
  std::uint64_t exp() const { return exp_; }

  Rational to_rational() const;
  std::string to_string() const;  // "N/2^e"

  /// Exact mean (a + b) / 2, used for mediant images.
  static Dyadic midpoint(const Dyadic& a, const Dyadic& b);

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.exp_ == b.exp_ && a.num_ == b.num_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

 private:
  Integer num_{0};
  std::uint64_t exp_ = 0;
};

/// Returns a + sign / 2^shift, canonicalized. sign is +1 or -1.
Dyadic add_power_of_two(const Dyadic& a, int sign, std::uint64_t shift);

/// Finite continued fraction [a_1, ..., a_k] = 1/(a_1 + 1/(a_2 + ...)).
/// The empty sequence is 0 and [1] is 1. All quotients are >= 1; the last
/// one may be 1 (non-canonical form) when a caller builds it that way.
class ContinuedFraction {
 public:
  ContinuedFraction() = default;
  explicit ContinuedFraction(std::vector<Integer> quotients);
  ContinuedFraction(std::initializer_list<long> quotients);

  /// Accepts "[a1,a2,...]" with optional whitespace; "[]" is 0.
  static ContinuedFraction parse(std::string_view text);

  const std::vector<Integer>& quotients() const { return q_; }
  std::size_t size() const { return q_.size(); }
  bool empty() const { return q_.empty(); }
  const Integer& operator[](std::size_t i) const { return q_[i]; }

  /// Last quotient >= 2 whenever the length is at least 2.
  bool is_canonical() const;
  ContinuedFraction canonical() const;

  ContinuedFraction with_appended(const Integer& a) const;

  std::string to_string() const;

  friend bool operator==(const ContinuedFraction&, const ContinuedFraction&) = default;

 private:
  std::vector<Integer> q_;
};

struct Convergent {
  Integer p;
  Integer q;
  std::size_t index = 0;  // 1-based, k-th convergent p_k/q_k
};

struct CfValue {
  Rational value;
  std::vector<Convergent> convergents;
};

/// Canonical expansion by the Euclidean algorithm. Requires 0 <= x <= 1.
ContinuedFraction cf_expand(const Rational& x);

/// Exact value plus every intermediate convergent (canonical or not).
CfValue cf_value(const ContinuedFraction& cf);

/// The other of the two expansions of a rational: [..., a_k - 1, 1] when
/// a_k >= 2, else [..., a_{k-1} + 1]. Throws DomainError on the empty sequence.
ContinuedFraction second_representation(const ContinuedFraction& cf);

/// (a.num + b.num) / (a.den + b.den), reduced.
Rational mediant(const Rational& a, const Rational& b);

/// F_1 = F_2 = 1. Throws DomainError for k < 1.
Integer fibonacci(std::uint64_t k);

/// Exact sign of r - d by cross-multiplication.
std::strong_ordering cmp_rational_dyadic(const Rational& r, const Dyadic& d);

/// Same, with the rational given as a raw (p, q) pair (q > 0), no reduction needed.
std::strong_ordering cmp_ratio_dyadic(const Integer& p, const Integer& q, const Dyadic& d);

}  // namespace mqm

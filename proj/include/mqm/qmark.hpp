#pragma once

// Minkowski's question mark function at rationals.
//
// For x = [a_1, ..., a_k] the value is the finite alternating series
//   ?(x) = sum_j (-1)^(j+1) / 2^(a_1 + ... + a_j - 1),
// a dyadic rational with exponent a_1 + ... + a_k - 1.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mqm/cf.hpp"

namespace mqm {

Dyadic qmark_of_cf(const ContinuedFraction& cf);
Dyadic qmark_of_rational(const Rational& x);

/// Appends quotient `a` at position `n` (1-based) to a prefix whose image and
/// quotient sum are known: returns image + (-1)^(n+1) / 2^(prefix_sum + a - 1).
/// Throws DomainError if the result leaves [0, 1] (inconsistent arguments).
Dyadic qmark_extend(const Dyadic& image, std::uint64_t prefix_sum, std::size_t n, std::uint64_t a);

/// Continued fraction of ?([a_1, ..., a_{n-1}, a_n]) when a_n = a_1 + ... + a_{n-1} + s,
/// given image_cf = [b_1, ..., b_k], the expansion of ?([a_1, ..., a_{n-1}]) with b_k != 1.
/// The result is the palindromic folded form, which need not be canonical.
ContinuedFraction fold_extend(const ContinuedFraction& image_cf, std::size_t n, std::uint64_t s);

/// Exact value of ?(x) - x = num / den with den = den(x) * 2^exp(?(x)).
struct SignedGap {
  int sign = 0;
  Integer num;  // signed
  Integer den;
};

SignedGap g_sign(const Rational& x);

enum class Direction { constant, increasing, decreasing, mixed };

const char* to_string(Direction d);

struct IterateLimits {
  std::size_t max_steps = 8;
  std::uint64_t bit_budget = 1'000'000;
};

struct IterationResult {
  std::vector<Rational> values;  // z_0 = x, z_{i+1} = ?(z_i)
  Direction direction = Direction::constant;
};

/// Throws ResourceError when steps > limits.max_steps or an exponent passes the bit budget.
IterationResult qmark_iterate(const Rational& x, std::size_t steps, const IterateLimits& limits = {});

struct LevelMember {
  ContinuedFraction cf;
  Rational value;
  Dyadic image;
};

/// B_n: every canonical expansion whose quotients sum to n + 1, sorted by value.
struct Level {
  std::size_t n = 0;
  std::vector<LevelMember> members;
};

constexpr std::size_t kDefaultMaxLevel = 24;

/// Throws DomainError for n == 0 and ResourceError for n > max_level.
Level stern_brocot_level(std::size_t n, std::size_t max_level = kDefaultMaxLevel);

/// CSV rows "cf,p,q,image_num,image_exp" with a header line.
std::string level_csv(const Level& level);

Integer sum_quotients(const ContinuedFraction& cf);

}  // namespace mqm

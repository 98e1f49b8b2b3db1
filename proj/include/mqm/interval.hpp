#pragma once

// Outward-rounded real intervals on top of MPFR.
//
// Every operation rounds the lower end toward -inf and the upper end toward
// +inf, so the true real value is always enclosed. Strict inequalities
// between integers and irrational expressions are decided by re-evaluating
// the expression at increasing precision until the enclosure excludes the
// integer.

#include <mpfr.h>

#include <functional>
#include <string>

#include "mqm/cf.hpp"

namespace mqm {

class Interval {
 public:
  explicit Interval(mpfr_prec_t precision);
  Interval(const Interval& other);
  Interval(Interval&& other) noexcept;
  Interval& operator=(const Interval& other);
  Interval& operator=(Interval&& other) noexcept;
  ~Interval();

  static Interval from_integer(const Integer& v, mpfr_prec_t precision);
  static Interval from_ratio(const Integer& num, const Integer& den, mpfr_prec_t precision);

  mpfr_prec_t precision() const { return precision_; }
  mpfr_srcptr lower() const { return lo_; }
  mpfr_srcptr upper() const { return hi_; }

  /// The same enclosure stored at another precision, rounded outward.
  Interval with_precision(mpfr_prec_t precision) const;

  /// Upper end minus lower end, rounded up.
  double width() const;
  double midpoint() const;

  bool certainly_less_than(const Integer& v) const;     // hi < v
  bool certainly_greater_than(const Integer& v) const;  // lo > v
  bool contains(double v) const;

  std::string to_string(int digits = 20) const;

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  friend Interval operator/(const Interval& a, const Interval& b);
  friend Interval sqrt(const Interval& a);
  friend Interval log(const Interval& a);
  friend Interval log2(const Interval& a);

 private:
  mpfr_prec_t precision_;
  mpfr_t lo_;
  mpfr_t hi_;
};

Interval operator*(const Interval& a, const Integer& k);
Interval operator+(const Interval& a, const Integer& k);

/// phi = (sqrt 5 + 1)/2, kappa1 = 2 log2(phi) - 1,
/// kappa2 = (5 ln l4 - 4 ln l5) / (ln 2 / 2 + ln l4 - ln l5), l_i = (i + sqrt(i^2 + 4))/2.
struct Constants {
  Interval phi;
  Interval kappa1;
  Interval kappa2;
};

/// Constants evaluated from scratch at the given precision; memoized per
/// precision level and safe to call from several threads.
const Constants& constants_at(mpfr_prec_t precision);

struct PrecisionPolicy {
  mpfr_prec_t start = 128;
  mpfr_prec_t ceiling = 16384;
};

enum class Verdict { holds, fails, undecided };

struct Decision {
  Verdict verdict = Verdict::undecided;
  mpfr_prec_t precision = 0;  // precision at which the verdict was reached
};

/// Decides `lhs < rhs(precision)` for an integer lhs and a real rhs that is
/// never exactly equal to lhs. Doubles the precision until the enclosure of
/// rhs lies strictly on one side of lhs; gives up as undecided past the ceiling.
Decision decide_integer_below(const Integer& lhs, const std::function<Interval(mpfr_prec_t)>& rhs,
                              const PrecisionPolicy& policy = {});

}  // namespace mqm

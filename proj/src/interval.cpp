#include "mqm/interval.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "mqm/error.hpp"

namespace mqm {

Interval::Interval(mpfr_prec_t precision) : precision_(precision) {
  mpfr_init2(lo_, precision);
  mpfr_init2(hi_, precision);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& other) : precision_(other.precision_) {
  mpfr_init2(lo_, precision_);
  mpfr_init2(hi_, precision_);
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& other) noexcept : precision_(other.precision_) {
  // mpfr_t is an array type; steal the limbs by swapping into fresh storage.
  mpfr_init2(lo_, precision_);
  mpfr_init2(hi_, precision_);
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

Interval& Interval::operator=(const Interval& other) {
  if (this != &other) {
    Interval tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& other) noexcept {
  if (this != &other) {
    std::swap(precision_, other.precision_);
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
  }
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::from_integer(const Integer& v, mpfr_prec_t precision) {
  Interval out(precision);
  mpfr_set_z(out.lo_, v.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(out.hi_, v.get_mpz_t(), MPFR_RNDU);
  return out;
}

Interval Interval::from_ratio(const Integer& num, const Integer& den, mpfr_prec_t precision) {
  if (den == 0) throw DomainError("interval from a zero denominator");
  mpq_class q(num, den);
  q.canonicalize();
  Interval out(precision);
  mpfr_set_q(out.lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(out.hi_, q.get_mpq_t(), MPFR_RNDU);
  return out;
}

Interval Interval::with_precision(mpfr_prec_t precision) const {
  Interval out(precision);
  mpfr_set(out.lo_, lo_, MPFR_RNDD);
  mpfr_set(out.hi_, hi_, MPFR_RNDU);
  return out;
}

double Interval::width() const {
  mpfr_t w;
  mpfr_init2(w, precision_);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  double d = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return d;
}

double Interval::midpoint() const {
  mpfr_t m;
  mpfr_init2(m, precision_ + 1);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  double d = mpfr_get_d(m, MPFR_RNDN);
  mpfr_clear(m);
  return d;
}

bool Interval::certainly_less_than(const Integer& v) const { return mpfr_cmp_z(hi_, v.get_mpz_t()) < 0; }

bool Interval::certainly_greater_than(const Integer& v) const { return mpfr_cmp_z(lo_, v.get_mpz_t()) > 0; }

bool Interval::contains(double v) const { return mpfr_cmp_d(lo_, v) <= 0 && mpfr_cmp_d(hi_, v) >= 0; }

std::string Interval::to_string(int digits) const {
  char* a = nullptr;
  char* b = nullptr;
  mpfr_asprintf(&a, "%.*RDg", digits, lo_);
  mpfr_asprintf(&b, "%.*RUg", digits, hi_);
  std::string s = std::string("[") + a + ", " + b + "]";
  mpfr_free_str(a);
  mpfr_free_str(b);
  return s;
}

Interval operator+(const Interval& a, const Interval& b) {
  Interval out(std::max(a.precision_, b.precision_));
  mpfr_add(out.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(out.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return out;
}

Interval operator-(const Interval& a, const Interval& b) {
  Interval out(std::max(a.precision_, b.precision_));
  mpfr_sub(out.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(out.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return out;
}

Interval operator*(const Interval& a, const Interval& b) {
  const mpfr_prec_t prec = std::max(a.precision_, b.precision_);
  Interval out(prec);
  mpfr_t t;
  mpfr_init2(t, prec);
  mpfr_srcptr xs[2] = {a.lo_, a.hi_};
  mpfr_srcptr ys[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto x : xs) {
    for (auto y : ys) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (first || mpfr_less_p(t, out.lo_)) mpfr_set(out.lo_, t, MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (first || mpfr_greater_p(t, out.hi_)) mpfr_set(out.hi_, t, MPFR_RNDU);
      first = false;
    }
  }
  mpfr_clear(t);
  return out;
}

Interval operator/(const Interval& a, const Interval& b) {
  if (mpfr_sgn(b.lo_) <= 0 && mpfr_sgn(b.hi_) >= 0) throw DomainError("interval division by an interval containing 0");
  Interval inv(b.precision_);
  mpfr_ui_div(inv.lo_, 1, b.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, b.lo_, MPFR_RNDU);
  return a * inv;
}

Interval sqrt(const Interval& a) {
  if (mpfr_sgn(a.lo_) < 0) throw DomainError("interval sqrt of a possibly negative value");
  Interval out(a.precision_);
  mpfr_sqrt(out.lo_, a.lo_, MPFR_RNDD);
  mpfr_sqrt(out.hi_, a.hi_, MPFR_RNDU);
  return out;
}

Interval log(const Interval& a) {
  if (mpfr_sgn(a.lo_) <= 0) throw DomainError("interval log of a possibly non-positive value");
  Interval out(a.precision_);
  mpfr_log(out.lo_, a.lo_, MPFR_RNDD);
  mpfr_log(out.hi_, a.hi_, MPFR_RNDU);
  return out;
}

Interval log2(const Interval& a) {
  if (mpfr_sgn(a.lo_) <= 0) throw DomainError("interval log2 of a possibly non-positive value");
  Interval out(a.precision_);
  mpfr_log2(out.lo_, a.lo_, MPFR_RNDD);
  mpfr_log2(out.hi_, a.hi_, MPFR_RNDU);
  return out;
}

Interval operator*(const Interval& a, const Integer& k) { return a * Interval::from_integer(k, a.precision()); }

Interval operator+(const Interval& a, const Integer& k) { return a + Interval::from_integer(k, a.precision()); }

namespace {

// Evaluated with guard bits, then rounded outward to `target` so that the
// stored enclosures are as tight as that precision allows.
Constants compute_constants(mpfr_prec_t target) {
  const mpfr_prec_t prec = target + 32;
  auto integer = [prec](long v) { return Interval::from_integer(Integer(v), prec); };
  Interval phi = (sqrt(integer(5)) + integer(1)) / integer(2);
  Interval kappa1 = integer(2) * log2(phi) - integer(1);
  Interval l4 = (integer(4) + sqrt(integer(20))) / integer(2);
  Interval l5 = (integer(5) + sqrt(integer(29))) / integer(2);
  Interval ln4 = log(l4);
  Interval ln5 = log(l5);
  Interval numer = integer(5) * ln4 - integer(4) * ln5;
  Interval denom = log(integer(2)) / integer(2) + ln4 - ln5;
  return Constants{phi.with_precision(target), kappa1.with_precision(target), (numer / denom).with_precision(target)};
}

}  // namespace

const Constants& constants_at(mpfr_prec_t precision) {
  static std::mutex mu;
  static std::map<mpfr_prec_t, std::unique_ptr<Constants>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[precision];
  if (!slot) slot = std::make_unique<Constants>(compute_constants(precision));
  return *slot;
}

Decision decide_integer_below(const Integer& lhs, const std::function<Interval(mpfr_prec_t)>& rhs,
                              const PrecisionPolicy& policy) {
  for (mpfr_prec_t prec = policy.start; prec <= policy.ceiling; prec *= 2) {
    Interval value = rhs(prec);
    if (value.certainly_greater_than(lhs)) return {Verdict::holds, prec};
    if (mpfr_cmp_z(value.upper(), lhs.get_mpz_t()) <= 0) return {Verdict::fails, prec};
  }
  return {Verdict::undecided, policy.ceiling};
}

}  // namespace mqm

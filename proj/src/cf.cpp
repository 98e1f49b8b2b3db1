#include "mqm/cf.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include "mqm/error.hpp"

namespace mqm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string to_string(const Integer& v) { return v.get_str(10); }

Integer parse_integer(std::string_view text) {
  text = trim(text);
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) != 0;
      })) {
    throw ParseError("not a non-negative decimal integer: '" + std::string(text) + "'");
  }
  return Integer(std::string(text), 10);
}

// --- Rational ---------------------------------------------------------------

Rational::Rational(Integer num, Integer den) : num_(std::move(num)), den_(std::move(den)) {
  if (sgn(den_) <= 0) throw DomainError("rational denominator must be positive");
  if (sgn(num_) < 0) throw DomainError("rational numerator must be non-negative");
  Integer g = gcd(num_, den_);
  if (g != 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational make_reduced_unchecked(Integer num, Integer den) {
  return Rational(std::move(num), std::move(den), Rational::Unchecked{});
}

Rational Rational::parse(std::string_view text) {
  text = trim(text);
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text), Integer(1));
  Integer num = parse_integer(text.substr(0, slash));
  Integer den = parse_integer(text.substr(slash + 1));
  if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return Rational(std::move(num), std::move(den));
}

std::string Rational::to_string() const { return mqm::to_string(num_) + "/" + mqm::to_string(den_); }

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  Integer l = a.num_ * b.den_;
  Integer r = b.num_ * a.den_;
  return to_ordering(cmp(l, r));
}

// --- Dyadic -----------------------------------------------------------------

Dyadic::Dyadic(Integer num, std::uint64_t exp) : num_(std::move(num)), exp_(exp) {
  if (sgn(num_) < 0) throw DomainError("dyadic numerator must be non-negative");
  if (num_ == 0) {
    exp_ = 0;
    return;
  }
  auto zeros = static_cast<std::uint64_t>(mpz_scan1(num_.get_mpz_t(), 0));
  auto drop = std::min(zeros, exp_);
  if (drop > 0) {
    mpz_tdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), drop);
    exp_ -= drop;
  }
}

Rational Dyadic::to_rational() const {
  Integer den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, exp_);
  return make_reduced_unchecked(num_, std::move(den));
}

std::string Dyadic::to_string() const {
  return mqm::to_string(num_) + "/2^" + std::to_string(exp_);
}

Dyadic Dyadic::midpoint(const Dyadic& a, const Dyadic& b) {
  std::uint64_t e = std::max(a.exp_, b.exp_) + 1;
  Integer x = a.num_ << static_cast<mp_bitcnt_t>(e - 1 - a.exp_);
  Integer y = b.num_ << static_cast<mp_bitcnt_t>(e - 1 - b.exp_);
  return Dyadic(x + y, e);
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  if (a.exp_ == b.exp_) return to_ordering(cmp(a.num_, b.num_));
  if (a.exp_ < b.exp_) {
    Integer x = a.num_ << static_cast<mp_bitcnt_t>(b.exp_ - a.exp_);
    return to_ordering(cmp(x, b.num_));
  }
  Integer y = b.num_ << static_cast<mp_bitcnt_t>(a.exp_ - b.exp_);
  return to_ordering(cmp(a.num_, y));
}

Dyadic add_power_of_two(const Dyadic& a, int sign, std::uint64_t shift) {
  std::uint64_t e = std::max(a.exp(), shift);
  Integer n = a.num() << static_cast<mp_bitcnt_t>(e - a.exp());
  Integer term = Integer(1) << static_cast<mp_bitcnt_t>(e - shift);
  if (sign >= 0) {
    n += term;
  } else {
    n -= term;
  }
  if (sgn(n) < 0) throw DomainError("dyadic sum is negative");
  return Dyadic(std::move(n), e);
}

// --- ContinuedFraction ------------------------------------------------------

ContinuedFraction::ContinuedFraction(std::vector<Integer> quotients) : q_(std::move(quotients)) {
  for (const auto& a : q_) {
    if (a < 1) throw DomainError("partial quotients must be positive");
  }
}

ContinuedFraction::ContinuedFraction(std::initializer_list<long> quotients) {
  q_.reserve(quotients.size());
  for (long a : quotients) {
    if (a < 1) throw DomainError("partial quotients must be positive");
    q_.emplace_back(a);
  }
}

ContinuedFraction ContinuedFraction::parse(std::string_view text) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    throw ParseError("expected a continued fraction '[a1,a2,...]', got '" + std::string(text) + "'");
  }
  text = text.substr(1, text.size() - 2);
  std::vector<Integer> out;
  text = trim(text);
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = text.substr(0, comma);
    Integer a = parse_integer(item);
    if (a < 1) throw ParseError("partial quotients must be positive");
    out.push_back(std::move(a));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
    if (trim(text).empty()) throw ParseError("trailing comma in continued fraction");
  }
  return ContinuedFraction(std::move(out));
}

bool ContinuedFraction::is_canonical() const { return q_.size() < 2 || q_.back() >= 2; }

ContinuedFraction ContinuedFraction::canonical() const {
  if (is_canonical()) return *this;
  std::vector<Integer> out(q_.begin(), q_.end() - 1);
  out.back() += 1;
  return ContinuedFraction(std::move(out));
}

ContinuedFraction ContinuedFraction::with_appended(const Integer& a) const {
  std::vector<Integer> out = q_;
  out.push_back(a);
  return ContinuedFraction(std::move(out));
}

std::string ContinuedFraction::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < q_.size(); ++i) {
    if (i) s += ",";
    s += mqm::to_string(q_[i]);
  }
  return s + "]";
}

ContinuedFraction cf_expand(const Rational& x) {
  if (x.num() > x.den()) throw DomainError("cf_expand requires 0 <= x <= 1, got " + x.to_string());
  std::vector<Integer> out;
  Integer p = x.num();
  Integer q = x.den();
  Integer a, r;
  while (p != 0) {
    mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    out.push_back(a);
    q = std::move(p);
    p = std::move(r);
    r = 0;
  }
  return ContinuedFraction(std::move(out));
}

CfValue cf_value(const ContinuedFraction& cf) {
  CfValue result;
  result.convergents.reserve(cf.size());
  Integer p_prev = 1, q_prev = 0;  // p_{-1}, q_{-1}
  Integer p = 0, q = 1;            // p_0, q_0
  for (std::size_t k = 0; k < cf.size(); ++k) {
    Integer pn = cf[k] * p + p_prev;
    Integer qn = cf[k] * q + q_prev;
    p_prev = std::move(p);
    q_prev = std::move(q);
    p = std::move(pn);
    q = std::move(qn);
    result.convergents.push_back(Convergent{p, q, k + 1});
  }
  result.value = make_reduced_unchecked(p, q);
  return result;
}

ContinuedFraction second_representation(const ContinuedFraction& cf) {
  if (cf.empty()) throw DomainError("0 has a single (empty) expansion");
  std::vector<Integer> q = cf.quotients();
  if (q.back() >= 2) {
    q.back() -= 1;
    q.emplace_back(1);
  } else {
    if (q.size() == 1) throw DomainError("[1] has no second expansion with positive quotients");
    q.pop_back();
    q.back() += 1;
  }
  return ContinuedFraction(std::move(q));
}

Rational mediant(const Rational& a, const Rational& b) {
  return Rational(a.num() + b.num(), a.den() + b.den());
}

Integer fibonacci(std::uint64_t k) {
  if (k < 1) throw DomainError("fibonacci index must be >= 1");
  Integer f;
  mpz_fib_ui(f.get_mpz_t(), static_cast<unsigned long>(k));
  return f;
}

std::strong_ordering cmp_ratio_dyadic(const Integer& p, const Integer& q, const Dyadic& d) {
  Integer lhs = p << static_cast<mp_bitcnt_t>(d.exp());
  Integer rhs = d.num() * q;
  return to_ordering(cmp(lhs, rhs));
}

std::strong_ordering cmp_rational_dyadic(const Rational& r, const Dyadic& d) {
  return cmp_ratio_dyadic(r.num(), r.den(), d);
}

}  // namespace mqm

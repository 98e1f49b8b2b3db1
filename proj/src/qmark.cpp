#include "mqm/qmark.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "mqm/error.hpp"

namespace mqm {

namespace {

std::uint64_t to_u64(const Integer& v, const char* what) {
  if (sgn(v) < 0 || !mpz_fits_ulong_p(v.get_mpz_t())) {
    throw ResourceError(std::string(what) + " does not fit in 64 bits");
  }
  return static_cast<std::uint64_t>(mpz_get_ui(v.get_mpz_t()));
}

}  // namespace

Dyadic qmark_of_cf(const ContinuedFraction& cf) {
  if (cf.empty()) return Dyadic();
  // Horner over the alternating series: N = ((s_1 << a_2) + s_2) << a_3 ...
  Integer acc = 0;
  std::uint64_t total = 0;
  int sign = 1;
  for (std::size_t k = 0; k < cf.size(); ++k) {
    std::uint64_t a = to_u64(cf[k], "partial quotient");
    if (k > 0) acc <<= static_cast<mp_bitcnt_t>(a);
    acc += sign;
    sign = -sign;
    total += a;
  }
  return Dyadic(std::move(acc), total - 1);
}

Dyadic qmark_of_rational(const Rational& x) { return qmark_of_cf(cf_expand(x)); }

Dyadic qmark_extend(const Dyadic& image, std::uint64_t prefix_sum, std::size_t n, std::uint64_t a) {
  if (n < 1 || a < 1) throw DomainError("qmark_extend needs n >= 1 and a >= 1");
  int sign = (n % 2 == 1) ? 1 : -1;
  Dyadic out = [&] {
    try {
      return add_power_of_two(image, sign, prefix_sum + a - 1);
    } catch (const DomainError&) {
      throw DomainError("qmark_extend: extended image is negative; inconsistent prefix");
    }
  }();
  if (out.exp() == 0 && out.num() > 1) {
    throw DomainError("qmark_extend: extended image exceeds 1; inconsistent prefix");
  }
  return out;
}

ContinuedFraction fold_extend(const ContinuedFraction& image_cf, std::size_t n, std::uint64_t s) {
  if (image_cf.empty()) throw DomainError("fold_extend needs a non-empty image expansion");
  const auto& b = image_cf.quotients();
  const std::size_t k = b.size();
  if (b.back() == 1) throw DomainError("fold_extend requires b_k != 1");
  if (s > 1'000'000) throw ResourceError("fold_extend: 2^(s+1) - 1 is too large");

  Integer middle = (Integer(1) << static_cast<mp_bitcnt_t>(s + 1)) - 1;
  std::vector<Integer> out;
  out.reserve(2 * k + 2);
  if (n % 2 == k % 2) {
    // [b_1, ..., b_{k-1}, b_k - 1, 1, 2^(s+1) - 1, b_k, ..., b_1]
    out.insert(out.end(), b.begin(), b.end() - 1);
    out.push_back(b.back() - 1);
    out.emplace_back(1);
    out.push_back(middle);
    out.insert(out.end(), b.rbegin(), b.rend());
  } else {
    // [b_1, ..., b_k, 2^(s+1) - 1, 1, b_k - 1, b_{k-1}, ..., b_1]
    out.insert(out.end(), b.begin(), b.end());
    out.push_back(middle);
    out.emplace_back(1);
    out.push_back(b.back() - 1);
    out.insert(out.end(), b.rbegin() + 1, b.rend());
  }

  // A zero quotient can only come from b_k - 1, which b_k != 1 rules out; the
  // merge rule [.., x, 0, y, ..] = [.., x + y, ..] is kept for completeness.
  std::vector<Integer> merged;
  merged.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == 0 && !merged.empty() && i + 1 < out.size()) {
      merged.back() += out[i + 1];
      ++i;
    } else {
      merged.push_back(out[i]);
    }
  }
  return ContinuedFraction(std::move(merged));
}

SignedGap g_sign(const Rational& x) {
  Dyadic image = qmark_of_rational(x);
  SignedGap gap;
  gap.num = image.num() * x.den() - (x.num() << static_cast<mp_bitcnt_t>(image.exp()));
  gap.den = x.den() << static_cast<mp_bitcnt_t>(image.exp());
  gap.sign = sgn(gap.num);
  return gap;
}

const char* to_string(Direction d) {
  switch (d) {
    case Direction::constant:
      return "constant";
    case Direction::increasing:
      return "increasing";
    case Direction::decreasing:
      return "decreasing";
    case Direction::mixed:
      return "mixed";
  }
  return "mixed";
}

IterationResult qmark_iterate(const Rational& x, std::size_t steps, const IterateLimits& limits) {
  if (steps > limits.max_steps) {
    throw ResourceError("iteration depth " + std::to_string(steps) + " exceeds cap " +
                        std::to_string(limits.max_steps));
  }
  if (x.num() > x.den()) throw DomainError("qmark_iterate requires 0 <= x <= 1");
  IterationResult out;
  out.values.push_back(x);
  bool up = false, down = false;
  for (std::size_t i = 0; i < steps; ++i) {
    const Rational& z = out.values.back();
    // The exponent of ?(z) is the quotient sum of z minus one; check before building it.
    Integer s = sum_quotients(cf_expand(z));
    if (s > 0 && Integer(s - 1) > limits.bit_budget) {
      throw ResourceError("iteration " + std::to_string(i + 1) + " needs a 2^" + to_string(Integer(s - 1)) +
                          " denominator, over the bit budget");
    }
    Rational next = qmark_of_rational(z).to_rational();
    auto c = next <=> z;
    if (c > 0) up = true;
    if (c < 0) down = true;
    out.values.push_back(std::move(next));
  }
  out.direction = up && down ? Direction::mixed
                  : up       ? Direction::increasing
                  : down     ? Direction::decreasing
                             : Direction::constant;
  return out;
}

Level stern_brocot_level(std::size_t n, std::size_t max_level) {
  if (n == 0) throw DomainError("level index must be >= 1");
  if (n > max_level) {
    throw ResourceError("level " + std::to_string(n) + " has 2^" + std::to_string(n - 1) +
                        " members, over the configured cap of level " + std::to_string(max_level));
  }
  // Compositions of n + 1 with last part >= 2, i.e. a composition of n - 1
  // (encoded by a bit mask of cut points) followed by +1 on the last part.
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  Level level;
  level.n = n;
  level.members.reserve(count);
  std::vector<Integer> parts;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    parts.clear();
    long run = 1;
    for (std::size_t bit = 0; bit + 1 < n; ++bit) {
      if (mask >> bit & 1) {
        parts.emplace_back(run);
        run = 1;
      } else {
        ++run;
      }
    }
    parts.emplace_back(run + 1);
    ContinuedFraction cf(parts);
    Rational value = cf_value(cf).value;
    Dyadic image = qmark_of_cf(cf);
    level.members.push_back(LevelMember{std::move(cf), std::move(value), std::move(image)});
  }
  std::sort(level.members.begin(), level.members.end(),
            [](const LevelMember& a, const LevelMember& b) { return a.value < b.value; });
  return level;
}

std::string level_csv(const Level& level) {
  std::ostringstream os;
  os << "cf,p,q,image_num,image_exp\n";
  for (const auto& m : level.members) {
    os << '"' << m.cf.to_string() << "\"," << m.value.num() << ',' << m.value.den() << ',' << m.image.num()
       << ',' << m.image.exp() << '\n';
  }
  return os.str();
}

Integer sum_quotients(const ContinuedFraction& cf) {
  Integer s = 0;
  for (const auto& a : cf.quotients()) s += a;
  return s;
}

}  // namespace mqm

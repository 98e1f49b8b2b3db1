#include "mqm/verify.hpp"

#include <json.hpp>

#include <algorithm>

#include "mqm/error.hpp"
#include "mqm/qmark.hpp"

namespace mqm {

namespace {

constexpr std::size_t kPhiIdentityLimit = 64;

Interval integer_iv(const Integer& v, mpfr_prec_t prec) { return Interval::from_integer(v, prec); }
Integer ul(std::uint64_t v) { return Integer(static_cast<unsigned long>(v)); }

const FixedPointRecord& require(const FixedPointRecord& record, std::size_t min_len, const char* check) {
  if (record.size() < min_len) {
    throw DomainError(std::string(check) + " needs at least " + std::to_string(min_len) + " digits, got " +
                      std::to_string(record.size()));
  }
  return record;
}

// Records one strict comparison lhs < rhs(prec) into the report.
void decide(VerificationReport& report, std::size_t index, const Integer& lhs,
            const std::function<Interval(mpfr_prec_t)>& rhs, std::map<std::string, std::string> witness,
            const PrecisionPolicy& policy) {
  Decision d = decide_integer_below(lhs, rhs, policy);
  report.precision_bits = std::max(report.precision_bits, d.precision);
  if (d.verdict == Verdict::holds) return;
  witness["lhs"] = to_string(lhs);
  witness["rhs"] = rhs(d.precision).to_string(25);
  witness["precision"] = std::to_string(d.precision);
  if (d.verdict == Verdict::fails) {
    report.violations.push_back(Finding{index, std::move(witness)});
  } else {
    report.undecided.push_back(Finding{index, std::move(witness)});
  }
}

nlohmann::json findings_json(const std::vector<Finding>& findings) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : findings) {
    nlohmann::json j;
    j["index"] = f.index;
    for (const auto& [k, v] : f.witness) j[k] = v;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace

std::string VerificationReport::to_json() const {
  nlohmann::json j;
  j["check"] = check;
  j["range"] = {range_lo, range_hi};
  j["violations"] = findings_json(violations);
  j["undecided"] = findings_json(undecided);
  j["precision_bits"] = precision_bits;
  j["details"] = nlohmann::json(details);
  return j.dump();
}

VerificationReport check_theorem1(const FixedPointRecord& record) {
  require(record, 1, "check_theorem1");
  VerificationReport r;
  r.check = "check_theorem1";
  r.range_lo = 0;
  r.range_hi = record.size() - 1;
  if (record.digits[0] != 2) {
    r.violations.push_back(Finding{0, {{"a_1", std::to_string(record.digits[0])}, {"expected", "2"}}});
  }
  for (std::size_t n = 1; n < record.size(); ++n) {
    const auto a = record.digits[n];
    const auto s = record.sums[n - 1];
    if (a > s) r.violations.push_back(Finding{n, {{"a", std::to_string(a)}, {"S", std::to_string(s)}}});
  }
  return r;
}

VerificationReport check_theorem1_improved(const FixedPointRecord& record, const PrecisionPolicy& policy) {
  require(record, 1, "check_theorem1_improved");
  VerificationReport r;
  r.check = "check_theorem1_improved";
  r.range_lo = 1;
  r.range_hi = record.size() - 1;
  for (std::size_t n = 1; n < record.size(); ++n) {
    const Integer s = ul(record.sums[n - 1]);
    auto rhs = [&s](mpfr_prec_t prec) {
      Interval sv = integer_iv(s, prec);
      return constants_at(prec).kappa1 * sv + integer_iv(2, prec) * log2(sv);
    };
    decide(r, n, ul(record.digits[n]), rhs, {{"S", to_string(s)}}, policy);
  }
  return r;
}

VerificationReport check_remark4(const FixedPointRecord& record, std::size_t kmax, const PrecisionPolicy& policy) {
  if (kmax < 1) throw DomainError("kmax must be >= 1");
  require(record, kmax + 1, "check_remark4");
  VerificationReport r;
  r.check = "check_remark4";
  r.range_lo = 1;
  r.range_hi = record.size() - 1;
  r.details["kmax"] = std::to_string(kmax);
  for (std::size_t n = 1; n < record.size(); ++n) {
    const Integer s = ul(record.sums[n - 1]);
    for (std::size_t k = 1; k <= kmax && n + k <= record.size(); ++k) {
      const Integer window = ul(record.sums[n + k - 1] - record.sums[n - 1]);
      auto rhs = [&s, k](mpfr_prec_t prec) {
        Interval sv = integer_iv(s, prec);
        return constants_at(prec).kappa1 * sv + integer_iv(ul(2 * k), prec) * log2(sv);
      };
      decide(r, n, window, rhs, {{"S", to_string(s)}, {"k", std::to_string(k)}}, policy);
    }
  }
  return r;
}

VerificationReport check_remark5(const FixedPointRecord& record, const PrecisionPolicy& policy) {
  require(record, 1, "check_remark5");
  VerificationReport r;
  r.check = "check_remark5";
  r.range_lo = 1;
  r.range_hi = record.size();
  for (std::size_t n = 1; n <= record.size(); ++n) {
    auto rhs = [n](mpfr_prec_t prec) { return constants_at(prec).kappa2 * integer_iv(ul(n), prec); };
    decide(r, n, ul(record.sums[n - 1]), rhs, {}, policy);
  }
  return r;
}

VerificationReport check_corollary6(const FixedPointRecord& record, const PrecisionPolicy& policy) {
  require(record, 3, "check_corollary6");
  VerificationReport r;
  r.check = "check_corollary6";
  r.range_lo = 2;
  r.range_hi = record.size() - 1;
  for (std::size_t n = 2; n < record.size(); ++n) {
    auto rhs = [n](mpfr_prec_t prec) {
      const Constants& c = constants_at(prec);
      Interval k2n = c.kappa2 * integer_iv(ul(n), prec);
      return c.kappa1 * k2n + integer_iv(2, prec) * log2(k2n);
    };
    decide(r, n, ul(record.digits[n]), rhs, {}, policy);
  }
  return r;
}

VerificationReport check_kanlem(const FixedPointRecord& record) {
  require(record, 1, "check_kanlem");
  VerificationReport r;
  r.check = "check_kanlem";
  r.range_lo = 1;
  r.range_hi = record.size();
  std::size_t equalities = 0;
  for (std::size_t n = 1; n <= record.size(); ++n) {
    const auto s = record.sums[n - 1];
    const Integer& q = record.convergents[n - 1].q;
    const Integer f = fibonacci(s + 1);
    if (q > f) {
      r.violations.push_back(Finding{n, {{"q", to_string(q)}, {"S", std::to_string(s)}, {"F", to_string(f)}}});
    } else if (q == f) {
      ++equalities;
    }
  }
  r.details["equalities"] = std::to_string(equalities);

  // phi^S = a + b phi with a = F_{S-1}, b = F_S; then F_{S+1} = F_{S-1} + F_S
  // <= F_{S-1} + F_S phi because phi > 1.
  const std::uint64_t s_max = std::min<std::uint64_t>(record.sums.back(), kPhiIdentityLimit);
  const bool phi_above_one = constants_at(128).phi.certainly_greater_than(1);
  if (!phi_above_one) r.violations.push_back(Finding{0, {{"phi", constants_at(128).phi.to_string()}}});
  Integer a = 0, b = 1;
  for (std::uint64_t s = 1; s <= s_max; ++s) {
    const Integer f_prev = s == 1 ? Integer(0) : fibonacci(s - 1);
    if (a != f_prev || b != fibonacci(s)) {
      r.violations.push_back(Finding{0, {{"phi_power", std::to_string(s)}, {"a", to_string(a)}, {"b", to_string(b)}}});
    }
    Integer next_a = b;
    b += a;
    a = std::move(next_a);
  }
  r.details["phi_identity_checked_to"] = std::to_string(s_max);
  return r;
}

Interval irrationality_bound(const Integer& q, mpfr_prec_t precision) {
  if (q < 2) throw DomainError("irrationality_bound needs q >= 2");
  const Constants& c = constants_at(precision);
  Interval two = integer_iv(2, precision);
  Interval inner = two * log2(integer_iv(q, precision)) + log2(Interval::from_ratio(9, 2, precision));
  return c.kappa1 * inner + two * log2(inner) + integer_iv(1, precision);
}

VerificationReport check_convergent_gaps(const FixedPointRecord& record, const PrecisionPolicy& policy) {
  require(record, 2, "check_convergent_gaps");
  VerificationReport r;
  r.check = "check_convergent_gaps";
  r.range_lo = 1;
  r.range_hi = record.size() - 1;
  std::vector<std::size_t> failing;
  for (std::size_t n = 1; n < record.size(); ++n) {
    const Integer& q = record.convergents[n - 1].q;
    const Integer& q_next = record.convergents[n].q;
    if (q < 2) {
      failing.push_back(n);
      continue;
    }
    auto rhs = [&q](mpfr_prec_t prec) { return irrationality_bound(q, prec) * q; };
    VerificationReport probe;
    decide(probe, n, q + q_next, rhs, {{"q", to_string(q)}, {"q_next", to_string(q_next)}}, policy);
    r.precision_bits = std::max(r.precision_bits, probe.precision_bits);
    if (!probe.undecided.empty()) {
      r.undecided.push_back(std::move(probe.undecided.front()));
    } else if (!probe.violations.empty()) {
      failing.push_back(n);
    }
  }
  std::string failing_list;
  for (auto n : failing) failing_list += (failing_list.empty() ? "" : ",") + std::to_string(n);
  r.details["failing"] = failing_list;
  r.details["scope"] = "convergents";
  const std::size_t last = record.size() - 1;
  if (!failing.empty() && failing.back() == last) {
    r.violations.push_back(Finding{last, {{"reason", "inequality fails at the last computed index; no n0"}}});
  } else {
    const std::size_t n0 = failing.empty() ? 1 : failing.back() + 1;
    r.details["n0"] = std::to_string(n0);
    r.details["q0"] = to_string(record.convergents[n0 - 1].q);
  }
  return r;
}

VerificationReport check_localization() {
  VerificationReport r;
  r.check = "check_localization";
  r.range_lo = 1;
  r.range_hi = 64;

  auto expect = [&r](const std::string& what, const Dyadic& got, const Dyadic& want) {
    if (got != want) r.violations.push_back(Finding{0, {{"value", what}, {"got", got.to_string()}, {"expected", want.to_string()}}});
  };
  const Dyadic q25 = qmark_of_rational(Rational(2, 5));
  const Dyadic q25_2 = qmark_of_rational(q25.to_rational());
  const Dyadic q37 = qmark_of_rational(Rational(3, 7));
  const Dyadic q37_2 = qmark_of_rational(q37.to_rational());
  expect("?(2/5)", q25, Dyadic(3, 3));
  expect("?(3/8)", q25_2, Dyadic(5, 4));
  expect("?(3/7)", q37, Dyadic(7, 4));
  expect("?(7/16)", q37_2, Dyadic(29, 6));
  if (!(cmp_rational_dyadic(Rational(1, 3), q25_2) > 0)) {
    r.violations.push_back(Finding{0, {{"comparison", "?(?(2/5)) < 1/3"}, {"value", q25_2.to_string()}}});
  }
  if (!(cmp_rational_dyadic(Rational(4, 9), q37_2) < 0)) {
    r.violations.push_back(Finding{0, {{"comparison", "?(?(3/7)) > 4/9"}, {"value", q37_2.to_string()}}});
  }
  for (long n = 1; n <= 64; ++n) {
    Dyadic got = qmark_of_rational(Rational(1, n));
    if (got != Dyadic(1, static_cast<std::uint64_t>(n - 1))) {
      r.violations.push_back(Finding{static_cast<std::size_t>(n), {{"value", "?(1/" + std::to_string(n) + ")"}, {"got", got.to_string()}}});
    }
  }
  std::string holds_at;
  for (unsigned n = 1; n <= 20; ++n) {
    Integer lhs;
    mpz_ui_pow_ui(lhs.get_mpz_t(), 2, n);
    if (lhs < 2 * n + 3) holds_at += (holds_at.empty() ? "" : ",") + std::to_string(n);
  }
  if (holds_at != "1,2,3") r.violations.push_back(Finding{0, {{"2^n<2n+3", holds_at}}});
  r.details["2^n<2n+3"] = holds_at;
  return r;
}

VerificationReport check_ratval(std::size_t n_max) {
  if (n_max < 2) throw DomainError("check_ratval needs n_max >= 2");
  if (n_max > kDefaultMaxLevel) {
    throw ResourceError("check_ratval: level " + std::to_string(n_max) + " exceeds the enumeration budget of " +
                        std::to_string(kDefaultMaxLevel));
  }
  VerificationReport r;
  r.check = "check_ratval";
  r.range_lo = 2;
  r.range_hi = n_max;
  std::size_t members = 0;
  for (std::size_t n = 2; n <= n_max; ++n) {
    Level level = stern_brocot_level(n);
    if (level.members.size() != (std::size_t{1} << (n - 1))) {
      r.violations.push_back(Finding{n, {{"level_size", std::to_string(level.members.size())}}});
    }
    for (const auto& m : level.members) {
      ++members;
      const Rational image = m.image.to_rational();
      const Integer s_x = sum_quotients(m.cf);
      const Integer s_image = sum_quotients(cf_expand(image));
      if (s_image <= s_x || image == m.value) {
        r.violations.push_back(Finding{n, {{"x", m.value.to_string()}, {"image", m.image.to_string()},
                                           {"S_x", to_string(s_x)}, {"S_image", to_string(s_image)}}});
      }
    }
  }
  // Levels 0 and 1 hold exactly the trivial fixed points 0, 1 and 1/2.
  for (const Rational& x : {Rational(0, 1), Rational(1, 2), Rational(1, 1)}) {
    if (qmark_of_rational(x).to_rational() != x) {
      r.violations.push_back(Finding{0, {{"x", x.to_string()}, {"reason", "trivial fixed point not fixed"}}});
    }
  }
  r.details["members"] = std::to_string(members);
  r.details["trivial_fixed_points"] = "0,1/2,1";
  return r;
}

const std::vector<RegisteredCheck>& registered_checks() {
  auto rec = [](const CheckContext& c) -> const FixedPointRecord& {
    if (!c.record) throw DomainError("this check needs a computed record");
    return *c.record;
  };
  static const std::vector<RegisteredCheck> checks = {
      {"check_theorem1", [rec](const CheckContext& c) { return check_theorem1(rec(c)); }},
      {"check_theorem1_improved", [rec](const CheckContext& c) { return check_theorem1_improved(rec(c), c.policy); }},
      {"check_remark4", [rec](const CheckContext& c) { return check_remark4(rec(c), c.kmax, c.policy); }},
      {"check_remark5", [rec](const CheckContext& c) { return check_remark5(rec(c), c.policy); }},
      {"check_corollary6", [rec](const CheckContext& c) { return check_corollary6(rec(c), c.policy); }},
      {"check_kanlem", [rec](const CheckContext& c) { return check_kanlem(rec(c)); }},
      {"check_convergent_gaps", [rec](const CheckContext& c) { return check_convergent_gaps(rec(c), c.policy); }},
      {"check_localization", [](const CheckContext&) { return check_localization(); }},
      {"check_ratval", [](const CheckContext& c) { return check_ratval(c.ratval_levels); }},
  };
  return checks;
}

}  // namespace mqm

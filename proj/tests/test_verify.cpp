#include <doctest.h>

#include <cmath>
#include <set>

#include "mqm/error.hpp"
#include "mqm/verify.hpp"

using namespace mqm;

namespace {

const FixedPointRecord& record(std::size_t n) {
  static std::map<std::size_t, FixedPointRecord> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_fixed_point(Target::smallest, n)).first;
  return it->second;
}

double log2d(double x) { return std::log2(x); }

}  // namespace

TEST_CASE("first digit and sum bound") {
  CHECK(check_theorem1(record(100)).passed());
  auto r = check_theorem1(FixedPointRecord::from_digits({2, 2, 5}));
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].index == 2);
  CHECK(r.violations[0].witness.at("a") == "5");
  CHECK(r.violations[0].witness.at("S") == "4");
  auto one = check_theorem1(record(1));
  CHECK(one.passed());
  CHECK(one.range_hi == 0);
  auto bad_first = check_theorem1(FixedPointRecord::from_digits({3}));
  REQUIRE(bad_first.violations.size() == 1);
  CHECK(bad_first.violations[0].index == 0);
  CHECK_THROWS_AS(check_theorem1(FixedPointRecord{}), DomainError);
}

TEST_CASE("logarithmic digit bound") {
  CHECK(check_theorem1_improved(record(36)).passed());
  // kappa1 * 4 + 2 log2 4 = 5.55...
  CHECK(check_theorem1_improved(FixedPointRecord::from_digits({2, 2, 5})).passed());
  auto r = check_theorem1_improved(FixedPointRecord::from_digits({2, 2, 6}));
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].index == 2);
  CHECK(r.undecided.empty());
  CHECK(r.precision_bits == 128);
}

TEST_CASE("window bound") {
  auto rec = record(200);
  auto r5 = check_remark4(rec, 5);
  CHECK(r5.passed());
  auto k1 = check_remark4(rec, 1);
  auto direct = check_theorem1_improved(rec);
  CHECK(k1.violations.size() == direct.violations.size());
  CHECK(k1.undecided.size() == direct.undecided.size());

  // Synthetic: S_1 = 2, window a_2 + a_3 = 12 > kappa1 * 2 + 4 = 4.78
  auto bad = FixedPointRecord::from_digits({2, 6, 6, 1});
  auto rb = check_remark4(bad, 2);
  bool found = false;
  for (const auto& v : rb.violations) found |= v.index == 1 && v.witness.at("k") == "2";
  CHECK(found);
  // The same verdicts, window by window, with k = 1 as the digit bound.
  auto k1bad = check_remark4(bad, 1);
  auto dbad = check_theorem1_improved(bad);
  REQUIRE(k1bad.violations.size() == dbad.violations.size());
  for (std::size_t i = 0; i < dbad.violations.size(); ++i) CHECK(k1bad.violations[i].index == dbad.violations[i].index);
  CHECK_THROWS_AS(check_remark4(FixedPointRecord::from_digits({2, 2}), 5), DomainError);
  CHECK_THROWS_AS(check_remark4(rec, 0), DomainError);
}

TEST_CASE("mean quotient bound") {
  auto r = check_remark5(record(36));
  CHECK(r.passed());
  CHECK(r.range_hi == 36);
  auto bad = check_remark5(FixedPointRecord::from_digits({5}));
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].index == 1);
}

TEST_CASE("linear digit bound") {
  CHECK(check_corollary6(record(100)).passed());
  // n = 2: kappa1 kappa2 2 + 2 log2(2 kappa2) = 3.419 + 6.276 = 9.70
  const double k1 = 0.3884838, k2 = 4.4010487;
  const double bound = k1 * k2 * 2 + 2 * log2d(2 * k2);
  CHECK(bound > 9.6);
  CHECK(bound < 9.8);
  CHECK(check_corollary6(FixedPointRecord::from_digits({2, 2, 9})).passed());
  auto bad = check_corollary6(FixedPointRecord::from_digits({2, 2, 10}));
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].index == 2);
  CHECK_THROWS_AS(check_corollary6(FixedPointRecord::from_digits({2, 2})), DomainError);
}

TEST_CASE("denominators against Fibonacci numbers") {
  auto r22 = check_kanlem(FixedPointRecord::from_digits({2, 2}));
  CHECK(r22.passed());
  CHECK(r22.details.at("equalities") == "2");  // q_1 = 2 = F_3, q_2 = 5 = F_5
  auto r11 = check_kanlem(FixedPointRecord::from_digits({1, 1}));
  CHECK(r11.passed());
  CHECK(check_kanlem(record(500)).passed());
  CHECK(check_kanlem(record(500)).details.at("phi_identity_checked_to") == "64");
}

TEST_CASE("irrationality bound values") {
  // I(2) = kappa1 (2 + log2 4.5) + 2 log2(2 + log2 4.5) + 1
  const double k1 = 2 * std::log2((std::sqrt(5.0) + 1) / 2) - 1;
  const double inner = 2 + std::log2(4.5);
  const double want = k1 * inner + 2 * std::log2(inner) + 1;
  Interval i2 = irrationality_bound(2, 128);
  CHECK(std::abs(i2.midpoint() - want) < 1e-12);
  CHECK(i2.width() < 1e-30);
  CHECK_THROWS_AS(irrationality_bound(1, 128), DomainError);

  Integer q = 10;
  Interval prev = irrationality_bound(q, 128);
  for (int e = 2; e <= 6; ++e) {
    q *= 10;
    Interval cur = irrationality_bound(q, 128);
    CHECK(mpfr_less_p(prev.upper(), cur.lower()));
    prev = cur;
  }

  // Ratio to log2 q against the leading coefficient 2 kappa1.
  auto ratio_gap = [&](unsigned digits) {
    Integer big;
    mpz_ui_pow_ui(big.get_mpz_t(), 10, digits);
    const double l = std::log2(10.0) * digits;
    return irrationality_bound(big, 256).midpoint() / l / (2 * k1) - 1;
  };
  CHECK(ratio_gap(50) > 0.14);
  CHECK(ratio_gap(50) < 0.15);
  CHECK(ratio_gap(200) < 0.05);

  double w = irrationality_bound(12345, 128).width();
  for (mpfr_prec_t p = 256; p <= 2048; p *= 2) {
    double w2 = irrationality_bound(12345, p).width();
    CHECK(w2 <= w / 2);
    w = w2;
  }
}

TEST_CASE("convergent gaps") {
  auto r = check_convergent_gaps(record(100));
  CHECK(r.passed());
  CHECK(r.details.count("n0") == 1);
  auto silver = check_convergent_gaps(FixedPointRecord::from_digits(std::vector<std::uint64_t>(60, 2)));
  CHECK(silver.passed());
  CHECK(silver.details.at("n0") == "1");
  // A huge quotient right after a small denominator defeats the bound.
  auto bad = check_convergent_gaps(FixedPointRecord::from_digits({2, 1000}));
  CHECK(bad.violations.size() == 1);
  auto recovered = check_convergent_gaps(FixedPointRecord::from_digits({2, 1000, 2, 2}));
  CHECK(recovered.passed());
  CHECK(recovered.details.at("failing") == "1");
  CHECK(recovered.details.at("n0") == "2");
  CHECK_THROWS_AS(check_convergent_gaps(FixedPointRecord::from_digits({2})), DomainError);
}

TEST_CASE("localization values") {
  auto r = check_localization();
  CHECK(r.passed());
  CHECK(r.details.at("2^n<2n+3") == "1,2,3");
}

TEST_CASE("quotient sums over levels") {
  auto r = check_ratval(14);
  CHECK(r.passed());
  // 2 + 4 + ... + 8192
  CHECK(r.details.at("members") == std::to_string((1 << 14) - 2));
  CHECK_THROWS_AS(check_ratval(1), DomainError);
  CHECK_THROWS_AS(check_ratval(40), ResourceError);
}

TEST_CASE("registered checks cover every verifier once") {
  std::set<std::string> names;
  for (const auto& c : registered_checks()) names.insert(c.name);
  CHECK(names.size() == registered_checks().size());
  CHECK(names == std::set<std::string>{"check_theorem1", "check_theorem1_improved", "check_remark4", "check_remark5",
                                       "check_corollary6", "check_kanlem", "check_convergent_gaps",
                                       "check_localization", "check_ratval"});
  CheckContext ctx;
  ctx.record = &record(60);
  ctx.ratval_levels = 8;
  for (const auto& c : registered_checks()) {
    auto rep = c.run(ctx);
    CHECK(rep.check == c.name);
    CHECK(rep.passed());
  }
}

TEST_CASE("report JSON shape") {
  auto r = check_theorem1(FixedPointRecord::from_digits({2, 2, 5}));
  CHECK(r.to_json() ==
        "{\"check\":\"check_theorem1\",\"details\":{},\"precision_bits\":0,\"range\":[0,2],"
        "\"undecided\":[],\"violations\":[{\"S\":\"4\",\"a\":\"5\",\"index\":2}]}");
}

TEST_CASE("integer-only checks are reproducible") {
  CHECK(check_kanlem(record(200)).to_json() == check_kanlem(record(200)).to_json());
  CHECK(check_ratval(10).to_json() == check_ratval(10).to_json());
}

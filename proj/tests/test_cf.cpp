#include <doctest.h>

#include "mqm/cf.hpp"
#include "mqm/error.hpp"
#include "oracles.hpp"

using namespace mqm;

namespace {

ContinuedFraction cfl(std::initializer_list<long> q) { return ContinuedFraction(q); }

}  // namespace

TEST_CASE("rationals reduce and parse") {
  CHECK(Rational(4, 10) == Rational(2, 5));
  CHECK(Rational(0, 7) == Rational(0, 1));
  CHECK(Rational::parse("6/14").to_string() == "3/7");
  CHECK(Rational::parse("1") == Rational(1, 1));
  CHECK_THROWS_AS(Rational(1, 0), DomainError);
  CHECK_THROWS_AS(Rational::parse("3/"), ParseError);
  CHECK_THROWS_AS(Rational::parse("a/b"), ParseError);
  CHECK(Rational(2, 5) < Rational(3, 7));
}

TEST_CASE("dyadics are canonical") {
  Dyadic d(6, 4);
  CHECK(d.num() == 3);
  CHECK(d.exp() == 3);
  CHECK(Dyadic(0, 9) == Dyadic(0, 0));
  CHECK(d.to_string() == "3/2^3");
  CHECK(d.to_rational() == Rational(3, 8));
  CHECK(Dyadic::midpoint(Dyadic(1, 2), Dyadic(1, 1)) == Dyadic(3, 3));
}

TEST_CASE("expansion by Euclid") {
  CHECK(cf_expand(Rational(2, 5)) == cfl({2, 2}));
  CHECK(cf_expand(Rational(3, 8)) == cfl({2, 1, 2}));
  CHECK(cf_expand(Rational(8, 19)) == cfl({2, 2, 1, 2}));
  CHECK(cf_expand(Rational(0, 1)).empty());
  CHECK(cf_expand(Rational(1, 1)) == cfl({1}));
}

TEST_CASE("values and convergents") {
  CfValue v = cf_value(cfl({2, 2}));
  CHECK(v.value == Rational(2, 5));
  REQUIRE(v.convergents.size() == 2);
  CHECK(v.convergents[0].p == 1);
  CHECK(v.convergents[0].q == 2);
  CHECK(v.convergents[1].p == 2);
  CHECK(v.convergents[1].q == 5);
  CHECK(cf_value(cfl({2, 1, 2})).value == Rational(3, 8));
  CHECK(cf_value(cfl({2, 1, 1, 1, 1, 2, 1, 2})).value == Rational(49, 128));
  CHECK(cf_value(ContinuedFraction{}).value == Rational(0, 1));
}

TEST_CASE("determinant identity of consecutive convergents") {
  // With p_0/q_0 = 0/1 and p_1/q_1 = 1/a_1 the identity reads
  // p_k q_{k-1} - p_{k-1} q_k = (-1)^(k+1).
  for (long den = 2; den <= 300; ++den) {
    for (long num = 1; num < den; ++num) {
      Rational x(num, den);
      if (x.den() != den) continue;
      CfValue v = cf_value(cf_expand(x));
      Integer pp = 0, qp = 1;
      for (const auto& c : v.convergents) {
        Integer det = c.p * qp - pp * c.q;
        CHECK(det == ((c.index % 2 == 1) ? 1 : -1));
        Integer g;
        mpz_gcd(g.get_mpz_t(), c.p.get_mpz_t(), c.q.get_mpz_t());
        CHECK(g == 1);
        pp = c.p;
        qp = c.q;
      }
    }
  }
}

TEST_CASE("convergents alternate around the value") {
  CfValue v = cf_value(cfl({2, 2, 1, 1, 1, 3, 2, 3, 1, 2, 4}));
  for (const auto& c : v.convergents) {
    Rational r(c.p, c.q);
    if (c.index == v.convergents.size()) continue;
    if (c.index % 2 == 1) {
      CHECK(r > v.value);
    } else {
      CHECK(r < v.value);
    }
  }
}

TEST_CASE("round trips between values and expansions") {
  for (long den = 1; den <= 200; ++den) {
    for (long num = 0; num <= den; ++num) {
      Rational x(num, den);
      if (x.den() != den) continue;
      ContinuedFraction c = cf_expand(x);
      CHECK(c.is_canonical());
      CHECK(cf_value(c).value == x);
      CHECK(cf_expand(cf_value(c).value) == c);
      auto ref = oracle::cf(x.num(), x.den());
      CHECK(c.quotients() == ref);
      if (!c.empty() && !(c.size() == 1 && c[0] == 1)) {
        CHECK(cf_value(second_representation(c)).value == x);
      }
    }
  }
}

TEST_CASE("second representation") {
  CHECK(second_representation(cfl({2, 2})) == cfl({2, 1, 1}));
  CHECK(second_representation(cfl({2})) == cfl({1, 1}));
  CHECK(second_representation(cfl({2, 1, 2})) == cfl({2, 1, 1, 1}));
  CHECK(second_representation(cfl({2, 1, 1})) == cfl({2, 2}));
  CHECK_THROWS_AS(second_representation(ContinuedFraction{}), DomainError);
}

TEST_CASE("parse continued fractions") {
  CHECK(ContinuedFraction::parse("[2, 2,1]") == cfl({2, 2, 1}));
  CHECK(ContinuedFraction::parse("[]").empty());
  CHECK_THROWS_AS(ContinuedFraction::parse("[2,0]"), ParseError);
  CHECK_THROWS_AS(ContinuedFraction::parse("2,2"), ParseError);
  CHECK(cfl({2, 1}).canonical() == cfl({3}));
  CHECK_FALSE(cfl({2, 1}).is_canonical());
}

TEST_CASE("mediants") {
  CHECK(mediant(Rational(0, 1), Rational(1, 1)) == Rational(1, 2));
  CHECK(mediant(Rational(1, 3), Rational(1, 2)) == Rational(2, 5));
  CHECK(mediant(Rational(2, 5), Rational(3, 7)) == Rational(5, 12));
}

TEST_CASE("fibonacci numbers") {
  CHECK(fibonacci(1) == 1);
  CHECK(fibonacci(2) == 1);
  CHECK(fibonacci(5) == 5);
  CHECK(fibonacci(10) == 55);
  CHECK_THROWS_AS(fibonacci(0), DomainError);
  for (unsigned k = 1; k <= 300; ++k) CHECK(fibonacci(k) == oracle::fib(k));
  // F_{s+2} = 2^s exactly for s in {0, 1}, and F_{s+2} < 2^s for s > 2.
  CHECK(fibonacci(2) == 1);
  CHECK(fibonacci(3) == 2);
  for (unsigned s = 3; s <= 200; ++s) {
    Integer two_s;
    mpz_ui_pow_ui(two_s.get_mpz_t(), 2, s);
    CHECK(fibonacci(s + 2) < two_s);
  }
}

TEST_CASE("rational against dyadic comparisons") {
  CHECK(cmp_rational_dyadic(Rational(2, 5), Dyadic(3, 3)) > 0);
  CHECK(cmp_rational_dyadic(Rational(1, 2), Dyadic(1, 1)) == 0);
  CHECK(cmp_rational_dyadic(Rational(3, 7), Dyadic(7, 4)) < 0);
}

TEST_CASE("comparisons agree with exact rationals on small inputs") {
  for (long den = 1; den <= 100; ++den) {
    for (long num = 0; num <= den; ++num) {
      Rational r(num, den);
      if (r.den() != den) continue;
      mpq_class rq(num, den);
      for (unsigned e = 0; e <= 10; ++e) {
        for (long n = 0; n <= (1L << e); ++n) {
          Dyadic d(n, e);
          mpq_class dq(n, 1L << e);
          dq.canonicalize();
          int want = cmp(rq, dq);
          auto got = cmp_rational_dyadic(r, d);
          CHECK((got < 0) == (want < 0));
          CHECK((got == 0) == (want == 0));
          auto raw = cmp_ratio_dyadic(Integer(num * 3), Integer(den * 3), d);
          CHECK((raw < 0) == (want < 0));
          CHECK((raw == 0) == (want == 0));
        }
      }
    }
  }
}

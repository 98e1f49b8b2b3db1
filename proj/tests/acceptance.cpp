// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// `acceptance --extended` repeats the scale criteria at 5400 digits and q <= 30000.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "mqm/error.hpp"
#include "mqm/fixedpoint.hpp"
#include "mqm/qmark.hpp"
#include "mqm/scan.hpp"
#include "mqm/verify.hpp"
#include "oracles.hpp"

using namespace mqm;

namespace {

std::size_t kScaleDigits = 1000;
std::uint64_t kScanQmax = kDefaultScanQmax;

struct Outcome {
  bool ok = true;
  std::string note;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) note = what;
    ok = ok && cond;
  }
};

Rational rat(const mpq_class& q) { return Rational(Integer(q.get_num()), Integer(q.get_den())); }

const FixedPointRecord& scale_record(Target t, unsigned workers = 1) {
  static std::map<std::pair<Target, unsigned>, FixedPointRecord> memo;
  auto key = std::make_pair(t, workers);
  auto it = memo.find(key);
  if (it == memo.end()) {
    EngineOptions o;
    o.workers = workers;
    it = memo.emplace(key, compute_fixed_point(t, kScaleDigits, o)).first;
  }
  return it->second;
}

const ScanReport& scan_report(unsigned workers = 1) {
  static std::map<unsigned, ScanReport> memo;
  auto it = memo.find(workers);
  if (it == memo.end()) {
    ScanOptions o;
    o.workers = workers;
    it = memo.emplace(workers, scan_inequality(kScanQmax, o)).first;
  }
  return it->second;
}

Outcome golden_values() {
  Outcome r;
  auto image = [](long p, long q) { return qmark_of_rational(Rational(p, q)).to_rational(); };
  r.expect(image(2, 5) == Rational(3, 8), "?(2/5)");
  r.expect(image(3, 8) == Rational(5, 16), "?(3/8)");
  r.expect(image(3, 7) == Rational(7, 16), "?(3/7)");
  r.expect(image(7, 16) == Rational(29, 64), "?(7/16)");
  r.expect(image(1, 2) == Rational(1, 2), "?(1/2)");
  for (long n = 1; n <= 64; ++n) {
    Integer den = 1;
    den <<= static_cast<mp_bitcnt_t>(n - 1);
    r.expect(image(1, n) == Rational(Integer(1), den), "?(1/" + std::to_string(n) + ")");
    // Series oracle on the same inputs.
    r.expect(image(1, n) == rat(oracle::qmark(mpq_class(1, n))), "oracle ?(1/" + std::to_string(n) + ")");
  }
  if (r.ok) r.note = "69 exact values";
  return r;
}

Outcome reference_prefix() {
  Outcome r;
  auto rec = compute_fixed_point(Target::smallest, 36);
  auto ref = parse_bfile(bundled_reference_bfile());
  auto cmp = oeis_compare(rec, ref);
  r.expect(cmp.compared == 36, "compared " + std::to_string(cmp.compared));
  r.expect(!cmp.mismatch_index.has_value(), "mismatch");
  r.expect(cmp.common_prefix == 36, "common prefix " + std::to_string(cmp.common_prefix));
  std::size_t seen = 0;
  for (const auto& t : ref) {
    if (t.index == 0 || t.index > 36) continue;
    ++seen;
    r.expect(t.value == rec.digits[t.index - 1], "term " + std::to_string(t.index));
  }
  r.expect(seen == 36, "reference terms");
  r.note = r.ok ? "36/36 terms" : r.note;
  return r;
}

Outcome scale_run() {
  Outcome r;
  const auto& lo = scale_record(Target::smallest);
  const auto& hi = scale_record(Target::greatest);
  for (const auto* rec : {&lo, &hi}) {
    const std::string tag = to_string(rec->target);
    r.expect(rec->size() == kScaleDigits, tag + " length");
    r.expect(!rec->ambiguous_from.has_value(), tag + " ambiguous");
    r.expect(rec->certificates.size() == rec->size(), tag + " certificate count");
    Rational outer_lo(0, 1), outer_hi(1, 2);
    for (std::size_t i = 0; i < rec->certificates.size(); ++i) {
      const auto& c = rec->certificates[i];
      const std::string at = tag + " certificate " + std::to_string(i + 1);
      r.expect(c.signs_valid(), at + " stored signs");
      r.expect(g_sign(c.lo).sign == c.sign_lo && g_sign(c.hi).sign == c.sign_hi, at + " recomputed signs");
      if (i % 50 == 0) {
        // Independent series evaluation on a sample.
        mpq_class l(c.lo.num(), c.lo.den()), h(c.hi.num(), c.hi.den());
        r.expect(sgn(oracle::qmark(l) - l) == -1, at + " oracle lo");
        if (i) r.expect(sgn(oracle::qmark(h) - h) == 1, at + " oracle hi");
      }
      const Rational a = std::min(c.lo, c.hi), b = std::max(c.lo, c.hi);
      r.expect(outer_lo <= a && b <= outer_hi && a < b, at + " nesting");
      outer_lo = a;
      outer_hi = b;
    }
  }
  r.expect(lo.digits == hi.digits, "targets disagree");
  if (r.ok) r.note = "both targets, " + std::to_string(kScaleDigits) + " digits, S_N = " + std::to_string(lo.sums.back());
  return r;
}

Outcome inequality_suite() {
  Outcome r;
  const auto& rec = scale_record(Target::smallest);
  const PrecisionPolicy policy{128, 1024};
  std::vector<VerificationReport> reps{check_theorem1(rec),        check_theorem1_improved(rec, policy),
                                       check_remark4(rec, 5, policy), check_remark5(rec, policy),
                                       check_corollary6(rec, policy), check_kanlem(rec)};
  mpfr_prec_t used = 0;
  for (const auto& rep : reps) {
    r.expect(rep.violations.empty(), rep.check + " violations");
    r.expect(rep.undecided.empty(), rep.check + " undecided");
    r.expect(rep.precision_bits <= 1024, rep.check + " precision");
    used = std::max(used, rep.precision_bits);
  }
  if (r.ok) r.note = "6 checks clean, max precision " + std::to_string(used) + " bits";
  return r;
}

bool is(const FractionVerdict& v, long p, long q) { return v.p == p && v.q == q; }

Outcome scan_reproduction() {
  Outcome r;
  const auto& rep = scan_report();
  r.expect(rep.counterexamples.size() == 2, std::to_string(rep.counterexamples.size()) + " counterexamples");
  r.expect(rep.equalities.size() == 2, std::to_string(rep.equalities.size()) + " equalities");
  if (!r.ok) return r;
  const auto& a = rep.counterexamples[0];
  const auto& b = rep.counterexamples[1];
  r.expect(is(a, 3, 7) && a.lhs == 14 && a.rhs == 16, "3/7 margins");
  r.expect(is(b, 8, 19) && b.lhs == 38 && b.rhs == 64, "8/19 margins");
  r.expect(is(rep.equalities[0], 0, 1) && is(rep.equalities[1], 1, 2), "equalities");
  r.expect(rep.fractions_checked == oracle::farey_half_count(kScanQmax), "fraction count");
  // Margins from the series oracle.
  for (auto [p, q] : {std::pair{3L, 7L}, std::pair{8L, 19L}}) {
    r.expect(oracle::inequality(p, q) == oracle::Status::counterexample, "oracle " + std::to_string(p));
  }
  if (r.ok) r.note = std::to_string(rep.fractions_checked) + " fractions";
  return r;
}

std::string render(const std::set<oracle::Verdict>& s) {
  std::ostringstream out;
  for (const auto& [p, q, st] : s) out << p << '/' << q << ':' << static_cast<int>(st) << '\n';
  return out.str();
}

Outcome oracle_equivalence() {
  Outcome r;
  std::uint64_t checked = 0;
  auto brute = oracle::brute_force_scan(200, &checked);
  auto fast = scan_inequality(200);
  std::set<oracle::Verdict> mine;
  for (const auto& v : fast.counterexamples) mine.emplace(v.p.get_ui(), v.q.get_ui(), oracle::Status::counterexample);
  for (const auto& v : fast.equalities) mine.emplace(v.p.get_ui(), v.q.get_ui(), oracle::Status::equality);
  r.expect(render(mine) == render(brute), "verdict sets differ");
  r.expect(fast.fractions_checked == checked, "fraction count");
  // Per-fraction agreement, not just the exceptional set.
  for (long q = 1; q <= 200; ++q) {
    for (long p = 0; 2 * p <= q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      auto st = check_fraction(p, q).status;
      auto want = oracle::inequality(p, q);
      int mine_code = st == FractionStatus::satisfies ? 0 : st == FractionStatus::counterexample ? 1 : 2;
      r.expect(mine_code == static_cast<int>(want), std::to_string(p) + "/" + std::to_string(q));
    }
  }
  if (r.ok) r.note = std::to_string(checked) + " fractions";
  return r;
}

Outcome property_suites() {
  Outcome r;
  for (long den = 1; den <= 200; ++den) {
    for (long num = 0; num <= den; ++num) {
      if (std::gcd(num, den) != 1) continue;
      mpq_class img(qmark_of_rational(Rational(num, den)).to_rational().num(),
                    qmark_of_rational(Rational(num, den)).to_rational().den());
      mpq_class mirror = 1 - img;
      mirror.canonicalize();
      r.expect(qmark_of_rational(Rational(den - num, den)).to_rational() == rat(mirror),
               "symmetry " + std::to_string(num) + "/" + std::to_string(den));
    }
  }
  for (std::size_t n = 1; n <= 14; ++n) {
    Level l = stern_brocot_level(n);
    r.expect(l.members.size() == (std::size_t{1} << (n - 1)), "|B_" + std::to_string(n) + "|");
    for (std::size_t i = 0; i < l.members.size(); ++i) {
      const auto& m = l.members[i];
      if (n >= 2) {
        r.expect(sum_quotients(cf_expand(m.image.to_rational())) > sum_quotients(m.cf), "quotient sum growth");
      }
      if (i) {
        r.expect(l.members[i - 1].value < m.value && l.members[i - 1].image < m.image, "order isomorphism");
      }
      r.expect(m.image == Dyadic(static_cast<long>(2 * i + 1), n), "odd dyadic image");
    }
  }
  for (std::size_t n = 2; n <= 10; ++n) {
    for (const auto& m : stern_brocot_level(n).members) {
      const ContinuedFraction image_cf = cf_expand(m.image.to_rational());
      const Integer prefix_sum = sum_quotients(m.cf);
      for (unsigned long s = 0; s <= 2; ++s) {
        ContinuedFraction extended = m.cf.with_appended(prefix_sum + s);
        ContinuedFraction folded = fold_extend(image_cf, m.cf.size() + 1, s);
        std::vector<mpz_class> ext(extended.quotients().begin(), extended.quotients().end());
        r.expect(cf_value(folded).value == rat(oracle::qmark(ext)), "folding " + m.cf.to_string());
      }
    }
  }
  if (r.ok) r.note = "symmetry to den 200, levels B_1..B_14, folding over B_2..B_10";
  return r;
}

Outcome convergent_gaps() {
  Outcome r;
  auto rep = check_convergent_gaps(scale_record(Target::smallest));
  r.expect(rep.undecided.empty(), "undecided comparisons");
  r.expect(rep.violations.empty(), "no n0");
  r.expect(rep.details.count("n0") == 1, "n0 missing");
  if (r.ok) {
    r.note = "n0 = " + rep.details.at("n0") + ", q_n0 = " + rep.details.at("q0") +
             ", earlier failures: " + (rep.details.at("failing").empty() ? "none" : rep.details.at("failing"));
  }
  return r;
}

Outcome determinism() {
  Outcome r;
  const std::string lo = record_to_json(scale_record(Target::smallest, 1), true);
  const std::string hi = record_to_json(scale_record(Target::greatest, 1), true);
  const std::string sc = scan_report(1).to_json();
  for (unsigned w : {2u, 8u}) {
    r.expect(record_to_json(scale_record(Target::smallest, w), true) == lo, "smallest, workers " + std::to_string(w));
    r.expect(record_to_json(scale_record(Target::greatest, w), true) == hi, "greatest, workers " + std::to_string(w));
    r.expect(scan_report(w).to_json() == sc, "scan, workers " + std::to_string(w));
  }
  if (r.ok) r.note = "workers 1, 2, 8";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::string(argv[1]) == "--extended") {
    kScaleDigits = 5400;
    kScanQmax = kFullScanQmax;
  } else if (argc > 1) {
    std::cerr << "usage: acceptance [--extended]\n";
    return 2;
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"golden values", golden_values},
      {"fixed-point digits against the bundled reference", reference_prefix},
      {"scale run, both targets", scale_run},
      {"digit-growth inequalities", inequality_suite},
      {"scan reproduction", scan_reproduction},
      {"oracle equivalence", oracle_equivalence},
      {"property suites", property_suites},
      {"convergent gap bound", convergent_gaps},
      {"determinism across worker counts", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.ok = false;
      o.note = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.ok;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1fs", secs);
    std::cout << (o.ok ? "PASS" : "FAIL") << ' ' << i + 1 << ' ' << criteria[i].first << " (" << o.note << ", "
              << buf << ")" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

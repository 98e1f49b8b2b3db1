#include "mqm/fixedpoint.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "mqm/error.hpp"
#include "mqm/interval.hpp"
#include "mqm/parallel.hpp"
#include "mqm/qmark.hpp"
#include "fixedpoint_detail.hpp"

namespace mqm {

namespace {

// At n = 1 the prefix sum is 0 and the growth cap is undefined. a_1 >= 2
// keeps the search inside (0, 1/2), and every a_1 >= 3 already fails the
// overlap system, so [2, 4] is ample.
constexpr std::uint64_t kFirstDigitLow = 2;
constexpr std::uint64_t kFirstDigitCap = 4;

// Chunk count for splitting a candidate range. Results are merged in chunk
// order, so this only affects load balance.
constexpr std::size_t kScanChunks = 64;

struct Endpoint {
  Integer p, q;  // x_a = p / q
  Dyadic image;  // ?(x_a)
  int g = 0;     // sign of ?(x_a) - x_a
};

Endpoint endpoint_at(const PrefixState& s, std::uint64_t a) {
  Endpoint e;
  e.p = s.p1 * static_cast<unsigned long>(a) + s.p0;
  e.q = s.q1 * static_cast<unsigned long>(a) + s.q0;
  e.image = qmark_extend(s.image, s.sum, s.n, a);
  auto c = cmp_ratio_dyadic(e.p, e.q, e.image);
  e.g = c < 0 ? 1 : (c > 0 ? -1 : 0);
  return e;
}

// Overlap system between [.., a] and [.., a + 1] and their images.
bool overlap_holds(std::size_t n, const Endpoint& xa, const Endpoint& xb) {
  if (n % 2 == 0) {
    return cmp_ratio_dyadic(xa.p, xa.q, xb.image) < 0 && cmp_ratio_dyadic(xb.p, xb.q, xa.image) > 0;
  }
  return cmp_ratio_dyadic(xa.p, xa.q, xb.image) > 0 && cmp_ratio_dyadic(xb.p, xb.q, xa.image) < 0;
}

// Orientation: for even n, x_a < x_{a+1}; for odd n the order flips.
struct Oriented {
  const Endpoint& lo;
  const Endpoint& hi;
};

Oriented orient(std::size_t n, const Endpoint& xa, const Endpoint& xb) {
  if (n % 2 == 0) return {xa, xb};
  return {xb, xa};
}

bool sign_change(std::size_t n, const Endpoint& xa, const Endpoint& xb) {
  auto [lo, hi] = orient(n, xa, xb);
  if (lo.g >= 0) return false;
  return hi.g > 0 || (n == 1 && hi.g == 0);
}

struct DigitScan {
  std::vector<std::uint64_t> candidates;
  std::vector<std::uint64_t> certified;
};

DigitScan scan_digit(const PrefixState& state, std::uint64_t first, std::uint64_t cap, unsigned workers) {
  DigitScan out;
  if (cap < first) return out;
  const std::size_t count = cap - first + 1;
  std::vector<DigitScan> parts(std::min(kScanChunks, count));
  parallel_chunks(count, parts.size(), workers, [&](std::size_t chunk, std::size_t b, std::size_t e) {
    DigitScan& part = parts[chunk];
    Endpoint prev = endpoint_at(state, first + b);
    for (std::size_t i = b; i < e; ++i) {
      const std::uint64_t a = first + i;
      Endpoint next = endpoint_at(state, a + 1);
      if (overlap_holds(state.n, prev, next)) {
        part.candidates.push_back(a);
        if (sign_change(state.n, prev, next)) part.certified.push_back(a);
      }
      prev = std::move(next);
    }
  });
  for (auto& part : parts) {
    out.candidates.insert(out.candidates.end(), part.candidates.begin(), part.candidates.end());
    out.certified.insert(out.certified.end(), part.certified.begin(), part.certified.end());
  }
  return out;
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

namespace detail {

// Certificate fields that follow from the prefix and the digit alone.
void fill_interval(const PrefixState& state, std::uint64_t digit, DigitCertificate& cert) {
  Endpoint xa = endpoint_at(state, digit);
  Endpoint xb = endpoint_at(state, digit + 1);
  auto [lo, hi] = orient(state.n, xa, xb);
  cert.index = state.n;
  cert.digit = digit;
  cert.lo = make_reduced_unchecked(lo.p, lo.q);
  cert.hi = make_reduced_unchecked(hi.p, hi.q);
  cert.sign_lo = lo.g;
  cert.sign_hi = hi.g;
}

}  // namespace detail

using detail::fill_interval;

const char* to_string(Target t) { return t == Target::smallest ? "smallest" : "greatest"; }

Target parse_target(std::string_view text) {
  if (text == "smallest") return Target::smallest;
  if (text == "greatest") return Target::greatest;
  throw ParseError("unknown target '" + std::string(text) + "' (expected smallest or greatest)");
}

std::string DigitCertificate::hash() const {
  std::string text = std::to_string(index) + '|' + std::to_string(digit) + '|' + std::to_string(cap) + '|' +
                     join(candidates) + '|' + join(certified) + '|' + lo.to_string() + '|' + hi.to_string() +
                     '|' + std::to_string(sign_lo) + '|' + std::to_string(sign_hi);
  std::uint64_t h = 14695981039346656037ull;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool DigitCertificate::signs_valid() const {
  if (sign_lo != -1) return false;
  if (sign_hi == 1) return true;
  return index == 1 && sign_hi == 0 && hi == Rational(1, 2);
}

// --- records ------------------------------------------------------------------

FixedPointRecord FixedPointRecord::from_digits(std::vector<std::uint64_t> digits, Target target) {
  FixedPointRecord r;
  r.target = target;
  for (auto a : digits) r.push_digit(a);
  return r;
}

void FixedPointRecord::push_digit(std::uint64_t a) {
  if (a < 1) throw DomainError("partial quotients must be positive");
  const Integer ul = static_cast<unsigned long>(a);
  Integer p, q;
  const std::size_t k = convergents.size();
  if (k == 0) {
    p = 1;
    q = ul;
  } else if (k == 1) {
    p = ul * convergents[0].p;
    q = ul * convergents[0].q + 1;
  } else {
    p = ul * convergents[k - 1].p + convergents[k - 2].p;
    q = ul * convergents[k - 1].q + convergents[k - 2].q;
  }
  convergents.push_back(Convergent{std::move(p), std::move(q), k + 1});
  sums.push_back((sums.empty() ? 0 : sums.back()) + a);
  digits.push_back(a);
}

void FixedPointRecord::truncate(std::size_t n) {
  if (n >= digits.size()) return;
  digits.resize(n);
  sums.resize(n);
  convergents.resize(n);
  if (certificates.size() > n) certificates.resize(n);
  ambiguous_from.reset();
  for (const auto& c : certificates) {
    if (c.certified.size() > 1) {
      ambiguous_from = c.index;
      break;
    }
  }
}

PrefixState PrefixState::of(std::span<const std::uint64_t> digits) {
  PrefixState s;
  for (auto a : digits) s.push(a);
  return s;
}

void PrefixState::push(std::uint64_t a) {
  if (a < 1) throw DomainError("partial quotients must be positive");
  Integer p = p1 * static_cast<unsigned long>(a) + p0;
  Integer q = q1 * static_cast<unsigned long>(a) + q0;
  p0 = std::move(p1);
  q0 = std::move(q1);
  p1 = std::move(p);
  q1 = std::move(q);
  image = qmark_extend(image, sum, n, a);
  sum += a;
  ++n;
}

// --- digit engine -------------------------------------------------------------

std::uint64_t digit_cap(std::uint64_t prefix_sum) {
  if (prefix_sum < 1) throw DomainError("digit_cap needs a positive prefix sum");
  constexpr mpfr_prec_t prec = 128;
  const Integer s = static_cast<unsigned long>(prefix_sum);
  Interval sv = Interval::from_integer(s, prec);
  Interval bound = constants_at(prec).kappa1 * sv + Interval::from_integer(Integer(2), prec) * log2(sv);
  Integer ceil_upper;
  mpfr_get_z(ceil_upper.get_mpz_t(), bound.upper(), MPFR_RNDU);
  ceil_upper += 1;
  if (ceil_upper >= s) return prefix_sum;
  return static_cast<std::uint64_t>(ceil_upper.get_ui());
}

std::vector<std::uint64_t> candidate_digits(std::span<const std::uint64_t> prefix, std::uint64_t cap,
                                            unsigned workers) {
  if (cap < 1) throw DomainError("candidate cap must be >= 1");
  PrefixState state = PrefixState::of(prefix);
  DigitScan scan = scan_digit(state, 1, cap, workers);
  if (scan.candidates.empty()) {
    throw CandidateError("no partial quotient in [1, " + std::to_string(cap) + "] satisfies the system at n = " +
                         std::to_string(state.n));
  }
  return scan.candidates;
}

std::pair<std::uint64_t, DigitCertificate> next_digit(const PrefixState& state, Target target, unsigned workers) {
  const std::size_t n = state.n;
  const std::uint64_t first = n == 1 ? kFirstDigitLow : 1;
  const std::uint64_t cap = n == 1 ? kFirstDigitCap : digit_cap(state.sum);

  DigitScan scan = scan_digit(state, first, cap, workers);
  if (scan.candidates.empty()) {
    throw CandidateError("no candidate for a_" + std::to_string(n) + " in [" + std::to_string(first) + ", " +
                         std::to_string(cap) + "]");
  }
  if (scan.certified.empty()) {
    throw DegeneracyError("a_" + std::to_string(n) + ": candidates {" + join(scan.candidates) +
                          "} but no interval with ?(lo) < lo and ?(hi) > hi");
  }

  // x_a moves right with a when n is even and left when n is odd.
  const bool rightward = n % 2 == 0;
  const bool nearest_zero = target == Target::smallest;
  const std::uint64_t digit =
      (rightward == nearest_zero) ? scan.certified.front() : scan.certified.back();

  DigitCertificate cert;
  cert.cap = cap;
  cert.candidates = std::move(scan.candidates);
  cert.certified = std::move(scan.certified);
  fill_interval(state, digit, cert);

  // Independent re-check of both endpoint signs through full expansion.
  if (g_sign(cert.lo).sign != cert.sign_lo || g_sign(cert.hi).sign != cert.sign_hi || !cert.signs_valid()) {
    throw DegeneracyError("a_" + std::to_string(n) + " = " + std::to_string(digit) +
                          ": endpoint signs do not certify a fixed point in (" + cert.lo.to_string() + ", " +
                          cert.hi.to_string() + ")");
  }
  return {digit, std::move(cert)};
}

std::pair<std::uint64_t, DigitCertificate> next_digit(std::span<const std::uint64_t> prefix, Target target,
                                                      unsigned workers) {
  return next_digit(PrefixState::of(prefix), target, workers);
}

FixedPointRecord compute_fixed_point(Target target, std::size_t n_digits, const EngineOptions& options) {
  if (n_digits < 1) throw DomainError("n_digits must be >= 1");
  FixedPointRecord record;
  record.target = target;
  std::optional<DigitCache> cache;
  if (options.cache) {
    cache.emplace(*options.cache, target);
    record = cache->load();
  }
  if (record.size() >= n_digits) {
    record.truncate(n_digits);
    return record;
  }

  PrefixState state = PrefixState::of(record.digits);
  while (record.size() < n_digits) {
    auto [digit, cert] = next_digit(state, target, options.workers);
    state.push(digit);
    record.push_digit(digit);
    if (!record.ambiguous_from && cert.certified.size() > 1) record.ambiguous_from = cert.index;
    record.certificates.push_back(std::move(cert));
    if (cache) {
      cache->append(record);
      if (record.size() % 100 == 0) cache->snapshot(record);
    }
  }
  if (cache) cache->snapshot(record);
  return record;
}

std::pair<Rational, Rational> enclosure(const FixedPointRecord& record) {
  if (record.empty()) throw DomainError("enclosure of an empty record");
  if (record.certificates.size() == record.size()) {
    const auto& c = record.certificates.back();
    return {c.lo, c.hi};
  }
  // Synthetic record: the cylinder between [.., a_N] and [.., a_N + 1].
  PrefixState state = PrefixState::of(std::span(record.digits).first(record.size() - 1));
  DigitCertificate cert;
  fill_interval(state, record.digits.back(), cert);
  return {cert.lo, cert.hi};
}

// --- reference data -------------------------------------------------------------

std::vector<ReferenceTerm> parse_bfile(std::istream& in) {
  std::vector<ReferenceTerm> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line.substr(first));
    std::string idx, val, extra;
    fields >> idx >> val;
    if (idx.empty() || val.empty() || (fields >> extra)) {
      throw ParseError("b-file line " + std::to_string(line_no) + ": expected 'n a_n', got '" + line + "'");
    }
    try {
      Integer i = parse_integer(idx);
      if (!i.fits_ulong_p()) throw ParseError("index too large");
      out.push_back(ReferenceTerm{static_cast<std::size_t>(i.get_ui()), parse_integer(val)});
    } catch (const ParseError&) {
      throw ParseError("b-file line " + std::to_string(line_no) + ": malformed '" + line + "'");
    }
  }
  return out;
}

std::vector<ReferenceTerm> parse_bfile(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_bfile(in);
}

ReferenceComparison oeis_compare(const FixedPointRecord& record, const std::vector<ReferenceTerm>& reference) {
  ReferenceComparison cmp;
  bool agreeing = true;
  for (const auto& term : reference) {
    if (term.index == 0) continue;
    if (term.index > record.size()) continue;
    ++cmp.compared;
    const Integer actual = static_cast<unsigned long>(record.digits[term.index - 1]);
    if (actual == term.value) {
      if (agreeing && term.index == cmp.common_prefix + 1) ++cmp.common_prefix;
    } else {
      agreeing = false;
      if (!cmp.mismatch_index || term.index < *cmp.mismatch_index) {
        cmp.mismatch_index = term.index;
        cmp.expected = term.value;
        cmp.actual = actual;
      }
    }
  }
  if (cmp.mismatch_index) cmp.common_prefix = std::min(cmp.common_prefix, *cmp.mismatch_index - 1);
  return cmp;
}

}  // namespace mqm

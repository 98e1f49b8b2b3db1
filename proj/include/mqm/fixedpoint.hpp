#pragma once

// Certified partial quotients of the smallest and greatest irrational fixed
// points of ?(x) in (0, 1/2).
//
// For a known prefix [a_1, ..., a_{n-1}] the next quotient a is searched over
// [1, cap]. Each a names the interval between x_a = [.., a] and
// x_{a+1} = [.., a + 1]; the fixed point's own digit must satisfy the overlap
// system between these endpoints and their images (the "candidates"), and
// an interval whose endpoints give ?(lo) - lo < 0 < ?(hi) - hi certainly
// contains a fixed point (the "certified" candidates). The smallest target
// takes the certified interval nearest 0, the greatest the one nearest 1/2.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mqm/cf.hpp"

namespace mqm {

enum class Target { smallest, greatest };

const char* to_string(Target t);
Target parse_target(std::string_view text);

struct DigitCertificate {
  std::size_t index = 0;
  std::uint64_t digit = 0;
  std::uint64_t cap = 0;
  std::vector<std::uint64_t> candidates;
  std::vector<std::uint64_t> certified;
  Rational lo;
  Rational hi;
  int sign_lo = 0;  // sign of ?(lo) - lo
  int sign_hi = 0;

  /// 16 hex digits identifying the certificate's full content.
  std::string hash() const;
  /// sign_lo = -1 and sign_hi = +1, or sign_hi = 0 at index 1 where hi is
  /// the rational fixed point 1/2 bounding the search region.
  bool signs_valid() const;
};

struct FixedPointRecord {
  Target target = Target::smallest;
  std::vector<std::uint64_t> digits;
  std::vector<std::uint64_t> sums;  // S_n = a_1 + ... + a_n
  std::vector<Convergent> convergents;
  std::vector<DigitCertificate> certificates;  // empty for synthetic records
  std::optional<std::size_t> ambiguous_from;

  /// A record carrying only digits, sums and convergents; used to feed the
  /// verifiers with constructed witnesses.
  static FixedPointRecord from_digits(std::vector<std::uint64_t> digits, Target target = Target::smallest);

  std::size_t size() const { return digits.size(); }
  bool empty() const { return digits.empty(); }
  void push_digit(std::uint64_t a);
  void truncate(std::size_t n);
};

/// Running state for the next quotient a_n given [a_1, ..., a_{n-1}].
struct PrefixState {
  std::size_t n = 1;
  std::uint64_t sum = 0;
  Integer p1 = 0, q1 = 1;  // p_{n-1}, q_{n-1}
  Integer p0 = 1, q0 = 0;  // p_{n-2}, q_{n-2}
  Dyadic image;            // ?([a_1, ..., a_{n-1}])

  static PrefixState of(std::span<const std::uint64_t> digits);
  void push(std::uint64_t a);
};

struct EngineOptions {
  unsigned workers = 1;
  std::optional<std::filesystem::path> cache;
};

/// Every a in [1, cap] (ascending) satisfying the overlap system for the
/// prefix. Throws CandidateError when there is none.
std::vector<std::uint64_t> candidate_digits(std::span<const std::uint64_t> prefix, std::uint64_t cap,
                                            unsigned workers = 1);

/// The search cap for a prefix with quotient sum S >= 1:
/// min(S, ceil(kappa1 * S + 2 log2 S) + 1).
std::uint64_t digit_cap(std::uint64_t prefix_sum);

std::pair<std::uint64_t, DigitCertificate> next_digit(const PrefixState& prefix, Target target,
                                                      unsigned workers = 1);
std::pair<std::uint64_t, DigitCertificate> next_digit(std::span<const std::uint64_t> prefix, Target target,
                                                      unsigned workers = 1);

FixedPointRecord compute_fixed_point(Target target, std::size_t n_digits, const EngineOptions& options = {});

/// Tightest certified interval around the target; width <= 1/q_N^2.
std::pair<Rational, Rational> enclosure(const FixedPointRecord& record);

// --- reference data -----------------------------------------------------------

struct ReferenceTerm {
  std::size_t index = 0;
  Integer value;
};

/// Parses b-file text: "n a_n" per line, '#' comments and blank lines skipped.
std::vector<ReferenceTerm> parse_bfile(std::istream& in);
std::vector<ReferenceTerm> parse_bfile(std::string_view text);

/// The bundled snapshot of the reference continued fraction (b-file text).
std::string_view bundled_reference_bfile();

struct ReferenceComparison {
  std::size_t compared = 0;       // indices present in both
  std::size_t common_prefix = 0;  // leading digits that agree
  std::optional<std::size_t> mismatch_index;
  Integer expected;  // reference value at the mismatch
  Integer actual;
};

/// Aligns reference index i with digit a_i; an index-0 term (the integer
/// part) is ignored.
ReferenceComparison oeis_compare(const FixedPointRecord& record, const std::vector<ReferenceTerm>& reference);

/// Downloads https://<host>/<id>/b<digits>.txt. Throws Error when the
/// transfer fails or the build has no TLS support.
std::string fetch_bfile(const std::string& sequence_id, const std::string& host = "oeis.org", int port = 443);

// --- persistence ----------------------------------------------------------------

/// Digit cache: a JSON snapshot at `path` rewritten every 100 digits and an
/// append-only journal at `path` + ".journal" holding digits since the last
/// snapshot.
class DigitCache {
 public:
  DigitCache(std::filesystem::path path, Target target);

  /// Replays and re-validates the stored digits. Returns an empty record
  /// when nothing is stored; throws CacheError on any inconsistency.
  FixedPointRecord load() const;

  void append(const FixedPointRecord& record);  // journals the last certificate
  void snapshot(const FixedPointRecord& record);

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path journal_path() const;

 private:
  std::filesystem::path path_;
  Target target_;
};

std::string record_to_json(const FixedPointRecord& record, bool with_certificates);

}  // namespace mqm

#pragma once

// Exact scan of |?(p/q) - p/q| > 1/(2q^2) over reduced fractions in [0, 1/2].
//
// With ?(p/q) = N/2^e, multiplying through by 2 q^2 2^e turns the inequality
// into lhs > rhs for the integers lhs = |2 q^2 N - 2^(e+1) p q| and rhs = 2^e.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mqm/cf.hpp"
#include "mqm/fixedpoint.hpp"

namespace mqm {

enum class FractionStatus { satisfies, counterexample, equality };

const char* to_string(FractionStatus s);

struct FractionVerdict {
  Integer p, q;
  Integer lhs;  // |2 q^2 N - 2^(e+1) p q|
  Integer rhs;  // 2^e
  FractionStatus status = FractionStatus::satisfies;
  std::size_t index = 0;  // convergent index for scan_convergents, else 0

  friend bool operator==(const FractionVerdict&, const FractionVerdict&) = default;
};

/// Throws DomainError unless gcd(p, q) = 1 and 0 <= p/q <= 1/2.
FractionVerdict check_fraction(const Integer& p, const Integer& q);

/// Same verdict from an image ?(p/q) the caller already knows.
FractionVerdict verdict_from_image(const Integer& p, const Integer& q, const Dyadic& image);

struct ScanReport {
  std::uint64_t q_max = 0;
  std::string region = "[0,1/2]";
  std::vector<FractionVerdict> counterexamples;  // sorted by (q, p)
  std::vector<FractionVerdict> equalities;
  std::uint64_t fractions_checked = 0;
  std::size_t tasks = 0;           // subtree tasks in the partition
  std::size_t tasks_restored = 0;  // of those, taken from a checkpoint

  std::string to_json() const;
  std::string to_csv() const;
};

constexpr std::uint64_t kDefaultScanQmax = 3000;
constexpr std::uint64_t kFullScanQmax = 30000;

struct ScanOptions {
  unsigned workers = 1;
  std::size_t target_tasks = 512;
  std::optional<std::filesystem::path> checkpoint;
  bool resume = false;
};

/// Every reduced p/q in [0, 1/2] with q <= q_max, visited once through the
/// Stern-Brocot subtree between 0/1 and 1/2 with images carried as exact
/// dyadic midpoints. The report does not depend on the worker count or on
/// resuming. Throws CacheError when a checkpoint fails revalidation.
ScanReport scan_inequality(std::uint64_t q_max, const ScanOptions& options = {});

/// check_fraction at every convergent of the record. Throws DomainError on an
/// empty record.
ScanReport scan_convergents(const FixedPointRecord& record);

}  // namespace mqm

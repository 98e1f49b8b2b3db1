#pragma once

// Checks of the proven digit-growth inequalities against computed records,
// plus the explicit irrationality bound at convergents.
//
// Integer-only checks compare exactly. Strict inequalities involving kappa1,
// kappa2 or logarithms go through decide_integer_below: a comparison that the
// precision ceiling cannot settle is reported as undecided, never as a pass.

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mqm/fixedpoint.hpp"
#include "mqm/interval.hpp"

namespace mqm {

struct Finding {
  std::size_t index = 0;
  std::map<std::string, std::string> witness;
};

struct VerificationReport {
  std::string check;
  std::size_t range_lo = 0;
  std::size_t range_hi = 0;
  std::vector<Finding> violations;
  std::vector<Finding> undecided;
  mpfr_prec_t precision_bits = 0;  // highest precision any comparison needed
  std::map<std::string, std::string> details;

  bool passed() const { return violations.empty() && undecided.empty(); }
  std::string to_json() const;
};

/// a_1 = 2 (reported at index 0) and a_{n+1} <= S_n for 1 <= n < N.
VerificationReport check_theorem1(const FixedPointRecord& record);

/// a_{n+1} < kappa1 S_n + 2 log2 S_n for 1 <= n < N.
VerificationReport check_theorem1_improved(const FixedPointRecord& record, const PrecisionPolicy& policy = {});

/// a_{n+1} + ... + a_{n+k} < kappa1 S_n + 2k log2 S_n for every window inside
/// the record with 1 <= k <= kmax. Violations carry n as index and k in the witness.
VerificationReport check_remark4(const FixedPointRecord& record, std::size_t kmax,
                                 const PrecisionPolicy& policy = {});

/// S_n < kappa2 n for 1 <= n <= N.
VerificationReport check_remark5(const FixedPointRecord& record, const PrecisionPolicy& policy = {});

/// a_{n+1} < kappa1 kappa2 n + 2 log2(kappa2 n) for 2 <= n < N.
VerificationReport check_corollary6(const FixedPointRecord& record, const PrecisionPolicy& policy = {});

/// q_n <= F_{S_n + 1} for every n, and phi^S = F_S phi + F_{S-1} with
/// F_{S+1} <= phi^S for S up to the largest S_n (capped at 64).
VerificationReport check_kanlem(const FixedPointRecord& record);

/// I(q) = kappa1 (2 log2 q + log2 4.5) + 2 log2(2 log2 q + log2 4.5) + 1.
/// Throws DomainError for q < 2.
Interval irrationality_bound(const Integer& q, mpfr_prec_t precision);

/// Decides I(q_n) q_n > q_n + q_{n+1} for 1 <= n < N and reports n0, the
/// least index from which it holds throughout. Earlier failures are listed in
/// details; a violation is raised only when no such n0 exists. Throws
/// DomainError for records shorter than 2.
VerificationReport check_convergent_gaps(const FixedPointRecord& record, const PrecisionPolicy& policy = {});

/// The localization of all fixed points to (2/5, 3/7): ?(?(2/5)) = 5/16 < 1/3,
/// ?(?(3/7)) = 29/64 > 4/9, ?(1/n) = 2^(1-n) for n <= 64 and
/// 2^n < 2n + 3 exactly for n in {1, 2, 3} among n <= 20.
VerificationReport check_localization();

/// S(?(x)) > S(x) and ?(x) != x for every member of B_2, ..., B_{n_max}.
VerificationReport check_ratval(std::size_t n_max);

struct CheckContext {
  const FixedPointRecord* record = nullptr;
  std::size_t kmax = 5;
  std::size_t ratval_levels = 14;
  PrecisionPolicy policy;
};

struct RegisteredCheck {
  std::string name;  // report name, e.g. "check_theorem1"
  std::function<VerificationReport(const CheckContext&)> run;
};

/// Every verifier, in the order `verify all` runs them.
const std::vector<RegisteredCheck>& registered_checks();

}  // namespace mqm

#pragma once

#include <cstdint>

#include "mqm/fixedpoint.hpp"

namespace mqm::detail {

/// Sets index, digit, lo, hi and both endpoint signs of `cert` for the
/// interval named by `digit` after the prefix held in `state`.
void fill_interval(const PrefixState& state, std::uint64_t digit, DigitCertificate& cert);

}  // namespace mqm::detail

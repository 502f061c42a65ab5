#pragma once

#include <cstdint>
#include <vector>

#include "whamcan/validation.hpp"

namespace whamcan {

/// Nominal bit time parameter set. The quantum q is kept in integer
/// nanoseconds so that all downstream bus arithmetic stays exact.
struct BitTiming {
    int p = 2;               // PROP_SEG quanta, >= 1
    int ps1 = 2;             // PHASE_SEG1 quanta, 1..8
    int ps2 = 2;             // PHASE_SEG2 quanta, 1..8
    int pr = 1;              // information processing time quanta, 0..2
    int pe = 1;              // prescaler, >= 1
    std::int64_t q_ns = 125; // time quantum, > 0

    friend bool operator==(const BitTiming&, const BitTiming&) = default;
};
// The defaults give (1+2+2+2+1) * 1 * 125 ns = 1 us per bit, i.e. 1 Mbps.

/// Range check of every field. Returns one entry per violated range naming
/// the field, its value and the legal range. p > 8 is reported as an
/// advisory (a conventional ceiling, not a hard limit).
std::vector<Violation> validate_timing(const BitTiming& bt);

/// (1 + p + ps1 + ps2 + pr) * pe * q, exactly, in nanoseconds.
/// Throws ValidationError listing each violated range if bt is invalid.
std::int64_t nominal_bit_time_ns(const BitTiming& bt);

} // namespace whamcan

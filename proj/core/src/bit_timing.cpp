#include "whamcan/bit_timing.hpp"

#include <string>

#include "whamcan/errors.hpp"

namespace whamcan {

namespace {

void check_range(std::vector<Violation>& out, const char* field, long long value,
                 long long lo, long long hi) {
    if (value < lo || value > hi) {
        out.push_back({field, std::to_string(value) + " outside " + std::to_string(lo) +
                                  ".." + std::to_string(hi),
                       Severity::Error});
    }
}

} // namespace

std::vector<Violation> validate_timing(const BitTiming& bt) {
    std::vector<Violation> out;
    if (bt.p < 1) {
        out.push_back({"p", std::to_string(bt.p) + " below the minimum of 1", Severity::Error});
    } else if (bt.p > 8) {
        out.push_back({"p", std::to_string(bt.p) + " above the conventional ceiling of 8",
                       Severity::Advisory});
    }
    check_range(out, "ps1", bt.ps1, 1, 8);
    check_range(out, "ps2", bt.ps2, 1, 8);
    check_range(out, "pr", bt.pr, 0, 2);
    if (bt.pe < 1) {
        out.push_back({"pe", std::to_string(bt.pe) + " below the minimum of 1", Severity::Error});
    }
    if (bt.q_ns < 1) {
        out.push_back({"q_ns", std::to_string(bt.q_ns) + " must be a positive nanosecond count",
                       Severity::Error});
    }
    return out;
}

std::int64_t nominal_bit_time_ns(const BitTiming& bt) {
    const auto violations = validate_timing(bt);
    if (has_errors(violations)) {
        throw ValidationError("invalid bit timing\n" + format_violations(violations));
    }
    // One sync quantum plus the programmed segments, scaled by the prescaler.
    const std::int64_t quanta = 1 + bt.p + bt.ps1 + bt.ps2 + bt.pr;
    return quanta * bt.pe * bt.q_ns;
}

} // namespace whamcan

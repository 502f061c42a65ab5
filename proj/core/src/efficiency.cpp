#include "whamcan/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "whamcan/errors.hpp"

namespace whamcan {

namespace {

using int128 = __int128;

std::int64_t checked_int64(int128 value, const char* what) {
    if (value > int128(std::numeric_limits<std::int64_t>::max()) || value < 0) {
        throw DomainError(std::string(what) + " overflows the nanosecond range");
    }
    return static_cast<std::int64_t>(value);
}

// round(x / den) with half-up tie handling, x >= 0.
std::int64_t div_round_half_up(int128 x, int128 den, const char* what) {
    return checked_int64((x + den / 2) / den, what);
}

std::int64_t bit_time_ns(const SystemModelParams& sys, const NodeModelParams& node) {
    return nominal_bit_time_ns(node.timing ? *node.timing : sys.timing);
}

// Max window sum of the node's trace, using the system window default.
// Returns 0 for an empty (error-free) trace.
std::int64_t node_power_numerator(const SystemModelParams& sys, const NodeModelParams& node) {
    if (node.trace.empty()) return 0;
    if (static_cast<int>(node.trace.size()) != sys.r) {
        throw DomainError("error trace of length " + std::to_string(node.trace.size()) +
                          " does not match r = " + std::to_string(sys.r));
    }
    const int window = sys.power_window.value_or(sys.r);
    return max_window_sum(node.trace, window);
}

void check_nonnegative(int value, const char* field) {
    if (value < 0) {
        throw DomainError(std::string(field) + " must be nonnegative, got " +
                          std::to_string(value));
    }
}

} // namespace

std::int64_t max_window_sum(std::span<const int> trace, int window) {
    if (trace.empty()) {
        throw DomainError("power function requires a nonempty error trace");
    }
    if (window < 1 || window > static_cast<int>(trace.size())) {
        throw DomainError("window " + std::to_string(window) + " outside 1.." +
                          std::to_string(trace.size()));
    }
    std::int64_t sum = 0;
    for (int j = 0; j < window; ++j) sum += trace[static_cast<std::size_t>(j)];
    std::int64_t best = sum;
    for (std::size_t j = static_cast<std::size_t>(window); j < trace.size(); ++j) {
        sum += trace[j] - trace[j - static_cast<std::size_t>(window)];
        best = std::max(best, sum);
    }
    return best;
}

double power(std::span<const int> trace, std::optional<int> window) {
    const int r = static_cast<int>(trace.size());
    return static_cast<double>(max_window_sum(trace, window.value_or(r))) / r;
}

std::int64_t t1_ns(const SystemModelParams& sys, std::span<const NodeModelParams> nodes) {
    std::int64_t sum = 0;
    for (const auto& node : nodes) {
        check_nonnegative(node.m, "m");
        check_nonnegative(node.M, "M");
        const std::int64_t b = bit_time_ns(sys, node);
        const std::int64_t s = node_power_numerator(sys, node);
        // (1 + m)(1 + s/r) B M, computed as an exact rational over r.
        const int128 numerator =
            int128(1 + node.m) * int128(b) * int128(node.M) * int128(sys.r + s);
        sum += div_round_half_up(numerator, sys.r, "T1 term");
    }
    return sum;
}

std::int64_t t2_ns(const SystemModelParams& sys, std::span<const NodeModelParams> nodes) {
    std::int64_t sum = 0;
    for (const auto& node : nodes) {
        check_nonnegative(node.w, "w");
        check_nonnegative(node.E, "E");
        check_nonnegative(node.I, "I");
        const int128 b = bit_time_ns(sys, node);
        const int128 term = int128(node.w) * b * int128(node.E) + b * int128(node.I);
        sum += checked_int64(term, "T2 term");
    }
    return sum;
}

std::int64_t t3_ns(const SystemModelParams& sys, std::span<const NodeModelParams> nodes) {
    if (nodes.empty()) return 0;
    double distance_sum = 0.0;
    for (const auto& node : nodes) {
        if (node.L_m < 0.0) {
            throw DomainError("node distance must be nonnegative");
        }
        distance_sum += node.L_m;
    }
    const double mean_distance = distance_sum / static_cast<double>(nodes.size());
    return std::llround(sys.syn_ns_per_m * mean_distance);
}

CycleBreakdown total(const SystemModelParams& sys, std::span<const NodeModelParams> nodes) {
    if (sys.r < 1) {
        throw DomainError("circle count r must be at least 1");
    }
    CycleBreakdown breakdown;
    breakdown.t1_ns = t1_ns(sys, nodes);
    breakdown.t2_ns = t2_ns(sys, nodes);
    breakdown.t3_ns = t3_ns(sys, nodes);
    breakdown.node_power.reserve(nodes.size());
    for (const auto& node : nodes) {
        breakdown.node_power.push_back(
            static_cast<double>(node_power_numerator(sys, node)) / sys.r);
    }
    return breakdown;
}

std::vector<Violation> validate_params(const SystemModelParams& sys,
                                       std::span<const NodeModelParams> nodes,
                                       Strictness strictness, LengthConvention convention) {
    std::vector<Violation> out;
    const bool paper = strictness == Strictness::PaperStrict;

    auto field = [](std::size_t i, const std::string& name) {
        return "node[" + std::to_string(i) + "]." + name;
    };

    const int y = static_cast<int>(sys.y);
    if (y < 1 || y > 4) {
        out.push_back({"y", std::to_string(y) + " outside 1..4", Severity::Error});
    }
    if (sys.r < 1) {
        out.push_back({"r", std::to_string(sys.r) + " must be at least 1", Severity::Error});
    } else if (paper && sys.r != 100) {
        out.push_back({"r", std::to_string(sys.r) + " differs from the fixed value 100",
                       Severity::Error});
    }
    if (sys.power_window && (*sys.power_window < 1 || *sys.power_window > sys.r)) {
        out.push_back({"power_window",
                       std::to_string(*sys.power_window) + " outside 1.." + std::to_string(sys.r),
                       Severity::Error});
    }
    for (const auto& v : validate_timing(sys.timing)) {
        out.push_back({"timing." + v.field, v.message, v.severity});
    }
    if (nodes.empty()) {
        out.push_back({"nodes", "at least one node is required", Severity::Error});
    }

    double span_m = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& node = nodes[i];
        if (node.m < 0 || node.m > 10) {
            out.push_back({field(i, "m"), std::to_string(node.m) + " outside 0..10",
                           Severity::Error});
        }
        if (node.w < 0 || node.w > 10) {
            out.push_back({field(i, "w"), std::to_string(node.w) + " outside 0..10",
                           Severity::Error});
        }
        if (paper) {
            const bool short_range = node.M >= 14 && node.M <= 18;
            const bool data_range = node.M >= 44 && node.M <= 52;
            if (!short_range && !data_range) {
                out.push_back({field(i, "M"),
                               std::to_string(node.M) + " outside [14,18] u [44,52]",
                               Severity::Error});
            } else if (short_range) {
                out.push_back({field(i, "M"),
                               std::to_string(node.M) +
                                   " lies in [14,18], a range matching ERROR frame lengths "
                                   "rather than any DATA frame",
                               Severity::Advisory});
            }
            if (node.E < 0 || node.E > 10) {
                out.push_back({field(i, "E"),
                               std::to_string(node.E) +
                                   " outside the printed range [0,10], which no whole ERROR "
                                   "frame (14..20 bits) can satisfy",
                               Severity::Advisory});
            }
            if (node.I < 0 || node.I > 19) {
                out.push_back({field(i, "I"),
                               std::to_string(node.I) +
                                   " outside {3n+m | n <= 3, m <= 10} = 0..19",
                               Severity::Error});
            }
        } else {
            const int max_data = convention == LengthConvention::PaperTable ? 52 : 108;
            if (node.M < 44 || node.M > max_data) {
                out.push_back({field(i, "M"),
                               std::to_string(node.M) + " outside 44.." +
                                   std::to_string(max_data) + " for this length convention",
                               Severity::Error});
            }
            if (node.E < 14 || node.E > 20) {
                out.push_back({field(i, "E"),
                               std::to_string(node.E) + " outside the field-sum range 14..20",
                               Severity::Error});
            } else if (node.E > 18) {
                out.push_back({field(i, "E"),
                               std::to_string(node.E) +
                                   " exceeds the tabulated total 14..18 (field sums allow "
                                   "up to 20)",
                               Severity::Advisory});
            }
            if (node.I < 3) {
                out.push_back({field(i, "I"),
                               std::to_string(node.I) + " below the 3-bit intermission minimum",
                               Severity::Error});
            }
        }
        if (node.L_m < 0.0) {
            out.push_back({field(i, "L"), "distance must be nonnegative", Severity::Error});
        }
        span_m += std::max(node.L_m, 0.0);
        for (std::size_t j = 0; j < node.trace.size(); ++j) {
            const int x = node.trace[j];
            if (x < 0 || (paper && x > 10)) {
                out.push_back({field(i, "x[" + std::to_string(j) + "]"),
                               std::to_string(x) + (x < 0 ? " is negative" : " exceeds 10"),
                               Severity::Error});
            }
        }
        if (!node.trace.empty() && static_cast<int>(node.trace.size()) != sys.r) {
            out.push_back({field(i, "x"),
                           "trace length " + std::to_string(node.trace.size()) +
                               " does not match r = " + std::to_string(sys.r),
                           Severity::Error});
        }
        if (node.timing) {
            for (const auto& v : validate_timing(*node.timing)) {
                out.push_back({field(i, ("timing." + v.field).c_str()), v.message, v.severity});
            }
        }
    }
    if (!paper && span_m > kMaxBusSpanMeters) {
        std::ostringstream msg;
        msg << "total span " << span_m << " m exceeds the 40 m bus limit";
        out.push_back({"nodes.L", msg.str(), Severity::Error});
    }
    return out;
}

MinimizeResult minimize(const SystemModelParams& sys, std::span<const NodeModelParams> nodes,
                        const SearchGrid& grid) {
    std::vector<int> ps1 = grid.ps1;
    std::vector<int> ps2 = grid.ps2;
    std::vector<int> pr = grid.pr;
    std::vector<int> pe = grid.pe.value_or(std::vector<int>{sys.timing.pe});
    if (ps1.empty() || ps2.empty() || pr.empty() || pe.empty()) {
        throw DomainError("minimization grid must be nonempty on every axis");
    }
    std::ranges::sort(ps1);
    std::ranges::sort(ps2);
    std::ranges::sort(pr);
    std::ranges::sort(pe);

    // Sorted axes scanned outermost-first make the first strict improvement
    // the lexicographically smallest argmin.
    std::optional<MinimizeResult> best;
    for (int a : ps1) {
        for (int b : ps2) {
            for (int c : pr) {
                for (int d : pe) {
                    SystemModelParams candidate = sys;
                    candidate.timing.ps1 = a;
                    candidate.timing.ps2 = b;
                    candidate.timing.pr = c;
                    candidate.timing.pe = d;
                    nominal_bit_time_ns(candidate.timing); // reject out-of-range grid points
                    CycleBreakdown breakdown = total(candidate, nodes);
                    if (!best || breakdown.total_ns() < best->breakdown.total_ns()) {
                        best = MinimizeResult{candidate.timing, std::move(breakdown)};
                    }
                }
            }
        }
    }
    return *best;
}

RealtimeVerdict realtime_check(const CycleBreakdown& breakdown, int circles) {
    const std::int64_t harness =
        checked_int64(int128(breakdown.total_ns()) * int128(circles), "harness time");
    RealtimeVerdict verdict;
    verdict.harness_time_ns = harness;
    verdict.margin_ns = kRealtimeBudgetNs - harness;
    verdict.pass = harness < kRealtimeBudgetNs;
    return verdict;
}

} // namespace whamcan

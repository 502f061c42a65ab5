#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "whamcan/app.hpp"
#include "whamcan/bit_timing.hpp"
#include "whamcan/frame.hpp"
#include "whamcan/validation.hpp"

namespace whamcan {

/// Error-data-frame counts per circle for one node: x[j] for j = 1..r.
using ErrorTrace = std::vector<int>;

/// Largest sum over any contiguous window of the given size.
/// Throws DomainError for an empty trace or a window outside 1..size.
std::int64_t max_window_sum(std::span<const int> trace, int window);

/// Power function of a node: the maximum windowed sum of its error trace
/// divided by the full trace length r. With the default window (the whole
/// trace) this reduces to the plain mean sum(x)/r.
double power(std::span<const int> trace, std::optional<int> window = {});

/// Per-node inputs of the cycle-time model.
struct NodeModelParams {
    int M = 52;      // DATA frame bit length
    int m = 0;       // DATA frame retransmissions, 0..10
    int E = 14;      // ERROR frame bit length
    int w = 0;       // ERROR frame occurrences, 0..10
    int I = 11;      // interframe bit length
    double L_m = 0.0; // distance to the receiving node, meters
    std::optional<BitTiming> timing; // overrides the system default
    ErrorTrace trace;                // empty means error-free (P = 0)
};

/// System-wide inputs of the cycle-time model.
struct SystemModelParams {
    Mode y = Mode::Normal;
    BitTiming timing;
    double syn_ns_per_m = 0.0;       // synchronization-time coefficient
    int r = 100;                     // data-transfer circles per bundle
    std::optional<int> power_window; // window for the power function, default r
};

/// One circle of the model, split into its three component times.
/// total_ns() == t1 + t2 + t3 holds exactly by construction.
struct CycleBreakdown {
    std::int64_t t1_ns = 0;
    std::int64_t t2_ns = 0;
    std::int64_t t3_ns = 0;
    std::vector<double> node_power; // P_i per node, in input order

    std::int64_t total_ns() const noexcept { return t1_ns + t2_ns + t3_ns; }
};

/// Data-transfer time: sum over nodes of (1 + m_i)(1 + P_i) B_i M_i.
/// Each node term is computed in exact integer arithmetic (P_i is rational
/// with denominator r) and rounded half-up to whole nanoseconds.
std::int64_t t1_ns(const SystemModelParams& sys, std::span<const NodeModelParams> nodes);

/// Error and gap time: sum over nodes of w_i B_i E_i plus B_i I_i. Exact.
std::int64_t t2_ns(const SystemModelParams& sys, std::span<const NodeModelParams> nodes);

/// Correction term: syn times the mean node distance, rounded to whole
/// nanoseconds.
std::int64_t t3_ns(const SystemModelParams& sys, std::span<const NodeModelParams> nodes);

/// Full one-circle breakdown. T == T1 + T2 + T3 exactly.
CycleBreakdown total(const SystemModelParams& sys, std::span<const NodeModelParams> nodes);

/// Validation strictness. PaperStrict checks the model's printed constraint
/// ranges verbatim (flagging its internal inconsistencies as advisories);
/// Physical checks frame-field sums and the 40 m bus span instead.
enum class Strictness { PaperStrict, Physical };

std::vector<Violation> validate_params(const SystemModelParams& sys,
                                       std::span<const NodeModelParams> nodes,
                                       Strictness strictness,
                                       LengthConvention convention = LengthConvention::PaperTable);

/// Discrete search space for minimize(). Defaults to the full legal
/// ps1 x ps2 x pr grid (8 x 8 x 3 = 192 points) with the prescaler held at
/// its configured value.
struct SearchGrid {
    std::vector<int> ps1 = {1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> ps2 = {1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> pr = {0, 1, 2};
    std::optional<std::vector<int>> pe; // empty: keep sys.timing.pe fixed
};

struct MinimizeResult {
    BitTiming timing;
    CycleBreakdown breakdown;
};

/// Exhaustive enumeration of the grid applied to the system timing,
/// returning the argmin of the total circle time. Ties break toward the
/// lexicographically smallest (ps1, ps2, pr, pe). Nodes with explicit
/// timing overrides keep them and are unaffected by the grid.
/// Throws DomainError on an empty grid, ValidationError if a grid point is
/// out of range.
MinimizeResult minimize(const SystemModelParams& sys, std::span<const NodeModelParams> nodes,
                        const SearchGrid& grid = {});

inline constexpr std::int64_t kRealtimeBudgetNs = 1'000'000'000; // one harness, one second

struct RealtimeVerdict {
    bool pass = false;
    std::int64_t harness_time_ns = 0; // circles x T
    std::int64_t margin_ns = 0;       // budget - harness time (negative on fail)
};

/// Real-time feasibility: circles x T must be strictly below one second.
RealtimeVerdict realtime_check(const CycleBreakdown& breakdown, int circles);

} // namespace whamcan

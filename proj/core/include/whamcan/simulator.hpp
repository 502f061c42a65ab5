#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "whamcan/app.hpp"
#include "whamcan/frame.hpp"
#include "whamcan/scenario.hpp"

namespace whamcan {

enum class TraceEvent {
    ArbitrationStart,
    FrameSent,
    FrameLost,
    ErrorFrame,
    Retransmit,
    HaltIssued,
    ModeSet,
    CircleComplete,
};

std::string to_string(TraceEvent event);

/// One bus event. Times are nanoseconds since scenario start and are
/// nondecreasing along the trace. FrameSent and ErrorFrame are stamped at
/// the end of their bus occupancy, so the record's interval is
/// [time - bits * bit_time, time).
struct TraceRecord {
    std::int64_t time_ns = 0;
    TraceEvent event = TraceEvent::FrameSent;
    std::optional<unsigned> node_addr; // empty for system-level events
    std::optional<FrameId> id;
    int bits = 0; // transmitted bit count; 0 where not applicable

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct NodeCounters {
    unsigned addr = 0;
    std::string name;
    std::int64_t data_frames = 0; // every transmission attempt, retransmits included
    std::int64_t error_frames = 0;
    std::int64_t retransmits = 0;
    int w = 0; // final counter values
    int m = 0;

    friend bool operator==(const NodeCounters&, const NodeCounters&) = default;
};

struct HaltInfo {
    std::int64_t time_ns = 0;  // when the halt frame finished transmitting
    unsigned tripped_by = 0;   // node whose counter crossed the threshold
    std::int64_t issued_ns = 0; // when the counter crossed

    friend bool operator==(const HaltInfo&, const HaltInfo&) = default;
};

/// Aggregate results of one scenario run. The measured components assign
/// every nanosecond of the run to a model role: data frames (t1), error
/// frames and interframe gaps (t2), injected idle (t3).
struct SimReport {
    std::int64_t total_time_ns = 0; // time of the last trace record
    int r = 0;                      // configured circles
    int circles_completed = 0;
    bool halted = false;
    std::optional<HaltInfo> halt;
    std::vector<NodeCounters> nodes;
    std::vector<std::int64_t> circle_durations_ns;
    std::int64_t t1_role_ns = 0;
    std::int64_t t2_role_ns = 0;
    std::int64_t t3_role_ns = 0;
    double mean_distance_m = 0.0;

    friend bool operator==(const SimReport&, const SimReport&) = default;
};

struct SimResult {
    SimReport report;
    std::vector<TraceRecord> trace;
};

/// Deterministic discrete-event run of the configured circles. Identical
/// (config, seed) inputs produce identical traces and reports. Throws
/// ConfigError listing every invalid field.
SimResult run_scenario(const ScenarioConfig& config);

/// Tab-separated trace serialization: one record per line in the order
/// time_ns, event, node, id_hex, bits, preceded by a '#' header line.
std::string format_trace(std::span<const TraceRecord> trace);
void write_trace(std::ostream& out, std::span<const TraceRecord> trace);

/// Report serialization (stable key order).
std::string report_to_json(const SimReport& report, int indent = 2);

} // namespace whamcan

#include "whamcan/simulator.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "whamcan/arbitration.hpp"
#include "whamcan/bit_timing.hpp"
#include "whamcan/errors.hpp"

namespace whamcan {

namespace {

// Draw scheme: stateless splitmix64 hashing of (seed, node, circle, purpose),
// so every (node, circle) decision is independent of event ordering and
// reproducible across implementations of the same generator.
constexpr std::uint64_t kPurposeDataError = 1;
constexpr std::uint64_t kPurposeDetectorError = 2;
constexpr std::uint64_t kPurposeErrorLength = 3;

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t draw_bits(std::uint64_t seed, std::uint64_t node, std::uint64_t circle,
                        std::uint64_t purpose) {
    std::uint64_t h = splitmix64(seed ^ (node << 8));
    h = splitmix64(h ^ circle);
    return splitmix64(h ^ purpose);
}

double draw_uniform(std::uint64_t seed, std::uint64_t node, std::uint64_t circle,
                    std::uint64_t purpose) {
    return static_cast<double>(draw_bits(seed, node, circle, purpose) >> 11) * 0x1.0p-53;
}

struct Pending {
    Contender contender;
    bool is_halt = false;
};

struct Runner {
    const ScenarioConfig& cfg;
    SimResult result;
    std::int64_t now_ns = 0;
    SystemState sys;
    std::map<unsigned, NodeState> states;       // roster nodes by address
    std::map<unsigned, NodeCounters> counters;
    std::map<unsigned, std::int64_t> bit_time;  // per-node nanoseconds per bit
    int data_bits = 0;
    int interframe = 0;

    explicit Runner(const ScenarioConfig& config) : cfg(config) {
        sys = SystemState{cfg.mode, kNoErrorMark, false};
        data_bits = data_frame_bits(cfg.dlc, cfg.convention);
        interframe = interframe_bits(cfg.idle_bits, cfg.suspend);
        for (const auto& node : cfg.nodes) {
            const NodeAddress address = NodeAddress::from_addr(node.addr);
            states[node.addr] = NodeState{address, node.w, node.m};
            counters[node.addr] = NodeCounters{node.addr, address.name(), 0, 0, 0, node.w, node.m};
            bit_time[node.addr] = nominal_bit_time_ns(node.timing ? *node.timing : cfg.timing);
        }
        result.report.r = cfg.r;
    }

    std::int64_t node_bit_time(unsigned addr) const {
        const auto it = bit_time.find(addr);
        return it != bit_time.end() ? it->second : nominal_bit_time_ns(cfg.timing);
    }

    void emit(TraceEvent event, std::optional<unsigned> addr, std::optional<FrameId> id,
              int bits) {
        result.trace.push_back(TraceRecord{now_ns, event, addr, id, bits});
    }

    double data_error_prob(unsigned addr) const {
        const auto it = cfg.error_injection.data_error_prob.find(addr);
        return it != cfg.error_injection.data_error_prob.end() ? it->second : 0.0;
    }

    double detector_error_prob(int k) const {
        const auto it = cfg.error_injection.detector_error_prob.find(k);
        return it != cfg.error_injection.detector_error_prob.end() ? it->second : 0.0;
    }

    int sample_error_bits(unsigned addr, int circle) {
        if (cfg.error_injection.error_frame_bits) return *cfg.error_injection.error_frame_bits;
        return 14 + static_cast<int>(
                        draw_bits(cfg.seed, addr, static_cast<std::uint64_t>(circle),
                                  kPurposeErrorLength) %
                        7);
    }

    // One transmission slot: arbitration, the winning frame, error handling
    // and the trailing interframe space. Returns false once the run halts.
    bool transmit_slot(std::vector<Pending>& pending, int circle,
                       std::set<unsigned>& errored_this_circle) {
        emit(TraceEvent::ArbitrationStart, std::nullopt, std::nullopt, 0);
        std::vector<Contender> contenders;
        contenders.reserve(pending.size());
        for (const auto& p : pending) contenders.push_back(p.contender);
        const ArbitrationOutcome outcome = arbitrate(contenders);

        std::size_t winner_index = 0;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            if (pending[i].contender.frame.id == outcome.winner.frame.id) {
                winner_index = i;
            } else {
                emit(TraceEvent::FrameLost, pending[i].contender.node_addr,
                     pending[i].contender.frame.id, 0);
            }
        }
        const Pending winner = pending[winner_index];
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(winner_index));

        const unsigned addr = winner.contender.node_addr;
        const std::int64_t bit_ns = node_bit_time(addr);
        const int frame_bits = winner.is_halt ? data_frame_bits(0, cfg.convention) : data_bits;

        now_ns += frame_bits * bit_ns;
        emit(TraceEvent::FrameSent, addr, winner.contender.frame.id, frame_bits);
        result.report.t1_role_ns += frame_bits * bit_ns;
        if (auto it = counters.find(addr); it != counters.end()) it->second.data_frames += 1;

        if (winner.is_halt) {
            sys = apply_halt(sys);
            result.report.halted = true;
            if (result.report.halt) result.report.halt->time_ns = now_ns;
            return false;
        }

        const bool fails = !errored_this_circle.contains(addr) &&
                           draw_uniform(cfg.seed, addr, static_cast<std::uint64_t>(circle),
                                        kPurposeDataError) < data_error_prob(addr);
        if (fails) {
            errored_this_circle.insert(addr);
            const int error_bits = sample_error_bits(addr, circle);
            now_ns += error_bits * bit_ns;
            emit(TraceEvent::ErrorFrame, addr, winner.contender.frame.id, error_bits);
            result.report.t2_role_ns += error_bits * bit_ns;
            counters[addr].error_frames += 1;

            auto& state = states[addr];
            const ErrorFrameResult res = record_error_frame(state, sys.mode);
            state = res.state;
            counters[addr].w = state.w;
            if (res.halt) {
                // The halting error drops its retransmission; the display
                // node's halt frame preempts everything still pending.
                emit(TraceEvent::HaltIssued, 0b0001u, res.halt->id, 0);
                result.report.halt = HaltInfo{0, addr, now_ns};
                pending.push_back(
                    Pending{Contender{0b0001, Frame::data(res.halt->id, 0)}, true});
            } else {
                emit(TraceEvent::Retransmit, addr, winner.contender.frame.id, 0);
                state.m += 1;
                counters[addr].retransmits += 1;
                counters[addr].m = state.m;
                pending.push_back(winner); // FIFO requeue
            }
        }

        now_ns += interframe * bit_ns;
        result.report.t2_role_ns += interframe * bit_ns;
        return true;
    }

    void update_error_mark(int circle) {
        std::optional<int> lowest_erroring;
        for (const auto& node : cfg.nodes) {
            const NodeAddress address = NodeAddress::from_addr(node.addr);
            if (address.role != NodeRole::Detector) continue;
            if (draw_uniform(cfg.seed, node.addr, static_cast<std::uint64_t>(circle),
                             kPurposeDetectorError) < detector_error_prob(address.index)) {
                if (!lowest_erroring || address.index < *lowest_erroring) {
                    lowest_erroring = address.index;
                }
            }
        }
        // A detector's mark persists while it keeps erroring; its first
        // error-free circle clears it. Simultaneous errors keep the
        // numerically smallest (highest-priority) mark.
        const unsigned mark =
            lowest_erroring ? detector_error_mark(*lowest_erroring) : kNoErrorMark;
        if (mark != sys.active_error) {
            sys = set_error(sys, mark);
            emit(TraceEvent::ModeSet, std::nullopt,
                 encode_identifier(mode_code(sys.mode), sys.active_error, 0), 0);
        }
    }

    void run() {
        emit(TraceEvent::ModeSet, std::nullopt,
             encode_identifier(mode_code(sys.mode), sys.active_error, 0), 0);
        for (int circle = 1; circle <= cfg.r; ++circle) {
            const std::int64_t circle_start = now_ns;
            std::vector<Pending> pending;
            pending.reserve(cfg.nodes.size());
            for (const auto& node : cfg.nodes) {
                const FrameId id =
                    plan_frame_id(sys, NodeAddress::from_addr(node.addr));
                pending.push_back(Pending{Contender{node.addr, Frame::data(id, cfg.dlc)}, false});
            }
            std::set<unsigned> errored_this_circle;
            bool running = true;
            while (!pending.empty() && running) {
                running = transmit_slot(pending, circle, errored_this_circle);
            }
            if (!running) break;

            update_error_mark(circle);
            now_ns += cfg.circle_delay_ns;
            result.report.t3_role_ns += cfg.circle_delay_ns;
            emit(TraceEvent::CircleComplete, std::nullopt, std::nullopt, 0);
            result.report.circle_durations_ns.push_back(now_ns - circle_start);
            result.report.circles_completed += 1;
        }

        result.report.total_time_ns = result.trace.back().time_ns;
        double distance_sum = 0.0;
        for (const auto& node : cfg.nodes) distance_sum += node.L_m;
        result.report.mean_distance_m =
            cfg.nodes.empty() ? 0.0 : distance_sum / static_cast<double>(cfg.nodes.size());
        result.report.nodes.reserve(counters.size());
        for (const auto& [addr, c] : counters) result.report.nodes.push_back(c);
    }
};

} // namespace

std::string to_string(TraceEvent event) {
    switch (event) {
    case TraceEvent::ArbitrationStart: return "ArbitrationStart";
    case TraceEvent::FrameSent: return "FrameSent";
    case TraceEvent::FrameLost: return "FrameLost";
    case TraceEvent::ErrorFrame: return "ErrorFrame";
    case TraceEvent::Retransmit: return "Retransmit";
    case TraceEvent::HaltIssued: return "HaltIssued";
    case TraceEvent::ModeSet: return "ModeSet";
    case TraceEvent::CircleComplete: return "CircleComplete";
    }
    return "?";
}

SimResult run_scenario(const ScenarioConfig& config) {
    const auto violations = validate_config(config);
    if (has_errors(violations)) {
        throw ConfigError("invalid scenario\n" + format_violations(violations));
    }
    Runner runner(config);
    runner.run();
    return std::move(runner.result);
}

void write_trace(std::ostream& out, std::span<const TraceRecord> trace) {
    out << "# time_ns\tevent\tnode\tid_hex\tbits\n";
    for (const auto& rec : trace) {
        out << rec.time_ns << '\t' << to_string(rec.event) << '\t';
        if (rec.node_addr) {
            out << NodeAddress::from_addr(*rec.node_addr).name();
        } else {
            out << '-';
        }
        out << '\t';
        if (rec.id) {
            out << rec.id->to_hex();
        } else {
            out << '-';
        }
        out << '\t' << rec.bits << '\n';
    }
}

std::string format_trace(std::span<const TraceRecord> trace) {
    std::ostringstream out;
    write_trace(out, trace);
    return out.str();
}

std::string report_to_json(const SimReport& report, int indent) {
    nlohmann::ordered_json root;
    root["total_time_ns"] = report.total_time_ns;
    root["r"] = report.r;
    root["circles_completed"] = report.circles_completed;
    root["halted"] = report.halted;
    if (report.halt) {
        root["halt"] = {{"issued_ns", report.halt->issued_ns},
                        {"time_ns", report.halt->time_ns},
                        {"tripped_by", NodeAddress::from_addr(report.halt->tripped_by).name()}};
    } else {
        root["halt"] = nullptr;
    }
    root["components_ns"] = {{"t1_role", report.t1_role_ns},
                             {"t2_role", report.t2_role_ns},
                             {"t3_role", report.t3_role_ns}};
    root["mean_distance_m"] = report.mean_distance_m;
    root["nodes"] = nlohmann::ordered_json::array();
    for (const auto& node : report.nodes) {
        root["nodes"].push_back({{"addr", node.addr},
                                 {"name", node.name},
                                 {"data_frames", node.data_frames},
                                 {"error_frames", node.error_frames},
                                 {"retransmits", node.retransmits},
                                 {"w", node.w},
                                 {"m", node.m}});
    }
    root["circle_durations_ns"] = report.circle_durations_ns;
    return root.dump(indent) + "\n";
}

} // namespace whamcan

#include "whamcan/arbitration.hpp"

#include <algorithm>

#include "whamcan/errors.hpp"

namespace whamcan {

namespace {

// Level a contender transmits at arbitration position 0..11.
BusLevel arbitration_bit(const Contender& c, int position) {
    if (position < kRtrBitIndex) {
        return c.frame.id.bit(position);
    }
    // RTR: dominant for Data, recessive for Remote.
    return c.frame.kind == FrameKind::Data ? BusLevel::Dominant : BusLevel::Recessive;
}

} // namespace

BusLevel resolve_bit(std::span<const BusLevel> levels) {
    return std::ranges::any_of(levels, [](BusLevel l) { return l == BusLevel::Dominant; })
               ? BusLevel::Dominant
               : BusLevel::Recessive;
}

ArbitrationOutcome arbitrate(std::span<const Contender> contenders) {
    if (contenders.empty()) {
        throw DomainError("arbitration requires at least one contender");
    }
    for (std::size_t i = 0; i < contenders.size(); ++i) {
        const auto& a = contenders[i];
        if (a.frame.kind != FrameKind::Data && a.frame.kind != FrameKind::Remote) {
            throw DomainError("contender from node " + std::to_string(a.node_addr) +
                              " carries a frame without an arbitration field");
        }
        for (std::size_t j = i + 1; j < contenders.size(); ++j) {
            const auto& b = contenders[j];
            if (a.frame.id == b.frame.id && a.frame.kind == b.frame.kind) {
                throw ProtocolViolation("nodes " + std::to_string(a.node_addr) + " and " +
                                        std::to_string(b.node_addr) +
                                        " transmit the same arbitration field " +
                                        a.frame.id.to_hex());
            }
        }
    }

    if (contenders.size() == 1) {
        return ArbitrationOutcome{contenders[0], {}, std::nullopt};
    }

    std::vector<std::size_t> active(contenders.size());
    for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;

    std::optional<int> decided_at;
    std::size_t winner_index = 0;
    for (int pos = 0; pos <= kRtrBitIndex && active.size() > 1; ++pos) {
        std::vector<BusLevel> levels;
        levels.reserve(active.size());
        for (std::size_t idx : active) levels.push_back(arbitration_bit(contenders[idx], pos));
        const BusLevel bus = resolve_bit(levels);
        if (bus == BusLevel::Recessive) continue;

        // Contenders sending recessive against a dominant bus drop out here.
        std::vector<std::size_t> next;
        next.reserve(active.size());
        for (std::size_t idx : active) {
            if (arbitration_bit(contenders[idx], pos) == BusLevel::Dominant) next.push_back(idx);
        }
        if (next.size() < active.size() && !decided_at) decided_at = pos;
        active = std::move(next);
    }
    winner_index = active.front();

    ArbitrationOutcome outcome;
    outcome.winner = contenders[winner_index];
    outcome.decided_at_bit = decided_at;
    outcome.losers.reserve(contenders.size() - 1);
    for (std::size_t i = 0; i < contenders.size(); ++i) {
        if (i != winner_index) outcome.losers.push_back(contenders[i]);
    }
    return outcome;
}

} // namespace whamcan

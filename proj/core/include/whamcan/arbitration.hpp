#pragma once

#include <optional>
#include <span>
#include <vector>

#include "whamcan/frame.hpp"

namespace whamcan {

/// A node contending for bus access with a Data or Remote frame.
struct Contender {
    unsigned node_addr = 0; // 4-bit label, informational
    Frame frame;

    friend bool operator==(const Contender&, const Contender&) = default;
};

/// Bit position index of the RTR bit, transmitted right after the 11
/// identifier bits. A Data frame sends it dominant, a Remote frame
/// recessive, so Data beats Remote at an equal identifier.
inline constexpr int kRtrBitIndex = 11;

struct ArbitrationOutcome {
    Contender winner;
    std::vector<Contender> losers;     // original submission order, frames intact
    std::optional<int> decided_at_bit; // first bit position where a contender
                                       // dropped out; empty for a single contender
};

/// Wired-AND resolution of simultaneously transmitted levels.
/// Dominant iff at least one dominant is present; an empty set (idle bus)
/// resolves recessive.
BusLevel resolve_bit(std::span<const BusLevel> levels);

/// Nondestructive bit-serial arbitration over the arbitration field
/// (11 identifier bits most-significant first, then the RTR bit).
/// At each position a contender transmitting recessive while the bus
/// resolves dominant drops out; the survivor wins. Losers keep their frames
/// unchanged and can be requeued.
///
/// Throws DomainError for an empty contender list and ProtocolViolation when
/// two contenders would transmit an identical arbitration field (same
/// identifier and same frame kind).
ArbitrationOutcome arbitrate(std::span<const Contender> contenders);

} // namespace whamcan

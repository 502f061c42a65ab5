#pragma once

#include <array>
#include <optional>
#include <string>

#include "whamcan/frame.hpp"

namespace whamcan {

/// The four system-wide operating modes. The enum value is the mode code y;
/// the identifier carries it in the top 3 bits.
enum class Mode : int { Normal = 1, Customized = 2, Error = 3, SelfCheck = 4 };

/// 3-bit identifier code of a mode: 0b001..0b100.
unsigned mode_code(Mode mode);
/// Inverse of mode_code over y = 1..4. Throws DomainError otherwise.
Mode mode_from_y(int y);
std::string to_string(Mode mode);

/// Error-mark values of the identifier's middle 4 bits.
inline constexpr unsigned kNoErrorMark = 0b1111; // all recessive: normal operation
inline constexpr unsigned kHaltMark = 0b0000;    // all dominant: machine halt

/// Mark raised when detector k (1..4) finds an error: 0b0001..0b0100.
/// Throws DomainError for k outside 1..4.
unsigned detector_error_mark(int k);

enum class NodeRole { Display, Executor, Detector };

/// One of the fifteen bus nodes. The address-to-role assignment is fixed:
/// 0001 display, 0101/1000/1010/1100 detectors 1..4, the rest executors 1..10.
struct NodeAddress {
    unsigned addr = 1;               // 4-bit address, 0b0001..0b1111
    NodeRole role = NodeRole::Display;
    int index = 0;                   // executor 1..10, detector 1..4, display 0

    /// Roster lookup by address. Throws DomainError for addr outside 1..15.
    static NodeAddress from_addr(unsigned addr);
    /// All fifteen nodes in address order.
    static const std::array<NodeAddress, 15>& roster();

    std::string name() const; // "display", "executor1".."executor10", "detector1".."detector4"

    friend bool operator==(const NodeAddress&, const NodeAddress&) = default;
};

/// Per-node application counters.
struct NodeState {
    NodeAddress address;
    int w = 0; // ERROR-frame occurrences; saturates at 11 once the halt fires
    int m = 0; // DATA-frame retransmissions, 0..10

    friend bool operator==(const NodeState&, const NodeState&) = default;
};

inline constexpr int kHaltThreshold = 10; // halt fires when w exceeds this
inline constexpr int kWSaturation = 11;

/// System-wide mode and error-mark state. halted iff active_error == 0b0000.
struct SystemState {
    Mode mode = Mode::Normal;
    unsigned active_error = kNoErrorMark;
    bool halted = false;

    friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// The halt frame the Display node must transmit: mode | 0000 | 0001.
struct HaltCommand {
    FrameId id;
};

/// Identifier a node transmits under the current system state:
/// mode code | active error mark | node address. All identifiers planned
/// under one state share the same top 3 bits.
/// Throws HaltedError when the system is halted.
FrameId plan_frame_id(const SystemState& sys, const NodeAddress& node);

/// Identifier of the halt frame for the given mode.
FrameId halt_frame_id(Mode mode);

struct ErrorFrameResult {
    NodeState state;
    std::optional<HaltCommand> halt; // set exactly once, when w first exceeds 10
};

/// Counts one ERROR frame at the node. When the updated w exceeds 10 the
/// result carries the halt command; w saturates at 11 and no further halt
/// is emitted for this node.
ErrorFrameResult record_error_frame(NodeState state, Mode mode);

/// Halts the system: active_error becomes 0b0000 and plan_frame_id starts
/// failing. Idempotent.
SystemState apply_halt(SystemState sys);

/// Replaces the active error mark. Legal marks are 0b0001..0b0100 (detector
/// errors) and 0b1111 (no error); anything else throws DomainError.
SystemState set_error(SystemState sys, unsigned mark);

} // namespace whamcan

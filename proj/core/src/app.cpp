#include "whamcan/app.hpp"

#include <string>

#include "whamcan/errors.hpp"

namespace whamcan {

unsigned mode_code(Mode mode) {
    return static_cast<unsigned>(mode); // y 1..4 doubles as the 3-bit code
}

Mode mode_from_y(int y) {
    if (y < 1 || y > 4) {
        throw DomainError("mode code y = " + std::to_string(y) + " outside 1..4");
    }
    return static_cast<Mode>(y);
}

std::string to_string(Mode mode) {
    switch (mode) {
    case Mode::Normal: return "normal";
    case Mode::Customized: return "customized";
    case Mode::Error: return "error";
    case Mode::SelfCheck: return "self-check";
    }
    return "?";
}

unsigned detector_error_mark(int k) {
    if (k < 1 || k > 4) {
        throw DomainError("detector index " + std::to_string(k) + " outside 1..4");
    }
    return static_cast<unsigned>(k);
}

const std::array<NodeAddress, 15>& NodeAddress::roster() {
    static const std::array<NodeAddress, 15> table = {{
        {0b0001, NodeRole::Display, 0},
        {0b0010, NodeRole::Executor, 1},
        {0b0011, NodeRole::Executor, 2},
        {0b0100, NodeRole::Executor, 3},
        {0b0101, NodeRole::Detector, 1},
        {0b0110, NodeRole::Executor, 4},
        {0b0111, NodeRole::Executor, 5},
        {0b1000, NodeRole::Detector, 2},
        {0b1001, NodeRole::Executor, 6},
        {0b1010, NodeRole::Detector, 3},
        {0b1011, NodeRole::Executor, 7},
        {0b1100, NodeRole::Detector, 4},
        {0b1101, NodeRole::Executor, 8},
        {0b1110, NodeRole::Executor, 9},
        {0b1111, NodeRole::Executor, 10},
    }};
    return table;
}

NodeAddress NodeAddress::from_addr(unsigned addr) {
    if (addr < 1 || addr > 15) {
        throw DomainError("node address " + std::to_string(addr) + " outside 0b0001..0b1111");
    }
    return roster()[addr - 1];
}

std::string NodeAddress::name() const {
    switch (role) {
    case NodeRole::Display: return "display";
    case NodeRole::Executor: return "executor" + std::to_string(index);
    case NodeRole::Detector: return "detector" + std::to_string(index);
    }
    return "?";
}

FrameId plan_frame_id(const SystemState& sys, const NodeAddress& node) {
    if (sys.halted) {
        throw HaltedError("system is halted; no frames are planned");
    }
    return encode_identifier(mode_code(sys.mode), sys.active_error, node.addr,
                             /*strict_wham=*/true);
}

FrameId halt_frame_id(Mode mode) {
    // All-dominant error mark addressed from the Display node: the numeric
    // minimum of every identifier plannable in this mode.
    return encode_identifier(mode_code(mode), kHaltMark, 0b0001, /*strict_wham=*/true);
}

ErrorFrameResult record_error_frame(NodeState state, Mode mode) {
    if (state.w >= kWSaturation) {
        return {state, std::nullopt}; // already saturated, halt fired before
    }
    state.w += 1;
    if (state.w > kHaltThreshold) {
        state.w = kWSaturation;
        return {state, HaltCommand{halt_frame_id(mode)}};
    }
    return {state, std::nullopt};
}

SystemState apply_halt(SystemState sys) {
    sys.halted = true;
    sys.active_error = kHaltMark;
    return sys;
}

SystemState set_error(SystemState sys, unsigned mark) {
    const bool detector_mark = mark >= 0b0001 && mark <= 0b0100;
    if (!detector_mark && mark != kNoErrorMark) {
        throw DomainError("error mark " + std::to_string(mark) +
                          " is not a detector mark (0b0001..0b0100) or 0b1111");
    }
    sys.active_error = mark;
    return sys;
}

} // namespace whamcan

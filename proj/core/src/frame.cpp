#include "whamcan/frame.hpp"

#include <sstream>

#include "whamcan/errors.hpp"

namespace whamcan {

FrameId FrameId::from_raw(unsigned raw) {
    if (raw > kMaxRaw) {
        std::ostringstream msg;
        msg << "identifier " << raw << " exceeds 11 bits (max " << kMaxRaw << ")";
        throw DomainError(msg.str());
    }
    return FrameId(static_cast<std::uint16_t>(raw));
}

std::string FrameId::to_binary() const {
    std::string out(11, '0');
    for (int pos = 0; pos < 11; ++pos) {
        out[static_cast<std::size_t>(pos)] = bit(pos) == BusLevel::Recessive ? '1' : '0';
    }
    return out;
}

std::string FrameId::to_hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%03X", raw_);
    return buf;
}

FrameId encode_identifier(unsigned mode, unsigned error_mark, unsigned node_addr,
                          bool strict_wham) {
    if (mode > 0x7) {
        throw DomainError("mode field " + std::to_string(mode) + " exceeds 3 bits");
    }
    if (error_mark > 0xF) {
        throw DomainError("error mark " + std::to_string(error_mark) + " exceeds 4 bits");
    }
    if (node_addr > 0xF) {
        throw DomainError("node address " + std::to_string(node_addr) + " exceeds 4 bits");
    }
    if (strict_wham && (mode < 0b001 || mode > 0b100)) {
        throw DomainError("plan violation: mode code " + std::to_string(mode) +
                          " is not one of the four planned modes 0b001..0b100");
    }
    return FrameId::from_raw((mode << 8u) | (error_mark << 4u) | node_addr);
}

IdFields decode_identifier(unsigned raw) {
    FrameId id = FrameId::from_raw(raw); // range check
    return IdFields{id.mode_bits(), id.error_mark(), id.node_addr()};
}

Frame Frame::data(FrameId id, int dlc) {
    if (dlc < 0 || dlc > 8) {
        throw DomainError("dlc " + std::to_string(dlc) + " outside 0..8");
    }
    return Frame{FrameKind::Data, id, dlc,
                 std::vector<std::uint8_t>(static_cast<std::size_t>(dlc), 0)};
}

Frame Frame::data(FrameId id, std::vector<std::uint8_t> payload) {
    if (payload.size() > 8) {
        throw DomainError("payload of " + std::to_string(payload.size()) + " bytes exceeds 8");
    }
    const int dlc = static_cast<int>(payload.size());
    return Frame{FrameKind::Data, id, dlc, std::move(payload)};
}

Frame Frame::remote(FrameId id) {
    return Frame{FrameKind::Remote, id, 0, {}};
}

int data_frame_bits(int dlc, LengthConvention convention) {
    if (dlc < 0 || dlc > 8) {
        throw DomainError("dlc " + std::to_string(dlc) + " outside 0..8");
    }
    // SOF 1 + arbitration 12 + control 6 + CRC 16 + ACK 2 + EOF 7 = 44,
    // plus the data field under the selected convention.
    const int data_bits = convention == LengthConvention::PaperTable ? dlc : 8 * dlc;
    return kDataRemoteBaseBits + data_bits;
}

int remote_frame_bits() {
    return kDataRemoteBaseBits;
}

int error_frame_bits(int error_flag_bits) {
    if (error_flag_bits < 6 || error_flag_bits > 12) {
        throw DomainError("error flag of " + std::to_string(error_flag_bits) +
                          " bits outside 6..12");
    }
    return error_flag_bits + kErrorDelimiterBits;
}

int overload_frame_bits(int error_flag_bits) {
    // Structurally identical to an ERROR frame: flag plus 8-bit delimiter.
    return error_frame_bits(error_flag_bits);
}

int interframe_bits(int idle_bits, bool include_suspend) {
    if (idle_bits < 0) {
        throw DomainError("idle bit count must be nonnegative");
    }
    return kIntermissionBits + (include_suspend ? kSuspendBits : 0) + idle_bits;
}

int frame_bit_length(FrameKind kind, const LengthParams& params) {
    switch (kind) {
    case FrameKind::Data:
        return data_frame_bits(params.dlc, params.convention);
    case FrameKind::Remote:
        return remote_frame_bits();
    case FrameKind::Error:
        return error_frame_bits(params.error_flag_bits);
    case FrameKind::Overload:
        return overload_frame_bits(params.error_flag_bits);
    case FrameKind::InterframeSpace:
        return interframe_bits(params.idle_bits, params.include_suspend);
    }
    throw DomainError("unknown frame kind");
}

PriorityOrder compare_priority(FrameId a, FrameId b) {
    if (a.raw() == b.raw()) return PriorityOrder::Equal;
    return a.raw() < b.raw() ? PriorityOrder::AWins : PriorityOrder::BWins;
}

std::string to_string(FrameKind kind) {
    switch (kind) {
    case FrameKind::Data: return "data";
    case FrameKind::Remote: return "remote";
    case FrameKind::Error: return "error";
    case FrameKind::Overload: return "overload";
    case FrameKind::InterframeSpace: return "interframe";
    }
    return "?";
}

FrameKind frame_kind_from_string(const std::string& name) {
    if (name == "data") return FrameKind::Data;
    if (name == "remote") return FrameKind::Remote;
    if (name == "error") return FrameKind::Error;
    if (name == "overload") return FrameKind::Overload;
    if (name == "interframe") return FrameKind::InterframeSpace;
    throw DomainError("unknown frame kind '" + name + "'");
}

} // namespace whamcan

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace whamcan {

/// The two bus levels of the wired-AND medium. Dominant (logical 0)
/// overrides recessive (logical 1) during simultaneous transmission.
enum class BusLevel : std::uint8_t { Dominant = 0, Recessive = 1 };

/// 11-bit standard-format identifier segmented as mode(3) | error_mark(4) | node(4).
/// Lower raw value means higher bus priority.
class FrameId {
public:
    static constexpr std::uint16_t kMaxRaw = 0x7FF; // 11 bits

    constexpr FrameId() = default;

    /// Throws DomainError if raw exceeds 11 bits.
    static FrameId from_raw(unsigned raw);

    constexpr std::uint16_t raw() const noexcept { return raw_; }
    constexpr unsigned mode_bits() const noexcept { return (raw_ >> 8u) & 0x7u; }
    constexpr unsigned error_mark() const noexcept { return (raw_ >> 4u) & 0xFu; }
    constexpr unsigned node_addr() const noexcept { return raw_ & 0xFu; }

    /// Identifier bit at position 0..10, position 0 being the most
    /// significant bit (the first one on the wire).
    constexpr BusLevel bit(int position) const noexcept {
        return ((raw_ >> (10 - position)) & 1u) ? BusLevel::Recessive : BusLevel::Dominant;
    }

    std::string to_binary() const; // 11 characters, MSB first
    std::string to_hex() const;    // 0x-prefixed, 3 digits

    friend constexpr bool operator==(FrameId, FrameId) noexcept = default;
    friend constexpr auto operator<=>(FrameId, FrameId) noexcept = default;

private:
    constexpr explicit FrameId(std::uint16_t raw) : raw_(raw) {}
    std::uint16_t raw_ = 0;
};

struct IdFields {
    unsigned mode;
    unsigned error_mark;
    unsigned node_addr;
};

/// Concatenates mode(3) | error_mark(4) | node_addr(4) into an 11-bit id.
/// With strict_wham set, mode must be one of the four planned codes
/// 0b001..0b100; otherwise only bit widths are enforced.
/// Throws DomainError on field overflow or a strict-WHAM plan violation.
FrameId encode_identifier(unsigned mode, unsigned error_mark, unsigned node_addr,
                          bool strict_wham = false);

/// Exact inverse of encode_identifier. Throws DomainError for raw >= 2048.
IdFields decode_identifier(unsigned raw);

enum class FrameKind { Data, Remote, Error, Overload, InterframeSpace };

/// A bus frame. Data and Remote frames carry an identifier; Error, Overload
/// and InterframeSpace do not.
struct Frame {
    FrameKind kind = FrameKind::Data;
    FrameId id;
    int dlc = 0;                       // data-length code, Data frames only
    std::vector<std::uint8_t> payload; // size == dlc for Data frames

    /// Data frame with a zero-filled payload of dlc bytes. Throws DomainError
    /// if dlc is outside 0..8.
    static Frame data(FrameId id, int dlc);
    static Frame data(FrameId id, std::vector<std::uint8_t> payload);
    /// Remote frames request data: dlc 0, no payload.
    static Frame remote(FrameId id);

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// Length accounting convention for the data field of a DATA frame.
/// PaperTable counts the data entry as 0..8 bits so that totals land on
/// 44..52; CanStandard counts 8 bits per data byte (44..108).
enum class LengthConvention { PaperTable, CanStandard };

/// Parameters for frame_bit_length; only the fields relevant to the
/// requested kind are consulted.
struct LengthParams {
    LengthConvention convention = LengthConvention::PaperTable;
    int dlc = 0;                // 0..8, Data frames
    int error_flag_bits = 6;    // 6..12, Error/Overload frames
    int idle_bits = 0;          // >= 0, interframe space
    bool include_suspend = true;
};

// Field widths of the standard format.
inline constexpr int kStartOfFrameBits = 1;
inline constexpr int kArbitrationBits = 12; // 11-bit identifier + RTR
inline constexpr int kControlBits = 6;
inline constexpr int kCrcBits = 16;
inline constexpr int kAckBits = 2;
inline constexpr int kEndOfFrameBits = 7;
inline constexpr int kDataRemoteBaseBits = 44;
inline constexpr int kErrorDelimiterBits = 8;
inline constexpr int kIntermissionBits = 3;
inline constexpr int kSuspendBits = 8;

/// Exact unstuffed bit count of a frame of the given kind. Throws
/// DomainError when dlc is outside 0..8, error_flag_bits outside 6..12,
/// or idle_bits negative.
int frame_bit_length(FrameKind kind, const LengthParams& params = {});

int data_frame_bits(int dlc, LengthConvention convention = LengthConvention::PaperTable);
int remote_frame_bits();
int error_frame_bits(int error_flag_bits);
int overload_frame_bits(int error_flag_bits);
int interframe_bits(int idle_bits, bool include_suspend = true);

enum class PriorityOrder { AWins, BWins, Equal };

/// Bus priority comparison: a wins iff a.raw() < b.raw(), i.e. the id with
/// the dominant level at the first differing bit position.
PriorityOrder compare_priority(FrameId a, FrameId b);

std::string to_string(FrameKind kind);
FrameKind frame_kind_from_string(const std::string& name); // throws DomainError

} // namespace whamcan

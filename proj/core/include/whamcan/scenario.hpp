#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "whamcan/bit_timing.hpp"
#include "whamcan/efficiency.hpp"
#include "whamcan/frame.hpp"
#include "whamcan/validation.hpp"

namespace whamcan {

inline constexpr double kMaxBusSpanMeters = 40.0;

/// One roster node in a scenario.
struct NodeConfig {
    unsigned addr = 1;  // Table-roster address, 1..15
    double L_m = 2.0;   // distance to its receiver, meters
    int w = 0;          // initial ERROR-frame counter
    int m = 0;          // initial retransmission counter
    std::optional<BitTiming> timing; // per-node override
    ErrorTrace x;       // model-side error trace; empty means error-free

    friend bool operator==(const NodeConfig&, const NodeConfig&) = default;
};

/// Seeded fault injection. Probabilities are per (node, circle) draws.
struct ErrorInjection {
    std::map<unsigned, double> data_error_prob;    // node addr -> P(DATA frame error)
    std::map<int, double> detector_error_prob;     // detector k (1..4) -> P(product error)
    std::optional<int> error_frame_bits;           // fixed ERROR frame length; empty: sampled 14..20

    friend bool operator==(const ErrorInjection&, const ErrorInjection&) = default;
};

/// Full simulation input. Serialized as a flat JSON object with exactly
/// these keys; unknown keys are rejected.
struct ScenarioConfig {
    Mode mode = Mode::Normal;
    std::vector<NodeConfig> nodes;
    int r = 100; // circles per harness bundle
    int dlc = 8; // data bytes per DATA frame
    BitTiming timing;
    LengthConvention convention = LengthConvention::PaperTable;
    int idle_bits = 0;
    bool suspend = true;
    std::uint64_t seed = 0;
    ErrorInjection error_injection;
    double syn_ns_per_m = 0.0;        // model correction coefficient
    std::int64_t circle_delay_ns = 0; // fixed extra idle injected per circle
    std::optional<int> power_window;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// The stock scenario: the full fifteen-node roster at 2 m spacing,
/// 100 circles, 8-byte frames, 1 us bit time, no injected errors.
ScenarioConfig default_scenario();

/// Structural validation: roster, probabilities, ranges, 40 m bus span.
std::vector<Violation> validate_config(const ScenarioConfig& config);

/// Parse / serialize the JSON form. Parsing rejects unknown keys and throws
/// ConfigError naming every offending field.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);
std::string serialize_scenario(const ScenarioConfig& config);

/// Model inputs derived from a scenario: M from dlc and convention, I from
/// idle/suspend, E from the configured error length (17, the mean of the
/// sampled range, when sampling), w/m/L/traces from the node entries.
SystemModelParams model_system_params(const ScenarioConfig& config);
std::vector<NodeModelParams> model_node_params(const ScenarioConfig& config);

} // namespace whamcan

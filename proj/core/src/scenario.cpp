#include "whamcan/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "whamcan/app.hpp"
#include "whamcan/errors.hpp"

namespace whamcan {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& context) {
    std::vector<std::string> unknown;
    for (const auto& item : obj.items()) {
        if (!allowed.contains(item.key())) unknown.push_back(item.key());
    }
    if (!unknown.empty()) {
        std::ostringstream msg;
        msg << "unknown key";
        if (unknown.size() > 1) msg << 's';
        msg << " in " << context << ":";
        for (const auto& k : unknown) msg << " '" << k << "'";
        throw ConfigError(msg.str());
    }
}

template <typename T>
T get_field(const json& obj, const std::string& key, const std::string& context) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(context + "." + key + ": " + e.what());
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, const std::string& context, T fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    return get_field<T>(obj, key, context);
}

BitTiming parse_timing(const json& obj, const std::string& context) {
    reject_unknown_keys(obj, {"p", "ps1", "ps2", "pr", "pe", "q_ns"}, context);
    BitTiming bt;
    bt.p = get_or(obj, "p", context, bt.p);
    bt.ps1 = get_or(obj, "ps1", context, bt.ps1);
    bt.ps2 = get_or(obj, "ps2", context, bt.ps2);
    bt.pr = get_or(obj, "pr", context, bt.pr);
    bt.pe = get_or(obj, "pe", context, bt.pe);
    bt.q_ns = get_or(obj, "q_ns", context, bt.q_ns);
    return bt;
}

json timing_to_json(const BitTiming& bt) {
    return json{{"p", bt.p},   {"ps1", bt.ps1}, {"ps2", bt.ps2},
                {"pr", bt.pr}, {"pe", bt.pe},   {"q_ns", bt.q_ns}};
}

NodeConfig parse_node(const json& obj, std::size_t index) {
    const std::string context = "nodes[" + std::to_string(index) + "]";
    if (!obj.is_object()) throw ConfigError(context + ": expected an object");
    reject_unknown_keys(obj, {"addr", "L", "w", "m", "timing", "x"}, context);
    if (!obj.contains("addr")) throw ConfigError(context + ": missing required key 'addr'");
    NodeConfig node;
    node.addr = get_field<unsigned>(obj, "addr", context);
    node.L_m = get_or(obj, "L", context, node.L_m);
    node.w = get_or(obj, "w", context, node.w);
    node.m = get_or(obj, "m", context, node.m);
    if (obj.contains("timing") && !obj.at("timing").is_null()) {
        node.timing = parse_timing(obj.at("timing"), context + ".timing");
    }
    if (obj.contains("x") && !obj.at("x").is_null()) {
        node.x = get_field<ErrorTrace>(obj, "x", context);
    }
    return node;
}

ErrorInjection parse_injection(const json& obj) {
    const std::string context = "error_injection";
    reject_unknown_keys(obj, {"data_error_prob", "detector_error_prob", "error_frame_bits"},
                        context);
    ErrorInjection inj;
    if (obj.contains("data_error_prob") && !obj.at("data_error_prob").is_null()) {
        for (const auto& item : obj.at("data_error_prob").items()) {
            unsigned addr = 0;
            try {
                addr = static_cast<unsigned>(std::stoul(item.key()));
            } catch (const std::exception&) {
                throw ConfigError(context + ".data_error_prob: key '" + item.key() +
                                  "' is not a node address");
            }
            inj.data_error_prob[addr] = item.value().get<double>();
        }
    }
    if (obj.contains("detector_error_prob") && !obj.at("detector_error_prob").is_null()) {
        for (const auto& item : obj.at("detector_error_prob").items()) {
            int k = 0;
            try {
                k = std::stoi(item.key());
            } catch (const std::exception&) {
                throw ConfigError(context + ".detector_error_prob: key '" + item.key() +
                                  "' is not a detector index");
            }
            inj.detector_error_prob[k] = item.value().get<double>();
        }
    }
    if (obj.contains("error_frame_bits") && !obj.at("error_frame_bits").is_null()) {
        inj.error_frame_bits = get_field<int>(obj, "error_frame_bits", context);
    }
    return inj;
}

} // namespace

ScenarioConfig default_scenario() {
    ScenarioConfig cfg;
    cfg.mode = Mode::Normal;
    cfg.nodes.reserve(NodeAddress::roster().size());
    for (const auto& node : NodeAddress::roster()) {
        cfg.nodes.push_back(NodeConfig{node.addr, 2.0, 0, 0, {}, {}});
    }
    return cfg;
}

std::vector<Violation> validate_config(const ScenarioConfig& config) {
    std::vector<Violation> out;
    if (config.nodes.empty()) {
        out.push_back({"nodes", "roster must not be empty", Severity::Error});
    }
    if (config.r < 1) {
        out.push_back({"r", std::to_string(config.r) + " must be at least 1", Severity::Error});
    }
    if (config.dlc < 0 || config.dlc > 8) {
        out.push_back({"dlc", std::to_string(config.dlc) + " outside 0..8", Severity::Error});
    }
    if (config.idle_bits < 0) {
        out.push_back({"idle_bits", "must be nonnegative", Severity::Error});
    }
    if (config.circle_delay_ns < 0) {
        out.push_back({"circle_delay_ns", "must be nonnegative", Severity::Error});
    }
    if (config.power_window && (*config.power_window < 1 || *config.power_window > config.r)) {
        out.push_back({"power_window",
                       std::to_string(*config.power_window) + " outside 1.." +
                           std::to_string(config.r),
                       Severity::Error});
    }
    for (const auto& v : validate_timing(config.timing)) {
        out.push_back({"timing." + v.field, v.message, v.severity});
    }

    std::set<unsigned> seen;
    double span_m = 0.0;
    for (std::size_t i = 0; i < config.nodes.size(); ++i) {
        const auto& node = config.nodes[i];
        const std::string prefix = "nodes[" + std::to_string(i) + "].";
        if (node.addr < 1 || node.addr > 15) {
            out.push_back({prefix + "addr",
                           std::to_string(node.addr) + " outside the roster range 1..15",
                           Severity::Error});
        } else if (!seen.insert(node.addr).second) {
            out.push_back({prefix + "addr",
                           "address " + std::to_string(node.addr) + " listed twice",
                           Severity::Error});
        }
        if (node.L_m < 0.0) {
            out.push_back({prefix + "L", "distance must be nonnegative", Severity::Error});
        }
        span_m += std::max(node.L_m, 0.0);
        if (node.w < 0) {
            out.push_back({prefix + "w", "must be nonnegative", Severity::Error});
        }
        if (node.m < 0) {
            out.push_back({prefix + "m", "must be nonnegative", Severity::Error});
        }
        if (node.timing) {
            for (const auto& v : validate_timing(*node.timing)) {
                out.push_back({prefix + "timing." + v.field, v.message, v.severity});
            }
        }
        if (!node.x.empty() && static_cast<int>(node.x.size()) != config.r) {
            out.push_back({prefix + "x",
                           "trace length " + std::to_string(node.x.size()) +
                               " does not match r = " + std::to_string(config.r),
                           Severity::Error});
        }
    }
    if (span_m > kMaxBusSpanMeters) {
        std::ostringstream msg;
        msg << "total span " << span_m << " m exceeds the 40 m bus limit";
        out.push_back({"nodes.L", msg.str(), Severity::Error});
    }

    for (const auto& [addr, prob] : config.error_injection.data_error_prob) {
        if (addr < 1 || addr > 15) {
            out.push_back({"error_injection.data_error_prob",
                           "address " + std::to_string(addr) + " outside 1..15",
                           Severity::Error});
        }
        if (prob < 0.0 || prob > 1.0) {
            out.push_back({"error_injection.data_error_prob",
                           "probability for node " + std::to_string(addr) + " outside [0,1]",
                           Severity::Error});
        }
    }
    for (const auto& [k, prob] : config.error_injection.detector_error_prob) {
        if (k < 1 || k > 4) {
            out.push_back({"error_injection.detector_error_prob",
                           "detector index " + std::to_string(k) + " outside 1..4",
                           Severity::Error});
        }
        if (prob < 0.0 || prob > 1.0) {
            out.push_back({"error_injection.detector_error_prob",
                           "probability for detector " + std::to_string(k) + " outside [0,1]",
                           Severity::Error});
        }
    }
    if (config.error_injection.error_frame_bits) {
        const int bits = *config.error_injection.error_frame_bits;
        if (bits < 14 || bits > 20) {
            out.push_back({"error_injection.error_frame_bits",
                           std::to_string(bits) + " outside the ERROR frame range 14..20",
                           Severity::Error});
        }
    }
    return out;
}

ScenarioConfig parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("scenario must be a JSON object");
    reject_unknown_keys(root,
                        {"mode", "nodes", "r", "dlc", "timing", "convention", "idle_bits",
                         "suspend", "seed", "error_injection", "syn_ns_per_m",
                         "circle_delay_ns", "power_window"},
                        "scenario");

    ScenarioConfig cfg;
    cfg.mode = mode_from_y(get_or(root, "mode", "scenario", 1));
    cfg.r = get_or(root, "r", "scenario", cfg.r);
    cfg.dlc = get_or(root, "dlc", "scenario", cfg.dlc);
    if (root.contains("timing") && !root.at("timing").is_null()) {
        cfg.timing = parse_timing(root.at("timing"), "timing");
    }
    const std::string convention = get_or<std::string>(root, "convention", "scenario", "paper");
    if (convention == "paper") {
        cfg.convention = LengthConvention::PaperTable;
    } else if (convention == "standard") {
        cfg.convention = LengthConvention::CanStandard;
    } else {
        throw ConfigError("convention: expected 'paper' or 'standard', got '" + convention + "'");
    }
    cfg.idle_bits = get_or(root, "idle_bits", "scenario", cfg.idle_bits);
    cfg.suspend = get_or(root, "suspend", "scenario", cfg.suspend);
    cfg.seed = get_or(root, "seed", "scenario", cfg.seed);
    cfg.syn_ns_per_m = get_or(root, "syn_ns_per_m", "scenario", cfg.syn_ns_per_m);
    cfg.circle_delay_ns = get_or(root, "circle_delay_ns", "scenario", cfg.circle_delay_ns);
    if (root.contains("power_window") && !root.at("power_window").is_null()) {
        cfg.power_window = get_field<int>(root, "power_window", "scenario");
    }
    if (root.contains("error_injection") && !root.at("error_injection").is_null()) {
        cfg.error_injection = parse_injection(root.at("error_injection"));
    }

    if (!root.contains("nodes")) throw ConfigError("missing required key 'nodes'");
    const auto& nodes = root.at("nodes");
    if (!nodes.is_array()) throw ConfigError("nodes: expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        cfg.nodes.push_back(parse_node(nodes[i], i));
    }

    const auto violations = validate_config(cfg);
    if (has_errors(violations)) {
        throw ConfigError("invalid scenario\n" + format_violations(violations));
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scenario file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string serialize_scenario(const ScenarioConfig& config) {
    json root;
    root["mode"] = static_cast<int>(config.mode);
    root["nodes"] = json::array();
    for (const auto& node : config.nodes) {
        json n{{"addr", node.addr}, {"L", node.L_m}, {"w", node.w}, {"m", node.m}};
        if (node.timing) n["timing"] = timing_to_json(*node.timing);
        if (!node.x.empty()) n["x"] = node.x;
        root["nodes"].push_back(std::move(n));
    }
    root["r"] = config.r;
    root["dlc"] = config.dlc;
    root["timing"] = timing_to_json(config.timing);
    root["convention"] = config.convention == LengthConvention::PaperTable ? "paper" : "standard";
    root["idle_bits"] = config.idle_bits;
    root["suspend"] = config.suspend;
    root["seed"] = config.seed;
    const auto& inj = config.error_injection;
    if (!inj.data_error_prob.empty() || !inj.detector_error_prob.empty() ||
        inj.error_frame_bits) {
        json j = json::object();
        if (!inj.data_error_prob.empty()) {
            json probs = json::object();
            for (const auto& [addr, prob] : inj.data_error_prob) {
                probs[std::to_string(addr)] = prob;
            }
            j["data_error_prob"] = std::move(probs);
        }
        if (!inj.detector_error_prob.empty()) {
            json probs = json::object();
            for (const auto& [k, prob] : inj.detector_error_prob) {
                probs[std::to_string(k)] = prob;
            }
            j["detector_error_prob"] = std::move(probs);
        }
        if (inj.error_frame_bits) j["error_frame_bits"] = *inj.error_frame_bits;
        root["error_injection"] = std::move(j);
    }
    root["syn_ns_per_m"] = config.syn_ns_per_m;
    root["circle_delay_ns"] = config.circle_delay_ns;
    if (config.power_window) root["power_window"] = *config.power_window;
    return root.dump(2) + "\n";
}

SystemModelParams model_system_params(const ScenarioConfig& config) {
    SystemModelParams sys;
    sys.y = config.mode;
    sys.timing = config.timing;
    sys.syn_ns_per_m = config.syn_ns_per_m;
    sys.r = config.r;
    sys.power_window = config.power_window;
    return sys;
}

std::vector<NodeModelParams> model_node_params(const ScenarioConfig& config) {
    // With sampled ERROR lengths the model uses 17 (the mean of 14..20).
    const int error_bits = config.error_injection.error_frame_bits.value_or(17);
    std::vector<NodeModelParams> nodes;
    nodes.reserve(config.nodes.size());
    for (const auto& node : config.nodes) {
        NodeModelParams params;
        params.M = data_frame_bits(config.dlc, config.convention);
        params.m = node.m;
        params.E = error_bits;
        params.w = node.w;
        params.I = interframe_bits(config.idle_bits, config.suspend);
        params.L_m = node.L_m;
        params.timing = node.timing;
        params.trace = node.x;
        nodes.push_back(std::move(params));
    }
    return nodes;
}

} // namespace whamcan

// whamcan: bit-level analysis and simulation of the WHAM CAN control network.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "whamcan/analysis.hpp"
#include "whamcan/app.hpp"
#include "whamcan/arbitration.hpp"
#include "whamcan/efficiency.hpp"
#include "whamcan/errors.hpp"
#include "whamcan/scenario.hpp"
#include "whamcan/simulator.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace whamcan;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

unsigned parse_unsigned(const std::string& text) {
    std::size_t pos = 0;
    unsigned long value = 0;
    if (text.starts_with("0b") || text.starts_with("0B")) {
        value = std::stoul(text.substr(2), &pos, 2);
        pos += 2;
    } else if (text.starts_with("0x") || text.starts_with("0X")) {
        value = std::stoul(text.substr(2), &pos, 16);
        pos += 2;
    } else {
        value = std::stoul(text, &pos, 10);
    }
    if (pos != text.size()) {
        throw DomainError("cannot parse '" + text + "' as a number");
    }
    return static_cast<unsigned>(value);
}

// Surfaces validation output; returns false when hard errors are present.
bool report_violations(const std::vector<Violation>& violations) {
    for (const auto& v : violations) {
        std::cerr << (v.severity == Severity::Advisory ? "advisory: " : "error: ") << v.field
                  << ": " << v.message << '\n';
    }
    return !has_errors(violations);
}

json timing_json(const BitTiming& bt) {
    return json{{"p", bt.p},   {"ps1", bt.ps1}, {"ps2", bt.ps2},
                {"pr", bt.pr}, {"pe", bt.pe},   {"q_ns", bt.q_ns}};
}

json breakdown_json(const CycleBreakdown& breakdown, int r) {
    json out;
    out["t1_ns"] = breakdown.t1_ns;
    out["t2_ns"] = breakdown.t2_ns;
    out["t3_ns"] = breakdown.t3_ns;
    out["circle_ns"] = breakdown.total_ns();
    out["r"] = r;
    out["harness_ns"] = breakdown.total_ns() * r;
    out["power"] = breakdown.node_power;
    return out;
}

json comparison_json(const ComparisonReport& report) {
    json out;
    out["total_relative_deviation"] = report.total_deviation;
    auto set = [&out](const char* key, const std::optional<double>& value) {
        if (value) {
            out[key] = *value;
        } else {
            out[key] = nullptr;
        }
    };
    set("t1_deviation", report.t1_deviation);
    set("t2_deviation", report.t2_deviation);
    set("t3_deviation", report.t3_deviation);
    out["longest_circles"] = json::array();
    for (const auto& sample : report.longest_circles) {
        out["longest_circles"].push_back(
            {{"circle", sample.circle}, {"duration_ns", sample.duration_ns}});
    }
    return out;
}

int cmd_plan(int y, const std::string& error_mark_text) {
    const unsigned mark = parse_unsigned(error_mark_text);
    if (mark == kHaltMark) {
        std::cerr << "error mark 0000 means the machine is halted; no frames are planned\n";
        return kExitUsage;
    }
    SystemState sys{mode_from_y(y), kNoErrorMark, false};
    sys = set_error(sys, mark);

    struct Row {
        NodeAddress node;
        FrameId id;
    };
    std::vector<Row> rows;
    for (const auto& node : NodeAddress::roster()) {
        rows.push_back({node, plan_frame_id(sys, node)});
    }
    std::vector<Row> by_priority = rows;
    std::ranges::sort(by_priority, [](const Row& a, const Row& b) { return a.id < b.id; });

    std::cout << "mode " << y << " (" << to_string(sys.mode) << "), error mark "
              << FrameId::from_raw(mark << 4).to_binary().substr(3, 4);
    std::cout << (mark == kNoErrorMark ? " (no error)\n" : " (detector error)\n");
    std::cout << "rank  node        addr  id_bin       id_hex  id_dec\n";
    for (std::size_t rank = 0; rank < by_priority.size(); ++rank) {
        const auto& row = by_priority[rank];
        std::cout << std::setw(4) << rank + 1 << "  " << std::left << std::setw(10)
                  << row.node.name() << std::right << "  " << row.id.to_binary().substr(7, 4)
                  << "  " << row.id.to_binary() << "  " << row.id.to_hex() << "   "
                  << row.id.raw() << '\n';
    }
    const FrameId halt = halt_frame_id(sys.mode);
    std::cout << "halt  (display)   0001  " << halt.to_binary() << "  " << halt.to_hex() << "   "
              << halt.raw() << '\n';
    return kExitOk;
}

int cmd_arbitrate(const std::vector<std::string>& id_texts) {
    std::vector<Contender> contenders;
    contenders.reserve(id_texts.size());
    for (const auto& text : id_texts) {
        const FrameId id = FrameId::from_raw(parse_unsigned(text));
        contenders.push_back(Contender{id.node_addr(), Frame::data(id, 0)});
    }
    const ArbitrationOutcome outcome = arbitrate(contenders);
    std::cout << "contenders  " << contenders.size() << '\n';
    std::cout << "winner      " << outcome.winner.frame.id.to_hex() << "  0b"
              << outcome.winner.frame.id.to_binary() << '\n';
    if (outcome.decided_at_bit) {
        std::cout << "decided_at_bit  " << *outcome.decided_at_bit << '\n';
    } else {
        std::cout << "decided_at_bit  -\n";
    }
    for (std::size_t i = 0; i < outcome.losers.size(); ++i) {
        std::cout << "loser " << i + 1 << "     " << outcome.losers[i].frame.id.to_hex()
                  << "  0b" << outcome.losers[i].frame.id.to_binary() << '\n';
    }
    return kExitOk;
}

int cmd_frame_len(const std::string& kind_name, const LengthParams& params) {
    std::cout << frame_bit_length(frame_kind_from_string(kind_name), params) << '\n';
    return kExitOk;
}

struct ModelInputs {
    ScenarioConfig config;
    SystemModelParams sys;
    std::vector<NodeModelParams> nodes;
};

std::optional<ModelInputs> load_model_inputs(const std::string& path, Strictness strictness) {
    ModelInputs inputs;
    inputs.config = load_scenario(path);
    inputs.sys = model_system_params(inputs.config);
    inputs.nodes = model_node_params(inputs.config);
    if (!report_violations(
            validate_params(inputs.sys, inputs.nodes, strictness, inputs.config.convention))) {
        return std::nullopt;
    }
    return inputs;
}

int cmd_model_eval(const std::string& path, Strictness strictness) {
    const auto inputs = load_model_inputs(path, strictness);
    if (!inputs) return kExitUsage;
    const CycleBreakdown breakdown = total(inputs->sys, inputs->nodes);
    std::cout << breakdown_json(breakdown, inputs->sys.r).dump(2) << '\n';
    return kExitOk;
}

int cmd_model_minimize(const std::string& path, Strictness strictness) {
    const auto inputs = load_model_inputs(path, strictness);
    if (!inputs) return kExitUsage;
    const MinimizeResult best = minimize(inputs->sys, inputs->nodes);
    json out;
    out["timing"] = timing_json(best.timing);
    out["breakdown"] = breakdown_json(best.breakdown, inputs->sys.r);
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

int cmd_model_check(const std::string& path, Strictness strictness) {
    const auto inputs = load_model_inputs(path, strictness);
    if (!inputs) return kExitUsage;
    const CycleBreakdown breakdown = total(inputs->sys, inputs->nodes);
    const RealtimeVerdict verdict = realtime_check(breakdown, inputs->sys.r);
    json out;
    out["pass"] = verdict.pass;
    out["harness_time_ns"] = verdict.harness_time_ns;
    out["budget_ns"] = kRealtimeBudgetNs;
    out["margin_ns"] = verdict.margin_ns;
    std::cout << out.dump(2) << '\n';
    return verdict.pass ? kExitOk : kExitCheckFailed;
}

int cmd_simulate(const std::string& path, std::optional<std::uint64_t> seed,
                 const std::string& trace_path) {
    ScenarioConfig config = load_scenario(path);
    if (seed) config.seed = *seed;
    const SimResult result = run_scenario(config);
    if (!trace_path.empty()) {
        std::ofstream out(trace_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot open trace file '" << trace_path << "'\n";
            return kExitUsage;
        }
        write_trace(out, result.trace);
    }
    std::cout << report_to_json(result.report);
    return kExitOk;
}

int cmd_compare(const std::string& path, std::uint64_t seed, int runs, int top_k) {
    ScenarioConfig config = load_scenario(path);
    config.seed = seed;
    const SystemModelParams sys = model_system_params(config);
    const std::vector<NodeModelParams> nodes = model_node_params(config);
    const CycleBreakdown breakdown = total(sys, nodes);
    const SimResult first = run_scenario(config);

    json out;
    out["model"] = breakdown_json(breakdown, sys.r);
    out["simulated_total_ns"] = first.report.total_time_ns;
    out["comparison"] = comparison_json(compare(breakdown, sys.r, first.report, top_k));

    if (runs > 1) {
        std::vector<SimReport> reports;
        reports.reserve(static_cast<std::size_t>(runs));
        reports.push_back(first.report);
        for (int k = 1; k < runs; ++k) {
            ScenarioConfig next = config;
            next.seed = seed + static_cast<std::uint64_t>(k);
            reports.push_back(run_scenario(next).report);
        }
        const SynFit fit = estimate_syn(reports, breakdown.t1_ns + breakdown.t2_ns);
        SystemModelParams fitted_sys = sys;
        fitted_sys.syn_ns_per_m = fit.syn_ns_per_m;
        const CycleBreakdown fitted = total(fitted_sys, nodes);
        out["fit"] = {{"runs", runs},
                      {"syn_ns_per_m", fit.syn_ns_per_m},
                      {"stderr_ns_per_m",
                       fit.stderr_ns_per_m ? json(*fit.stderr_ns_per_m) : json(nullptr)}};
        out["fitted_comparison"] =
            comparison_json(compare(fitted, fitted_sys.r, first.report, top_k));
    }
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bit-level simulator and timing analysis for the WHAM CAN control network"};
    app.require_subcommand(1);

    // plan
    auto* plan = app.add_subcommand("plan", "Print the identifier plan for a mode/error state");
    int plan_mode = 1;
    std::string plan_error = "15";
    plan->add_option("--mode", plan_mode, "Operating mode y, 1..4")
        ->required()
        ->check(CLI::Range(1, 4));
    plan->add_option("--error", plan_error, "Active error mark (1..4 or 15 = none)");

    // arbitrate
    auto* arb = app.add_subcommand("arbitrate", "Resolve bus arbitration among identifiers");
    std::vector<std::string> arb_ids;
    arb->add_option("ids", arb_ids, "Identifiers (decimal, 0x hex or 0b binary)")
        ->required()
        ->expected(-1);

    // frame-len
    auto* flen = app.add_subcommand("frame-len", "Frame bit length accounting");
    std::string flen_kind;
    LengthParams flen_params;
    bool flen_no_suspend = false;
    std::string flen_convention = "paper";
    flen->add_option("--kind", flen_kind, "data|remote|error|overload|interframe")->required();
    flen->add_option("--dlc", flen_params.dlc, "Data bytes, 0..8");
    flen->add_option("--convention", flen_convention, "paper|standard")
        ->check(CLI::IsMember({"paper", "standard"}));
    flen->add_option("--flag-bits", flen_params.error_flag_bits, "Error flag bits, 6..12");
    flen->add_option("--idle-bits", flen_params.idle_bits, "Bus idle bits, >= 0");
    flen->add_flag("--no-suspend", flen_no_suspend, "Drop the 8-bit suspend transmission");

    // model eval|minimize|check
    auto* model = app.add_subcommand("model", "Cycle-time model");
    model->require_subcommand(1);
    std::string model_config;
    std::string model_strictness = "paper";
    auto add_model_common = [&](CLI::App* sub) {
        sub->add_option("--config", model_config, "Scenario file")->required();
        sub->add_option("--strictness", model_strictness, "paper|physical")
            ->check(CLI::IsMember({"paper", "physical"}));
    };
    auto* model_eval = model->add_subcommand("eval", "Print the circle-time breakdown");
    auto* model_min = model->add_subcommand("minimize", "Search the bit-timing grid");
    auto* model_check = model->add_subcommand("check", "Real-time feasibility verdict");
    add_model_common(model_eval);
    add_model_common(model_min);
    add_model_common(model_check);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run the discrete-event simulation");
    std::string sim_config;
    std::string sim_trace;
    std::optional<std::uint64_t> sim_seed;
    sim->add_option("--config", sim_config, "Scenario file")->required();
    sim->add_option("--seed", sim_seed, "Override the scenario seed");
    sim->add_option("--trace", sim_trace, "Write the event trace to this file");

    // compare
    auto* cmp = app.add_subcommand("compare", "Model-versus-simulation deviation report");
    std::string cmp_config;
    std::uint64_t cmp_seed = 0;
    int cmp_runs = 1;
    int cmp_top = 5;
    cmp->add_option("--config", cmp_config, "Scenario file")->required();
    cmp->add_option("--seed", cmp_seed, "Simulation seed")->required();
    cmp->add_option("--runs", cmp_runs, "Seeded runs for syn fitting (> 1 enables the fit)")
        ->check(CLI::PositiveNumber);
    cmp->add_option("--top", cmp_top, "Longest circles to report")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (plan->parsed()) return cmd_plan(plan_mode, plan_error);
        if (arb->parsed()) return cmd_arbitrate(arb_ids);
        if (flen->parsed()) {
            flen_params.include_suspend = !flen_no_suspend;
            flen_params.convention = flen_convention == "paper" ? LengthConvention::PaperTable
                                                                : LengthConvention::CanStandard;
            return cmd_frame_len(flen_kind, flen_params);
        }
        const Strictness strictness =
            model_strictness == "paper" ? Strictness::PaperStrict : Strictness::Physical;
        if (model_eval->parsed()) return cmd_model_eval(model_config, strictness);
        if (model_min->parsed()) return cmd_model_minimize(model_config, strictness);
        if (model_check->parsed()) return cmd_model_check(model_config, strictness);
        if (sim->parsed()) return cmd_simulate(sim_config, sim_seed, sim_trace);
        if (cmp->parsed()) return cmd_compare(cmp_config, cmp_seed, cmp_runs, cmp_top);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

#include "whamcan/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "whamcan/errors.hpp"

namespace whamcan {

SynFit estimate_syn(std::span<const SimReport> reports,
                    std::int64_t model_bus_time_per_circle_ns) {
    if (reports.empty()) {
        throw DomainError("syn estimation needs at least one report");
    }

    // residual_k = total_k - r_k * (T1 + T2), regressed through the origin
    // on g_k = mean_distance_k * r_k.
    SynFit fit;
    fit.residuals_ns.reserve(reports.size());
    double gg = 0.0;
    double gr = 0.0;
    for (const auto& report : reports) {
        const double residual =
            static_cast<double>(report.total_time_ns) -
            static_cast<double>(model_bus_time_per_circle_ns) * report.circles_completed;
        const double g = report.mean_distance_m * report.circles_completed;
        fit.residuals_ns.push_back(residual);
        gg += g * g;
        gr += g * residual;
    }
    if (gg == 0.0) {
        throw FitError("degenerate fit: every report has zero mean distance");
    }
    fit.syn_ns_per_m = gr / gg;

    if (reports.size() >= 2) {
        double rss = 0.0;
        for (std::size_t k = 0; k < reports.size(); ++k) {
            const double g =
                reports[k].mean_distance_m * reports[k].circles_completed;
            const double e = fit.residuals_ns[k] - fit.syn_ns_per_m * g;
            rss += e * e;
        }
        const double variance = rss / static_cast<double>(reports.size() - 1);
        fit.stderr_ns_per_m = std::sqrt(variance / gg);
    }
    return fit;
}

namespace {

std::optional<double> relative_deviation(std::int64_t sim, std::int64_t model) {
    if (model == 0) {
        if (sim == 0) return 0.0;
        return std::nullopt;
    }
    return std::abs(static_cast<double>(sim - model)) / static_cast<double>(model);
}

} // namespace

ComparisonReport compare(const CycleBreakdown& model, int r, const SimReport& sim, int top_k) {
    if (model.total_ns() == 0) {
        throw DomainError("relative deviation is undefined for a zero model total");
    }
    if (sim.r != r) {
        throw ConfigError("report was produced for r = " + std::to_string(sim.r) +
                          ", not the requested " + std::to_string(r));
    }

    ComparisonReport out;
    const std::int64_t model_total = model.total_ns() * r;
    out.total_deviation = std::abs(static_cast<double>(sim.total_time_ns - model_total)) /
                          static_cast<double>(model_total);
    out.t1_deviation = relative_deviation(sim.t1_role_ns, model.t1_ns * r);
    out.t2_deviation = relative_deviation(sim.t2_role_ns, model.t2_ns * r);
    out.t3_deviation = relative_deviation(sim.t3_role_ns, model.t3_ns * r);

    std::vector<CircleSample> samples;
    samples.reserve(sim.circle_durations_ns.size());
    for (std::size_t i = 0; i < sim.circle_durations_ns.size(); ++i) {
        samples.push_back(CircleSample{static_cast<int>(i) + 1, sim.circle_durations_ns[i]});
    }
    std::ranges::stable_sort(samples, [](const CircleSample& a, const CircleSample& b) {
        return a.duration_ns > b.duration_ns;
    });
    if (static_cast<int>(samples.size()) > top_k) {
        samples.resize(static_cast<std::size_t>(top_k));
    }
    out.longest_circles = std::move(samples);
    return out;
}

} // namespace whamcan

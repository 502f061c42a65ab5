#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "whamcan/efficiency.hpp"
#include "whamcan/simulator.hpp"

namespace whamcan {

struct SynFit {
    double syn_ns_per_m = 0.0;
    std::optional<double> stderr_ns_per_m; // undefined for a single report
    std::vector<double> residuals_ns;      // per report, before the fit
};

/// Least-squares estimate of the synchronization coefficient from simulated
/// runs: residual_k = total_k - r * (T1 + T2) is regressed through the
/// origin on mean_distance_k * r_k.
/// Throws DomainError for an empty report list and FitError when every
/// mean distance is zero (degenerate regressor).
SynFit estimate_syn(std::span<const SimReport> reports,
                    std::int64_t model_bus_time_per_circle_ns);

struct CircleSample {
    int circle = 0; // 1-based index
    std::int64_t duration_ns = 0;
};

/// Model-versus-simulation comparison over one harness (r circles).
struct ComparisonReport {
    double total_deviation = 0.0;        // |sim - r*T| / (r*T)
    std::optional<double> t1_deviation;  // per-component; empty when the
    std::optional<double> t2_deviation;  // model component is zero but the
    std::optional<double> t3_deviation;  // simulated one is not
    std::vector<CircleSample> longest_circles; // bottleneck report, longest first
};

/// Throws DomainError when the model total is zero and ConfigError when the
/// report was produced for a different circle count than r.
ComparisonReport compare(const CycleBreakdown& model, int r, const SimReport& sim,
                         int top_k = 5);

} // namespace whamcan

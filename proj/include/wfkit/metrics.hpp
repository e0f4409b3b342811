#pragma once

#include <string>
#include <utility>

#include "wfkit/fitting.hpp"
#include "wfkit/simulator.hpp"

namespace wfkit {

enum class TimelineField { kSubmit, kCompletion };

/// Empirical distribution of one timeline field across a simulation result,
/// optionally rescaled by the run's makespan so different-sized runs share
/// the [0, 1] axis.
struct TimelineEcdf {
    TimelineField field;
    Ecdf ecdf;
    double makespan_sec = 0.0;
    bool normalized = false;
};

/// CDF of the chosen field over all tasks; `normalized` divides every
/// timestamp by the makespan. Rejects an empty result.
TimelineEcdf timeline_ecdf(const SimulationResult& result, TimelineField field,
                           bool normalized);

/// Root-mean-square gap between the two step quantile functions, probed at
/// p_k = (k - 0.5) / k_probes. Both sides must describe the same field with
/// the same normalization; mixing them is a usage error.
double quantile_rmse(const TimelineEcdf& a, const TimelineEcdf& b, int k_probes = 1000);

/// Timeline-shape agreement between two runs of comparable workflows.
struct ComparisonReport {
    double submit_rmse = 0.0;
    double completion_rmse = 0.0;
    double normalized_submit_rmse = 0.0;
    double normalized_completion_rmse = 0.0;
    std::pair<std::size_t, std::size_t> task_counts{0, 0};
};

ComparisonReport compare(const SimulationResult& a, const SimulationResult& b);

std::string report_to_json(const ComparisonReport& report);

/// `value,probability` rows for every sample point, with a header.
std::string ecdf_to_csv(const TimelineEcdf& timeline);

}  // namespace wfkit

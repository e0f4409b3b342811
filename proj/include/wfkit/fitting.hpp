#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wfkit/distributions.hpp"
#include "wfkit/rng.hpp"
#include "wfkit/trace.hpp"

namespace wfkit {

/// Empirical CDF over a non-empty sample; eval(x) = (#samples <= x) / n.
class Ecdf {
public:
    explicit Ecdf(std::vector<double> samples);

    double eval(double x) const;
    const std::vector<double>& sorted_values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
};

struct FitResult {
    DistributionSpec spec;
    double mse = 0.0;
    double sample_min = 0.0;
    double sample_max = 0.0;
};

/// The per-metric record stored in summary files: observed bounds plus the
/// best-fit distribution, mirroring the interchange JSON's
/// {min, max, distribution{name, params}} layout.
struct MetricSummary {
    double min = 0.0;
    double max = 0.0;
    DistributionSpec distribution;

    bool operator==(const MetricSummary&) const = default;
};

struct TaskTypeSummary {
    std::string task_type;
    std::optional<MetricSummary> runtime;
    std::optional<MetricSummary> input_size;   // bytes
    std::optional<MetricSummary> output_size;  // bytes

    bool operator==(const TaskTypeSummary&) const = default;
};

using SummaryMap = std::map<std::string, TaskTypeSummary>;

struct SummarizeResult {
    SummaryMap summaries;
    std::vector<std::string> warnings;  // metrics skipped and why
};

/// A metric that cannot be fitted (too few observations or zero variance).
class UnfittableError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mean squared error between the spec's CDF and the sample's Hazen plotting
/// positions p_i = (i - 0.5) / n taken over the sorted sample.
double fit_mse(const DistributionSpec& spec, const std::vector<double>& samples);

/// Best parameters of one family for the sample, by direct MSE minimization:
/// moment-derived starting points refined with Nelder-Mead. Throws
/// UnfittableError for degenerate samples (n < 2 or zero variance).
DistributionSpec estimate_params(Family family, const std::vector<double>& samples);

/// Fits every candidate family and keeps the lowest full-sample MSE; ties
/// break toward the family listed first. Throws UnfittableError only if no
/// family yields a usable fit.
FitResult fit_best(const std::vector<double>& samples,
                   std::span<const Family> families = kAllFamilies);

/// Draws from summary.distribution until the value lands in
/// [summary.min, summary.max] (at most 100 tries), then falls back to a
/// quantile draw restricted to that interval. Never returns out of bounds.
double sample_clamped(const MetricSummary& summary, Rng& rng);

/// Pools observations per task type across traces and fits runtime, total
/// input bytes, and total output bytes for each; metrics that cannot be
/// fitted are omitted and noted in warnings.
SummarizeResult summarize_traces(const std::vector<WorkflowTrace>& traces);

/// Interchange form: {"<type>": {"runtime": {"min": .., "max": ..,
/// "distribution": {"name": .., "params": [..]}}, "inputSize": .., ...}}.
std::string summaries_to_json(const SummaryMap& summaries);
SummaryMap summaries_from_json(const std::string& text);

}  // namespace wfkit

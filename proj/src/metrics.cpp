#include "wfkit/metrics.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace wfkit {

namespace {

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

// Smallest sample value whose ECDF reaches p: the step quantile.
double step_quantile(const Ecdf& ecdf, double p) {
    const auto& xs = ecdf.sorted_values();
    double scaled = p * static_cast<double>(xs.size());
    auto idx = static_cast<std::size_t>(std::ceil(scaled));
    if (idx < 1) idx = 1;
    if (idx > xs.size()) idx = xs.size();
    return xs[idx - 1];
}

}  // namespace

TimelineEcdf timeline_ecdf(const SimulationResult& result, TimelineField field,
                           bool normalized) {
    if (result.timelines.empty()) {
        throw std::invalid_argument("timeline ECDF of an empty simulation result");
    }
    std::vector<double> values;
    values.reserve(result.timelines.size());
    for (const auto& t : result.timelines) {
        values.push_back(field == TimelineField::kSubmit ? t.submit_sec
                                                         : t.completion_sec);
    }
    double span = result.makespan_sec;
    if (normalized) {
        // A zero makespan means every timestamp is zero; leave them as-is
        // rather than dividing 0 by 0.
        double denom = span > 0 ? span : 1.0;
        for (auto& v : values) v /= denom;
    }
    return TimelineEcdf{field, Ecdf(std::move(values)), span, normalized};
}

double quantile_rmse(const TimelineEcdf& a, const TimelineEcdf& b, int k_probes) {
    if (a.field != b.field) {
        throw std::invalid_argument("cannot compare submit and completion ECDFs");
    }
    if (a.normalized != b.normalized) {
        throw std::invalid_argument("cannot compare normalized and raw ECDFs");
    }
    if (k_probes < 1) throw std::invalid_argument("need at least one quantile probe");
    double sum_sq = 0.0;
    for (int k = 1; k <= k_probes; ++k) {
        double p = (k - 0.5) / k_probes;
        double gap = step_quantile(a.ecdf, p) - step_quantile(b.ecdf, p);
        sum_sq += gap * gap;
    }
    return std::sqrt(sum_sq / k_probes);
}

ComparisonReport compare(const SimulationResult& a, const SimulationResult& b) {
    ComparisonReport report;
    report.task_counts = {a.timelines.size(), b.timelines.size()};
    auto rmse = [&](TimelineField field, bool normalized) {
        return quantile_rmse(timeline_ecdf(a, field, normalized),
                             timeline_ecdf(b, field, normalized));
    };
    report.submit_rmse = rmse(TimelineField::kSubmit, false);
    report.completion_rmse = rmse(TimelineField::kCompletion, false);
    report.normalized_submit_rmse = rmse(TimelineField::kSubmit, true);
    report.normalized_completion_rmse = rmse(TimelineField::kCompletion, true);
    return report;
}

std::string report_to_json(const ComparisonReport& report) {
    nlohmann::ordered_json doc{
        {"submitRmse", report.submit_rmse},
        {"completionRmse", report.completion_rmse},
        {"normalizedSubmitRmse", report.normalized_submit_rmse},
        {"normalizedCompletionRmse", report.normalized_completion_rmse},
        {"taskCounts", {report.task_counts.first, report.task_counts.second}},
    };
    return doc.dump(2) + "\n";
}

std::string ecdf_to_csv(const TimelineEcdf& timeline) {
    const auto& xs = timeline.ecdf.sorted_values();
    std::string out = "value,probability\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out += format_double(xs[i]);
        out += ',';
        out += format_double(static_cast<double>(i + 1) / static_cast<double>(xs.size()));
        out += '\n';
    }
    return out;
}

}  // namespace wfkit

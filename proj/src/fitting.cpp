#include "wfkit/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace wfkit {

using nlohmann::json;

Ecdf::Ecdf(std::vector<double> samples) : values_(std::move(samples)) {
    if (values_.empty()) {
        throw std::invalid_argument("ecdf needs at least one sample");
    }
    std::sort(values_.begin(), values_.end());
}

double Ecdf::eval(double x) const {
    auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) /
           static_cast<double>(values_.size());
}

double fit_mse(const DistributionSpec& spec, const std::vector<double>& samples) {
    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        double d = p - dist_cdf(spec, sorted[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(n);
}

namespace {

struct SampleStats {
    std::size_t n;
    double mean, sd, min, max, median, range;
};

SampleStats compute_stats(const std::vector<double>& sorted) {
    SampleStats st{};
    st.n = sorted.size();
    st.min = sorted.front();
    st.max = sorted.back();
    st.range = st.max - st.min;
    st.median = sorted[st.n / 2];
    st.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
              static_cast<double>(st.n);
    double ss = 0.0;
    for (double v : sorted) ss += (v - st.mean) * (v - st.mean);
    st.sd = std::sqrt(ss / static_cast<double>(st.n));
    return st;
}

double pos(double v, double fallback) { return v > 1e-12 ? v : fallback; }

/// Starting parameter vectors for the local search, from rough moment
/// matching. Two starts per family cover different regimes (e.g. a gentle
/// and a hard skew); exactness doesn't matter, basin membership does.
std::vector<std::vector<double>> initial_params(Family family,
                                                const SampleStats& st) {
    const double mn = st.min, mx = st.max, m = st.mean, med = st.median;
    const double s = pos(st.sd, 1.0), r = pos(st.range, 1.0);
    const double dm = pos(med - mn, s);  // min-to-median span
    switch (family) {
        case Family::kAlpha: {
            double lo = mn - 0.1 * r;
            return {{3.0, lo, 3.0 * pos(med - lo, s)},
                    {1.0, mn - 0.3 * r, 1.2 * pos(med - mn + 0.3 * r, s)}};
        }
        case Family::kArgus: {
            double lo = mn - 0.05 * r;
            return {{1.5, lo, 1.1 * pos(mx - lo, r)},
                    {3.0, mn - 0.2 * r, 1.4 * r}};
        }
        case Family::kBeta: {
            double lo = mn - 0.02 * r, sc = 1.04 * r;
            double u = (m - lo) / sc, v = (s / sc) * (s / sc);
            double t = std::max(0.1, u * (1.0 - u) / std::max(v, 1e-6) - 1.0);
            return {{std::max(0.05, u * t), std::max(0.05, (1.0 - u) * t), lo, sc},
                    {2.0, 2.0, mn - 0.1 * r, 1.2 * r}};
        }
        case Family::kChi: {
            double lo = mn - 0.05 * r;
            return {{2.0, lo, pos(m - lo, s) / 1.2533},
                    {1.0, mn - 0.02 * r, pos(m - mn + 0.02 * r, s) / 0.7979}};
        }
        case Family::kChi2: {
            double lo = mn - 0.05 * r;
            return {{3.0, lo, pos(m - lo, s) / 3.0},
                    {1.0, mn - 0.01 * r, pos(m - mn + 0.01 * r, s)}};
        }
        case Family::kCosine:
            return {{m, s / 1.1356}, {med, r / 6.2832}};
        case Family::kDweibull:
            return {{2.0, med, s}, {1.0, med, 0.8 * s}};
        case Family::kFisk: {
            double lo = mn - 0.05 * r;
            return {{2.5, lo, pos(med - lo, s)},
                    {1.2, mn - 0.01 * dm, 1.01 * dm}};
        }
        case Family::kGamma: {
            double lo = mn - 0.05 * r;
            double a = std::clamp(std::pow(pos(m - lo, s) / s, 2.0), 0.1, 1e4);
            return {{a, lo, s * s / pos(m - lo, s)},
                    {1.0, mn - 0.01 * r, pos(m - mn + 0.01 * r, s)}};
        }
        case Family::kLevy: {
            double lo = mn - 0.05 * dm;
            return {{lo, pos(med - lo, s) / 2.198}, {mn - 0.3 * dm, dm}};
        }
        case Family::kPareto: {
            double sc1 = dm / 0.4142;
            return {{2.0, mn - sc1, sc1}, {1.0, mn - dm, dm}};
        }
        case Family::kRayleigh:
            return {{m - 1.2533 * (s / 0.6551), s / 0.6551},
                    {mn - 0.1 * s, pos(med - mn + 0.1 * s, s) / 1.1774}};
        case Family::kRdist:
            return {{3.0, m, 0.525 * r}, {1.0, m, 0.51 * r}};
        case Family::kSkewnorm:
            return {{1.0, m - 0.8 * s, 1.2 * s},
                    {15.0, mn - 0.02 * r, 1.5 * s}};
        case Family::kTrapz:
            return {{0.25, 0.75, mn - 0.02 * r, 1.04 * r},
                    {0.05, 0.95, mn - 0.01 * r, 1.02 * r}};
        case Family::kTriang: {
            double lo = mn - 0.02 * r, sc = 1.04 * r;
            double c = std::clamp(3.0 * (m - lo) / sc - 1.0, 0.05, 0.95);
            return {{c, lo, sc}, {0.5, mn - 0.1 * r, 1.2 * r}};
        }
        case Family::kUniform:
            return {{mn - 0.001 * r, 1.002 * r}, {mn - 0.05 * r, 1.1 * r}};
        case Family::kWald: {
            double lo = mn - 0.05 * pos(m - mn, s);
            return {{lo, pos(m - lo, s)},
                    {mn - 0.3 * pos(m - mn, s), 1.3 * pos(m - mn, s)}};
        }
    }
    return {};
}

/// Which shape parameters are searched in log space (strictly positive ones);
/// scale always is. Bounded shapes (trapz, triang, skewnorm's cap) stay raw
/// and are handled by an out-of-range penalty in the objective.
std::vector<bool> log_shape_flags(Family family) {
    switch (family) {
        case Family::kSkewnorm: return {false};
        case Family::kTrapz: return {false, false};
        case Family::kTriang: return {false};
        case Family::kBeta: return {true, true};
        default:
            return std::vector<bool>(static_cast<std::size_t>(shape_count(family)),
                                     true);
    }
}

std::vector<double> encode(const std::vector<double>& params,
                           const std::vector<bool>& log_flags) {
    std::vector<double> theta(params);
    for (std::size_t i = 0; i + 2 < theta.size(); ++i) {
        if (log_flags[i]) theta[i] = std::log(theta[i]);
    }
    theta.back() = std::log(theta.back());
    return theta;
}

std::vector<double> decode(const std::vector<double>& theta,
                           const std::vector<bool>& log_flags) {
    std::vector<double> params(theta);
    for (std::size_t i = 0; i + 2 < params.size(); ++i) {
        if (log_flags[i]) params[i] = std::exp(params[i]);
    }
    params.back() = std::exp(params.back());
    return params;
}

/// Distance from the legal region for the raw-searched shapes, used as a
/// penalty surcharge (any valid MSE is < 1, so 2 + excess always loses).
double bound_excess(Family family, const std::vector<double>& params) {
    double e = 0.0;
    for (double v : params) {
        if (!std::isfinite(v)) e += 1.0;
    }
    if (e > 0) return e;
    switch (family) {
        case Family::kTrapz:
            e += std::max(0.0, -params[0]) + std::max(0.0, params[0] - params[1]) +
                 std::max(0.0, params[1] - 1.0);
            break;
        case Family::kTriang:
            e += std::max(0.0, -params[0]) + std::max(0.0, params[0] - 1.0);
            break;
        case Family::kSkewnorm:
            e += std::max(0.0, (std::fabs(params[0]) - 1e9) / 1e9);
            break;
        default:
            break;
    }
    return e;
}

struct HazenSeries {
    std::vector<double> x;
    std::vector<double> p;
};

/// The optimizer iterates on at most `cap` strided points of the sorted
/// sample, keeping each point's original plotting position; the final
/// reported MSE is always recomputed on the full sample.
HazenSeries thin_series(const std::vector<double>& sorted, std::size_t cap) {
    HazenSeries series;
    const std::size_t n = sorted.size();
    if (n <= cap) {
        for (std::size_t i = 0; i < n; ++i) {
            series.x.push_back(sorted[i]);
            series.p.push_back((static_cast<double>(i) + 0.5) /
                               static_cast<double>(n));
        }
        return series;
    }
    for (std::size_t j = 0; j < cap; ++j) {
        std::size_t idx = std::min(
            n - 1, static_cast<std::size_t>((static_cast<double>(j) + 0.5) *
                                            static_cast<double>(n) /
                                            static_cast<double>(cap)));
        series.x.push_back(sorted[idx]);
        series.p.push_back((static_cast<double>(idx) + 0.5) /
                           static_cast<double>(n));
    }
    return series;
}

/// Plain Nelder-Mead (reflect/expand/contract/shrink) returning the best
/// vertex seen within the evaluation budget.
std::vector<double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const std::vector<double>& steps,
    int max_evals) {
    const double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
    const std::size_t dim = x0.size();
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };

    std::vector<std::pair<double, std::vector<double>>> simplex;
    simplex.reserve(dim + 1);
    simplex.emplace_back(eval(x0), x0);
    for (std::size_t i = 0; i < dim; ++i) {
        auto x = x0;
        x[i] += steps[i];
        simplex.emplace_back(eval(x), x);
    }

    auto by_value = [](const auto& a, const auto& b) { return a.first < b.first; };
    while (evals < max_evals) {
        std::sort(simplex.begin(), simplex.end(), by_value);
        if (simplex.back().first - simplex.front().first <
            1e-12 * (std::fabs(simplex.front().first) + 1e-12)) {
            break;
        }
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i].second[j];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto blend = [&](double coeff) {
            std::vector<double> x(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                x[j] = centroid[j] + coeff * (centroid[j] - simplex.back().second[j]);
            }
            return x;
        };

        auto reflected = blend(kReflect);
        double fr = eval(reflected);
        if (fr < simplex.front().first) {
            auto expanded = blend(kExpand);
            double fe = eval(expanded);
            simplex.back() = fe < fr ? std::make_pair(fe, expanded)
                                     : std::make_pair(fr, reflected);
            continue;
        }
        if (fr < simplex[dim - 1].first) {
            simplex.back() = {fr, reflected};
            continue;
        }
        bool outside = fr < simplex.back().first;
        auto contracted = blend(outside ? kContract : -kContract);
        double fc = eval(contracted);
        if (fc < std::min(fr, simplex.back().first)) {
            simplex.back() = {fc, contracted};
            continue;
        }
        for (std::size_t i = 1; i <= dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                simplex[i].second[j] =
                    simplex[0].second[j] +
                    kShrink * (simplex[i].second[j] - simplex[0].second[j]);
            }
            simplex[i].first = eval(simplex[i].second);
        }
    }
    std::sort(simplex.begin(), simplex.end(), by_value);
    return simplex.front().second;
}

constexpr std::size_t kThinCap = 400;
constexpr int kMaxEvalsPerStart = 320;

}  // namespace

DistributionSpec estimate_params(Family family, const std::vector<double>& samples) {
    if (samples.size() < 2) {
        throw UnfittableError("need at least 2 observations to fit");
    }
    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    const SampleStats st = compute_stats(sorted);
    if (!(st.range > 0.0)) {
        throw UnfittableError("sample has zero variance");
    }

    const HazenSeries series = thin_series(sorted, kThinCap);
    const std::vector<bool> log_flags = log_shape_flags(family);
    auto objective = [&](const std::vector<double>& theta) {
        auto params = decode(theta, log_flags);
        double excess = bound_excess(family, params);
        if (excess > 0 || !params_valid(family, params)) return 2.0 + excess;
        DistributionSpec spec{family, params};
        double sum = 0.0;
        for (std::size_t i = 0; i < series.x.size(); ++i) {
            double d = series.p[i] - dist_cdf(spec, series.x[i]);
            sum += d * d;
        }
        return sum / static_cast<double>(series.x.size());
    };

    DistributionSpec best;
    double best_mse = std::numeric_limits<double>::infinity();
    for (auto& start : initial_params(family, st)) {
        if (!params_valid(family, start)) continue;
        auto theta0 = encode(start, log_flags);
        std::vector<double> steps(theta0.size());
        for (std::size_t i = 0; i < theta0.size(); ++i) {
            if (i + 1 == theta0.size()) {
                steps[i] = 0.3;  // log-scale
            } else if (i + 2 == theta0.size()) {
                steps[i] = 0.25 * start.back();  // loc, in x units
            } else if (log_flags[i]) {
                steps[i] = 0.3;
            } else if (family == Family::kSkewnorm) {
                steps[i] = std::max(1.0, 0.5 * std::fabs(theta0[i]));
            } else {
                steps[i] = 0.15;  // bounded raw shapes
            }
        }
        auto theta = nelder_mead(objective, theta0, steps, kMaxEvalsPerStart);
        auto params = decode(theta, log_flags);
        if (!params_valid(family, params)) continue;
        DistributionSpec spec{family, params};
        double mse = fit_mse(spec, samples);
        if (mse < best_mse) {
            best_mse = mse;
            best = std::move(spec);
        }
    }
    if (!std::isfinite(best_mse)) {
        throw UnfittableError("no usable fit for family \"" +
                              std::string(family_name(family)) + "\"");
    }
    return best;
}

FitResult fit_best(const std::vector<double>& samples,
                   std::span<const Family> families) {
    FitResult best;
    double best_mse = std::numeric_limits<double>::infinity();
    std::string last_error = "no candidate families";
    for (Family family : families) {
        try {
            DistributionSpec spec = estimate_params(family, samples);
            double mse = fit_mse(spec, samples);
            if (mse < best_mse) {
                best_mse = mse;
                best.spec = std::move(spec);
            }
        } catch (const UnfittableError& e) {
            last_error = e.what();
        }
    }
    if (!std::isfinite(best_mse)) {
        throw UnfittableError(last_error);
    }
    best.mse = best_mse;
    auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    best.sample_min = *mn;
    best.sample_max = *mx;
    return best;
}

double sample_clamped(const MetricSummary& summary, Rng& rng) {
    if (!(summary.min < summary.max)) return summary.min;
    for (int attempt = 0; attempt < 100; ++attempt) {
        double v = dist_sample(summary.distribution, rng);
        if (v >= summary.min && v <= summary.max) return v;
    }
    // The distribution puts almost no mass inside [min, max]; draw a quantile
    // restricted to the CDF interval instead.
    double p_lo = dist_cdf(summary.distribution, summary.min);
    double p_hi = dist_cdf(summary.distribution, summary.max);
    double p = p_lo + rng.next_unit() * (p_hi - p_lo);
    p = std::clamp(p, 1e-12, 1.0 - 1e-12);
    return std::clamp(dist_quantile(summary.distribution, p), summary.min,
                      summary.max);
}

SummarizeResult summarize_traces(const std::vector<WorkflowTrace>& traces) {
    struct Series {
        std::vector<double> runtime, input, output;
    };
    std::map<std::string, Series> pooled;
    for (const auto& trace : traces) {
        for (const auto& task : trace.tasks) {
            auto& series = pooled[task_type_of(task)];
            series.runtime.push_back(task.runtime_seconds);
            series.input.push_back(static_cast<double>(task.total_input_bytes()));
            series.output.push_back(static_cast<double>(task.total_output_bytes()));
        }
    }

    SummarizeResult result;
    for (auto& [type, series] : pooled) {
        TaskTypeSummary summary;
        summary.task_type = type;
        auto fit_metric = [&](const std::vector<double>& values,
                              const char* metric) -> std::optional<MetricSummary> {
            try {
                FitResult fit = fit_best(values);
                return MetricSummary{fit.sample_min, fit.sample_max, fit.spec};
            } catch (const UnfittableError& e) {
                result.warnings.push_back(type + ": " + metric +
                                          " not summarized: " + e.what());
                return std::nullopt;
            }
        };
        summary.runtime = fit_metric(series.runtime, "runtime");
        summary.input_size = fit_metric(series.input, "inputSize");
        summary.output_size = fit_metric(series.output, "outputSize");
        result.summaries.emplace(type, std::move(summary));
    }
    return result;
}

namespace {

json metric_to_json(const MetricSummary& metric) {
    json j;
    j["min"] = metric.min;
    j["max"] = metric.max;
    j["distribution"]["name"] = std::string(family_name(metric.distribution.family));
    j["distribution"]["params"] = metric.distribution.params;
    return j;
}

MetricSummary metric_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("min") || !j.contains("max") ||
        !j.contains("distribution")) {
        throw std::runtime_error(where + ": expected {min, max, distribution}");
    }
    MetricSummary metric;
    metric.min = j["min"].get<double>();
    metric.max = j["max"].get<double>();
    if (!(metric.min <= metric.max)) {
        throw std::runtime_error(where + ": min exceeds max");
    }
    const json& d = j["distribution"];
    if (!d.contains("name") || !d.contains("params") || !d["params"].is_array()) {
        throw std::runtime_error(where + ": expected distribution {name, params}");
    }
    auto family = family_from_name(d["name"].get<std::string>());
    if (!family) {
        throw std::runtime_error(where + ": unknown distribution \"" +
                                 d["name"].get<std::string>() + "\"");
    }
    try {
        metric.distribution =
            make_spec(*family, d["params"].get<std::vector<double>>());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
    return metric;
}

}  // namespace

std::string summaries_to_json(const SummaryMap& summaries) {
    json doc = json::object();
    for (const auto& [type, summary] : summaries) {
        json entry = json::object();
        if (summary.runtime) entry["runtime"] = metric_to_json(*summary.runtime);
        if (summary.input_size) entry["inputSize"] = metric_to_json(*summary.input_size);
        if (summary.output_size) {
            entry["outputSize"] = metric_to_json(*summary.output_size);
        }
        doc[type] = std::move(entry);
    }
    return doc.dump(2) + "\n";
}

SummaryMap summaries_from_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw std::runtime_error("summary document must be a JSON object");
    }
    SummaryMap summaries;
    for (const auto& [type, entry] : doc.items()) {
        if (!entry.is_object()) {
            throw std::runtime_error(type + ": expected an object of metrics");
        }
        TaskTypeSummary summary;
        summary.task_type = type;
        if (entry.contains("runtime")) {
            summary.runtime = metric_from_json(entry["runtime"], type + ".runtime");
        }
        if (entry.contains("inputSize")) {
            summary.input_size =
                metric_from_json(entry["inputSize"], type + ".inputSize");
        }
        if (entry.contains("outputSize")) {
            summary.output_size =
                metric_from_json(entry["outputSize"], type + ".outputSize");
        }
        summaries.emplace(type, std::move(summary));
    }
    return summaries;
}

}  // namespace wfkit

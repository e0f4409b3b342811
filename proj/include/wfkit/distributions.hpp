#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "wfkit/rng.hpp"

namespace wfkit {

/// The candidate parametric families. Parameter vectors are laid out flat as
/// [shape..., loc, scale] and follow the conventions of the scipy.stats
/// distributions of the same names: the variate is standardized via
/// z = (x - loc) / scale before the family's unit-form CDF applies.
enum class Family {
    kAlpha,
    kArgus,
    kBeta,
    kChi,
    kChi2,
    kCosine,
    kDweibull,
    kFisk,
    kGamma,
    kLevy,
    kPareto,
    kRayleigh,
    kRdist,
    kSkewnorm,
    kTrapz,
    kTriang,
    kUniform,
    kWald,
};

inline constexpr std::array<Family, 18> kAllFamilies = {
    Family::kAlpha,   Family::kArgus,    Family::kBeta,     Family::kChi,
    Family::kChi2,    Family::kCosine,   Family::kDweibull, Family::kFisk,
    Family::kGamma,   Family::kLevy,     Family::kPareto,   Family::kRayleigh,
    Family::kRdist,   Family::kSkewnorm, Family::kTrapz,    Family::kTriang,
    Family::kUniform, Family::kWald,
};

std::string_view family_name(Family family);
std::optional<Family> family_from_name(std::string_view name);

/// Number of shape parameters preceding loc and scale.
int shape_count(Family family);

struct DistributionSpec {
    Family family = Family::kUniform;
    std::vector<double> params;  // [shape..., loc, scale]

    double loc() const { return params[params.size() - 2]; }
    double scale() const { return params[params.size() - 1]; }
    double shape(int i = 0) const { return params[static_cast<std::size_t>(i)]; }

    bool operator==(const DistributionSpec&) const = default;
};

/// True when the parameter vector has the right arity, finite entries,
/// scale > 0, and shapes inside the family's legal range.
bool params_valid(Family family, const std::vector<double>& params);

/// Validating constructor; throws std::invalid_argument on bad parameters.
DistributionSpec make_spec(Family family, std::vector<double> params);

double dist_cdf(const DistributionSpec& spec, double x);
double dist_pdf(const DistributionSpec& spec, double x);

/// Inverts dist_cdf; |cdf(quantile(p)) - p| <= 1e-8. Closed forms where the
/// family has one, monotone bisection otherwise. Throws std::domain_error
/// unless 0 < p < 1.
double dist_quantile(const DistributionSpec& spec, double p);

/// Inverse-transform sampling: dist_quantile at a uniform draw from rng.
double dist_sample(const DistributionSpec& spec, Rng& rng);

}  // namespace wfkit

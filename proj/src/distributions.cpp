#include "wfkit/distributions.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/owens_t.hpp>

namespace wfkit {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSqrt2 = 1.414213562373095048801688724209698079;
constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;

double std_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
double std_normal_cdf(double z) { return 0.5 * boost::math::erfc(-z / kSqrt2); }
double std_normal_quantile(double p) { return -kSqrt2 * boost::math::erfc_inv(2.0 * p); }

/// ARGUS normalization Psi(t) = Phi(t) - t*phi(t) - 1/2 = integral of
/// s^2 phi(s) over [0, t]. The direct form cancels badly for small t, so a
/// power series (term k: (-1)^k t^(2k+3) / (2^k k! (2k+3)), times phi(0))
/// takes over below t = 0.7.
double argus_psi(double t) {
    if (t < 0.7) {
        double sum = 0.0;
        double power = t * t * t;  // t^(2k+3)
        double factor = 1.0;       // 2^k k!
        for (int k = 0; k < 16; ++k) {
            double term = power / (factor * (2 * k + 3));
            sum += (k % 2 == 0) ? term : -term;
            power *= t * t;
            factor *= 2.0 * (k + 1);
        }
        return kInvSqrt2Pi * sum;
    }
    return std_normal_cdf(t) - t * std_normal_pdf(t) - 0.5;
}

// --- unit-form CDFs, z already standardized ---------------------------------

double cdf_alpha(double a, double z) {
    if (z <= 0) return 0.0;
    return std_normal_cdf(a - 1.0 / z) / std_normal_cdf(a);
}

double cdf_argus(double chi, double z) {
    if (z <= 0) return 0.0;
    if (z >= 1) return 1.0;
    return 1.0 - argus_psi(chi * std::sqrt(1.0 - z * z)) / argus_psi(chi);
}

double cdf_beta(double a, double b, double z) {
    if (z <= 0) return 0.0;
    if (z >= 1) return 1.0;
    return boost::math::ibeta(a, b, z);
}

double cdf_chi(double k, double z) {
    if (z <= 0) return 0.0;
    return boost::math::gamma_p(0.5 * k, 0.5 * z * z);
}

double cdf_chi2(double k, double z) {
    if (z <= 0) return 0.0;
    return boost::math::gamma_p(0.5 * k, 0.5 * z);
}

double cdf_cosine(double z) {
    if (z <= -kPi) return 0.0;
    if (z >= kPi) return 1.0;
    return (kPi + z + std::sin(z)) / (2.0 * kPi);
}

double cdf_dweibull(double c, double z) {
    if (z < 0) return 0.5 * std::exp(-std::pow(-z, c));
    return 1.0 - 0.5 * std::exp(-std::pow(z, c));
}

double cdf_fisk(double c, double z) {
    if (z <= 0) return 0.0;
    return 1.0 / (1.0 + std::pow(z, -c));
}

double cdf_gamma(double a, double z) {
    if (z <= 0) return 0.0;
    return boost::math::gamma_p(a, z);
}

double cdf_levy(double z) {
    if (z <= 0) return 0.0;
    return boost::math::erfc(1.0 / std::sqrt(2.0 * z));
}

double cdf_pareto(double b, double z) {
    if (z <= 1) return 0.0;
    return 1.0 - std::pow(z, -b);
}

double cdf_rayleigh(double z) {
    if (z <= 0) return 0.0;
    return -std::expm1(-0.5 * z * z);
}

double cdf_rdist(double c, double z) {
    if (z <= -1) return 0.0;
    if (z >= 1) return 1.0;
    return boost::math::ibeta(0.5 * c, 0.5 * c, 0.5 * (1.0 + z));
}

double cdf_skewnorm(double a, double z) {
    return std_normal_cdf(z) - 2.0 * boost::math::owens_t(z, a);
}

double cdf_trapz(double c, double d, double z) {
    if (z <= 0) return 0.0;
    if (z >= 1) return 1.0;
    double h = 2.0 / (1.0 + d - c);  // plateau height
    if (z < c) return 0.5 * h * z * z / c;
    if (z <= d) return 0.5 * h * c + h * (z - c);
    return 1.0 - 0.5 * h * (1.0 - z) * (1.0 - z) / (1.0 - d);
}

double cdf_triang(double c, double z) {
    if (z <= 0) return 0.0;
    if (z >= 1) return 1.0;
    if (z < c) return z * z / c;
    if (c == 1.0) return z * z;
    return 1.0 - (1.0 - z) * (1.0 - z) / (1.0 - c);
}

double cdf_uniform(double z) {
    if (z <= 0) return 0.0;
    if (z >= 1) return 1.0;
    return z;
}

double cdf_wald(double z) {
    if (z <= 0) return 0.0;
    double s = std::sqrt(z);
    return std_normal_cdf((z - 1.0) / s) +
           std::exp(2.0) * std_normal_cdf(-(z + 1.0) / s);
}

// --- unit-form densities ----------------------------------------------------

double pdf_alpha(double a, double z) {
    if (z <= 0) return 0.0;
    double t = a - 1.0 / z;
    return std::exp(-0.5 * t * t) * kInvSqrt2Pi / (z * z * std_normal_cdf(a));
}

double pdf_argus(double chi, double z) {
    if (z <= 0 || z >= 1) return 0.0;
    double y = 1.0 - z * z;
    return chi * chi * chi * kInvSqrt2Pi / argus_psi(chi) * z * std::sqrt(y) *
           std::exp(-0.5 * chi * chi * y);
}

double pdf_beta(double a, double b, double z) {
    if (z <= 0 || z >= 1) return 0.0;
    return std::exp((a - 1.0) * std::log(z) + (b - 1.0) * std::log1p(-z) -
                    std::log(boost::math::beta(a, b)));
}

double pdf_chi(double k, double z) {
    if (z <= 0) return 0.0;
    return std::exp((k - 1.0) * std::log(z) - 0.5 * z * z -
                    (0.5 * k - 1.0) * std::log(2.0) -
                    boost::math::lgamma(0.5 * k));
}

double pdf_chi2(double k, double z) {
    if (z <= 0) return 0.0;
    return std::exp((0.5 * k - 1.0) * std::log(z) - 0.5 * z -
                    0.5 * k * std::log(2.0) - boost::math::lgamma(0.5 * k));
}

double pdf_cosine(double z) {
    if (z <= -kPi || z >= kPi) return 0.0;
    return (1.0 + std::cos(z)) / (2.0 * kPi);
}

double pdf_dweibull(double c, double z) {
    double az = std::fabs(z);
    if (az == 0.0) return c < 1.0   ? std::numeric_limits<double>::infinity()
                          : c == 1.0 ? 0.5
                                     : 0.0;
    return 0.5 * c * std::pow(az, c - 1.0) * std::exp(-std::pow(az, c));
}

double pdf_fisk(double c, double z) {
    if (z <= 0) return 0.0;
    double zc = std::pow(z, c);
    double denom = 1.0 + 1.0 / zc;
    return c / (z * zc) / (denom * denom);
}

double pdf_gamma(double a, double z) {
    if (z <= 0) return 0.0;
    return std::exp((a - 1.0) * std::log(z) - z - boost::math::lgamma(a));
}

double pdf_levy(double z) {
    if (z <= 0) return 0.0;
    return kInvSqrt2Pi * std::exp(-0.5 / z) / (z * std::sqrt(z));
}

double pdf_pareto(double b, double z) {
    if (z < 1) return 0.0;
    return b * std::pow(z, -b - 1.0);
}

double pdf_rayleigh(double z) {
    if (z <= 0) return 0.0;
    return z * std::exp(-0.5 * z * z);
}

double pdf_rdist(double c, double z) {
    if (z <= -1 || z >= 1) return 0.0;
    return std::exp((0.5 * c - 1.0) * std::log1p(-z * z) -
                    std::log(boost::math::beta(0.5, 0.5 * c)));
}

double pdf_skewnorm(double a, double z) {
    return 2.0 * std_normal_pdf(z) * std_normal_cdf(a * z);
}

double pdf_trapz(double c, double d, double z) {
    if (z <= 0 || z >= 1) return 0.0;
    double h = 2.0 / (1.0 + d - c);
    if (z < c) return h * z / c;
    if (z <= d) return h;
    return h * (1.0 - z) / (1.0 - d);
}

double pdf_triang(double c, double z) {
    if (z <= 0 || z >= 1) return 0.0;
    if (z < c) return 2.0 * z / c;
    if (c == 1.0) return 2.0 * z;
    return 2.0 * (1.0 - z) / (1.0 - c);
}

double pdf_uniform(double z) { return (z >= 0 && z <= 1) ? 1.0 : 0.0; }

double pdf_wald(double z) {
    if (z <= 0) return 0.0;
    double d = z - 1.0;
    return kInvSqrt2Pi / (z * std::sqrt(z)) * std::exp(-0.5 * d * d / z);
}

// --- unit-form quantiles (closed forms) -------------------------------------

double quantile_alpha(double a, double p) {
    return 1.0 / (a - std_normal_quantile(p * std_normal_cdf(a)));
}

double quantile_beta(double a, double b, double p) {
    return boost::math::ibeta_inv(a, b, p);
}

double quantile_chi(double k, double p) {
    return std::sqrt(2.0 * boost::math::gamma_p_inv(0.5 * k, p));
}

double quantile_chi2(double k, double p) {
    return 2.0 * boost::math::gamma_p_inv(0.5 * k, p);
}

double quantile_dweibull(double c, double p) {
    if (p < 0.5) return -std::pow(-std::log(2.0 * p), 1.0 / c);
    return std::pow(-std::log(2.0 * (1.0 - p)), 1.0 / c);
}

double quantile_fisk(double c, double p) {
    return std::pow(p / (1.0 - p), 1.0 / c);
}

double quantile_gamma(double a, double p) {
    return boost::math::gamma_p_inv(a, p);
}

double quantile_levy(double p) {
    double e = boost::math::erfc_inv(p);
    return 0.5 / (e * e);
}

double quantile_pareto(double b, double p) {
    return std::pow(1.0 - p, -1.0 / b);
}

double quantile_rayleigh(double p) { return std::sqrt(-2.0 * std::log1p(-p)); }

double quantile_rdist(double c, double p) {
    return 2.0 * boost::math::ibeta_inv(0.5 * c, 0.5 * c, p) - 1.0;
}

double quantile_trapz(double c, double d, double p) {
    double h = 2.0 / (1.0 + d - c);
    double rise = 0.5 * h * c;        // mass of the ramp up
    double plateau = rise + h * (d - c);
    if (p < rise) return std::sqrt(2.0 * p * c / h);
    if (p <= plateau) return c + (p - rise) / h;
    return 1.0 - std::sqrt(2.0 * (1.0 - p) * (1.0 - d) / h);
}

double quantile_triang(double c, double p) {
    if (p < c) return std::sqrt(p * c);
    return 1.0 - std::sqrt((1.0 - p) * (1.0 - c));
}

// --- generic monotone bisection for the families without a closed inverse ---

double bisect_quantile(double p, double lo, double hi,
                       const std::function<double(double)>& cdf) {
    for (int i = 0; i < 400; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        double f = cdf(mid);
        if (std::fabs(f - p) <= 1e-12) return mid;
        if (f < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Unbounded-above (and possibly below) supports: grow the bracket until it
/// straddles p, then bisect.
double expand_and_bisect(double p, double lo, double hi,
                         const std::function<double(double)>& cdf) {
    double width = hi - lo;
    while (cdf(hi) < p && std::isfinite(hi)) {
        lo = hi;
        width *= 2.0;
        hi += width;
    }
    return bisect_quantile(p, lo, hi, cdf);
}

double quantile_cosine(double p) {
    return bisect_quantile(p, -kPi, kPi, [](double z) { return cdf_cosine(z); });
}

double quantile_skewnorm(double a, double p) {
    // |Z| is at most ~39 before the normal CDF saturates in doubles.
    return bisect_quantile(p, -40.0, 40.0,
                           [a](double z) { return cdf_skewnorm(a, z); });
}

double quantile_argus(double chi, double p) {
    return bisect_quantile(p, 0.0, 1.0,
                           [chi](double z) { return cdf_argus(chi, z); });
}

double quantile_wald(double p) {
    return expand_and_bisect(p, 0.0, 8.0, [](double z) { return cdf_wald(z); });
}

}  // namespace

std::string_view family_name(Family family) {
    switch (family) {
        case Family::kAlpha: return "alpha";
        case Family::kArgus: return "argus";
        case Family::kBeta: return "beta";
        case Family::kChi: return "chi";
        case Family::kChi2: return "chi2";
        case Family::kCosine: return "cosine";
        case Family::kDweibull: return "dweibull";
        case Family::kFisk: return "fisk";
        case Family::kGamma: return "gamma";
        case Family::kLevy: return "levy";
        case Family::kPareto: return "pareto";
        case Family::kRayleigh: return "rayleigh";
        case Family::kRdist: return "rdist";
        case Family::kSkewnorm: return "skewnorm";
        case Family::kTrapz: return "trapz";
        case Family::kTriang: return "triang";
        case Family::kUniform: return "uniform";
        case Family::kWald: return "wald";
    }
    return "?";
}

std::optional<Family> family_from_name(std::string_view name) {
    for (Family family : kAllFamilies) {
        if (family_name(family) == name) return family;
    }
    return std::nullopt;
}

int shape_count(Family family) {
    switch (family) {
        case Family::kBeta:
        case Family::kTrapz:
            return 2;
        case Family::kCosine:
        case Family::kLevy:
        case Family::kRayleigh:
        case Family::kUniform:
        case Family::kWald:
            return 0;
        default:
            return 1;
    }
}

bool params_valid(Family family, const std::vector<double>& params) {
    if (static_cast<int>(params.size()) != shape_count(family) + 2) return false;
    for (double v : params) {
        if (!std::isfinite(v)) return false;
    }
    double scale = params.back();
    if (!(scale > 0)) return false;
    switch (family) {
        case Family::kAlpha:
        case Family::kArgus:
        case Family::kChi:
        case Family::kChi2:
        case Family::kDweibull:
        case Family::kFisk:
        case Family::kGamma:
        case Family::kPareto:
        case Family::kRdist:
            return params[0] > 0;
        case Family::kBeta:
            return params[0] > 0 && params[1] > 0;
        case Family::kTrapz:
            return params[0] >= 0 && params[1] >= params[0] && params[1] <= 1;
        case Family::kTriang:
            return params[0] >= 0 && params[0] <= 1;
        case Family::kSkewnorm:
        case Family::kCosine:
        case Family::kLevy:
        case Family::kRayleigh:
        case Family::kUniform:
        case Family::kWald:
            return true;
    }
    return false;
}

DistributionSpec make_spec(Family family, std::vector<double> params) {
    if (!params_valid(family, params)) {
        throw std::invalid_argument("invalid parameters for distribution \"" +
                                    std::string(family_name(family)) + "\"");
    }
    return {family, std::move(params)};
}

double dist_cdf(const DistributionSpec& spec, double x) {
    double z = (x - spec.loc()) / spec.scale();
    switch (spec.family) {
        case Family::kAlpha: return cdf_alpha(spec.shape(), z);
        case Family::kArgus: return cdf_argus(spec.shape(), z);
        case Family::kBeta: return cdf_beta(spec.shape(0), spec.shape(1), z);
        case Family::kChi: return cdf_chi(spec.shape(), z);
        case Family::kChi2: return cdf_chi2(spec.shape(), z);
        case Family::kCosine: return cdf_cosine(z);
        case Family::kDweibull: return cdf_dweibull(spec.shape(), z);
        case Family::kFisk: return cdf_fisk(spec.shape(), z);
        case Family::kGamma: return cdf_gamma(spec.shape(), z);
        case Family::kLevy: return cdf_levy(z);
        case Family::kPareto: return cdf_pareto(spec.shape(), z);
        case Family::kRayleigh: return cdf_rayleigh(z);
        case Family::kRdist: return cdf_rdist(spec.shape(), z);
        case Family::kSkewnorm: return cdf_skewnorm(spec.shape(), z);
        case Family::kTrapz: return cdf_trapz(spec.shape(0), spec.shape(1), z);
        case Family::kTriang: return cdf_triang(spec.shape(), z);
        case Family::kUniform: return cdf_uniform(z);
        case Family::kWald: return cdf_wald(z);
    }
    return 0.0;
}

double dist_pdf(const DistributionSpec& spec, double x) {
    double z = (x - spec.loc()) / spec.scale();
    double unit;
    switch (spec.family) {
        case Family::kAlpha: unit = pdf_alpha(spec.shape(), z); break;
        case Family::kArgus: unit = pdf_argus(spec.shape(), z); break;
        case Family::kBeta: unit = pdf_beta(spec.shape(0), spec.shape(1), z); break;
        case Family::kChi: unit = pdf_chi(spec.shape(), z); break;
        case Family::kChi2: unit = pdf_chi2(spec.shape(), z); break;
        case Family::kCosine: unit = pdf_cosine(z); break;
        case Family::kDweibull: unit = pdf_dweibull(spec.shape(), z); break;
        case Family::kFisk: unit = pdf_fisk(spec.shape(), z); break;
        case Family::kGamma: unit = pdf_gamma(spec.shape(), z); break;
        case Family::kLevy: unit = pdf_levy(z); break;
        case Family::kPareto: unit = pdf_pareto(spec.shape(), z); break;
        case Family::kRayleigh: unit = pdf_rayleigh(z); break;
        case Family::kRdist: unit = pdf_rdist(spec.shape(), z); break;
        case Family::kSkewnorm: unit = pdf_skewnorm(spec.shape(), z); break;
        case Family::kTrapz: unit = pdf_trapz(spec.shape(0), spec.shape(1), z); break;
        case Family::kTriang: unit = pdf_triang(spec.shape(), z); break;
        case Family::kUniform: unit = pdf_uniform(z); break;
        case Family::kWald: unit = pdf_wald(z); break;
        default: unit = 0.0; break;
    }
    return unit / spec.scale();
}

double dist_quantile(const DistributionSpec& spec, double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("quantile probability must lie in (0, 1)");
    }
    double z;
    switch (spec.family) {
        case Family::kAlpha: z = quantile_alpha(spec.shape(), p); break;
        case Family::kArgus: z = quantile_argus(spec.shape(), p); break;
        case Family::kBeta: z = quantile_beta(spec.shape(0), spec.shape(1), p); break;
        case Family::kChi: z = quantile_chi(spec.shape(), p); break;
        case Family::kChi2: z = quantile_chi2(spec.shape(), p); break;
        case Family::kCosine: z = quantile_cosine(p); break;
        case Family::kDweibull: z = quantile_dweibull(spec.shape(), p); break;
        case Family::kFisk: z = quantile_fisk(spec.shape(), p); break;
        case Family::kGamma: z = quantile_gamma(spec.shape(), p); break;
        case Family::kLevy: z = quantile_levy(p); break;
        case Family::kPareto: z = quantile_pareto(spec.shape(), p); break;
        case Family::kRayleigh: z = quantile_rayleigh(p); break;
        case Family::kRdist: z = quantile_rdist(spec.shape(), p); break;
        case Family::kSkewnorm: z = quantile_skewnorm(spec.shape(), p); break;
        case Family::kTrapz: z = quantile_trapz(spec.shape(0), spec.shape(1), p); break;
        case Family::kTriang: z = quantile_triang(spec.shape(), p); break;
        case Family::kUniform: z = p; break;
        case Family::kWald: z = quantile_wald(p); break;
        default: z = 0.0; break;
    }
    return spec.loc() + spec.scale() * z;
}

double dist_sample(const DistributionSpec& spec, Rng& rng) {
    return dist_quantile(spec, rng.next_unit());
}

}  // namespace wfkit

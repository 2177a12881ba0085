#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace floors {

struct WeibullParams {
    double shape = 1.0;  // dimensionless, > 0
    double scale = 1.0;  // CPM dollars, > 0
};

inline void check_params(const WeibullParams& p) {
    if (!(p.shape > 0.0) || !std::isfinite(p.shape) || !(p.scale > 0.0) || !std::isfinite(p.scale))
        throw std::invalid_argument("WeibullParams: shape and scale must be positive and finite");
}

inline double weibull_cdf(double b, const WeibullParams& p) {
    check_params(p);
    if (b < 0.0) throw std::invalid_argument("weibull_cdf: negative bid");
    if (b == 0.0) return 0.0;
    return 1.0 - std::exp(-std::pow(b / p.scale, p.shape));
}

inline double weibull_pdf(double b, const WeibullParams& p) {
    check_params(p);
    if (b < 0.0) throw std::invalid_argument("weibull_pdf: negative bid");
    if (b == 0.0) {
        if (p.shape > 1.0) return 0.0;
        if (p.shape == 1.0) return 1.0 / p.scale;
        throw std::domain_error("weibull_pdf: density unbounded at 0 for shape < 1");
    }
    const double z = b / p.scale;
    return (p.shape / p.scale) * std::pow(z, p.shape - 1.0) * std::exp(-std::pow(z, p.shape));
}

// log pdf with explicit overflow guards; -inf when the density is 0.
inline double weibull_log_pdf(double b, const WeibullParams& p) {
    check_params(p);
    if (!(b > 0.0)) throw std::invalid_argument("weibull_log_pdf: bid must be > 0");
    const double log_z = std::log(b) - std::log(p.scale);
    double zk = p.shape * log_z;
    zk = zk > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(zk);
    return std::log(p.shape) - std::log(p.scale) + (p.shape - 1.0) * log_z - zk;
}

inline double weibull_quantile(double q, const WeibullParams& p) {
    check_params(p);
    if (q < 0.0 || q >= 1.0) throw std::domain_error("weibull_quantile: q must be in [0,1)");
    if (q == 0.0) return 0.0;
    return p.scale * std::pow(-std::log1p(-q), 1.0 / p.shape);
}

// Survival of the latent distribution at the floor: 1 - F(floor).
inline double weibull_survival(double b, const WeibullParams& p) {
    check_params(p);
    if (b < 0.0) throw std::invalid_argument("weibull_survival: negative bid");
    return std::exp(-std::pow(b / p.scale, p.shape));
}

struct FitDiagnostics {
    long sample_count = 0;
    bool converged = false;
    double final_nll = 0.0;
    bool floor_dependent = false;  // false when the fit fell back to a1 = b1 = 0
};

// Log-linear link of Weibull parameters in the floor:
//   shape(rho) = exp(a0 + a1*rho), scale(rho) = exp(b0 + b1*rho).
// Positive for every finite floor by construction.
struct FloorLinkModel {
    double shape_a0 = 0.0;
    double shape_a1 = 0.0;
    double scale_b0 = 0.0;
    double scale_b1 = 0.0;
    FitDiagnostics diagnostics;
};

inline WeibullParams link_params(double floor, const FloorLinkModel& m) {
    if (floor < 0.0) throw std::invalid_argument("link_params: negative floor");
    return WeibullParams{std::exp(m.shape_a0 + m.shape_a1 * floor), std::exp(m.scale_b0 + m.scale_b1 * floor)};
}

}  // namespace floors

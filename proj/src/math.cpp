#include "nsvh/math.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsvh {

double stable_exp_ratio(double k, double s) {
    if (s < 0.0) throw std::domain_error("stable_exp_ratio: s must be >= 0");
    const double u = k * s;
    if (std::abs(u) < 1e-5) {
        // 3-term series: s * (1 + u/2 + u^2/6); next term u^3/24 < 5e-17
        return s * (1.0 + 0.5 * u + u * u / 6.0);
    }
    return std::expm1(u) / k;
}

double phi_radius(double z, double d) {
    if (d < std::abs(z)) {
        if (d < std::abs(z) - 1e-12)
            throw std::domain_error("phi_radius: requires d >= |z| (d=" + std::to_string(d) +
                                    ", z=" + std::to_string(z) + ")");
        return 0.0;  // clamp roundoff-negative radicand
    }
    const double rad = 4.0 * std::sinh(0.5 * (d + z)) * std::sinh(0.5 * (d - z));
    return std::exp(0.5 * z) * std::sqrt(rad < 0.0 ? 0.0 : rad);
}

double norm_pdf(double x) { return kInvSqrtTwoPi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

namespace {

// Acklam's rational minimax approximation to the normal quantile
// (max abs error ~1.15e-9 before polishing).
double acklam(double p) {
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("norm_quantile: p must lie strictly in (0, 1)");
    double x = acklam(p);
    if (std::abs(x) < 37.0) {
        // one Halley step: e = N(x) - p, u = e / n(x)
        const double e = norm_cdf(x) - p;
        const double u = e * kSqrtTwoPi * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

}  // namespace nsvh

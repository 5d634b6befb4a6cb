#include "nsvh/sabr_normal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nsvh/errors.hpp"
#include "nsvh/math.hpp"

namespace nsvh {

double hagan_normal_vol(const NsvhParams& p, double strike) {
    const double rho = p.rho();
    if (std::abs(rho) >= 1.0 - 1e-10)
        throw std::invalid_argument("hagan_normal_vol: degenerate correlation |rho| ~ 1");
    const double sigma0 = p.sigma0();
    const double alpha = p.alpha();
    const double order1 = 1.0 + (2.0 - 3.0 * rho * rho) / 24.0 * p.s_var();
    if (alpha == 0.0) return sigma0 * order1;  // flat smile

    const double zeta = alpha / sigma0 * (p.f0() - strike);
    double ratio;
    if (std::abs(zeta) < 1e-6) {
        // zeta/chi has a removable singularity at zeta = 0:
        // chi = zeta (1 + rho zeta/2 + (3 rho^2 - 1) zeta^2 / 6 + ...)
        ratio = 1.0 / (1.0 + 0.5 * rho * zeta + (3.0 * rho * rho - 1.0) / 6.0 * zeta * zeta);
    } else {
        // chi = log1p((sqrt(1 - 2 rho zeta + zeta^2) - 1 + zeta) / (1 - rho)),
        // with sqrt(1+x) - 1 = x / (1 + sqrt(1+x)) so small zeta does not cancel
        const double x = zeta * zeta - 2.0 * rho * zeta;
        const double sqrt_m1 = x / (1.0 + std::sqrt(1.0 + x));
        const double chi = std::log1p((sqrt_m1 + zeta) / (1.0 - rho));
        ratio = zeta / chi;
    }
    return sigma0 * ratio * order1;
}

double bachelier_price(double forward, double strike, double normal_vol, double t_expiry,
                       OptionSide side) {
    if (t_expiry <= 0.0) throw std::invalid_argument("bachelier_price: t_expiry must be > 0");
    if (normal_vol < 0.0)
        throw std::invalid_argument("bachelier_price: normal_vol must be >= 0");
    const double sign = side == OptionSide::call ? 1.0 : -1.0;
    const double moneyness = forward - strike;
    if (normal_vol == 0.0) return std::max(sign * moneyness, 0.0);
    const double v = normal_vol * std::sqrt(t_expiry);
    const double d1 = moneyness / v;
    return sign * moneyness * norm_cdf(sign * d1) + v * norm_pdf(d1);
}

double bachelier_vega(double forward, double strike, double normal_vol, double t_expiry) {
    const double v = normal_vol * std::sqrt(t_expiry);
    const double d1 = v > 0.0 ? (forward - strike) / v : 0.0;
    return std::sqrt(t_expiry) * norm_pdf(d1);
}

double implied_normal_vol(double price, double forward, double strike, double t_expiry,
                          OptionSide side) {
    const double sign = side == OptionSide::call ? 1.0 : -1.0;
    const double intrinsic = std::max(sign * (forward - strike), 0.0);
    if (!(price > intrinsic))
        throw no_solution_error("implied_normal_vol: price at or below intrinsic value");
    if (!std::isfinite(price))
        throw no_solution_error("implied_normal_vol: price must be finite");

    // Bracket: ATM straddle bound gives a cheap upper start.
    double lo = 0.0;
    double hi = (price + std::abs(forward - strike)) * kSqrtTwoPi / std::sqrt(t_expiry);
    hi = std::max(hi, 1e-12);
    while (bachelier_price(forward, strike, hi, t_expiry, side) < price) hi *= 2.0;

    double v = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const double f = bachelier_price(forward, strike, v, t_expiry, side) - price;
        if (std::abs(f) <= 1e-12 * price) return v;
        if (f > 0.0) hi = v; else lo = v;
        const double vega = bachelier_vega(forward, strike, v, t_expiry);
        double next = vega > 0.0 ? v - f / vega : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // safeguard
        v = next;
    }
    return v;
}

}  // namespace nsvh

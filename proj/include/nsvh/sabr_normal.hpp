#pragma once

#include "nsvh/params.hpp"

namespace nsvh {

struct NormalVolQuote {
    double strike;
    double normal_vol;  // annualized normal volatility, > 0
};

// Hagan's normal-volatility approximation for the beta = 0 SABR backbone
// (the lambda = 0 member of the family). The lambda field of params is
// ignored; the formula is intrinsically a lambda = 0 approximation.
// Requires |rho| < 1 - 1e-10.
double hagan_normal_vol(const NsvhParams& params, double strike);

// Undiscounted Bachelier (normal-model) price. normal_vol = 0 returns
// intrinsic value. Parity V_call - V_put = forward - strike is exact.
double bachelier_price(double forward, double strike, double normal_vol, double t_expiry,
                       OptionSide side);

// Bachelier vega dV/dsigma_N = sqrt(T) n(d1); positive for normal_vol > 0.
double bachelier_vega(double forward, double strike, double normal_vol, double t_expiry);

// Invert bachelier_price in normal_vol. Bracketing bisection/Newton hybrid,
// relative price tolerance 1e-12, at most 100 iterations. Throws
// no_solution_error when the price violates arbitrage bounds.
double implied_normal_vol(double price, double forward, double strike, double t_expiry,
                          OptionSide side);

}  // namespace nsvh

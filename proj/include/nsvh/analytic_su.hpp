#pragma once

#include <cstdint>
#include <vector>

#include "nsvh/params.hpp"

namespace nsvh {

// Closed-form analytics for the lambda = 1 model, whose terminal price
// follows a reparametrized Johnson S_U distribution. All operations require
// params.lambda == 1, alpha > 0 and |rho| < 1; the S_L boundary |rho| = 1 is
// rejected because every formula divides by rho_star.

// Standardized score d(x). Strictly decreasing in x; cdf(x) = N(-d(x)).
double su_d_score(double x, const NsvhParams& params);

double su_pdf(double x, const NsvhParams& params);
double su_cdf(double x, const NsvhParams& params);

// Inverse of su_cdf, in closed form. Requires 0 < p < 1.
double su_quantile(double p, const NsvhParams& params);

// Undiscounted vanilla price in numeraire units. Satisfies exact put-call
// parity V_call - V_put = mean - strike.
double su_option_price(double strike, OptionSide side, const NsvhParams& params);

// n i.i.d. terminal prices, one standard normal consumed per draw.
std::vector<double> su_sample(const NsvhParams& params, std::size_t n, std::uint64_t seed);

}  // namespace nsvh

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nsvh/params.hpp"

namespace nsvh {

enum class QuoteKind { normal_vol, option_price };

struct SmileQuote {
    double strike_offset;  // K - forward
    QuoteKind kind;
    double value;          // > 0; prices must exceed intrinsic
    OptionSide side = OptionSide::put;  // used when kind == option_price
};

struct CalibrationResult {
    NsvhParams params;
    std::vector<double> residuals;  // model vol - quote vol, per quote
    int iterations;
    bool converged;
    std::string diagnostic;  // non-empty on boundary cases (e.g. alpha ~ 0)
};

// Calibrate (sigma0, alpha, rho) to >= 3 strike quotes at a common forward
// and expiry. lambda = 0 prices through the Hagan normal-vol approximation,
// lambda = 1 through the closed form (inverted to vols). Price quotes are
// converted to normal vols once, up front. Exactly 3 quotes: damped Newton
// on the 3x3 system; more: damped Gauss-Newton least squares. Parameters run
// through sigma0 = e^a, alpha = e^b, rho = tanh(c) to stay in bounds.
// `initial` overrides the built-in (sigma0, alpha, rho) starting point.
CalibrationResult calibrate_smile(const std::vector<SmileQuote>& quotes, double forward,
                                  double t_expiry, double lambda, double tolerance = 1e-10,
                                  std::optional<std::array<double, 3>> initial = std::nullopt);

struct SmilePoint {
    double strike;
    double normal_vol;
    bool ok;  // false when price-to-vol inversion failed at this strike
};

// Model-implied normal-vol curve on a strike grid. lambda = 0 evaluates the
// approximation directly; lambda = 1 prices exactly and inverts.
std::vector<SmilePoint> smile_curve(const NsvhParams& params, double lambda,
                                    const std::vector<double>& strike_grid);

}  // namespace nsvh

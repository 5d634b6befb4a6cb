#pragma once

#include <cmath>

namespace nsvh {

enum class OptionSide { call, put };

// Full parameter set of the hyperbolic normal stochastic-volatility model for
// one asset/expiry. Validated at construction; downstream code assumes the
// invariants hold.
//
//   sigma0   initial normal volatility (price units per sqrt(time), > 0)
//   alpha    vol-of-vol (1/sqrt(time), >= 0)
//   rho      correlation, |rho| <= 1
//   lambda   drift-family parameter (0 = normal SABR, 1 = Johnson S_U)
//   f0       initial forward price
//   t_expiry horizon T (> 0)
//
// The dimensionless variance budget S = alpha^2 T is capped at 50: moment
// formulas involve w^6 = e^{6S}, which overflows well below DBL_MAX but is
// already astronomically far outside any calibrated regime.
class NsvhParams {
public:
    NsvhParams(double sigma0, double alpha, double rho, double lambda, double f0,
               double t_expiry);

    double sigma0() const noexcept { return sigma0_; }
    double alpha() const noexcept { return alpha_; }
    double rho() const noexcept { return rho_; }
    double lambda() const noexcept { return lambda_; }
    double f0() const noexcept { return f0_; }
    double t_expiry() const noexcept { return t_expiry_; }

    double s_var() const noexcept { return alpha_ * alpha_ * t_expiry_; }
    double w() const noexcept { return std::exp(s_var()); }
    double rho_star() const noexcept { return std::sqrt((1.0 - rho_) * (1.0 + rho_)); }

    // E[F_T] = f0 + (sigma0 rho / alpha)(e^{lambda S / 2} - 1), evaluated in a
    // form that is exact at alpha = 0, rho = 0 and lambda = 0.
    double terminal_mean() const;

    // Same parameters with f0 chosen so that terminal_mean() == mean.
    static NsvhParams with_terminal_mean(double sigma0, double alpha, double rho,
                                         double lambda, double mean, double t_expiry);

    static constexpr double kMaxSVar = 50.0;

private:
    double sigma0_, alpha_, rho_, lambda_, f0_, t_expiry_;
};

// Dimensionless canonical triple (S, rho, lambda).
struct CanonicalParams {
    double s_var;
    double rho;
    double lambda;

    double w() const noexcept { return std::exp(s_var); }

    // Rescale a canonical price draw back to the original units:
    // F_T = (sigma0/alpha) * f_tilde + mean.
    static CanonicalParams from(const NsvhParams& p) noexcept {
        return {p.s_var(), p.rho(), p.lambda()};
    }
    NsvhParams to_nsvh(double sigma0, double alpha, double f0, double t_expiry) const;
};

}  // namespace nsvh

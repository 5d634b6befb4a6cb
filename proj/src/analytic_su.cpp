#include "nsvh/analytic_su.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nsvh/math.hpp"
#include "nsvh/rng.hpp"

namespace nsvh {

namespace {

void require_su(const NsvhParams& p) {
    if (p.lambda() != 1.0)
        throw std::invalid_argument("analytic_su: requires lambda == 1, got " +
                                    std::to_string(p.lambda()));
    if (p.alpha() <= 0.0)
        throw std::invalid_argument("analytic_su: requires alpha > 0");
    if (std::abs(p.rho()) >= 1.0)
        throw std::invalid_argument("analytic_su: degenerate correlation |rho| = 1");
}

// The asinh operand inside d; the pdf denominator uses sqrt(1 + xi^2).
double xi_of(double x, const NsvhParams& p) {
    const double rs = p.rho_star();
    return p.alpha() / (rs * p.sigma0()) * (p.terminal_mean() - x) -
           p.rho() / rs * std::exp(0.5 * p.s_var());
}

}  // namespace

double su_d_score(double x, const NsvhParams& p) {
    require_su(p);
    return (std::asinh(xi_of(x, p)) + std::atanh(p.rho())) / std::sqrt(p.s_var());
}

double su_pdf(double x, const NsvhParams& p) {
    require_su(p);
    const double xi = xi_of(x, p);
    const double d = (std::asinh(xi) + std::atanh(p.rho())) / std::sqrt(p.s_var());
    return norm_pdf(d) /
           (p.rho_star() * p.sigma0() * std::sqrt(p.t_expiry()) * std::sqrt(1.0 + xi * xi));
}

double su_cdf(double x, const NsvhParams& p) { return norm_cdf(-su_d_score(x, p)); }

double su_quantile(double prob, const NsvhParams& p) {
    require_su(p);
    if (!(prob > 0.0 && prob < 1.0))
        throw std::domain_error("su_quantile: p must lie strictly in (0, 1)");
    const double d = -norm_quantile(prob);
    const double s = p.s_var();
    return p.terminal_mean() -
           p.sigma0() / p.alpha() *
               (p.rho_star() * std::sinh(d * std::sqrt(s) - std::atanh(p.rho())) +
                p.rho() * std::exp(0.5 * s));
}

double su_option_price(double strike, OptionSide side, const NsvhParams& p) {
    require_su(p);
    const double s = p.s_var();
    const double rt_s = std::sqrt(s);
    const double d = su_d_score(strike, p);
    const double rho = p.rho();
    const double a = p.sigma0() / (2.0 * p.alpha()) * std::exp(0.5 * s) *
                     ((1.0 + rho) * norm_cdf(d + rt_s) - (1.0 - rho) * norm_cdf(d - rt_s) -
                      2.0 * rho * norm_cdf(d));
    const double fwd_minus_k = p.terminal_mean() - strike;
    return side == OptionSide::call ? a + fwd_minus_k * norm_cdf(d)
                                    : a - fwd_minus_k * norm_cdf(-d);
}

std::vector<double> su_sample(const NsvhParams& p, std::size_t n, std::uint64_t seed) {
    require_su(p);
    if (n == 0) throw std::invalid_argument("su_sample: n must be >= 1");
    const double s = p.s_var();
    const double rt_s = std::sqrt(s);
    const double e_half_s = std::exp(0.5 * s);
    const double scale = p.sigma0() / p.alpha();
    const double mean = p.terminal_mean();
    const double rho = p.rho();
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) {
        const double w = rt_s * rng.next_normal();
        v = mean + scale * (std::sinh(w) + rho * (std::cosh(w) - e_half_s));
    }
    return out;
}

}  // namespace nsvh

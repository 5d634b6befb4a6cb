#include "nsvh/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nsvh/math.hpp"

namespace nsvh {

namespace {

void check_finite(double v, const char* name) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string("NsvhParams: ") + name + " must be finite");
}

}  // namespace

NsvhParams::NsvhParams(double sigma0, double alpha, double rho, double lambda, double f0,
                       double t_expiry)
    : sigma0_(sigma0), alpha_(alpha), rho_(rho), lambda_(lambda), f0_(f0),
      t_expiry_(t_expiry) {
    check_finite(sigma0, "sigma0");
    check_finite(alpha, "alpha");
    check_finite(rho, "rho");
    check_finite(lambda, "lambda");
    check_finite(f0, "f0");
    check_finite(t_expiry, "t_expiry");
    if (sigma0 <= 0.0) throw std::invalid_argument("NsvhParams: sigma0 must be > 0");
    if (alpha < 0.0) throw std::invalid_argument("NsvhParams: alpha must be >= 0");
    if (std::abs(rho) > 1.0) throw std::invalid_argument("NsvhParams: |rho| must be <= 1");
    if (t_expiry <= 0.0) throw std::invalid_argument("NsvhParams: t_expiry must be > 0");
    if (s_var() > kMaxSVar)
        throw std::invalid_argument("NsvhParams: alpha^2 * t_expiry exceeds the supported cap " +
                                    std::to_string(kMaxSVar));
}

double NsvhParams::terminal_mean() const {
    // (sigma0 rho / alpha)(e^{lambda S/2} - 1)
    //   = sigma0 rho alpha (lambda T / 2) * [(e^u - 1)/u],  u = lambda S / 2.
    // The bracket is stable_exp_ratio(u, 1); each zero of rho, alpha or lambda
    // kills the shift exactly.
    const double u = 0.5 * lambda_ * s_var();
    return f0_ + sigma0_ * rho_ * alpha_ * (0.5 * lambda_ * t_expiry_) * stable_exp_ratio(u, 1.0);
}

NsvhParams NsvhParams::with_terminal_mean(double sigma0, double alpha, double rho,
                                          double lambda, double mean, double t_expiry) {
    NsvhParams probe(sigma0, alpha, rho, lambda, 0.0, t_expiry);
    const double shift = probe.terminal_mean();
    return NsvhParams(sigma0, alpha, rho, lambda, mean - shift, t_expiry);
}

NsvhParams CanonicalParams::to_nsvh(double sigma0, double alpha, double f0,
                                    double t_expiry) const {
    NsvhParams p(sigma0, alpha, rho, lambda, f0, t_expiry);
    if (std::abs(p.s_var() - s_var) > 1e-12 * (1.0 + s_var))
        throw std::invalid_argument(
            "CanonicalParams::to_nsvh: alpha^2 * t_expiry does not match s_var");
    return p;
}

}  // namespace nsvh

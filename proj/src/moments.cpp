#include "nsvh/moments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "nsvh/errors.hpp"
#include "nsvh/math.hpp"

namespace nsvh {

CanonicalMoments canonical_central_moments(double s_var, double rho, double lambda) {
    if (s_var < 0.0) throw std::domain_error("canonical_central_moments: s_var must be >= 0");
    const double w = std::exp(s_var);
    const double rho2 = rho * rho;
    const double rs2 = 1.0 - rho2;
    const double r1 = stable_exp_ratio(1.0 + lambda, s_var);
    const double r3 = stable_exp_ratio(3.0 + lambda, s_var);
    const double r5 = stable_exp_ratio(5.0 + lambda, s_var);
    const double wm1 = std::expm1(s_var);

    const double mu2 = rho2 * std::pow(w, lambda) * wm1 + rs2 * r1;

    const double mu3 = rho2 * rho * std::pow(w, 1.5 * lambda) * wm1 * wm1 * (w + 2.0) +
                       3.0 * rho * rs2 * std::pow(w, 0.5 * lambda) * (r3 - r1);

    const double quart = w * w * w * w + 2.0 * w * w * w + 3.0 * w * w - 3.0;
    const double mu4 =
        rho2 * rho2 * std::pow(w, 2.0 * lambda) * wm1 * wm1 * quart +
        6.0 * rho2 * rs2 * std::pow(w, lambda) * (w * r5 - 2.0 * r3 + r1) +
        1.5 * rs2 * rs2 *
            (-std::pow(w, 1.0 + lambda) * r5 + (std::pow(w, 3.0 + lambda) + 1.0) * r3 - r1);

    return {mu2, mu3, mu4};
}

MomentSummary central_moments(const NsvhParams& p) {
    const double mean = p.terminal_mean();
    if (p.alpha() == 0.0)
        return {mean, p.sigma0() * p.sigma0() * p.t_expiry(), 0.0, 0.0};
    const CanonicalMoments cm = canonical_central_moments(p.s_var(), p.rho(), p.lambda());
    const double scale = p.sigma0() / p.alpha();
    return {mean, scale * scale * cm.mu2, cm.mu3 / std::pow(cm.mu2, 1.5),
            cm.mu4 / (cm.mu2 * cm.mu2) - 3.0};
}

namespace {

// kappa as a univariate function of w for lambda = 0, after eliminating rho
// through the skewness relation.
double f_reduced(double w, double s2) {
    const double poly = w * w * w + 3.0 * w * w + 6.0 * w + 5.0;
    const double wp2 = w + 2.0;
    return 4.0 * s2 * poly / (5.0 * wp2 * wp2) + (w - 1.0) * (1.0 + poly / 5.0);
}

// Safeguarded Newton/bisection for a monotone-increasing objective on [lo, hi]
// with g(lo) <= 0 <= g(hi). Tolerance is relative on the objective value.
double solve_monotone(const std::function<double(double)>& g, double lo, double hi,
                      double scale, double rel_tol) {
    double glo = g(lo);
    double ghi = g(hi);
    if (glo > 0.0 || ghi < 0.0)
        throw std::runtime_error("solve_monotone: root not bracketed");
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double gx = g(x);
        if (std::abs(gx) <= rel_tol * scale) return x;
        if (gx > 0.0) hi = x; else lo = x;
        const double h = std::max(1e-9, 1e-7 * std::abs(x));
        const double slope = (g(x + h) - gx) / h;
        double next = slope > 0.0 ? x - gx / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-15 * (1.0 + std::abs(x))) return next;
        x = next;
    }
    return x;
}

void check_target(const MomentSummary& t) {
    if (!(t.mu2 > 0.0)) throw infeasible_error("moment fit: mu2 must be > 0");
    if (!std::isfinite(t.skew) || !std::isfinite(t.exkurt))
        throw std::invalid_argument("moment fit: skew/exkurt must be finite");
}

NsvhParams assemble(double s_var, double rho, double lambda, double mu2_canonical,
                    const MomentSummary& target, double t_expiry) {
    const double alpha = std::sqrt(s_var / t_expiry);
    double sigma0;
    if (s_var < 1e-14) {
        // normal limit: sigma0/alpha = sqrt(mu2/mu2~) with mu2~ ~ S
        sigma0 = std::sqrt(target.mu2 / t_expiry);
        return NsvhParams::with_terminal_mean(sigma0, 0.0, rho, lambda, target.mean, t_expiry);
    }
    sigma0 = alpha * std::sqrt(target.mu2 / mu2_canonical);
    return NsvhParams::with_terminal_mean(sigma0, alpha, rho, lambda, target.mean, t_expiry);
}

}  // namespace

std::pair<double, double> bracket_w(double skew, double exkurt) {
    const double s2 = skew * skew;
    // closed-form root of s^2 = (w-1)(w+2)^2 on w >= 1
    const double wm = 2.0 * std::cosh(std::acosh(1.0 + 0.5 * s2) / 3.0) - 1.0;
    const double poly = wm * wm * wm + 3.0 * wm * wm + 6.0 * wm + 5.0;
    double wM =
        1.0 + (exkurt - 0.8 * s2 * poly / ((wm + 2.0) * (wm + 2.0))) / (1.0 + poly / 5.0);
    wM = std::max(wM, wm + 1e-12);
    while (f_reduced(wM, s2) < exkurt) wM = 1.0 + 2.0 * (wM - 1.0);
    return {wm, wM};
}

NsvhParams fit_normal_sabr(const MomentSummary& target, double t_expiry) {
    check_target(target);
    const double s = target.skew;
    const double kappa = target.exkurt;
    const double s2 = s * s;

    if (std::abs(s) < 1e-14 && std::abs(kappa) < 1e-14)
        return assemble(0.0, 0.0, 0.0, 0.0, target, t_expiry);

    const auto [wm, wM] = bracket_w(s, kappa);
    const double kappa_min = f_reduced(wm, s2);
    if (kappa_min > kappa) {
        const double s_bound = std::log(std::max(wm, 1.0 + 1e-16));
        throw infeasible_error(
            "fit_normal_sabr: target (skew, exkurt) below the attainable boundary; "
            "minimal exkurt at this skewness is " + std::to_string(kappa_min) +
            " (boundary fit: rho = " + std::to_string(s >= 0.0 ? 1.0 : -1.0) +
            ", S = " + std::to_string(s_bound) + ")",
            kappa_min);
    }

    const double w =
        solve_monotone([&](double x) { return f_reduced(x, s2) - kappa; }, wm, wM,
                       1.0 + std::abs(kappa), 1e-12);
    const double s_var = std::log(w);
    const double rho = w > 1.0 + 1e-14 ? s / ((w + 2.0) * std::sqrt(w - 1.0)) : 0.0;
    return assemble(s_var, rho, 0.0, std::expm1(s_var), target, t_expiry);
}

NsvhParams fit_su(const MomentSummary& target, double t_expiry) {
    check_target(target);
    const double s = target.skew;
    const double kappa = target.exkurt;

    if (std::abs(s) < 1e-14 && std::abs(kappa) < 1e-14)
        return assemble(0.0, 0.0, 1.0, 0.0, target, t_expiry);

    // Skewness at fixed w is odd and increasing in rho; |rho| = 1 attains
    // s^2 = (w-1)(w+2)^2, the same boundary as lambda = 0, so bracket_w's
    // lower bound carries over.
    auto skew_at = [](double w_log, double rho) {
        const CanonicalMoments cm = canonical_central_moments(w_log, rho, 1.0);
        return cm.mu3 / std::pow(cm.mu2, 1.5);
    };
    auto rho_for = [&](double s_var) {
        double lo = -1.0 + 1e-14, hi = 1.0 - 1e-14;
        if (skew_at(s_var, hi) < s) return hi;
        if (skew_at(s_var, lo) > s) return lo;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (skew_at(s_var, mid) < s) lo = mid; else hi = mid;
            if (hi - lo < 1e-13) break;
        }
        return 0.5 * (lo + hi);
    };
    auto kappa_at = [&](double s_var) {
        const double rho = rho_for(s_var);
        const CanonicalMoments cm = canonical_central_moments(s_var, rho, 1.0);
        return cm.mu4 / (cm.mu2 * cm.mu2) - 3.0;
    };

    const auto [wm, wM0] = bracket_w(s, kappa);
    const double slo = std::log(wm) * (1.0 + 1e-12) + 1e-15;
    const double kappa_min = kappa_at(slo);
    if (kappa_min > kappa)
        throw infeasible_error(
            "fit_su: target (skew, exkurt) below the attainable boundary; minimal exkurt "
            "at this skewness is " + std::to_string(kappa_min) +
            " (boundary fit: rho = " + std::to_string(s >= 0.0 ? 1.0 : -1.0) +
            ", S = " + std::to_string(slo) + ")",
            kappa_min);
    double shi = std::log(std::max(wM0, wm + 1e-9));
    while (kappa_at(shi) < kappa) shi = std::log(1.0 + 2.0 * std::expm1(shi));

    const double s_var = solve_monotone([&](double x) { return kappa_at(x) - kappa; }, slo,
                                        shi, 1.0 + std::abs(kappa), 1e-12);
    const double rho = rho_for(s_var);
    const CanonicalMoments cm = canonical_central_moments(s_var, rho, 1.0);
    return assemble(s_var, rho, 1.0, cm.mu2, target, t_expiry);
}

MomentSummary sample_moments(std::span<const double> data) {
    const std::size_t n = data.size();
    if (n < 4) throw std::invalid_argument("sample_moments: need at least 4 observations");
    double mean = 0.0;
    for (double v : data) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : data) {
        const double c = v - mean;
        const double c2 = c * c;
        m2 += c2;
        m3 += c2 * c;
        m4 += c2 * c2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (!(m2 > 0.0))
        throw infeasible_error("sample_moments: zero variance (constant data)");
    return {mean, m2, m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

}  // namespace nsvh

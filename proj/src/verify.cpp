#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "nsvh/math.hpp"
#include "nsvh/oracles.hpp"
#include "nsvh/rng.hpp"

// Self-verification suites behind `nsvh verify`: re-run the model's
// appendix-level validation without the test harness.

namespace nsvh {

namespace {

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

// Closed-form radius draws r = phi(Z', D), D = sqrt(R^2 + Z'^2); the
// brute-force Euler radius must match these in distribution.
std::vector<double> phi_radius_draws(double mu, double t, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    const double rt = std::sqrt(t);
    for (auto& v : out) {
        const double x = rng.next_normal();
        const double y = rng.next_normal();
        const double zp = mu * t + rt * rng.next_normal();
        const double d = std::sqrt((x * x + y * y) * t + zp * zp);
        v = phi_radius(zp, d);
    }
    return out;
}

}  // namespace

std::vector<CheckResult> verify_kernel_suite() {
    std::vector<CheckResult> out;

    const double p0 = heat_kernel_h3(1.0, 0.0);
    const double p0_ref = std::pow(2.0 * M_PI, -1.5) * std::exp(-0.5);
    out.push_back({"h3 kernel finite at D=0",
                   std::abs(p0 - p0_ref) <= 1e-14 * p0_ref,
                   fmt("p3(1,0) = %.15g, expected %.15g", p0, p0_ref)});

    for (double t : {0.5, 1.0, 2.0}) {
        const double hi = 2.0 * t + std::sqrt(4.0 * t * t + 200.0 * t) + 5.0;
        const double mass = integrate(
            [t](double d) {
                const double sh = std::sinh(d);
                return heat_kernel_h3(t, d) * 4.0 * M_PI * sh * sh;
            },
            0.0, hi, 1e-10);
        out.push_back({fmt("h3 radial normalization, t=%.1f", t),
                       std::abs(mass - 1.0) <= 1e-6,
                       fmt("integral = %.9f (|err| = %.2e)", mass, std::abs(mass - 1.0))});
    }

    bool monotone = true;
    for (double t : {0.5, 1.0, 2.0}) {
        double prev = heat_kernel_h3(t, 0.0);
        for (int i = 1; i <= 400; ++i) {
            const double cur = heat_kernel_h3(t, i * 0.025);
            if (cur > prev) { monotone = false; break; }
            prev = cur;
        }
    }
    out.push_back({"h3 kernel monotone decreasing in D", monotone, ""});
    return out;
}

std::vector<CheckResult> verify_euler_suite(std::uint64_t seed, int n_threads) {
    std::vector<CheckResult> out;
    const double mu = -1.0, t = 1.0;
    const std::size_t n = 100000, steps = 2000;

    auto euler = euler_hyperbolic_bm(mu, t, steps, n, seed, n_threads);

    {
        std::vector<double> r_euler(n);
        for (std::size_t i = 0; i < n; ++i) r_euler[i] = std::sqrt(euler[i].first);
        auto r_cf = phi_radius_draws(mu, t, n, seed ^ 0xFEEDF00Dull);
        const double d = ks_statistic_two(r_euler, std::move(r_cf));
        const double crit = ks_critical_two(0.01, n, n);
        out.push_back({"euler radius vs closed-form draws (two-sample KS, 1%)", d < crit,
                       fmt("KS = %.5f, critical = %.5f", d, crit)});
    }
    {
        std::vector<double> logz(n);
        for (std::size_t i = 0; i < n; ++i) logz[i] = std::log(euler[i].second);
        const double d = ks_statistic(std::move(logz), [&](double x) {
            return norm_cdf((x - mu * t) / std::sqrt(t));
        });
        const double crit = ks_critical(0.01, n);
        out.push_back({"euler volatility marginal is lognormal (KS, 1%)", d < crit,
                       fmt("KS = %.5f, critical = %.5f", d, crit)});
    }
    {
        // Conditional-distance identity: given Z, the probability transform
        // u = 1 - exp(-(D^2 - Z^2)/(2t)) of the hyperbolic distance must be
        // uniform. Checked per central Z-bin on a down-scaled path count
        // (the identity is scale-free; 1e6 paths only narrows the noise).
        const std::size_t n2 = 200000;
        auto paths = euler_hyperbolic_bm(mu, t, steps, n2, seed ^ 0xD15'7A4CEull, n_threads);
        const double z_lo = mu * t - 1.5 * std::sqrt(t), z_hi = mu * t + 1.5 * std::sqrt(t);
        constexpr int kZBins = 6, kUBins = 5;
        std::vector<std::vector<int>> hist(kZBins, std::vector<int>(kUBins, 0));
        std::vector<int> totals(kZBins, 0);
        for (const auto& [r2, zv] : paths) {
            const double z = std::log(zv);
            if (z < z_lo || z >= z_hi) continue;
            const int zb = static_cast<int>((z - z_lo) / (z_hi - z_lo) * kZBins);
            const double dist = std::acosh(0.5 * ((r2 + zv * zv + 1.0) / zv));
            const double u = -std::expm1(-(dist * dist - z * z) / (2.0 * t));
            int ub = static_cast<int>(u * kUBins);
            ub = std::clamp(ub, 0, kUBins - 1);
            ++hist[zb][ub];
            ++totals[zb];
        }
        double worst = 0.0;
        for (int zb = 0; zb < kZBins; ++zb)
            for (int ub = 0; ub < kUBins; ++ub) {
                const double frac = static_cast<double>(hist[zb][ub]) / totals[zb];
                worst = std::max(worst, std::abs(frac * kUBins - 1.0));
            }
        out.push_back({"conditional distance density given Z (10% per bin)", worst < 0.10,
                       fmt("worst relative bin deviation = %.3f", worst)});
    }
    return out;
}

std::vector<CheckResult> verify_moment_suite(std::uint64_t seed, int n_threads) {
    (void)n_threads;
    std::vector<CheckResult> out;

    {
        // MC check of the unconditional moments at mu = -1/2, S = 1.
        const double mu = -0.5, s = 1.0;
        const std::size_t n = 10'000'000;
        constexpr int kBatches = 50;
        const std::size_t per = n / kBatches;
        double b2[kBatches], b4[kBatches];
        for (int b = 0; b < kBatches; ++b) {
            Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(b));
            double s2 = 0.0, s4 = 0.0;
            for (std::size_t i = 0; i < per; ++i) {
                const double x = rng.next_normal();
                const double y = rng.next_normal();
                const double zp = mu * s + std::sqrt(s) * rng.next_normal();
                const double q = x * x + y * y;
                if (q <= 0.0) { --i; continue; }
                const double d = std::sqrt(q * s + zp * zp);
                const double draw = x / std::sqrt(q) * phi_radius(zp, d);
                const double d2 = draw * draw;
                s2 += d2;
                s4 += d2 * d2;
            }
            b2[b] = s2 / static_cast<double>(per);
            b4[b] = s4 / static_cast<double>(per);
        }
        auto batch_stats = [&](const double* v) {
            double m = 0.0;
            for (int b = 0; b < kBatches; ++b) m += v[b];
            m /= kBatches;
            double var = 0.0;
            for (int b = 0; b < kBatches; ++b) var += (v[b] - m) * (v[b] - m);
            return std::pair<double, double>(m, std::sqrt(var / (kBatches - 1.0) / kBatches));
        };
        const auto [m2, se2] = batch_stats(b2);
        const auto [m4, se4] = batch_stats(b4);
        const auto [r2, r4] = uncond_moments_x(mu, s);
        const bool ok = std::abs(m2 - r2) <= 4.0 * se2 && std::abs(m4 - r4) <= 4.0 * se4;
        out.push_back({"unconditional moments of X vs MC (4 batched SE)", ok,
                       fmt("m2 gap %.2e (4SE %.2e)", std::abs(m2 - r2), 4.0 * se2) + ", " +
                           fmt("m4 gap %.2e (4SE %.2e)", std::abs(m4 - r4), 4.0 * se4)});
    }

    {
        // Conditional second moment per Z'-bin, 1e7 draws, central 10 of 12 bins.
        const double mu = -0.5, s = 1.0;
        const std::size_t n = 10'000'000;
        const double rt = std::sqrt(s);
        constexpr int kBins = 12;
        const double lo = mu * s - 3.0 * rt, hi = mu * s + 3.0 * rt;
        std::vector<double> sum(kBins, 0.0);
        std::vector<long> cnt(kBins, 0);
        Rng rng = Rng::stream(seed, 0xC0DDull);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = rng.next_normal();
            const double y = rng.next_normal();
            const double zp = mu * s + rt * rng.next_normal();
            if (zp < lo || zp >= hi) continue;
            const double q = x * x + y * y;
            if (q <= 0.0) continue;
            const double d = std::sqrt(q * s + zp * zp);
            const double draw = x / std::sqrt(q) * phi_radius(zp, d);
            const int b = static_cast<int>((zp - lo) / (hi - lo) * kBins);
            sum[b] += draw * draw;
            ++cnt[b];
        }
        double worst = 0.0;
        for (int b = 1; b + 1 < kBins; ++b) {
            const double z_center = lo + (b + 0.5) * (hi - lo) / kBins;
            const double ref = cond_moment2(z_center / rt, s);
            const double got = sum[b] / static_cast<double>(cnt[b]);
            worst = std::max(worst, std::abs(got / ref - 1.0));
        }
        out.push_back({"conditional second moment per Z bin (5%, central 10 bins)",
                       worst < 0.05, fmt("worst relative gap = %.4f", worst)});
    }

    {
        // Quadrature assembly of the canonical moments from the conditional
        // closed forms vs the displayed formulas, 20 random parameter sets.
        Rng rng = Rng::stream(seed, 0xA55E'B1Eull);
        const double lambdas[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double lambda = lambdas[k % 5];
            const double s = 0.05 + 1.95 * rng.next_uniform();
            const double rho = -0.9 + 1.8 * rng.next_uniform();
            const CanonicalMoments a = assemble_canonical_moments(s, rho, lambda);
            const CanonicalMoments c = canonical_central_moments(s, rho, lambda);
            worst = std::max({worst, std::abs(a.mu2 / c.mu2 - 1.0),
                              std::abs(a.mu3 - c.mu3) / (std::abs(c.mu3) + 1e-30),
                              std::abs(a.mu4 / c.mu4 - 1.0)});
        }
        out.push_back({"moment assembly from conditional closed forms (1e-12)", worst <= 1e-12,
                       fmt("worst relative gap = %.3e", worst)});
    }

    {
        const bool lim_ok = std::abs(cond_m_ratio(1.3, 1e-9) - 1.0) < 1e-12 &&
                            cond_moment2(0.7, 0.0) == 0.0;
        bool jensen = true;
        for (double u : {0.0, 0.5, 1.0, 2.0})
            for (double t : {0.25, 1.0, 4.0})
                if (cond_moment4(u, t) < cond_moment2(u, t) * cond_moment2(u, t))
                    jensen = false;
        out.push_back({"conditional moment limits and Jensen bound", lim_ok && jensen, ""});
    }
    return out;
}

}  // namespace nsvh

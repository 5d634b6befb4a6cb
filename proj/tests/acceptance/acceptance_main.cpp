// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Every tolerance is pinned in code; MC legs run on fixed
// seeds so the binary is deterministic.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "nsvh/analytic_su.hpp"
#include "nsvh/calibrate.hpp"
#include "nsvh/io.hpp"
#include "nsvh/math.hpp"
#include "nsvh/mc_engine.hpp"
#include "nsvh/moments.hpp"
#include "nsvh/oracles.hpp"
#include "nsvh/risk.hpp"
#include "nsvh/sabr_normal.hpp"

using namespace nsvh;

namespace {

const std::string kData = NSVH_DATA_DIR;
constexpr int kThreads = 2;

int g_failures = 0;

void report(int idx, const std::string& label, bool pass, double seconds,
            const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n", pass ? "PASS" : "FAIL", idx,
                label.c_str(), seconds, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

template <typename F>
void run(int idx, const std::string& label, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(idx, label, pass, secs, detail);
}

std::string sig4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

bool matches_sig4(double value, double target, std::string& detail, const char* tag) {
    if (sig4(value) == sig4(target)) return true;
    detail += std::string(tag) + ": " + sig4(value) + " != " + sig4(target) + "; ";
    return false;
}

const std::vector<double> kOffsets{-0.02, -0.01, 0.0, 0.01, 0.02, 0.03};
const std::vector<double> kTab4L1{2.274e-2, 1.506e-2, 9.083e-3, 5.108e-3, 2.804e-3, 1.559e-3};
const std::vector<double> kTab4L0{2.275e-2, 1.506e-2, 9.083e-3, 5.108e-3, 2.807e-3, 1.567e-3};
const std::vector<double> kTab4L0Delta{-4.1e-5, -2.1e-5, -1.2e-5, -2.6e-5, -4.8e-5, -6.0e-5};
const std::vector<double> kTab4L1Se{1.8e-5, 1.6e-5, 1.3e-5, 1.1e-5, 9.1e-6, 7.3e-6};

// ---------------------------------------------------------------------------

bool criterion1(std::string& detail) {
    const auto p1 = load_params_json(kData + "/params_10y10y_lambda1.json");
    const auto p0 = load_params_json(kData + "/params_10y10y_lambda0.json");
    const double mean1 = p1.terminal_mean();
    const double mean0 = p0.terminal_mean();
    bool ok = true;
    for (std::size_t i = 0; i < kOffsets.size(); ++i) {
        const double v1 = su_option_price(mean1 + kOffsets[i], OptionSide::call, p1);
        ok &= matches_sig4(v1, kTab4L1[i], detail, "l1");
        const double vol = hagan_normal_vol(p0, mean0 + kOffsets[i]);
        const double v0 =
            bachelier_price(mean0, mean0 + kOffsets[i], vol, p0.t_expiry(), OptionSide::call);
        ok &= matches_sig4(v0, kTab4L0[i], detail, "l0");
    }
    return ok;
}

// one pass over shared draws accumulating every strike
std::vector<double> mc_calls_all_strikes(const NsvhParams& p, std::size_t n_triplets,
                                         std::uint64_t seed, int n_groups) {
    const std::size_t per_group = n_triplets / static_cast<std::size_t>(n_groups);
    const double s_var = p.s_var();
    const double drift = 0.5 * (p.lambda() - 1.0) * s_var;
    const double e_ls = std::exp(0.5 * p.lambda() * s_var);
    const double scale = p.sigma0() / p.alpha();
    const double mean = p.terminal_mean();
    const double rho = p.rho(), rs = p.rho_star();
    std::vector<double> strikes;
    for (double off : kOffsets) strikes.push_back(mean + off);

    std::vector<std::vector<double>> partials(static_cast<std::size_t>(n_groups),
                                              std::vector<double>(strikes.size(), 0.0));
    auto work = [&](int g0, int g1) {
        for (int g = g0; g < g1; ++g) {
            Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(g));
            auto& acc = partials[static_cast<std::size_t>(g)];
            for (std::size_t i = 0; i < per_group; ++i) {
                const auto t = draw_triplet(rng, s_var);
                const double zp = t.z + drift;
                const double d = std::sqrt(t.r_sq + zp * zp);
                const double phi = phi_radius(zp, d);
                const double common = rho * (std::exp(zp) - e_ls);
                const double f_cos = mean + scale * (common + rs * t.cos_theta * phi);
                const double f_sin = mean + scale * (common + rs * t.sin_theta * phi);
                for (std::size_t k = 0; k < strikes.size(); ++k)
                    acc[k] += 0.5 * (std::max(f_cos - strikes[k], 0.0) +
                                     std::max(f_sin - strikes[k], 0.0));
            }
        }
    };
    std::thread worker(work, 0, n_groups / 2);
    work(n_groups / 2, n_groups);
    worker.join();

    std::vector<double> out(strikes.size(), 0.0);
    for (int g = 0; g < n_groups; ++g)
        for (std::size_t k = 0; k < strikes.size(); ++k)
            out[k] += partials[static_cast<std::size_t>(g)][k];
    for (auto& v : out) v /= static_cast<double>(per_group * static_cast<std::size_t>(n_groups));
    return out;
}

bool criterion2(std::string& detail) {
    bool ok = true;
    {
        const auto p1 = load_params_json(kData + "/params_10y10y_lambda1.json");
        const auto mc = mc_calls_all_strikes(p1, 1'000'000, 424242, 50);
        for (std::size_t i = 0; i < kOffsets.size(); ++i) {
            const double ana =
                su_option_price(p1.terminal_mean() + kOffsets[i], OptionSide::call, p1);
            const double gap = std::abs(mc[i] - ana);
            if (gap > 3.0 * kTab4L1Se[i]) {
                ok = false;
                char buf[96];
                std::snprintf(buf, sizeof buf, "l1 offset %d: |mc-ana| %.2e > %.2e; ",
                              static_cast<int>(kOffsets[i] * 1e4), gap, 3.0 * kTab4L1Se[i]);
                detail += buf;
            }
        }
    }
    {
        const auto p0 = load_params_json(kData + "/params_10y10y_lambda0.json");
        const auto mc = mc_calls_all_strikes(p0, 40'000'000, 777001, 80);
        for (std::size_t i = 0; i < kOffsets.size(); ++i) {
            const double vol = hagan_normal_vol(p0, p0.terminal_mean() + kOffsets[i]);
            const double ana = bachelier_price(p0.terminal_mean(),
                                               p0.terminal_mean() + kOffsets[i], vol,
                                               p0.t_expiry(), OptionSide::call);
            const double delta = mc[i] - ana;
            const double ratio = delta / kTab4L0Delta[i];
            if (!(delta < 0.0) || ratio < 0.5 || ratio > 2.0) {
                ok = false;
                char buf[96];
                std::snprintf(buf, sizeof buf, "l0 offset %d: delta %.2e ratio %.2f; ",
                              static_cast<int>(kOffsets[i] * 1e4), delta, ratio);
                detail += buf;
            }
        }
    }
    return ok;
}

bool criterion3(std::string& detail) {
    struct Row {
        const char* file;
        double mu2, skew, kurt;
        double l0[3], l1[3];  // rho, alpha, sigma0 in percent
    };
    const Row rows[2] = {
        {"/sp500_returns.csv", 1.5154, -0.0933, 11.4454,
         {-2.042, 88.533, 99.915}, {-1.725, 84.587, 82.538}},
        {"/csi300_returns.csv", 3.4092, -0.5075, 3.3348,
         {-20.454, 63.782, 166.213}, {-18.539, 61.853, 150.167}},
    };
    bool ok = true;
    for (const auto& row : rows) {
        const auto data = load_returns_csv(kData + row.file);
        const auto mom = sample_moments(data);
        char got[64], want[64];
        std::snprintf(got, sizeof got, "%.4f %.4f %.4f", mom.mu2, mom.skew, mom.exkurt);
        std::snprintf(want, sizeof want, "%.4f %.4f %.4f", row.mu2, row.skew, row.kurt);
        if (std::string(got) != want) {
            ok = false;
            detail += std::string(row.file) + " moments " + got + " != " + want + "; ";
        }
        const auto f0 = fit_normal_sabr(mom, 1.0);
        const auto f1 = fit_su(mom, 1.0);
        const double fits[2][3] = {{f0.rho(), f0.alpha(), f0.sigma0()},
                                   {f1.rho(), f1.alpha(), f1.sigma0()}};
        for (int lam = 0; lam < 2; ++lam)
            for (int j = 0; j < 3; ++j) {
                const double got_pct = fits[lam][j] * 100.0;
                const double want_pct = lam == 0 ? row.l0[j] : row.l1[j];
                if (std::abs(got_pct - want_pct) > 1e-3) {
                    ok = false;
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "%s l%d[%d] %.4f != %.3f; ", row.file, lam,
                                  j, got_pct, want_pct);
                    detail += buf;
                }
            }
    }
    return ok;
}

bool criterion4(std::string& detail) {
    struct Row {
        const char* file;
        double l1[4];  // VaR5, VaR1, ES5, ES1
        double l0[4];
        double normal[4];
        double sample[4];
    };
    const Row rows[2] = {
        {"/sp500_returns.csv",
         {-1.824, -3.432, -2.872, -4.820},
         {-1.825, -3.405, -2.857, -4.781},
         {-1.997, -2.836, -2.511, -3.253},
         {-1.832, -3.615, -3.042, -5.309}},
        {"/csi300_returns.csv",
         {-3.036, -5.246, -4.440, -6.857},
         {-3.032, -5.234, -4.433, -6.849},
         {-2.995, -4.254, -3.767, -4.879},
         {-3.007, -5.732, -4.745, -7.298}},
    };
    const double ps[2] = {0.05, 0.01};
    bool ok = true;
    std::uint64_t seed = 90210;
    for (const auto& row : rows) {
        const auto data = load_returns_csv(kData + row.file);
        const auto mom = sample_moments(data);
        const auto fit1 = fit_su(mom, 1.0);
        const auto fit0 = fit_normal_sabr(mom, 1.0);
        for (int ip = 0; ip < 2; ++ip) {
            const double p = ps[ip];
            // lambda = 1 closed forms, +-0.001
            const double v1 = var_closed(fit1, p), e1 = es_closed(fit1, p);
            if (std::abs(v1 - row.l1[ip]) > 1e-3 || std::abs(e1 - row.l1[2 + ip]) > 1e-3) {
                ok = false;
                char buf[96];
                std::snprintf(buf, sizeof buf, "%s l1 p=%.2f: %.4f/%.4f; ", row.file, p, v1,
                              e1);
                detail += buf;
            }
            // normal columns, +-0.001
            const double q = norm_quantile(p);
            const double nv = mom.mean + std::sqrt(mom.mu2) * q;
            const double ne = mom.mean - std::sqrt(mom.mu2) * norm_pdf(q) / p;
            if (std::abs(nv - row.normal[ip]) > 1e-3 ||
                std::abs(ne - row.normal[2 + ip]) > 1e-3) {
                ok = false;
                detail += std::string(row.file) + " normal column; ";
            }
            // sample columns, +-0.02
            const auto emp = empirical_var_es(data, p);
            if (std::abs(emp.var - row.sample[ip]) > 0.02 ||
                std::abs(emp.es - row.sample[2 + ip]) > 0.02) {
                ok = false;
                detail += std::string(row.file) + " sample column; ";
            }
        }
        // lambda = 0 by simulation: 1e7 samples, 3 bootstrap SEs
        for (int ip = 0; ip < 2; ++ip) {
            const double p = ps[ip];
            const auto rep = var_es_mc(fit0, p, 5'000'000, seed += 13, 50, kThreads);
            if (std::abs(rep.var - row.l0[ip]) > 3.0 * rep.std_err_var ||
                std::abs(rep.es - row.l0[2 + ip]) > 3.0 * rep.std_err_es) {
                ok = false;
                char buf[128];
                std::snprintf(buf, sizeof buf,
                              "%s l0 p=%.2f: var %.4f (ref %.3f, 3se %.4f) es %.4f "
                              "(ref %.3f, 3se %.4f); ",
                              row.file, p, rep.var, row.l0[ip], 3.0 * rep.std_err_var, rep.es,
                              row.l0[2 + ip], 3.0 * rep.std_err_es);
                detail += buf;
            }
        }
    }
    return ok;
}

bool criterion5(std::string& detail) {
    bool ok = true;
    {
        // (a) lambda = 1 empirical CDF vs the closed form, KS at 1%, 1e6 samples
        const auto p = load_params_json(kData + "/params_10y10y_lambda1.json");
        const auto draws = terminal_samples(p, 1'000'000, 555001, ProjectionMode::independent);
        std::vector<double> f(draws.size());
        for (std::size_t i = 0; i < draws.size(); ++i) f[i] = draws[i].f_t;
        const double d = ks_statistic(f, [&](double x) { return su_cdf(x, p); });
        const double crit = ks_critical(0.01, f.size());
        if (d >= crit) {
            ok = false;
            char buf[64];
            std::snprintf(buf, sizeof buf, "(a) KS %.5f >= %.5f; ", d, crit);
            detail += buf;
        }
    }
    {
        // (b) one-step vs four-step terminal distributions, two-sample KS at 1%
        const auto p = NsvhParams::with_terminal_mean(0.0060934, 0.22196, 0.01580, 1.0,
                                                      0.030673, 10.0);
        const std::size_t n = 100'000;
        const auto one = simulate_paths(p, {10.0}, n, 616001, ProjectionMode::independent);
        const auto four = simulate_paths(p, {2.5, 5.0, 7.5, 10.0}, n, 616002,
                                         ProjectionMode::independent);
        std::vector<double> f1(n), f4(n);
        for (std::size_t i = 0; i < n; ++i) {
            f1[i] = one.at(i, 0).f_t;
            f4[i] = four.at(i, 3).f_t;
        }
        const double d = ks_statistic_two(f1, f4);
        const double crit = ks_critical_two(0.01, n, n);
        if (d >= crit) {
            ok = false;
            char buf[64];
            std::snprintf(buf, sizeof buf, "(b) KS %.5f >= %.5f; ", d, crit);
            detail += buf;
        }
    }
    {
        // (c) MC central moments vs the closed forms, 30 random sets, 4 batched SEs.
        // The relative standard error of the k-th central-moment estimator grows
        // like sqrt(w^{k^2} / n) (mu_{2k}/mu_k^2 = O(w^{k^2})), so at n = 1e7
        // samples the comparison only carries information while w^{k^2} <= n/100:
        // mu3 up to S ~ 1.28 and mu4 up to S ~ 0.72. Beyond that the estimator
        // sits outside the CLT regime (most of the moment mass is in draws that
        // never appear in 1e7 samples) and no tolerance makes the check
        // meaningful; mu2 stays testable across the whole S <= 3 range.
        const double kLogBudget = std::log(1e7 / 100.0);
        Rng pick(24601);
        const double lambdas[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
        for (int set = 0; set < 30; ++set) {
            const double lambda = lambdas[set % 5];
            const double s_var = 0.05 + 2.95 * pick.next_uniform();
            const double rho = -0.9 + 1.8 * pick.next_uniform();
            const double alpha = std::sqrt(s_var);
            const auto p = NsvhParams::with_terminal_mean(alpha, alpha, rho, lambda, 0.0, 1.0);
            const auto ref = central_moments(p);
            const double mu3 = ref.skew * std::pow(ref.mu2, 1.5);
            const double mu4 = (ref.exkurt + 3.0) * ref.mu2 * ref.mu2;
            const bool test_mu3 = 9.0 * s_var <= kLogBudget;
            const bool test_mu4 = 16.0 * s_var <= kLogBudget;

            constexpr int kBatches = 50;
            constexpr std::size_t kPer = 100'000;  // triplets per batch -> 1e7 samples total
            double b2[kBatches], b3[kBatches], b4[kBatches];
            std::vector<int> batch_ids(kBatches);
            for (int b = 0; b < kBatches; ++b) batch_ids[b] = b;
            auto work = [&](int lo, int hi) {
                for (int b = lo; b < hi; ++b) {
                    const auto draws = terminal_samples(
                        p, kPer, 333000 + 1000 * static_cast<std::uint64_t>(set) + b,
                        ProjectionMode::paired);
                    double s2 = 0, s3 = 0, s4 = 0;
                    for (const auto& dr : draws) {
                        const double c = dr.f_t - ref.mean;
                        const double c2 = c * c;
                        s2 += c2;
                        s3 += c2 * c;
                        s4 += c2 * c2;
                    }
                    const double nn = static_cast<double>(draws.size());
                    b2[b] = s2 / nn;
                    b3[b] = s3 / nn;
                    b4[b] = s4 / nn;
                }
            };
            std::thread worker(work, 0, kBatches / 2);
            work(kBatches / 2, kBatches);
            worker.join();

            auto batch_ok = [&](const double* v, double target) {
                double m = 0;
                for (int b = 0; b < kBatches; ++b) m += v[b];
                m /= kBatches;
                double var = 0;
                for (int b = 0; b < kBatches; ++b) var += (v[b] - m) * (v[b] - m);
                const double se = std::sqrt(var / (kBatches - 1.0) / kBatches);
                return std::abs(m - target) <= 4.0 * se;
            };
            if (!batch_ok(b2, ref.mu2) || (test_mu3 && !batch_ok(b3, mu3)) ||
                (test_mu4 && !batch_ok(b4, mu4))) {
                ok = false;
                char buf[96];
                std::snprintf(buf, sizeof buf, "(c) set %d (lambda %.1f S %.2f rho %.2f); ",
                              set, lambda, s_var, rho);
                detail += buf;
            }
        }
    }
    return ok;
}

bool criterion6(std::string& detail) {
    bool ok = true;
    for (const auto& c : verify_kernel_suite())
        if (!c.pass) {
            ok = false;
            detail += "[kernel] " + c.name + "; ";
        }
    for (const auto& c : verify_euler_suite(181818, kThreads))
        if (!c.pass) {
            ok = false;
            detail += "[euler] " + c.name + ": " + c.detail + "; ";
        }
    for (const auto& c : verify_moment_suite(282828, kThreads))
        if (!c.pass) {
            ok = false;
            detail += "[moments] " + c.name + ": " + c.detail + "; ";
        }
    return ok;
}

bool criterion7(std::string& detail) {
    bool ok = true;
    // moment-matching round trips on feasible grids
    for (double lambda : {0.0, 1.0}) {
        for (double s_var : {0.1, 0.5, 1.0, 2.0}) {
            for (double rho : {-0.7, -0.2, 0.0, 0.4, 0.8}) {
                const double alpha = std::sqrt(s_var / 2.0);
                const auto p = NsvhParams::with_terminal_mean(0.9 * alpha, alpha, rho, lambda,
                                                              0.03, 2.0);
                const auto target = central_moments(p);
                const auto fit =
                    lambda == 0.0 ? fit_normal_sabr(target, 2.0) : fit_su(target, 2.0);
                const double err = std::max({std::abs(fit.s_var() / s_var - 1.0),
                                             std::abs(fit.rho() - rho),
                                             std::abs(fit.sigma0() / p.sigma0() - 1.0)});
                if (err > 1e-8) {
                    ok = false;
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "fit l%.0f S=%.1f rho=%.1f err %.1e; ",
                                  lambda, s_var, rho, err);
                    detail += buf;
                }
            }
        }
    }
    // calibration round trips on all four published parameter sets
    struct Set {
        const char* file;
        double lambda;
    };
    const Set sets[4] = {{"/params_1y1y_lambda0.json", 0.0},
                         {"/params_1y1y_lambda1.json", 1.0},
                         {"/params_10y10y_lambda0.json", 0.0},
                         {"/params_10y10y_lambda1.json", 1.0}};
    for (const auto& s : sets) {
        const auto p = load_params_json(kData + s.file);
        const double fwd = p.terminal_mean();
        std::vector<SmileQuote> qs;
        for (double off : {-0.01, 0.0, 0.01}) {
            const double k = fwd + off;
            double vol;
            if (s.lambda == 0.0) {
                vol = hagan_normal_vol(p, k);
            } else {
                const OptionSide side = off >= 0.0 ? OptionSide::call : OptionSide::put;
                vol = implied_normal_vol(su_option_price(k, side, p), fwd, k, p.t_expiry(),
                                         side);
            }
            qs.push_back({off, QuoteKind::normal_vol, vol});
        }
        const auto res = calibrate_smile(qs, fwd, p.t_expiry(), s.lambda);
        const double err =
            res.converged ? std::max({std::abs(res.params.sigma0() - p.sigma0()),
                                      std::abs(res.params.alpha() - p.alpha()),
                                      std::abs(res.params.rho() - p.rho())})
                          : 1.0;
        if (err > 1e-6) {
            ok = false;
            char buf[96];
            std::snprintf(buf, sizeof buf, "calibration %s err %.1e; ", s.file, err);
            detail += buf;
        }
    }
    return ok;
}

}  // namespace

int main() {
    std::printf("acceptance suite (threads: %d)\n", kThreads);
    run(1, "10y10y analytic prices match the benchmark table to 4 significant digits",
        criterion1);
    run(2, "exact MC reproduces the benchmark prices and the approximation bias", criterion2);
    run(3, "sample moments and both fitted parameter triples match the benchmarks", criterion3);
    run(4, "closed-form, MC, normal and sample risk measures match the benchmarks", criterion4);
    run(5, "exactness: KS vs closed form, step-count invariance, moment agreement",
        criterion5);
    run(6, "appendix oracles: Euler bridge, conditional moments, heat kernel", criterion6);
    run(7, "moment-matching and calibration round trips", criterion7);
    if (g_failures == 0) std::printf("all criteria passed\n");
    else std::printf("%d criteria FAILED\n", g_failures);
    return g_failures;
}

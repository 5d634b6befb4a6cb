#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nsvh/analytic_su.hpp"
#include "nsvh/mc_engine.hpp"
#include "nsvh/moments.hpp"
#include "nsvh/oracles.hpp"

using namespace nsvh;

TEST_SUITE_BEGIN("mc_engine");

TEST_CASE("triplet mapping on unit inputs") {
    const auto t = triplet_from_normals(1.0, 0.0, 0.0, 1.0);
    CHECK(t.z == 0.0);
    CHECK(t.r_sq == 1.0);
    CHECK(t.cos_theta == 1.0);
    CHECK(t.sin_theta == 0.0);
    CHECK_THROWS_AS(triplet_from_normals(0.0, 0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("triplet statistics") {
    Rng rng(99);
    const std::size_t n = 1'000'000;
    double sum_cos = 0.0, sum_rsq = 0.0, worst_unit = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto t = draw_triplet(rng, 2.0);
        sum_cos += t.cos_theta;
        sum_rsq += t.r_sq;
        worst_unit = std::max(worst_unit,
                              std::abs(t.cos_theta * t.cos_theta +
                                       t.sin_theta * t.sin_theta - 1.0));
    }
    CHECK(std::abs(sum_cos / n) < 3e-3);              // E[cos] = 0
    CHECK(std::abs(sum_rsq / n - 4.0) < 0.012);       // E[R^2] = 2 S at S = 2
    CHECK(worst_unit < 1e-12);
}

TEST_CASE("terminal samples: degenerate alpha") {
    const NsvhParams p(0.02, 0.0, 0.3, 1.0, 0.05, 2.0);
    const auto draws = terminal_samples(p, 500'000, 11);
    double sum = 0.0, sum2 = 0.0;
    for (const auto& d : draws) {
        sum += d.f_t;
        sum2 += d.f_t * d.f_t;
        CHECK(d.sigma_t == 0.02);
    }
    const double n = static_cast<double>(draws.size());
    const double var = sum2 / n - (sum / n) * (sum / n);
    const double expect = 0.02 * 0.02 * 2.0;
    CHECK(std::abs(sum / n - 0.05) < 3.0 * std::sqrt(expect / n));
    CHECK(std::abs(var - expect) < 3.0 * std::sqrt(2.0) * expect / 1e3);
}

TEST_CASE("terminal samples: determinism and modes") {
    const auto p = NsvhParams::with_terminal_mean(0.006, 0.22, 0.15, 1.0, 0.03, 10.0);
    const auto a = terminal_samples(p, 1000, 5);
    const auto b = terminal_samples(p, 1000, 5);
    REQUIRE(a.size() == 2000);
    bool identical = true;
    for (std::size_t i = 0; i < a.size(); ++i)
        identical = identical && a[i].f_t == b[i].f_t && a[i].sigma_t == b[i].sigma_t;
    CHECK(identical);
    CHECK(terminal_samples(p, 1000, 5, ProjectionMode::independent).size() == 1000);
    for (const auto& d : a) CHECK(d.sigma_t > 0.0);
}

TEST_CASE("lambda=1 terminal distribution matches the closed-form CDF") {
    const auto p = NsvhParams::with_terminal_mean(0.0060934, 0.22196, 0.01580, 1.0, 0.030673,
                                                  10.0);
    const auto draws = terminal_samples(p, 200'000, 31415, ProjectionMode::independent);
    std::vector<double> f(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) f[i] = draws[i].f_t;
    const double d = ks_statistic(f, [&](double x) { return su_cdf(x, p); });
    CHECK(d < ks_critical(0.01, f.size()));
}

TEST_CASE("single-step path equals a terminal draw") {
    for (double lambda : {0.0, 1.0, -0.5}) {
        const auto p = NsvhParams::with_terminal_mean(0.005, 0.6, 0.3, lambda, 0.02, 1.0);
        const auto paths = simulate_paths(p, {1.0}, 2000, 77);
        const auto terms = terminal_samples(p, 1000, 77);
        for (std::size_t i = 0; i < 2000; ++i) {
            CHECK(paths.at(i, 0).f_t == doctest::Approx(terms[i].f_t).epsilon(1e-12));
            CHECK(paths.at(i, 0).sigma_t == doctest::Approx(terms[i].sigma_t).epsilon(1e-12));
        }
    }
}

TEST_CASE("distinct stream indices are uncorrelated") {
    Rng a = Rng::stream(12345, 0);
    Rng b = Rng::stream(12345, 1);
    const std::size_t n = 200'000;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = a.next_normal();
        const double y = b.next_normal();
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("multi-step exactness and martingale checks") {
    const auto p = NsvhParams::with_terminal_mean(0.005, 0.6, -0.2, 0.0, 0.02, 1.0);
    const std::size_t n = 40'000;
    const auto one = simulate_paths(p, {1.0}, n, 123, ProjectionMode::independent);
    const auto four =
        simulate_paths(p, {0.25, 0.5, 0.75, 1.0}, n, 456, ProjectionMode::independent);
    std::vector<double> f1(n), f4(n);
    double mean4 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        f1[i] = one.at(i, 0).f_t;
        f4[i] = four.at(i, 3).f_t;
        mean4 += f4[i];
    }
    mean4 /= static_cast<double>(n);
    const double d = ks_statistic_two(f1, f4);
    CHECK(d < ks_critical_two(0.01, n, n));

    // lambda = 0 is a martingale: E[F_T] = f0
    const auto mom = central_moments(p);
    CHECK(std::abs(mean4 - p.f0()) < 3.0 * std::sqrt(mom.mu2 / static_cast<double>(n)));

    // lambda = 1 path mean reproduces the terminal mean
    const auto p1 = NsvhParams::with_terminal_mean(0.005, 0.6, 0.25, 1.0, 0.02, 1.0);
    const auto paths1 = simulate_paths(p1, {0.5, 1.0}, n, 789, ProjectionMode::independent);
    double mean1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean1 += paths1.at(i, 1).f_t;
    mean1 /= static_cast<double>(n);
    const auto mom1 = central_moments(p1);
    CHECK(std::abs(mean1 - mom1.mean) < 3.0 * std::sqrt(mom1.mu2 / static_cast<double>(n)));
}

TEST_CASE("grid validation") {
    const auto p = NsvhParams::with_terminal_mean(0.005, 0.6, 0.3, 0.0, 0.02, 1.0);
    CHECK_THROWS_AS(simulate_paths(p, {}, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_paths(p, {0.5, 0.5}, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_paths(p, {-0.1, 0.5}, 10, 1), std::invalid_argument);
}

TEST_CASE("conditional second moment of the scaled draws per Z bin") {
    // E[(rho*^{-1}(F~ - rho(e^{Z'} - e^{lambda S/2})))^2 | Z'] = cond_moment2
    const double s_var = 1.0, lambda = 0.0;
    const double mu = 0.5 * (lambda - 1.0);
    Rng rng(2024);
    constexpr int kBins = 12;
    const double lo = mu * s_var - 3.0, hi = mu * s_var + 3.0;
    std::vector<double> sum(kBins, 0.0);
    std::vector<long> cnt(kBins, 0);
    for (std::size_t i = 0; i < 2'000'000; ++i) {
        const auto t = draw_triplet(rng, s_var);
        const double zp = t.z + mu * s_var;
        if (zp < lo || zp >= hi) continue;
        const double d = std::sqrt(t.r_sq + zp * zp);
        const double draw = t.cos_theta * phi_radius(zp, d);
        const int b = static_cast<int>((zp - lo) / (hi - lo) * kBins);
        sum[b] += draw * draw;
        ++cnt[b];
    }
    for (int b = 1; b + 1 < kBins; ++b) {
        const double center = lo + (b + 0.5) * (hi - lo) / kBins;
        const double ref = cond_moment2(center, s_var);
        CHECK(sum[b] / static_cast<double>(cnt[b]) == doctest::Approx(ref).epsilon(0.08));
    }
}

TEST_CASE("price_option_mc") {
    const auto p = NsvhParams::with_terminal_mean(0.0060934, 0.22196, 0.01580, 1.0, 0.030673,
                                                  10.0);
    const double k = 0.030673;
    const auto est = price_option_mc(p, k, OptionSide::put, 200'000, 50, 7);
    const double exact = su_option_price(k, OptionSide::put, p);
    CHECK(std::abs(est.value - exact) < 3.0 * est.std_err);
    CHECK(est.std_err > 0.0);
    CHECK(est.n_groups == 50);

    // parity under the simulated measure: same seed shares every draw
    const auto c = price_option_mc(p, k + 0.01, OptionSide::call, 100'000, 50, 9);
    const auto pt = price_option_mc(p, k + 0.01, OptionSide::put, 100'000, 50, 9);
    const double mean_gap = c.value - pt.value - (p.terminal_mean() - (k + 0.01));
    CHECK(std::abs(mean_gap) < 3.0 * std::sqrt(c.std_err * c.std_err + pt.std_err * pt.std_err));

    // thread count does not change the result
    const auto t1 = price_option_mc(p, k, OptionSide::put, 100'000, 50, 99, 1);
    const auto t2 = price_option_mc(p, k, OptionSide::put, 100'000, 50, 99, 2);
    CHECK(t1.value == t2.value);
    CHECK(t1.std_err == t2.std_err);

    CHECK_THROWS_AS(price_option_mc(p, k, OptionSide::put, 100, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(price_option_mc(p, k, OptionSide::put, 100, 1, 1), std::invalid_argument);
}

TEST_CASE("near-degenerate volatility returns intrinsic with zero error") {
    const NsvhParams p(1e-12, 0.2, 0.1, 1.0, 0.03, 1.0);
    const auto est = price_option_mc(p, 0.02, OptionSide::call, 1000, 10, 3);
    CHECK(est.value == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(est.std_err < 1e-9);
}

TEST_SUITE_END();

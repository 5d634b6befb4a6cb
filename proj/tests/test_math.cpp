#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nsvh/math.hpp"
#include "nsvh/params.hpp"

using namespace nsvh;

TEST_SUITE_BEGIN("math");

TEST_CASE("parameter validation and derived quantities") {
    CHECK_THROWS_AS(NsvhParams(-0.1, 0.2, 0.0, 1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(NsvhParams(0.1, -0.2, 0.0, 1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(NsvhParams(0.1, 0.2, 1.5, 1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(NsvhParams(0.1, 0.2, 0.0, 1.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(NsvhParams(0.1, 8.0, 0.0, 1.0, 0.0, 1.0), std::invalid_argument);  // S cap

    const NsvhParams p(0.2, 0.5, -0.3, 1.0, 0.02, 2.0);
    CHECK(p.s_var() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p.w() == doctest::Approx(std::exp(0.5)).epsilon(1e-15));
    CHECK(p.rho_star() == doctest::Approx(std::sqrt(0.91)).epsilon(1e-15));
}

TEST_CASE("terminal mean reduces to f0 exactly at rho = 0 or lambda = 0") {
    CHECK(NsvhParams(0.2, 0.5, 0.0, 1.0, 0.02, 2.0).terminal_mean() == 0.02);
    CHECK(NsvhParams(0.2, 0.5, -0.3, 0.0, 0.02, 2.0).terminal_mean() == 0.02);
    CHECK(NsvhParams(0.2, 0.0, 0.4, 1.0, 0.02, 2.0).terminal_mean() == 0.02);  // alpha = 0
    // general case agrees with the raw expression
    const NsvhParams p(0.2, 0.5, -0.3, 0.7, 0.02, 2.0);
    const double raw = 0.02 + 0.2 * -0.3 / 0.5 * std::expm1(0.5 * 0.7 * p.s_var());
    CHECK(p.terminal_mean() == doctest::Approx(raw).epsilon(1e-14));
}

TEST_CASE("canonical parameters round trip") {
    const NsvhParams p(0.2, 0.5, -0.3, 0.7, 0.02, 2.0);
    const auto c = CanonicalParams::from(p);
    CHECK(c.s_var == p.s_var());
    CHECK(c.w() >= 1.0);
    const auto back = c.to_nsvh(p.sigma0(), p.alpha(), p.f0(), p.t_expiry());
    CHECK(back.rho() == p.rho());
    CHECK(back.lambda() == p.lambda());
    CHECK(back.s_var() == doctest::Approx(c.s_var).epsilon(1e-15));
    CHECK_THROWS_AS(c.to_nsvh(0.2, 0.9, 0.02, 2.0), std::invalid_argument);  // inconsistent
}

TEST_CASE("stable_exp_ratio limit and reference values") {
    CHECK(stable_exp_ratio(0.0, 2.0) == 2.0);
    CHECK(stable_exp_ratio(1.0, 0.0) == 0.0);
    // (e^2 - 1)/2 at a well-conditioned argument
    CHECK(stable_exp_ratio(2.0, 1.0) == doctest::Approx(3.1945280494653251).epsilon(1e-14));
    // large |k s| still within the stated domain
    CHECK(stable_exp_ratio(25.0, 2.0) ==
          doctest::Approx(std::expm1(50.0) / 25.0).epsilon(1e-13));
    CHECK(stable_exp_ratio(-30.0, 1.0) ==
          doctest::Approx(std::expm1(-30.0) / -30.0).epsilon(1e-13));
}

TEST_CASE("stable_exp_ratio is continuous in k at 0") {
    for (double s : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        for (double k : {1e-9, -1e-9}) {
            const double expect = s * (1.0 + 0.5 * k * s);
            CHECK(std::abs(stable_exp_ratio(k, s) - expect) <= 1e-12 * s);
        }
    }
}

TEST_CASE("stable_exp_ratio accuracy across the series switch") {
    // compare both branches against a long-double direct evaluation away
    // from the cancellation region
    for (double u : {2e-5, 9e-6, 1e-4, 5e-6}) {
        const double s = 1.7;
        const double k = u / s;
        const long double direct = std::expm1l((long double)k * s) / (long double)k;
        CHECK(std::abs(stable_exp_ratio(k, s) - (double)direct) <=
              1e-13 * std::abs((double)direct));
    }
}

TEST_CASE("phi_radius values and domain") {
    CHECK(phi_radius(0.0, 0.0) == 0.0);
    CHECK(phi_radius(1.3, 1.3) == 0.0);
    CHECK(phi_radius(0.0, 1.0) == doctest::Approx(1.0421906109874947).epsilon(1e-14));
    CHECK_THROWS_AS(phi_radius(1.0, 0.5), std::domain_error);
    // tiny negative radicand from roundoff clamps to zero
    CHECK(phi_radius(0.7, 0.7 - 1e-13) == 0.0);
}

TEST_CASE("phi_radius squared identity") {
    for (double z : {-2.0, -0.5, 0.0, 0.3, 1.7}) {
        for (double bump : {1e-8, 1e-3, 0.1, 1.0, 4.0}) {
            const double d = std::abs(z) + bump;
            const double lhs = phi_radius(z, d) * phi_radius(z, d);
            const double rhs = std::exp(z) * (2.0 * std::cosh(d) - 2.0 * std::cosh(z));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("normal cdf and quantile") {
    CHECK(norm_cdf(0.0) == 0.5);
    CHECK(norm_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-15));
    CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(norm_quantile(0.05) == doctest::Approx(-1.6448536269514722).epsilon(1e-12));
    CHECK_THROWS_AS(norm_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(norm_quantile(1.0), std::domain_error);

    for (double x = -6.0; x <= 6.0; x += 0.25)
        CHECK(std::abs(norm_quantile(norm_cdf(x)) - x) <= 1e-8);

    CHECK(norm_pdf(0.0) == doctest::Approx(kInvSqrtTwoPi).epsilon(1e-16));
}

TEST_SUITE_END();

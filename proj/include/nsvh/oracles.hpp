#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nsvh/moments.hpp"

namespace nsvh {

// Independent validation machinery: the H^3 heat kernel, a brute-force
// Euler discretization of drifted hyperbolic Brownian motion, and the
// conditional/unconditional moment closed forms of the time-changed process.
// These live in the shipped library so `nsvh verify` can re-run the checks
// without a test harness.

// p3(t, D) = (2 pi t)^{-3/2} (D / sinh D) e^{-(t^2 + D^2)/(2t)}, finite at D = 0.
double heat_kernel_h3(double t, double d);

// Euler-Maruyama paths of
//   dx = z dX,  dy = z dY,  dz/z = dZ + (1/2 + mu) dt,  (x,y,z)(0) = (0,0,1);
// returns (x^2 + y^2, z) per path at t_end. Parallel across paths with
// independent streams (seed XOR group).
std::vector<std::pair<double, double>> euler_hyperbolic_bm(double mu, double t_end,
                                                           std::size_t n_steps,
                                                           std::size_t n_paths,
                                                           std::uint64_t seed,
                                                           int n_threads = 1);

// E[X^2 | Z] and E[X^4 | Z] of the time-changed Brownian motion, with
// u = |Z^mu_T| / sqrt(T):
//   E[X^2|Z] = T e^{u sqrt(T)} m(u, sqrt(T))
//   E[X^4|Z] = 3 T^2 e^{2u sqrt(T)} (m(u, 2 sqrt(T)) - cosh(u sqrt(T)) m(u, sqrt(T)))
//   m(u, eps) = (N(u+eps) - N(u-eps)) / (2 eps e^{-eps^2/2} n(u))
double cond_moment2(double u_drifted, double t_end);
double cond_moment4(double u_drifted, double t_end);
double cond_m_ratio(double u, double eps);  // m(u, eps), -> 1 as eps -> 0

// Unconditional (m2, m4) of X over the exponential functional, drift mu:
//   m2 = (w^{2+2mu} - 1)/(2+2mu), w = e^S, ratios via stable_exp_ratio.
std::pair<double, double> uncond_moments_x(double mu, double s_var);

// Assembles the canonical central moments from the conditional-moment
// closed forms by quadrature over the terminal log-volatility draw; an
// independent route to canonical_central_moments.
CanonicalMoments assemble_canonical_moments(double s_var, double rho, double lambda);

// Adaptive Simpson quadrature used by the normalization checks.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol = 1e-10, int max_depth = 48);

// --- distribution-test helpers -------------------------------------------

// One-sample Kolmogorov-Smirnov statistic against a CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic_two(std::vector<double> a, std::vector<double> b);
// Asymptotic critical values: c(alpha) / sqrt(n), c(alpha) sqrt((n+m)/(n m)).
double ks_critical(double alpha, std::size_t n);
double ks_critical_two(double alpha, std::size_t n, std::size_t m);

// --- self-verification report (exposed via `nsvh verify`) ----------------

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<CheckResult> verify_kernel_suite();
std::vector<CheckResult> verify_euler_suite(std::uint64_t seed, int n_threads = 1);
std::vector<CheckResult> verify_moment_suite(std::uint64_t seed, int n_threads = 1);

}  // namespace nsvh

#pragma once

#include <span>
#include <utility>

#include "nsvh/params.hpp"

namespace nsvh {

struct MomentSummary {
    double mean;    // price units
    double mu2;     // central variance, > 0
    double skew;    // dimensionless
    double exkurt;  // excess kurtosis
};

// Canonical central moments (mu2~, mu3~, mu4~) of the dimensionless
// distribution for arbitrary lambda. Every (w^{k+lambda}-1)/(k+lambda) term
// goes through stable_exp_ratio, so lambda in {-1,-3,-5} are plain points.
struct CanonicalMoments {
    double mu2, mu3, mu4;
};
CanonicalMoments canonical_central_moments(double s_var, double rho, double lambda);

// Moments in price units: mean = E[F_T], mu_n = (sigma0/alpha)^n mu_n~.
// alpha = 0 collapses to the normal limit (mu2 = sigma0^2 T, skew = exkurt = 0).
MomentSummary central_moments(const NsvhParams& params);

// Root bracket for the lambda = 0 reduced moment match. w_m solves
// s^2 = (w-1)(w+2)^2 exactly (the |rho| = 1 boundary); w_M starts from the
// plug-in bound and is doubled geometrically until f(w_M) >= kappa.
std::pair<double, double> bracket_w(double skew, double exkurt);

// Reduced moment matching, lambda = 0: unique w* with f(w*) = kappa, then
// S = log w*, rho = s/((w*+2) sqrt(w*-1)), sigma0/alpha = sqrt(mu2/(w*-1)).
// Throws infeasible_error (carrying the minimal attainable kappa and leaving
// the rho = +-1 boundary parameters in the message) when f(w_m) > kappa.
NsvhParams fit_normal_sabr(const MomentSummary& target, double t_expiry);

// Same nested strategy built directly on the lambda = 1 canonical moments:
// for each candidate w solve rho from the skewness relation (bisection), then
// root-solve the resulting kappa(w) against the target.
NsvhParams fit_su(const MomentSummary& target, double t_expiry);

// Biased (denominator-n) sample moments; this is the convention under which
// the shipped datasets reproduce their documented summary statistics.
// Requires n >= 4 and non-constant data.
MomentSummary sample_moments(std::span<const double> data);

}  // namespace nsvh

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nsvh/params.hpp"

namespace nsvh {

// Left-tail risk measures on signed values (losses negative), so es <= var.
struct RiskReport {
    double p;
    double var;
    double es;
    std::string method;  // closed_form | monte_carlo | empirical
    double std_err_var = 0.0;  // monte_carlo only
    double std_err_es = 0.0;   // monte_carlo only
};

// Closed forms for lambda = 1. The identity
//   ES(p) = VaR(p) - V_put(VaR(p)) / p
// ties es_closed to su_option_price and is enforced by tests at 1e-12.
double var_closed(const NsvhParams& params, double p);
double es_closed(const NsvhParams& params, double p);

// Empirical measures from exact terminal draws (any lambda); 2*n_triplets
// samples. Standard errors via bootstrap over the n_groups independent
// simulation groups. Requires p * n_samples >= 100.
RiskReport var_es_mc(const NsvhParams& params, double p, std::size_t n_triplets,
                     std::uint64_t seed, int n_groups = 50, int n_threads = 1);

// VaR: order-statistic quantile, rank p(n+1) with linear interpolation.
// ES: mean of the observations below VaR with the boundary observation
// fractionally weighted so the tail mass is exactly p.
RiskReport empirical_var_es(std::span<const double> data, double p);

struct PlotScore {
    double z0;  // theoretical normal score N^{-1}((j - 1/2)/n)
    double z1;  // normal-fit score (x - mean)/sqrt(mu2)
    double z2;  // S_U score N^{-1}(cdf(x))
};

// Scores for the ordered sample under a fitted lambda = 1 model; (z0, z2) is
// the S_U probability plot, (z0, z1) the usual normal one.
std::vector<PlotScore> probability_plot_scores(std::span<const double> data,
                                               const NsvhParams& params);

}  // namespace nsvh

#include "nsvh/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "nsvh/analytic_su.hpp"
#include "nsvh/errors.hpp"
#include "nsvh/math.hpp"
#include "nsvh/mc_engine.hpp"
#include "nsvh/moments.hpp"

namespace nsvh {

namespace {

void check_p(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("risk: quantile level p must lie strictly in (0, 1)");
}

double sorted_quantile(std::span<const double> sorted, double p) {
    const std::size_t n = sorted.size();
    const double h = p * static_cast<double>(n + 1);
    std::size_t k = static_cast<std::size_t>(std::floor(h));
    if (k < 1) k = 1;
    if (k >= n) k = n - 1;
    const double frac = h - static_cast<double>(k);
    return sorted[k - 1] + frac * (sorted[k] - sorted[k - 1]);
}

double sorted_tail_mean(std::span<const double> sorted, double p) {
    const std::size_t n = sorted.size();
    const double mass = p * static_cast<double>(n);
    const std::size_t k = static_cast<std::size_t>(std::floor(mass));
    const double frac = mass - static_cast<double>(k);
    if (k == 0 && frac <= 0.0) throw std::domain_error("empirical ES: empty tail");
    double sum = std::accumulate(sorted.begin(), sorted.begin() + static_cast<long>(k), 0.0);
    if (k < n && frac > 0.0) sum += frac * sorted[k];
    return sum / mass;
}

}  // namespace

double var_closed(const NsvhParams& p, double prob) {
    check_p(prob);
    return su_quantile(prob, p);
}

double es_closed(const NsvhParams& p, double prob) {
    check_p(prob);
    if (p.lambda() != 1.0)
        throw std::invalid_argument("es_closed: requires lambda == 1");
    const double s = p.s_var();
    const double rt_s = std::sqrt(s);
    const double d = -norm_quantile(prob);
    const double rho = p.rho();
    return p.terminal_mean() -
           p.sigma0() * std::exp(0.5 * s) / (2.0 * p.alpha() * prob) *
               ((1.0 + rho) * norm_cdf(d + rt_s) - (1.0 - rho) * norm_cdf(d - rt_s) -
                2.0 * rho * (1.0 - prob));
}

RiskReport var_es_mc(const NsvhParams& params, double p, std::size_t n_triplets,
                     std::uint64_t seed, int n_groups, int n_threads) {
    check_p(p);
    if (n_groups < 2) throw std::invalid_argument("var_es_mc: n_groups must be >= 2");
    // One sorted sample vector per group (independent streams), so the
    // group bootstrap can reweight groups without resimulating.
    const std::size_t per_group = n_triplets / static_cast<std::size_t>(n_groups);
    if (per_group == 0) throw std::invalid_argument("var_es_mc: fewer triplets than groups");
    const std::size_t n_samples = 2 * per_group * static_cast<std::size_t>(n_groups);
    if (p * static_cast<double>(n_samples) < 100.0)
        throw std::invalid_argument("var_es_mc: insufficient tail mass, need p * n >= 100");
    std::vector<std::vector<double>> groups(static_cast<std::size_t>(n_groups));
    std::vector<std::vector<double>> prefix(static_cast<std::size_t>(n_groups));

    auto build_group = [&](int g) {
        auto samples = terminal_samples(params, per_group, seed ^ static_cast<std::uint64_t>(g),
                                        ProjectionMode::paired);
        std::vector<double> v(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) v[i] = samples[i].f_t;
        std::sort(v.begin(), v.end());
        std::vector<double> pre(v.size() + 1, 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) pre[i + 1] = pre[i] + v[i];
        groups[static_cast<std::size_t>(g)] = std::move(v);
        prefix[static_cast<std::size_t>(g)] = std::move(pre);
    };
    if (n_threads <= 1) {
        for (int g = 0; g < n_groups; ++g) build_group(g);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_groups + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const int lo = t * chunk, hi = std::min(n_groups, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] { for (int g = lo; g < hi; ++g) build_group(g); });
        }
        for (auto& th : pool) th.join();
    }

    // Point estimates from the pooled sample.
    std::vector<double> pooled;
    pooled.reserve(n_samples);
    for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
    std::sort(pooled.begin(), pooled.end());
    const double var_hat = sorted_quantile(pooled, p);
    const double es_hat = sorted_tail_mean(pooled, p);

    // Group bootstrap: resample group indices with replacement; quantile and
    // tail mean of the implied weighted mixture via per-group binary search.
    auto weighted_var_es = [&](const std::vector<int>& mult) {
        double total = 0.0;
        for (int g = 0; g < n_groups; ++g)
            total += static_cast<double>(mult[g]) * static_cast<double>(groups[g].size());
        const double target_rank = p * (total + 1.0);
        double lo = pooled.front(), hi = pooled.back();
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            double cnt = 0.0;
            for (int g = 0; g < n_groups; ++g) {
                if (mult[g] == 0) continue;
                const auto& v = groups[static_cast<std::size_t>(g)];
                cnt += static_cast<double>(mult[g]) *
                       static_cast<double>(std::upper_bound(v.begin(), v.end(), mid) - v.begin());
            }
            if (cnt < target_rank) lo = mid; else hi = mid;
        }
        const double var_b = 0.5 * (lo + hi);
        const double mass = p * total;
        double cnt = 0.0, sum = 0.0;
        for (int g = 0; g < n_groups; ++g) {
            if (mult[g] == 0) continue;
            const auto& v = groups[static_cast<std::size_t>(g)];
            const auto idx = static_cast<std::size_t>(
                std::upper_bound(v.begin(), v.end(), var_b) - v.begin());
            cnt += static_cast<double>(mult[g]) * static_cast<double>(idx);
            sum += static_cast<double>(mult[g]) * prefix[static_cast<std::size_t>(g)][idx];
        }
        // trim or pad the boundary so the tail mass is exactly p
        const double es_b = (sum + (mass - cnt) * var_b) / mass;
        return std::pair<double, double>(var_b, es_b);
    };

    constexpr int kReplicates = 100;
    Rng boot(seed ^ 0xB007B007B007ull);
    double sv = 0.0, sv2 = 0.0, se_ = 0.0, se2 = 0.0;
    for (int b = 0; b < kReplicates; ++b) {
        std::vector<int> mult(static_cast<std::size_t>(n_groups), 0);
        for (int i = 0; i < n_groups; ++i)
            ++mult[static_cast<std::size_t>(boot.next_u64() % static_cast<std::uint64_t>(n_groups))];
        const auto [vb, eb] = weighted_var_es(mult);
        sv += vb; sv2 += vb * vb;
        se_ += eb; se2 += eb * eb;
    }
    const double nb = kReplicates;
    const double se_var = std::sqrt(std::max(0.0, sv2 / nb - (sv / nb) * (sv / nb)));
    const double se_es = std::sqrt(std::max(0.0, se2 / nb - (se_ / nb) * (se_ / nb)));

    return {p, var_hat, es_hat, "monte_carlo", se_var, se_es};
}

RiskReport empirical_var_es(std::span<const double> data, double p) {
    check_p(p);
    const std::size_t n = data.size();
    if (p * static_cast<double>(n) < 1.0)
        throw std::domain_error("empirical_var_es: p * n must be >= 1");
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    return {p, sorted_quantile(sorted, p), sorted_tail_mean(sorted, p), "empirical", 0.0, 0.0};
}

std::vector<PlotScore> probability_plot_scores(std::span<const double> data,
                                               const NsvhParams& params) {
    if (data.size() < 2)
        throw std::invalid_argument("probability_plot_scores: need at least 2 observations");
    const MomentSummary mom = sample_moments(data);
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const double sd = std::sqrt(mom.mu2);
    std::vector<PlotScore> out(sorted.size());
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        const double x = sorted[j];
        out[j] = {norm_quantile((static_cast<double>(j) + 0.5) / n), (x - mom.mean) / sd,
                  -su_d_score(x, params)};
    }
    return out;
}

}  // namespace nsvh

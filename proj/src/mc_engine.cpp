#include "nsvh/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "nsvh/math.hpp"

namespace nsvh {

TripletDraw triplet_from_normals(double x, double y, double z, double s_var) {
    const double q = x * x + y * y;
    if (q <= 0.0) throw std::invalid_argument("triplet_from_normals: X^2 + Y^2 must be > 0");
    const double r = std::sqrt(q);
    return {z * std::sqrt(s_var), q * s_var, x / r, y / r};
}

TripletDraw draw_triplet(Rng& rng, double s_var) {
    for (;;) {
        const double x = rng.next_normal();
        const double y = rng.next_normal();
        const double z = rng.next_normal();
        if (x * x + y * y <= 0.0) continue;
        return triplet_from_normals(x, y, z, s_var);
    }
}

namespace {

// Per-step transition constants for one (lambda, s_var) pair.
struct StepKernel {
    double s_var;
    double drift;       // (lambda - 1)/2 * s_var
    double e_lambda_s;  // e^{lambda s / 2}

    explicit StepKernel(double lambda, double s)
        : s_var(s), drift(0.5 * (lambda - 1.0) * s), e_lambda_s(std::exp(0.5 * lambda * s)) {}

    // Increments for both projections of one triplet. The canonical terminal
    // form subtracts e^{lambda s/2} (shift = e_lambda_s); the per-step path
    // form, where the running F already carries the accumulated mean, uses
    //   F += (sigma/alpha)(rho (e^{Z'} - 1) + rho* proj phi)   (shift = 1).
    struct Out {
        double f_cos, f_sin, sigma_ratio;
    };
    Out advance(const TripletDraw& t, double rho, double rho_star, double shift) const {
        const double zp = t.z + drift;
        const double d = std::sqrt(t.r_sq + zp * zp);
        const double phi = phi_radius(zp, d);
        const double e_zp = std::exp(zp);
        const double common = rho * (e_zp - shift);
        return {common + rho_star * t.cos_theta * phi, common + rho_star * t.sin_theta * phi,
                e_zp};
    }
};

}  // namespace

std::vector<TerminalSample> terminal_samples(const NsvhParams& p, std::size_t n_triplets,
                                             std::uint64_t seed, ProjectionMode mode) {
    if (n_triplets == 0) throw std::invalid_argument("terminal_samples: n_triplets >= 1");
    const std::size_t per = mode == ProjectionMode::paired ? 2 : 1;
    std::vector<TerminalSample> out;
    out.reserve(per * n_triplets);
    Rng rng(seed);

    if (p.alpha() == 0.0) {
        // exact arithmetic-Brownian limit; the pair keeps its shared-Z structure
        const double vol = p.sigma0() * std::sqrt(p.t_expiry());
        const double rho = p.rho(), rs = p.rho_star();
        for (std::size_t i = 0; i < n_triplets; ++i) {
            const double x = rng.next_normal();
            const double y = rng.next_normal();
            const double z = rng.next_normal();
            out.push_back({p.f0() + vol * (rho * z + rs * x), p.sigma0()});
            if (per == 2) out.push_back({p.f0() + vol * (rho * z + rs * y), p.sigma0()});
        }
        return out;
    }

    const StepKernel kernel(p.lambda(), p.s_var());
    const double scale = p.sigma0() / p.alpha();
    const double mean = p.terminal_mean();
    const double rho = p.rho(), rs = p.rho_star();
    for (std::size_t i = 0; i < n_triplets; ++i) {
        const TripletDraw t = draw_triplet(rng, p.s_var());
        const auto a = kernel.advance(t, rho, rs, kernel.e_lambda_s);
        out.push_back({mean + scale * a.f_cos, p.sigma0() * a.sigma_ratio});
        if (per == 2) out.push_back({mean + scale * a.f_sin, p.sigma0() * a.sigma_ratio});
    }
    return out;
}

PathMatrix simulate_paths(const NsvhParams& p, const std::vector<double>& grid,
                          std::size_t n_paths, std::uint64_t seed, ProjectionMode mode) {
    if (grid.empty()) throw std::invalid_argument("simulate_paths: empty time grid");
    double prev = 0.0;
    for (double t : grid) {
        if (!(t > prev))
            throw std::invalid_argument(
                "simulate_paths: time grid must be strictly increasing and positive");
        prev = t;
    }
    if (n_paths == 0) throw std::invalid_argument("simulate_paths: n_paths >= 1");

    const std::size_t n_steps = grid.size();
    PathMatrix m;
    m.times = grid;
    m.n_paths = n_paths;
    m.states.resize(n_paths * n_steps);

    const double alpha = p.alpha();
    const double rho = p.rho(), rs = p.rho_star();
    std::vector<StepKernel> kernels;
    std::vector<double> dt(n_steps);
    kernels.reserve(n_steps);
    prev = 0.0;
    for (std::size_t j = 0; j < n_steps; ++j) {
        dt[j] = grid[j] - prev;
        kernels.emplace_back(p.lambda(), alpha * alpha * dt[j]);
        prev = grid[j];
    }

    Rng rng(seed);
    const std::size_t stride = mode == ProjectionMode::paired ? 2 : 1;
    for (std::size_t i = 0; i < n_paths; i += stride) {
        const bool has_partner = mode == ProjectionMode::paired && i + 1 < n_paths;
        double f0 = p.f0(), s0 = p.sigma0();
        double f1 = f0, s1 = s0;
        for (std::size_t j = 0; j < n_steps; ++j) {
            if (alpha == 0.0) {
                const double x = rng.next_normal();
                const double y = rng.next_normal();
                const double z = rng.next_normal();
                const double vol = p.sigma0() * std::sqrt(dt[j]);
                f0 += vol * (rho * z + rs * x);
                f1 += vol * (rho * z + rs * y);
            } else {
                const TripletDraw t = draw_triplet(rng, kernels[j].s_var);
                const auto a = kernels[j].advance(t, rho, rs, 1.0);
                f0 += s0 / alpha * a.f_cos;
                s0 *= a.sigma_ratio;
                f1 += s1 / alpha * a.f_sin;
                s1 *= a.sigma_ratio;
            }
            m.states[i * n_steps + j] = {f0, s0};
            if (has_partner) m.states[(i + 1) * n_steps + j] = {f1, s1};
        }
    }
    return m;
}

namespace {

struct GroupPartial {
    double sum = 0.0;    // sum of per-triplet mean payoffs
    std::size_t n = 0;   // triplets in the group
};

GroupPartial run_group(const NsvhParams& p, double strike, OptionSide side,
                       std::size_t n_triplets, std::uint64_t seed, std::uint64_t stream) {
    Rng rng = Rng::stream(seed, stream);
    const double sign = side == OptionSide::call ? 1.0 : -1.0;
    GroupPartial g;
    g.n = n_triplets;

    if (p.alpha() == 0.0) {
        const double vol = p.sigma0() * std::sqrt(p.t_expiry());
        const double rho = p.rho(), rs = p.rho_star();
        for (std::size_t i = 0; i < n_triplets; ++i) {
            const double x = rng.next_normal();
            const double y = rng.next_normal();
            const double z = rng.next_normal();
            const double pay0 = std::max(sign * (p.f0() + vol * (rho * z + rs * x) - strike), 0.0);
            const double pay1 = std::max(sign * (p.f0() + vol * (rho * z + rs * y) - strike), 0.0);
            g.sum += 0.5 * (pay0 + pay1);
        }
        return g;
    }

    const StepKernel kernel(p.lambda(), p.s_var());
    const double scale = p.sigma0() / p.alpha();
    const double mean = p.terminal_mean();
    const double rho = p.rho(), rs = p.rho_star();
    for (std::size_t i = 0; i < n_triplets; ++i) {
        const TripletDraw t = draw_triplet(rng, p.s_var());
        const auto a = kernel.advance(t, rho, rs, kernel.e_lambda_s);
        const double pay0 = std::max(sign * (mean + scale * a.f_cos - strike), 0.0);
        const double pay1 = std::max(sign * (mean + scale * a.f_sin - strike), 0.0);
        g.sum += 0.5 * (pay0 + pay1);
    }
    return g;
}

double tree_sum(const std::vector<double>& v) {
    std::vector<double> level = v;
    while (level.size() > 1) {
        std::vector<double> next((level.size() + 1) / 2);
        for (std::size_t i = 0; i < next.size(); ++i) {
            const std::size_t a = 2 * i, b = 2 * i + 1;
            next[i] = b < level.size() ? level[a] + level[b] : level[a];
        }
        level.swap(next);
    }
    return level[0];
}

}  // namespace

McEstimate price_option_mc(const NsvhParams& p, double strike, OptionSide side,
                           std::size_t n_triplets, int n_groups, std::uint64_t seed,
                           int n_threads) {
    if (n_groups < 2) throw std::invalid_argument("price_option_mc: n_groups must be >= 2");
    if (n_triplets % static_cast<std::size_t>(n_groups) != 0)
        throw std::invalid_argument("price_option_mc: n_triplets must be divisible by n_groups");
    const std::size_t per_group = n_triplets / static_cast<std::size_t>(n_groups);

    std::vector<GroupPartial> partials(static_cast<std::size_t>(n_groups));
    n_threads = std::max(1, n_threads);
    if (n_threads == 1) {
        for (int g = 0; g < n_groups; ++g)
            partials[g] = run_group(p, strike, side, per_group, seed,
                                    static_cast<std::uint64_t>(g));
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_groups + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const int lo = t * chunk;
            const int hi = std::min(n_groups, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (int g = lo; g < hi; ++g)
                    partials[g] = run_group(p, strike, side, per_group, seed,
                                            static_cast<std::uint64_t>(g));
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<double> sums(partials.size());
    for (std::size_t g = 0; g < partials.size(); ++g) sums[g] = partials[g].sum;
    const double total = tree_sum(sums);
    const double mean = total / static_cast<double>(n_triplets);

    double var_groups = 0.0;
    for (const auto& g : partials) {
        const double gm = g.sum / static_cast<double>(g.n);
        var_groups += (gm - mean) * (gm - mean);
    }
    var_groups /= static_cast<double>(n_groups - 1);
    const double se = std::sqrt(var_groups / static_cast<double>(n_groups));
    return {mean, se, n_groups};
}

}  // namespace nsvh

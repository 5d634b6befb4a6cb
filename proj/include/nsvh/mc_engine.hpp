#pragma once

#include <cstdint>
#include <vector>

#include "nsvh/params.hpp"
#include "nsvh/rng.hpp"

namespace nsvh {

// One exact draw of the terminal state.
struct TerminalSample {
    double f_t;      // terminal price
    double sigma_t;  // terminal volatility, > 0
};

// The three-normal draw behind the closed-form transition. One triplet yields
// two price samples (cosine and sine projections), i.e. 1.5 normals per
// sample; the pair shares (z, r_sq) and is therefore dependent.
struct TripletDraw {
    double z;          // Z_1 sqrt(S)
    double r_sq;       // (X_1^2 + Y_1^2) S, squared Bessel radius
    double cos_theta;  // X_1 / sqrt(X_1^2 + Y_1^2)
    double sin_theta;  // Y_1 / sqrt(X_1^2 + Y_1^2)
};

struct McEstimate {
    double value;
    double std_err;  // standard error across independent averaging groups
    int n_groups;
};

// paired: the exact 1.5-normals-per-sample scheme (two dependent samples per
//   triplet). independent: three normals per sample, cosine projection only,
//   giving i.i.d. output for distribution tests.
enum class ProjectionMode { paired, independent };

// Consumes exactly three standard normals (redraws on the probability-zero
// event X^2 + Y^2 = 0).
TripletDraw draw_triplet(Rng& rng, double s_var);

// Deterministic core of draw_triplet on given standard normals.
TripletDraw triplet_from_normals(double x, double y, double z, double s_var);

// Exact terminal draws for any lambda. paired mode returns 2*n_triplets
// samples, independent mode n_triplets. alpha = 0 takes the exact degenerate
// path (arithmetic Brownian limit), preserving the pair structure.
std::vector<TerminalSample> terminal_samples(const NsvhParams& params,
                                             std::size_t n_triplets, std::uint64_t seed,
                                             ProjectionMode mode = ProjectionMode::paired);

// Multi-step exact simulation on a strictly increasing positive time grid.
// Row-major: state(path, step) = states[path * grid.size() + step].
// In paired mode consecutive path pairs share triplets per step.
struct PathMatrix {
    std::vector<double> times;
    std::vector<TerminalSample> states;
    std::size_t n_paths;

    const TerminalSample& at(std::size_t path, std::size_t step) const {
        return states[path * times.size() + step];
    }
};
PathMatrix simulate_paths(const NsvhParams& params, const std::vector<double>& time_grid,
                          std::size_t n_paths, std::uint64_t seed,
                          ProjectionMode mode = ProjectionMode::paired);

// Mean undiscounted payoff with a standard error over whole-triplet groups
// (both projections of a triplet stay in one group). Group g draws from
// stream index g; the group partials are combined by a fixed pairwise tree,
// so results are identical for any thread count.
McEstimate price_option_mc(const NsvhParams& params, double strike, OptionSide side,
                           std::size_t n_triplets, int n_groups, std::uint64_t seed,
                           int n_threads = 1);

}  // namespace nsvh

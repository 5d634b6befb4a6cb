#pragma once

#include <stdexcept>
#include <string>

namespace nsvh {

// Target moments (or quotes) lie outside the model's attainable range.
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what, double attainable_bound = 0.0)
        : std::runtime_error(what), attainable_bound_(attainable_bound) {}
    // For moment fits: the minimal attainable excess kurtosis at the
    // skewness boundary. Zero when not applicable.
    double attainable_bound() const noexcept { return attainable_bound_; }

private:
    double attainable_bound_;
};

// No root exists within arbitrage/validity bounds (e.g. implied vol of a
// price below intrinsic).
class no_solution_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nsvh

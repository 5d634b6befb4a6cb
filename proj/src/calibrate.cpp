#include "nsvh/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nsvh/analytic_su.hpp"
#include "nsvh/errors.hpp"
#include "nsvh/sabr_normal.hpp"

namespace nsvh {

namespace {

constexpr double kRhoCap = 1.0 - 1e-6;

struct Transformed {
    double a, b, c;  // sigma0 = e^a, alpha = e^b, rho = tanh(c)
    double sigma0() const { return std::exp(a); }
    double alpha() const { return std::exp(b); }
    double rho() const { return std::clamp(std::tanh(c), -kRhoCap, kRhoCap); }
};

NsvhParams make_params(const Transformed& t, double lambda, double forward, double t_expiry) {
    return NsvhParams::with_terminal_mean(t.sigma0(), t.alpha(), t.rho(), lambda, forward,
                                          t_expiry);
}

// Model normal vol at one strike; throws no_solution_error when the lambda=1
// price cannot be inverted at extreme trial parameters.
double model_vol(const Transformed& t, double lambda, double forward, double t_expiry,
                 double strike) {
    const NsvhParams p = make_params(t, lambda, forward, t_expiry);
    if (lambda == 0.0) return hagan_normal_vol(p, strike);
    const OptionSide side = strike >= forward ? OptionSide::call : OptionSide::put;
    const double price = su_option_price(strike, side, p);
    return implied_normal_vol(price, forward, strike, t_expiry, side);
}

bool residuals(const Transformed& t, double lambda, double forward, double t_expiry,
               const std::vector<double>& strikes, const std::vector<double>& target_vols,
               std::vector<double>& out) {
    out.resize(strikes.size());
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        try {
            out[i] = model_vol(t, lambda, forward, t_expiry, strikes[i]) - target_vols[i];
        } catch (const std::exception&) {
            return false;
        }
        if (!std::isfinite(out[i])) return false;
    }
    return true;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Solve A x = rhs for small n with partial pivoting; A row-major n x n.
bool solve_dense(std::vector<double> A, std::vector<double> rhs, std::vector<double>& x) {
    const std::size_t n = rhs.size();
    x.assign(n, 0.0);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        if (std::abs(A[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(A[col * n + k], A[piv * n + k]);
            std::swap(rhs[col], rhs[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r * n + col] / A[col * n + col];
            for (std::size_t k = col; k < n; ++k) A[r * n + k] -= f * A[col * n + k];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= A[i * n + k] * x[k];
        x[i] = s / A[i * n + i];
    }
    return true;
}

}  // namespace

CalibrationResult calibrate_smile(const std::vector<SmileQuote>& quotes, double forward,
                                  double t_expiry, double lambda, double tolerance,
                                  std::optional<std::array<double, 3>> initial) {
    if (lambda != 0.0 && lambda != 1.0)
        throw std::invalid_argument("calibrate_smile: lambda must be 0 or 1");
    if (t_expiry <= 0.0) throw std::invalid_argument("calibrate_smile: t_expiry must be > 0");
    if (quotes.size() < 3)
        throw std::invalid_argument("calibrate_smile: need at least 3 quotes");

    std::vector<double> strikes, vols;
    for (const auto& q : quotes) {
        if (!(q.value > 0.0))
            throw std::invalid_argument("calibrate_smile: quote values must be > 0");
        const double strike = forward + q.strike_offset;
        double v;
        if (q.kind == QuoteKind::normal_vol) {
            v = q.value;
        } else {
            // prices are converted to vols once, up front
            v = implied_normal_vol(q.value, forward, strike, t_expiry, q.side);
        }
        strikes.push_back(strike);
        vols.push_back(v);
    }
    {
        auto s = strikes;
        std::sort(s.begin(), s.end());
        for (std::size_t i = 1; i < s.size(); ++i)
            if (s[i] == s[i - 1])
                throw std::invalid_argument("calibrate_smile: strikes must be distinct");
    }

    // A flat smile pins alpha at the zero boundary: sigma0 = quoted vol
    // reproduces every strike exactly and (alpha, rho) are unidentified.
    {
        const auto [vmin, vmax] = std::minmax_element(vols.begin(), vols.end());
        if (*vmax - *vmin <= tolerance) {
            CalibrationResult flat{
                NsvhParams::with_terminal_mean(*vmin, 0.0, 0.0, lambda, forward, t_expiry),
                std::vector<double>(vols.size(), 0.0), 0, true,
                "alpha at the flat-smile boundary (vol-of-vol indistinguishable from 0)"};
            for (std::size_t i = 0; i < vols.size(); ++i) flat.residuals[i] = *vmin - vols[i];
            return flat;
        }
    }

    // Initial guess: sigma0 from the nearest-to-ATM vol, rho from the smile
    // slope, alpha from the curvature of the ATM expansion.
    std::size_t i_atm = 0, i_lo = 0, i_hi = 0;
    for (std::size_t i = 1; i < strikes.size(); ++i) {
        if (std::abs(strikes[i] - forward) < std::abs(strikes[i_atm] - forward)) i_atm = i;
        if (strikes[i] < strikes[i_lo]) i_lo = i;
        if (strikes[i] > strikes[i_hi]) i_hi = i;
    }
    const double v0 = vols[i_atm];
    const double dk = strikes[i_hi] - strikes[i_lo];
    const double slope = (vols[i_hi] - vols[i_lo]) / dk;
    const double curv =
        ((vols[i_hi] - v0) / (strikes[i_hi] - strikes[i_atm]) -
         (v0 - vols[i_lo]) / (strikes[i_atm] - strikes[i_lo])) / (0.5 * dk);
    double alpha0 = curv > 0.0 ? std::sqrt(6.0 * v0 * curv) : 0.05 / std::sqrt(t_expiry);
    alpha0 = std::clamp(alpha0, 1e-4 / std::sqrt(t_expiry),
                        0.9 * std::sqrt(NsvhParams::kMaxSVar / t_expiry));
    const double rho0 = std::clamp(2.0 * slope / alpha0, -0.9, 0.9);

    Transformed th{std::log(v0), std::log(alpha0), std::atanh(rho0)};
    if (initial) {
        const auto& [s0, a0, r0] = *initial;
        if (!(s0 > 0.0) || !(a0 > 0.0) || std::abs(r0) >= 1.0)
            throw std::invalid_argument("calibrate_smile: invalid initial guess");
        th = Transformed{std::log(s0), std::log(a0), std::atanh(std::clamp(r0, -kRhoCap, kRhoCap))};
    }
    const std::size_t m = strikes.size();
    std::vector<double> r;
    bool have_r = residuals(th, lambda, forward, t_expiry, strikes, vols, r);
    if (!have_r) throw infeasible_error("calibrate_smile: initial point not evaluable");

    int it = 0;
    bool converged = false;
    const double kBMin = std::log(1e-12);
    for (; it < 200; ++it) {
        double rmax = 0.0;
        for (double v : r) rmax = std::max(rmax, std::abs(v));
        if (rmax <= tolerance) {
            converged = true;
            break;
        }
        // finite-difference Jacobian in the transformed coordinates
        constexpr double h = 1e-6;
        std::vector<double> J(m * 3);
        bool ok = true;
        for (int j = 0; j < 3 && ok; ++j) {
            Transformed tp = th, tm_ = th;
            (j == 0 ? tp.a : j == 1 ? tp.b : tp.c) += h;
            (j == 0 ? tm_.a : j == 1 ? tm_.b : tm_.c) -= h;
            std::vector<double> rp, rm;
            ok = residuals(tp, lambda, forward, t_expiry, strikes, vols, rp) &&
                 residuals(tm_, lambda, forward, t_expiry, strikes, vols, rm);
            if (!ok) break;
            for (std::size_t i = 0; i < m; ++i) J[i * 3 + j] = (rp[i] - rm[i]) / (2.0 * h);
        }
        if (!ok) break;

        // Newton (m == 3) or Gauss-Newton normal equations (m > 3)
        std::vector<double> delta;
        bool solved;
        if (m == 3) {
            solved = solve_dense(J, {-r[0], -r[1], -r[2]}, delta);
        } else {
            std::vector<double> JtJ(9, 0.0), Jtr(3, 0.0);
            for (std::size_t i = 0; i < m; ++i)
                for (int a = 0; a < 3; ++a) {
                    Jtr[a] -= J[i * 3 + a] * r[i];
                    for (int b = 0; b < 3; ++b) JtJ[a * 3 + b] += J[i * 3 + a] * J[i * 3 + b];
                }
            const double mu = 1e-12 * (JtJ[0] + JtJ[4] + JtJ[8]);
            for (int a = 0; a < 3; ++a) JtJ[a * 3 + a] += mu;
            solved = solve_dense(JtJ, Jtr, delta);
        }
        if (!solved) break;

        // damped update with backtracking on the residual norm
        const double base = norm2(r);
        double step = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 30; ++bt) {
            Transformed cand{th.a + step * delta[0], std::max(kBMin, th.b + step * delta[1]),
                             std::clamp(th.c + step * delta[2], -8.0, 8.0)};
            std::vector<double> rc;
            if (residuals(cand, lambda, forward, t_expiry, strikes, vols, rc) &&
                norm2(rc) < base) {
                th = cand;
                r = std::move(rc);
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;  // stalled; report best point
    }

    CalibrationResult res{make_params(th, lambda, forward, t_expiry), r, it, converged, ""};
    if (th.alpha() < 1e-6)
        res.diagnostic = "alpha at the flat-smile boundary (vol-of-vol indistinguishable from 0)";
    if (std::abs(th.rho()) >= kRhoCap - 1e-12)
        res.diagnostic += std::string(res.diagnostic.empty() ? "" : "; ") +
                          "rho pinned at the correlation bound";
    return res;
}

std::vector<SmilePoint> smile_curve(const NsvhParams& params, double lambda,
                                    const std::vector<double>& strike_grid) {
    if (lambda != 0.0 && lambda != 1.0)
        throw std::invalid_argument("smile_curve: lambda must be 0 or 1");
    std::vector<SmilePoint> out;
    out.reserve(strike_grid.size());
    const double fwd = params.terminal_mean();
    for (double k : strike_grid) {
        SmilePoint pt{k, std::numeric_limits<double>::quiet_NaN(), false};
        try {
            if (lambda == 0.0) {
                pt.normal_vol = hagan_normal_vol(params, k);
            } else {
                const OptionSide side = k >= fwd ? OptionSide::call : OptionSide::put;
                pt.normal_vol = implied_normal_vol(su_option_price(k, side, params), fwd, k,
                                                   params.t_expiry(), side);
            }
            pt.ok = std::isfinite(pt.normal_vol);
        } catch (const std::exception&) {
            pt.ok = false;  // reported per point
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace nsvh

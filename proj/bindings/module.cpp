// pybind11 bindings for the NSVh model library. Exposes the main operations:
// parameters, closed-form S_U analytics, normal-SABR approximation, exact MC,
// moment fitting, smile calibration and risk measures.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nsvh/analytic_su.hpp"
#include "nsvh/calibrate.hpp"
#include "nsvh/errors.hpp"
#include "nsvh/math.hpp"
#include "nsvh/mc_engine.hpp"
#include "nsvh/moments.hpp"
#include "nsvh/oracles.hpp"
#include "nsvh/risk.hpp"
#include "nsvh/sabr_normal.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace nsvh;

namespace {

OptionSide side_from(const std::string& s) {
    if (s == "call") return OptionSide::call;
    if (s == "put") return OptionSide::put;
    throw std::invalid_argument("side must be 'call' or 'put'");
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style>& a) {
    return {a.data(), a.data() + a.size()};
}

py::dict risk_dict(const RiskReport& r) {
    py::dict d("p"_a = r.p, "var"_a = r.var, "es"_a = r.es, "method"_a = r.method);
    if (r.method == "monte_carlo") {
        d["std_err_var"] = r.std_err_var;
        d["std_err_es"] = r.std_err_es;
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_nsvh, m) {
    m.doc() = "Hyperbolic normal stochastic-volatility model: exact simulation, "
              "closed-form S_U analytics, moment fitting, calibration and risk";

    py::register_exception<infeasible_error>(m, "InfeasibleError", PyExc_ValueError);
    py::register_exception<no_solution_error>(m, "NoSolutionError", PyExc_ValueError);

    py::class_<NsvhParams>(m, "NsvhParams",
                           "Model parameters (sigma0, alpha, rho, lambda, f0, t_expiry); "
                           "validated on construction")
        .def(py::init<double, double, double, double, double, double>(), "sigma0"_a,
             "alpha"_a, "rho"_a, "lambda_"_a, "f0"_a, "t_expiry"_a)
        .def_static("with_terminal_mean", &NsvhParams::with_terminal_mean, "sigma0"_a,
                    "alpha"_a, "rho"_a, "lambda_"_a, "mean"_a, "t_expiry"_a,
                    "Choose f0 so that the terminal mean equals `mean`")
        .def_property_readonly("sigma0", &NsvhParams::sigma0)
        .def_property_readonly("alpha", &NsvhParams::alpha)
        .def_property_readonly("rho", &NsvhParams::rho)
        .def_property_readonly("lambda_", &NsvhParams::lambda)
        .def_property_readonly("f0", &NsvhParams::f0)
        .def_property_readonly("t_expiry", &NsvhParams::t_expiry)
        .def_property_readonly("s_var", &NsvhParams::s_var)
        .def_property_readonly("terminal_mean", &NsvhParams::terminal_mean)
        .def("__repr__", [](const NsvhParams& p) {
            return "NsvhParams(sigma0=" + std::to_string(p.sigma0()) +
                   ", alpha=" + std::to_string(p.alpha()) + ", rho=" +
                   std::to_string(p.rho()) + ", lambda=" + std::to_string(p.lambda()) +
                   ", f0=" + std::to_string(p.f0()) +
                   ", t_expiry=" + std::to_string(p.t_expiry()) + ")";
        });

    py::class_<MomentSummary>(m, "MomentSummary")
        .def(py::init([](double mean, double mu2, double skew, double exkurt) {
                 return MomentSummary{mean, mu2, skew, exkurt};
             }),
             "mean"_a, "mu2"_a, "skew"_a, "exkurt"_a)
        .def_readonly("mean", &MomentSummary::mean)
        .def_readonly("mu2", &MomentSummary::mu2)
        .def_readonly("skew", &MomentSummary::skew)
        .def_readonly("exkurt", &MomentSummary::exkurt)
        .def("__repr__", [](const MomentSummary& s) {
            return "MomentSummary(mean=" + std::to_string(s.mean) +
                   ", mu2=" + std::to_string(s.mu2) + ", skew=" + std::to_string(s.skew) +
                   ", exkurt=" + std::to_string(s.exkurt) + ")";
        });

    // special functions
    m.def("norm_cdf", py::vectorize(norm_cdf));
    m.def("norm_pdf", py::vectorize(norm_pdf));
    m.def("norm_quantile", py::vectorize(norm_quantile));
    m.def("phi_radius", py::vectorize(phi_radius), "z"_a, "d"_a,
          "e^{z/2} sqrt(2 cosh d - 2 cosh z), cancellation-free");
    m.def("stable_exp_ratio", py::vectorize(stable_exp_ratio), "k"_a, "s"_a);

    // closed-form S_U analytics (lambda = 1)
    m.def("su_pdf", [](double x, const NsvhParams& p) { return su_pdf(x, p); }, "x"_a,
          "params"_a);
    m.def("su_cdf", [](double x, const NsvhParams& p) { return su_cdf(x, p); }, "x"_a,
          "params"_a);
    m.def("su_quantile", [](double q, const NsvhParams& p) { return su_quantile(q, p); },
          "p"_a, "params"_a);
    m.def(
        "su_option_price",
        [](double strike, const std::string& side, const NsvhParams& p) {
            return su_option_price(strike, side_from(side), p);
        },
        "strike"_a, "side"_a, "params"_a,
        "Undiscounted vanilla price in numeraire units (exact, lambda = 1)");
    m.def(
        "su_sample",
        [](const NsvhParams& p, std::size_t n, std::uint64_t seed) {
            return py::array_t<double>(py::cast(su_sample(p, n, seed)));
        },
        "params"_a, "n"_a, "seed"_a);

    // normal SABR approximation and Bachelier model
    m.def("hagan_normal_vol",
          [](const NsvhParams& p, double k) { return hagan_normal_vol(p, k); }, "params"_a,
          "strike"_a);
    m.def(
        "bachelier_price",
        [](double f, double k, double vol, double t, const std::string& side) {
            return bachelier_price(f, k, vol, t, side_from(side));
        },
        "forward"_a, "strike"_a, "normal_vol"_a, "t_expiry"_a, "side"_a);
    m.def(
        "implied_normal_vol",
        [](double price, double f, double k, double t, const std::string& side) {
            return implied_normal_vol(price, f, k, t, side_from(side));
        },
        "price"_a, "forward"_a, "strike"_a, "t_expiry"_a, "side"_a);

    // exact Monte Carlo
    m.def(
        "terminal_samples",
        [](const NsvhParams& p, std::size_t n_triplets, std::uint64_t seed,
           const std::string& mode) {
            const auto samples = terminal_samples(
                p, n_triplets, seed,
                mode == "independent" ? ProjectionMode::independent : ProjectionMode::paired);
            py::array_t<double> out({samples.size(), std::size_t(2)});
            auto w = out.mutable_unchecked<2>();
            for (std::size_t i = 0; i < samples.size(); ++i) {
                w(i, 0) = samples[i].f_t;
                w(i, 1) = samples[i].sigma_t;
            }
            return out;
        },
        "params"_a, "n_triplets"_a, "seed"_a, "mode"_a = "paired",
        "Exact terminal draws; returns an (n, 2) array of (price, volatility)");
    m.def(
        "simulate_paths",
        [](const NsvhParams& p, const std::vector<double>& grid, std::size_t n_paths,
           std::uint64_t seed, const std::string& mode) {
            const auto mtx = simulate_paths(
                p, grid, n_paths, seed,
                mode == "independent" ? ProjectionMode::independent : ProjectionMode::paired);
            py::array_t<double> out({n_paths, grid.size(), std::size_t(2)});
            auto w = out.mutable_unchecked<3>();
            for (std::size_t i = 0; i < n_paths; ++i)
                for (std::size_t j = 0; j < grid.size(); ++j) {
                    w(i, j, 0) = mtx.at(i, j).f_t;
                    w(i, j, 1) = mtx.at(i, j).sigma_t;
                }
            return out;
        },
        "params"_a, "time_grid"_a, "n_paths"_a, "seed"_a, "mode"_a = "paired");
    m.def(
        "price_option_mc",
        [](const NsvhParams& p, double strike, const std::string& side,
           std::size_t n_triplets, int n_groups, std::uint64_t seed, int threads) {
            const auto est =
                price_option_mc(p, strike, side_from(side), n_triplets, n_groups, seed,
                                threads);
            return py::dict("value"_a = est.value, "std_err"_a = est.std_err,
                            "n_groups"_a = est.n_groups);
        },
        "params"_a, "strike"_a, "side"_a, "n_triplets"_a, "n_groups"_a = 100, "seed"_a,
        "threads"_a = 1);

    // moments and fitting
    m.def("central_moments", &central_moments, "params"_a);
    m.def("fit_normal_sabr", &fit_normal_sabr, "target"_a, "t_expiry"_a,
          "Reduced moment matching for lambda = 0");
    m.def("fit_su", &fit_su, "target"_a, "t_expiry"_a, "Moment matching for lambda = 1");
    m.def(
        "sample_moments",
        [](const py::array_t<double, py::array::c_style>& a) {
            const auto v = to_vector(a);
            return sample_moments(v);
        },
        "data"_a, "Biased (denominator-n) sample moments");

    // calibration
    py::class_<CalibrationResult>(m, "CalibrationResult")
        .def_readonly("params", &CalibrationResult::params)
        .def_readonly("residuals", &CalibrationResult::residuals)
        .def_readonly("iterations", &CalibrationResult::iterations)
        .def_readonly("converged", &CalibrationResult::converged)
        .def_readonly("diagnostic", &CalibrationResult::diagnostic);
    m.def(
        "calibrate_smile",
        [](const std::vector<py::dict>& quotes, double forward, double t_expiry,
           double lambda, double tolerance) {
            std::vector<SmileQuote> qs;
            for (const auto& q : quotes) {
                SmileQuote sq;
                sq.strike_offset = q["offset"].cast<double>();
                const std::string kind =
                    q.contains("kind") ? q["kind"].cast<std::string>() : "normal_vol";
                sq.kind = kind == "price" ? QuoteKind::option_price : QuoteKind::normal_vol;
                sq.value = q["value"].cast<double>();
                if (q.contains("side")) sq.side = side_from(q["side"].cast<std::string>());
                qs.push_back(sq);
            }
            return calibrate_smile(qs, forward, t_expiry, lambda, tolerance);
        },
        "quotes"_a, "forward"_a, "t_expiry"_a, "lambda_"_a, "tolerance"_a = 1e-10,
        "Quotes are dicts {offset, value, kind?: 'normal_vol'|'price', side?}");
    m.def(
        "smile_curve",
        [](const NsvhParams& p, double lambda, const std::vector<double>& strikes) {
            py::list out;
            for (const auto& pt : smile_curve(p, lambda, strikes))
                out.append(py::dict("strike"_a = pt.strike, "normal_vol"_a = pt.normal_vol,
                                    "ok"_a = pt.ok));
            return out;
        },
        "params"_a, "lambda_"_a, "strike_grid"_a);

    // risk measures
    m.def("var_closed", &var_closed, "params"_a, "p"_a);
    m.def("es_closed", &es_closed, "params"_a, "p"_a);
    m.def(
        "var_es_mc",
        [](const NsvhParams& p, double prob, std::size_t n_triplets, std::uint64_t seed,
           int n_groups, int threads) {
            return risk_dict(var_es_mc(p, prob, n_triplets, seed, n_groups, threads));
        },
        "params"_a, "p"_a, "n_triplets"_a, "seed"_a, "n_groups"_a = 50, "threads"_a = 1);
    m.def(
        "empirical_var_es",
        [](const py::array_t<double, py::array::c_style>& a, double prob) {
            const auto v = to_vector(a);
            return risk_dict(empirical_var_es(v, prob));
        },
        "data"_a, "p"_a);
    m.def(
        "probability_plot_scores",
        [](const py::array_t<double, py::array::c_style>& a, const NsvhParams& p) {
            const auto v = to_vector(a);
            const auto scores = probability_plot_scores(v, p);
            py::array_t<double> out({scores.size(), std::size_t(3)});
            auto w = out.mutable_unchecked<2>();
            for (std::size_t i = 0; i < scores.size(); ++i) {
                w(i, 0) = scores[i].z0;
                w(i, 1) = scores[i].z1;
                w(i, 2) = scores[i].z2;
            }
            return out;
        },
        "data"_a, "params"_a, "Columns: z0 (theoretical), z1 (normal fit), z2 (S_U fit)");

    // oracles (self-verification)
    m.def("heat_kernel_h3", py::vectorize(heat_kernel_h3), "t"_a, "d"_a);
    m.def("cond_moment2", py::vectorize(cond_moment2), "u"_a, "t_end"_a);
    m.def("cond_moment4", py::vectorize(cond_moment4), "u"_a, "t_end"_a);
    m.def("uncond_moments_x", &uncond_moments_x, "mu"_a, "s_var"_a);
}

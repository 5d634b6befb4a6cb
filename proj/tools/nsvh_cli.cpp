// nsvh: pricing, simulation, fitting, calibration and risk measures for the
// hyperbolic normal stochastic-volatility model family over file inputs.
//
// Exit codes: 0 success, 2 usage/validation error, 3 infeasible target or
// numerical failure, 4 non-convergence.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nsvh/analytic_su.hpp"
#include "nsvh/calibrate.hpp"
#include "nsvh/errors.hpp"
#include "nsvh/io.hpp"
#include "nsvh/math.hpp"
#include "nsvh/mc_engine.hpp"
#include "nsvh/moments.hpp"
#include "nsvh/oracles.hpp"
#include "nsvh/risk.hpp"
#include "nsvh/sabr_normal.hpp"

using nlohmann::json;
using namespace nsvh;

namespace {

constexpr std::uint64_t kDefaultSeed = 20230811;  // documented default; --seed overrides

struct GlobalOpts {
    std::string output;  // empty = stdout
    std::string format = "json";
};

std::ostream& open_output(const GlobalOpts& g, std::ofstream& file) {
    if (g.output.empty()) return std::cout;
    file.open(g.output);
    if (!file) throw std::invalid_argument("cannot open output file: " + g.output);
    return file;
}

void emit(const GlobalOpts& g, const json& doc, const std::string& csv) {
    std::ofstream file;
    auto& os = open_output(g, file);
    if (g.format == "csv" && !csv.empty()) os << csv;
    else os << doc.dump(2) << "\n";
}

json params_json(const NsvhParams& p) {
    return json{{"sigma0", p.sigma0()},   {"alpha", p.alpha()},
                {"rho", p.rho()},         {"lambda", p.lambda()},
                {"f0", p.f0()},           {"t_expiry", p.t_expiry()}};
}

json moments_json(const MomentSummary& m) {
    return json{{"mean", m.mean}, {"mu2", m.mu2}, {"skew", m.skew}, {"exkurt", m.exkurt}};
}

NsvhParams override_lambda(const NsvhParams& p, double lambda) {
    return NsvhParams(p.sigma0(), p.alpha(), p.rho(), lambda, p.f0(), p.t_expiry());
}

int run_price(const std::string& params_path, std::vector<double> strikes,
              std::vector<double> offsets, int lambda_flag, const std::string& method,
              std::size_t n_paths, int n_groups, std::uint64_t seed, int threads,
              const GlobalOpts& g) {
    NsvhParams p = load_params_json(params_path);
    if (lambda_flag >= 0) p = override_lambda(p, lambda_flag);
    const double mean = p.terminal_mean();
    for (double off : offsets) strikes.push_back(mean + off);
    if (strikes.empty()) throw std::invalid_argument("no strikes given");

    json rows = json::array();
    std::string csv = "strike,offset,side,price,std_err\n";
    for (double k : strikes) {
        for (OptionSide side : {OptionSide::call, OptionSide::put}) {
            const char* side_name = side == OptionSide::call ? "call" : "put";
            double value, se = 0.0;
            if (method == "analytic") {
                if (p.lambda() == 1.0) {
                    value = su_option_price(k, side, p);
                } else if (p.lambda() == 0.0) {
                    value = bachelier_price(mean, k, hagan_normal_vol(p, k), p.t_expiry(),
                                            side);
                } else {
                    throw infeasible_error(
                        "analytic pricing requires lambda 0 or 1; use --method mc");
                }
            } else if (method == "mc") {
                const auto est = price_option_mc(p, k, side, n_paths, n_groups, seed, threads);
                value = est.value;
                se = est.std_err;
            } else {
                throw std::invalid_argument("unknown method: " + method);
            }
            json row{{"strike", k}, {"offset", k - mean}, {"side", side_name},
                     {"price", value}};
            if (method == "mc") row["std_err"] = se;
            rows.push_back(row);
            csv += format_full(k) + "," + format_full(k - mean) + "," + side_name + "," +
                   format_full(value) + "," + (method == "mc" ? format_full(se) : "") + "\n";
        }
    }
    emit(g, json{{"params", params_json(p)}, {"method", method}, {"rows", rows}}, csv);
    return 0;
}

int run_fit(const std::string& returns_path, bool levels, int lambda_flag, double horizon,
            const GlobalOpts& g) {
    const auto data = load_returns_csv(returns_path, levels);
    const auto mom = sample_moments(data);
    const NsvhParams fit = lambda_flag == 0 ? fit_normal_sabr(mom, horizon)
                                            : fit_su(mom, horizon);
    emit(g,
         json{{"moments", moments_json(mom)},
              {"params", params_json(fit)},
              {"n", data.size()},
              {"percent", json{{"rho", fit.rho() * 100.0},
                               {"alpha", fit.alpha() * 100.0},
                               {"sigma0", fit.sigma0() * 100.0}}}},
         "");
    return 0;
}

int run_calibrate(const std::string& quotes_path, double forward, double expiry,
                  int lambda_flag, double tol, const GlobalOpts& g) {
    QuoteFile qf = load_quotes_json(quotes_path);
    if (forward != 0.0) qf.forward = forward;
    if (expiry != 0.0) qf.expiry = expiry;
    const auto res =
        calibrate_smile(qf.quotes, qf.forward, qf.expiry, static_cast<double>(lambda_flag),
                        tol);
    emit(g,
         json{{"params", params_json(res.params)},
              {"residuals", res.residuals},
              {"iterations", res.iterations},
              {"converged", res.converged},
              {"diagnostic", res.diagnostic}},
         "");
    return res.converged ? 0 : 4;
}

int run_risk(const std::string& params_path, const std::string& returns_path,
             std::vector<double> ps, const std::string& method, std::size_t n_paths,
             std::uint64_t seed, int threads, const GlobalOpts& g) {
    if (ps.empty()) throw std::invalid_argument("no quantile levels given (--p)");
    json rows = json::array();
    std::string csv = "p,var,es,method,std_err_var,std_err_es\n";
    std::vector<double> data;
    if (method == "empirical") {
        if (returns_path.empty())
            throw std::invalid_argument("--returns required for --method empirical");
        data = load_returns_csv(returns_path);
    }
    for (double p : ps) {
        RiskReport rep{};
        if (method == "closed") {
            const NsvhParams mp = load_params_json(params_path);
            rep = {p, var_closed(mp, p), es_closed(mp, p), "closed_form", 0.0, 0.0};
        } else if (method == "mc") {
            const NsvhParams mp = load_params_json(params_path);
            rep = var_es_mc(mp, p, n_paths, seed, 50, threads);
        } else if (method == "empirical") {
            rep = empirical_var_es(data, p);
        } else {
            throw std::invalid_argument("unknown method: " + method);
        }
        json row{{"p", rep.p}, {"var", rep.var}, {"es", rep.es}, {"method", rep.method}};
        if (rep.method == "monte_carlo") {
            row["std_err_var"] = rep.std_err_var;
            row["std_err_es"] = rep.std_err_es;
        }
        rows.push_back(row);
        csv += format_full(rep.p) + "," + format_full(rep.var) + "," + format_full(rep.es) +
               "," + rep.method + "," + format_full(rep.std_err_var) + "," +
               format_full(rep.std_err_es) + "\n";
    }
    emit(g, json{{"rows", rows}}, csv);
    return 0;
}

int run_probplot(const std::string& returns_path, const std::string& params_path,
                 const GlobalOpts& g) {
    const auto data = load_returns_csv(returns_path);
    const NsvhParams p = load_params_json(params_path);
    const auto scores = probability_plot_scores(data, p);
    std::string csv = "z0,z1,z2\n";
    json rows = json::array();
    for (const auto& s : scores) {
        csv += format_full(s.z0) + "," + format_full(s.z1) + "," + format_full(s.z2) + "\n";
        if (g.format != "csv") rows.push_back(json{{"z0", s.z0}, {"z1", s.z1}, {"z2", s.z2}});
    }
    if (g.format == "csv") {
        emit(g, json{}, csv);
    } else {
        emit(g, json{{"rows", rows}}, csv);
    }
    return 0;
}

int run_simulate(const std::string& params_path, std::vector<double> grid,
                 std::size_t n_paths, std::uint64_t seed, const GlobalOpts& g) {
    const NsvhParams p = load_params_json(params_path);
    if (grid.empty()) grid = {p.t_expiry()};
    const auto m = simulate_paths(p, grid, n_paths, seed);
    std::ofstream file;
    auto& os = open_output(g, file);
    os << "path_id,time,F,sigma\n";
    for (std::size_t i = 0; i < m.n_paths; ++i)
        for (std::size_t j = 0; j < m.times.size(); ++j) {
            const auto& st = m.at(i, j);
            os << i << "," << format_full(m.times[j]) << "," << format_full(st.f_t) << ","
               << format_full(st.sigma_t) << "\n";
        }
    return 0;
}

int run_verify(const std::string& suite, std::uint64_t seed, int threads,
               const GlobalOpts& g) {
    std::vector<CheckResult> checks;
    auto append = [&](std::vector<CheckResult> v) {
        checks.insert(checks.end(), v.begin(), v.end());
    };
    if (suite == "kernel" || suite == "all") append(verify_kernel_suite());
    if (suite == "euler" || suite == "all") append(verify_euler_suite(seed, threads));
    if (suite == "moments" || suite == "all") append(verify_moment_suite(seed, threads));
    if (checks.empty()) throw std::invalid_argument("unknown suite: " + suite);

    std::ofstream file;
    auto& os = open_output(g, file);
    int failures = 0;
    for (const auto& c : checks) {
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
        if (!c.detail.empty()) os << "  (" << c.detail << ")";
        os << "\n";
        if (!c.pass) ++failures;
    }
    os << (failures == 0 ? "all checks passed" : "checks failed") << "\n";
    return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NSVh model toolkit: exact Monte-Carlo simulation, closed-form S_U "
                 "pricing, normal-SABR analytics, moment fitting and risk measures"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("-o,--output", g.output, "write results to a file instead of stdout");
    app.add_option("--format", g.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    std::string params_path, returns_path, quotes_path, method = "analytic";
    std::vector<double> strikes, offsets, ps, grid;
    int lambda_flag = -1;
    std::size_t n_paths = 1'000'000;
    int n_groups = 100, threads = 1;
    std::uint64_t seed = kDefaultSeed;
    bool levels = false;
    double horizon = 1.0, forward = 0.0, expiry = 0.0, tol = 1e-10;

    auto* price = app.add_subcommand("price", "vanilla option prices on a strike list");
    price->fallthrough();
    price->add_option("--params", params_path, "NsvhParams JSON file")->required();
    price->add_option("--strikes", strikes, "absolute strikes");
    price->add_option("--offsets", offsets, "strikes as offsets from the terminal mean");
    price->add_option("--lambda", lambda_flag, "override lambda (0 or 1)")
        ->check(CLI::IsMember({0, 1}));
    price->add_option("--method", method, "analytic or mc")
        ->check(CLI::IsMember({"analytic", "mc"}));
    price->add_option("--paths", n_paths, "MC triplets (two samples each)");
    price->add_option("--groups", n_groups, "independent averaging groups");
    price->add_option("--seed", seed, "RNG seed");
    price->add_option("--threads", threads, "worker threads");

    auto* fit = app.add_subcommand("fit", "moment-matching fit to a return series");
    fit->fallthrough();
    fit->add_option("--returns", returns_path, "CSV of returns (or levels)")->required();
    fit->add_option("--lambda", lambda_flag, "0 = normal SABR, 1 = S_U")
        ->required()
        ->check(CLI::IsMember({0, 1}));
    fit->add_option("--horizon", horizon, "horizon T of the fitted distribution");
    fit->add_flag("--levels", levels, "input column holds index levels, convert to returns");

    auto* cal = app.add_subcommand("calibrate", "calibrate (sigma0, alpha, rho) to a smile");
    cal->fallthrough();
    cal->add_option("--quotes", quotes_path, "quotes JSON file")->required();
    cal->add_option("--forward", forward, "override the forward");
    cal->add_option("--expiry", expiry, "override the expiry");
    cal->add_option("--lambda", lambda_flag, "0 or 1")->required()
        ->check(CLI::IsMember({0, 1}));
    cal->add_option("--tol", tol, "residual tolerance in vol units");

    auto* risk = app.add_subcommand("risk", "value-at-risk and expected shortfall");
    risk->fallthrough();
    risk->add_option("--params", params_path, "NsvhParams JSON (closed/mc methods)");
    risk->add_option("--returns", returns_path, "returns CSV (empirical method)");
    risk->add_option("--p", ps, "quantile levels")->required();
    risk->add_option("--method", method, "closed, mc or empirical")->required();
    risk->add_option("--paths", n_paths, "MC triplets");
    risk->add_option("--seed", seed, "RNG seed");
    risk->add_option("--threads", threads, "worker threads");

    auto* prob = app.add_subcommand("probplot", "probability-plot scores (z0, z1, z2)");
    prob->fallthrough();
    prob->add_option("--returns", returns_path, "returns CSV")->required();
    prob->add_option("--params", params_path, "fitted lambda=1 params JSON")->required();

    auto* sim = app.add_subcommand("simulate", "exact path simulation to a time grid");
    sim->fallthrough();
    sim->add_option("--params", params_path, "NsvhParams JSON")->required();
    sim->add_option("--grid", grid, "strictly increasing times (default: expiry only)");
    sim->add_option("--paths", n_paths, "number of paths");
    sim->add_option("--seed", seed, "RNG seed");

    auto* ver = app.add_subcommand("verify", "run the model self-verification oracles");
    ver->fallthrough();
    std::string suite = "all";
    ver->add_option("--suite", suite, "kernel, euler, moments or all")
        ->check(CLI::IsMember({"kernel", "euler", "moments", "all"}));
    ver->add_option("--seed", seed, "RNG seed");
    ver->add_option("--threads", threads, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (price->parsed())
            return run_price(params_path, strikes, offsets, lambda_flag, method, n_paths,
                             n_groups, seed, threads, g);
        if (fit->parsed()) return run_fit(returns_path, levels, lambda_flag, horizon, g);
        if (cal->parsed())
            return run_calibrate(quotes_path, forward, expiry, lambda_flag, tol, g);
        if (risk->parsed())
            return run_risk(params_path, returns_path, ps, method, n_paths, seed, threads, g);
        if (prob->parsed()) return run_probplot(returns_path, params_path, g);
        if (sim->parsed()) return run_simulate(params_path, grid, n_paths, seed, g);
        if (ver->parsed()) return run_verify(suite, seed, threads, g);
    } catch (const infeasible_error& e) {
        std::cerr << json{{"error", "infeasible"}, {"message", e.what()},
                          {"attainable_bound", e.attainable_bound()}}
                         .dump()
                  << "\n";
        return 3;
    } catch (const no_solution_error& e) {
        std::cerr << json{{"error", "no_solution"}, {"message", e.what()}}.dump() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << json{{"error", "validation"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << json{{"error", "domain"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
        return 3;
    }
    return 2;
}

#include "nsvh/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nsvh {

namespace {

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(path + ": invalid JSON (" + e.what() + ")");
    }
    return j;
}

double require_number(const nlohmann::json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j[key].is_number())
        throw std::invalid_argument(path + ": missing or non-numeric field \"" + key + "\"");
    return j[key].get<double>();
}

}  // namespace

NsvhParams load_params_json(const std::string& path) {
    const auto j = read_json_file(path);
    return NsvhParams(require_number(j, "sigma0", path), require_number(j, "alpha", path),
                      require_number(j, "rho", path), require_number(j, "lambda", path),
                      require_number(j, "f0", path), require_number(j, "t_expiry", path));
}

std::string params_to_json(const NsvhParams& p) {
    nlohmann::json j{{"sigma0", p.sigma0()},   {"alpha", p.alpha()},
                     {"rho", p.rho()},         {"lambda", p.lambda()},
                     {"f0", p.f0()},           {"t_expiry", p.t_expiry()}};
    return j.dump(2);
}

QuoteFile load_quotes_json(const std::string& path) {
    const auto j = read_json_file(path);
    QuoteFile out;
    out.forward = require_number(j, "forward", path);
    out.expiry = require_number(j, "expiry", path);
    if (!j.contains("quotes") || !j["quotes"].is_array())
        throw std::invalid_argument(path + ": missing \"quotes\" array");
    for (const auto& q : j["quotes"]) {
        SmileQuote sq;
        sq.strike_offset = require_number(q, "offset", path);
        sq.value = require_number(q, "value", path);
        const std::string kind = q.value("kind", "normal_vol");
        if (kind == "normal_vol") sq.kind = QuoteKind::normal_vol;
        else if (kind == "price") sq.kind = QuoteKind::option_price;
        else throw std::invalid_argument(path + ": quote kind must be normal_vol or price");
        const std::string side = q.value("side", "put");
        if (side == "call") sq.side = OptionSide::call;
        else if (side == "put") sq.side = OptionSide::put;
        else throw std::invalid_argument(path + ": quote side must be call or put");
        out.quotes.push_back(sq);
    }
    return out;
}

std::vector<double> load_returns_csv(const std::string& path, bool levels) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::vector<double> values;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        double v = 0.0;
        const auto res = std::from_chars(line.data(), line.data() + line.size(), v);
        if (res.ec != std::errc{} || res.ptr != line.data() + line.size()) {
            if (first) { first = false; continue; }  // header row
            throw std::invalid_argument(path + ": non-numeric row \"" + line + "\"");
        }
        first = false;
        values.push_back(v);
    }
    if (!levels) return values;
    if (values.size() < 2)
        throw std::invalid_argument(path + ": need at least 2 levels to form returns");
    std::vector<double> returns(values.size() - 1);
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i - 1] == 0.0)
            throw std::invalid_argument(path + ": zero level encountered");
        returns[i - 1] = 100.0 * (values[i] / values[i - 1] - 1.0);
    }
    return returns;
}

std::string format_full(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace nsvh

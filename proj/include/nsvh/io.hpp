#pragma once

#include <string>
#include <vector>

#include "nsvh/calibrate.hpp"
#include "nsvh/params.hpp"

namespace nsvh {

// File formats shared by the CLI and the bindings.
//
// params JSON:  {"sigma0": r, "alpha": r, "rho": r, "lambda": r,
//                "f0": r, "t_expiry": r}
// quotes JSON:  {"forward": r, "expiry": r,
//                "quotes": [{"offset": r, "kind": "normal_vol"|"price",
//                            "value": r, "side": "call"|"put"?}, ...]}
// returns CSV:  one numeric column, optional header "return"; with
//               levels=true a "level" column converted to percent returns
//               r_i = 100 (P_i / P_{i-1} - 1).

NsvhParams load_params_json(const std::string& path);
std::string params_to_json(const NsvhParams& p);

struct QuoteFile {
    double forward;
    double expiry;
    std::vector<SmileQuote> quotes;
};
QuoteFile load_quotes_json(const std::string& path);

std::vector<double> load_returns_csv(const std::string& path, bool levels = false);

// Serialize a double so that parsing it back recovers the bits
// (up to 17 significant digits).
std::string format_full(double v);

}  // namespace nsvh

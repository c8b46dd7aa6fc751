#pragma once

#include <string>

#include <json.hpp>

#include "abelcount/counting.hpp"

namespace abelcount::cli {

using nlohmann::json;

/// "~" followed by 6 significant digits.
std::string approx(double x);
/// Inverse of approx; throws ConfigError on anything else.
double parse_approx(const std::string& text);

json to_json(const ConstantReport& c);
json to_json(const CountReport& r);
std::string to_tsv(const CountReport& r);

/// Reads back what to_json(CountReport) wrote.  Floating fields come back at
/// the printed precision, so to_json(from_json(j)) == j.
CountReport count_report_from_json(const json& j);

/// Compact, key-sorted, newline-terminated.
std::string dump(const json& j);

}  // namespace abelcount::cli

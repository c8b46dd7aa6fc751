#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace abelcount::cli {

enum class Suite { Quick, Full };

/// "quick" or "full"; ConfigError otherwise.
Suite parse_suite(std::string_view name);

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

/// Runs criteria 1..12 in order, calling `done` after each one.  `only`
/// restricts the run to a single criterion when nonzero.
std::vector<CriterionResult> run_battery(Suite suite, const std::function<void(const CriterionResult&)>& done = {},
                                         int only = 0);

std::string format_line(const CriterionResult& r);

}  // namespace abelcount::cli

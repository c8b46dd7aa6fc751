// One line per acceptance criterion; exit status 0 only when every line passes.
//   acceptance [quick|full] [criterion]

#include <cstdlib>
#include <iostream>
#include <string>

#include "abelcount/errors.hpp"
#include "battery.hpp"

int main(int argc, char** argv) {
    using namespace abelcount::cli;
    try {
        const Suite suite = parse_suite(argc > 1 ? argv[1] : "full");
        const int only = argc > 2 ? std::atoi(argv[2]) : 0;
        int failed = 0;
        const auto results = run_battery(suite, [&](const CriterionResult& r) {
            std::cout << format_line(r) << std::endl;
            failed += !r.pass;
        }, only);
        std::cout << results.size() - failed << "/" << results.size() << " criteria pass" << std::endl;
        return failed == 0 ? 0 : 1;
    } catch (const abelcount::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}

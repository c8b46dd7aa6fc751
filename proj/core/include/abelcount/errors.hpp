#pragma once

#include <stdexcept>
#include <string>

namespace abelcount {

// Malformed user input: group specs, rational literals, place lists.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An operation was called outside its domain (bound exceeded,
// inadmissible S, non-surjective character, ...).
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace abelcount

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace medpool {

// Malformed or invariant-violating user input (tables, config files, flags).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// No study (or too few studies) can feed the requested pooling approach.
class IneligibleStudiesError : public std::runtime_error {
public:
    IneligibleStudiesError(const std::string& what, std::vector<std::string> ids = {})
        : std::runtime_error(what), ids_(std::move(ids)) {}

    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    std::vector<std::string> ids_;
};

}  // namespace medpool

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace intphase {

// Invalid physical or configuration input. CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical guarantee could not be met (tolerance, convergence, cross-check).
// CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct Warning {
    std::string code;
    std::string message;
};

using Warnings = std::vector<Warning>;

inline void add_warning(Warnings* sink, std::string code, std::string message) {
    if (sink) sink->push_back({std::move(code), std::move(message)});
}

inline bool has_warning(const Warnings& warnings, const std::string& code) {
    for (const auto& w : warnings)
        if (w.code == code) return true;
    return false;
}

}  // namespace intphase

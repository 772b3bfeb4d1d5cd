#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vref {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid argument to a model evaluation (negative temperature, reverse vds, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Configuration/schema violation. Collects every issue found.
struct ConfigError : Error {
    std::vector<std::string> issues;
    explicit ConfigError(std::vector<std::string> list)
        : Error(join(list)), issues(std::move(list)) {}
    explicit ConfigError(const std::string& one)
        : Error(one), issues{one} {}

private:
    static std::string join(const std::vector<std::string>& list) {
        std::string msg = "configuration error:";
        for (const auto& s : list) msg += "\n  " + s;
        return msg;
    }
};

/// A nonlinear solve failed; carries the last iterate for diagnostics.
struct ConvergenceError : Error {
    std::string where;
    double last_value;
    double residual;
    ConvergenceError(std::string stage, double value, double res, const std::string& detail)
        : Error("convergence failure in " + stage + ": " + detail +
                " (last iterate " + std::to_string(value) +
                ", residual " + std::to_string(res) + ")"),
          where(std::move(stage)), last_value(value), residual(res) {}
};

/// Numerical breakdown (singular matrix, division by an ill-conditioned term).
struct NumericalError : Error {
    using Error::Error;
};

/// A closed form was evaluated outside its stated assumptions.
struct AssumptionError : Error {
    using Error::Error;
};

}  // namespace vref

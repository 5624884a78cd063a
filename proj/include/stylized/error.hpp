#ifndef STYLIZED_ERROR_HPP
#define STYLIZED_ERROR_HPP

#include <stdexcept>
#include <string>

namespace stylized {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration or argument outside an operation's domain.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Input data that cannot be parsed or violates a data invariant.
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

/// An estimator could not produce a result (degenerate input, non-convergence).
class AnalysisError : public Error {
public:
    explicit AnalysisError(const std::string& msg) : Error(msg) {}
};

} // namespace stylized

#endif

#ifndef PHOTOEMISSION_ERRORS_HPP
#define PHOTOEMISSION_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pem {

// Bad user input (non-finite parameters, malformed config, ...).
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

// A quadrature or expansion failed to reach its accuracy target.
class accuracy_error : public std::runtime_error {
public:
    explicit accuracy_error(const std::string& what) : std::runtime_error(what) {}
};

// The collocation solve (or a linear system inside it) failed.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace pem

#endif

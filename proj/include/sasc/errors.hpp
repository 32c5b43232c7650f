// errors.hpp: exception hierarchy shared by every sasc module.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sasc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pivot below working precision during LU factorization.
struct SingularMatrixError : Error {
    SingularMatrixError(std::size_t pivot, const std::string& what)
        : Error(what), pivot_index(pivot) {}
    std::size_t pivot_index;
};

struct ConvergenceError : Error {
    using Error::Error;
};

// A model whose drift matrix has an eigenvalue with Re >= -margin.
struct InstabilityError : Error {
    InstabilityError(double abscissa, const std::string& what)
        : Error(what), spectral_abscissa(abscissa) {}
    double spectral_abscissa;
};

struct UndefinedAsymmetryError : Error {
    using Error::Error;
};

// Time-domain integration lost the conjugate-pair structure or diverged.
struct IntegrationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    ConfigError(std::string k, const std::string& what) : Error(what), key(std::move(k)) {}
    std::string key;
};

}  // namespace sasc

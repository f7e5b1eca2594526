#pragma once

#include <stdexcept>
#include <string>

namespace zeno {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: wrong dimensions, non-Hermitian operators, bad horizons.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Conditioning on an outcome whose probability is below the noise floor.
class ImpossibleOutcome : public Error {
public:
    ImpossibleOutcome(double probability, double time)
        : Error("measurement outcome impossible (probability " + std::to_string(probability) +
                " at t=" + std::to_string(time) + ")"),
          probability_(probability), time_(time) {}

    double probability() const noexcept { return probability_; }
    double time() const noexcept { return time_; }

private:
    double probability_;
    double time_;
};

/// An effective generator failed its hermiticity check.
class HermiticityError : public Error {
public:
    HermiticityError(double residual, double time)
        : Error("effective generator not Hermitian (residual " + std::to_string(residual) +
                " at t=" + std::to_string(time) + ")"),
          residual_(residual), time_(time) {}

    double residual() const noexcept { return residual_; }
    double time() const noexcept { return time_; }

private:
    double residual_;
    double time_;
};

}  // namespace zeno

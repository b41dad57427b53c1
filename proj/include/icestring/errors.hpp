#pragma once

#include <stdexcept>
#include <string>

namespace icestr {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// shapes or tuple lengths that do not fit together
class DimensionError : public Error {
public:
    using Error::Error;
};

class InvalidStateError : public Error {
public:
    using Error::Error;
};

// basis or dense matrix larger than the configured cap
class CapacityError : public Error {
public:
    using Error::Error;
};

class InvalidOperatorError : public Error {
public:
    using Error::Error;
};

class PoleGuardError : public Error {
public:
    PoleGuardError(double E, double pole)
        : Error("trial energy " + std::to_string(E) + " too close to pole " + std::to_string(pole)),
          energy_(E), pole_(pole) {}
    double energy() const { return energy_; }
    double pole() const { return pole_; }

private:
    double energy_;
    double pole_;
};

}  // namespace icestr

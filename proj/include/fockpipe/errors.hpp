#pragma once

#include <stdexcept>
#include <string>

namespace fockpipe {

// Base class for all library errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an operation would push non-negligible amplitude past the
// Fock-space cutoff (photon addition on a saturated state, a squeezer with
// too little headroom, a coherent state that does not fit the basis).
class truncation_error : public error {
public:
    truncation_error(const std::string& what, double lost_mass)
        : error(what), lost_mass_(lost_mass) {}

    double lost_mass() const { return lost_mass_; }

private:
    double lost_mass_;
};

}  // namespace fockpipe

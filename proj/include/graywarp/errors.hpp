#pragma once

#include <stdexcept>
#include <string>

namespace graywarp {

/// Base class for all domain-specific failures raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested family parameters do not satisfy the preconditions of the
/// requested family kind (wrong sign pattern, boundary case, bad fiber
/// normalization, ...).
class FamilyMismatch : public Error {
public:
    using Error::Error;
};

/// The quartic first-integral polynomial does not have the root structure
/// required by the requested family (e.g. discriminant of the quadratic in
/// f^2 is negative).
class NoRealRoots : public Error {
public:
    using Error::Error;
};

/// A profile was evaluated outside its solved domain.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

/// A curvature or inner-product quantity was requested at (or too close to)
/// a pole where the warp factor vanishes and the quantity is singular.
class PoleEvaluation : public Error {
public:
    using Error::Error;
};

/// The Ricci eigenvalue gap lambda - mu is negative, so no real closed
/// one-form with the required square exists.  Carries a witness abscissa.
class NegativeGap : public Error {
public:
    NegativeGap(const std::string& what, double witness)
        : Error(what), witness_t(witness) {}
    double witness_t;
};

/// The shifted eigenvalue gap vanished where a division by it was required.
class DegenerateGap : public Error {
public:
    using Error::Error;
};

}  // namespace graywarp

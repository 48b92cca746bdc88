#pragma once

#include <stdexcept>
#include <string>

namespace weaksim {

// Every failure the library raises deliberately derives from Error, so
// callers can catch one type at the CLI boundary and map it to an exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- construction / input problems ---------------------------------------

struct ZeroVector : Error {
    using Error::Error;
};

struct DimMismatch : Error {
    using Error::Error;
};

struct NonHermitian : Error {
    using Error::Error;
};

struct NonHermitianObservable : Error {
    using Error::Error;
};

struct BadGridSpec : Error {
    using Error::Error;
};

struct BadScenario : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// --- runtime guards -------------------------------------------------------

struct OrthogonalPostSelection : Error {
    using Error::Error;
};

struct TailMass : Error {
    using Error::Error;
};

struct StabilityGuard : Error {
    using Error::Error;
};

struct AmplificationGuard : Error {
    using Error::Error;
};

struct SizeGuard : Error {
    using Error::Error;
};

struct DegeneratePointer : Error {
    using Error::Error;
};

// Raised when a computed quantity violates one of the library's own
// mathematical guarantees (lost norm, broken uncertainty bound, ...).
struct InvariantViolation : Error {
    using Error::Error;
};

} // namespace weaksim

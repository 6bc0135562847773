#pragma once

#include <stdexcept>
#include <string>

namespace clk {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateSampleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroSetMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Denominator of a Cauchy-Fantappie kernel fell below its guard threshold.
struct SingularKernelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegreeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct StepTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProximityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyRegionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonStarShapedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedModeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedExponentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OutOfScopeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The Leray pairing r_zeta . (zeta - z) vanished for a sampled pair with
/// zeta in U \ D and z in D; the H-operators require it to be nonvanishing.
struct ConvexityPrecheckError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace clk

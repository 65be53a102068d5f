#pragma once

#include <stdexcept>

namespace cgp {

/// Input data could not be read or parsed (bad CSV row, missing file, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure violated its accuracy contract
/// (inversion drift, singular recursion, degenerate estimate, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested operation is not defined for this object, e.g. the density
/// of a copula that is not absolutely continuous.
class UnsupportedOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace cgp

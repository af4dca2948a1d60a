#pragma once

#include <stdexcept>
#include <string>

namespace cayley {

// Error taxonomy shared by the library and the CLI. Each class maps to a
// distinct process exit code in the CLI front-end.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed encodings, unknown orbit labels, invalid configuration values.
struct DataError : Error {
    explicit DataError(const std::string& what) : Error(what) {}
};

// A query needs graph structure that the finite window does not contain.
struct WindowError : Error {
    explicit WindowError(const std::string& what) : Error(what) {}
};

// A vertex cap, ball cap or search node limit was exceeded.
struct ResourceError : Error {
    explicit ResourceError(const std::string& what) : Error(what) {}
};

// Eigensolver non-convergence and similar numerical failures.
struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(what) {}
};

// An oracle or weight scheme violates one of its stated invariants
// (degree bound, weight symmetry, Markov rows not summing to one).
struct ConsistencyError : Error {
    explicit ConsistencyError(const std::string& what) : Error(what) {}
};

} // namespace cayley

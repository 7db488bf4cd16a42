#pragma once

#include <stdexcept>
#include <string>

namespace seqmc {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHermitian : Error {
    using Error::Error;
};

struct NotPsd : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct ParamOutOfRange : Error {
    using Error::Error;
};

struct SingularAverage : Error {
    using Error::Error;
};

struct IncompleteChannel : Error {
    using Error::Error;
};

struct NotQubit : Error {
    using Error::Error;
};

struct BlochOutOfBall : Error {
    using Error::Error;
};

// Requested POVM weights leave M0 with a negative eigenvalue.
struct InfeasibleWeights : Error {
    InfeasibleWeights(const std::string& msg, double min_eigenvalue)
        : Error(msg + " (min eigenvalue " + std::to_string(min_eigenvalue) + ")"),
          min_eigenvalue(min_eigenvalue) {}
    double min_eigenvalue;
};

// Required target Gram matrix is not positive semidefinite.
struct InfeasibleGram : Error {
    explicit InfeasibleGram(const std::string& msg, double min_eigenvalue = 0.0)
        : Error(msg), min_eigenvalue(min_eigenvalue) {}
    double min_eigenvalue;
};

// Conclusive weights force a negative inconclusive weight a_x.
struct WeightsTooLarge : Error {
    WeightsTooLarge(const std::string& msg, double offending_weight)
        : Error(msg + " (a = " + std::to_string(offending_weight) + ")"),
          offending_weight(offending_weight) {}
    double offending_weight;
};

struct TargetUnreachable : Error {
    using Error::Error;
};

struct DivergentT : Error {
    using Error::Error;
};

struct SchemaViolation : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace seqmc

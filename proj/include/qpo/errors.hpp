#pragma once

#include <stdexcept>
#include <string>

namespace qpo {

/// Input outside the mathematical domain of an operation (bad parameter, negative time, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Floating-point breakdown: argument outside an acos window, integrator hitting the singularity.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computed object disagrees with the dynamics it claims to describe.
class consistency_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class synthesis_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Brute-force search found no schedule meeting the endpoint tolerance.
class infeasible_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qpo

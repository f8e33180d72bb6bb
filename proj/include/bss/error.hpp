#pragma once

#include <stdexcept>
#include <string>

namespace bss {

/// An operation needs a model capability (analytic pdf, pdf gradient,
/// sampler, marginals) that the model does not provide.
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arguments outside an operation's domain (epsilon outside [0,1],
/// singular mixing matrix, non-normalizable profile, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to produce a usable answer (no root in
/// bracket, non-finite function values, non-convergent iteration).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed scenario / configuration input.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace bss

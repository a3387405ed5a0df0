#pragma once

#include <stdexcept>
#include <string>

namespace joaicl {

// Base class for every error raised by the toolkit. Subclasses map to the
// CLI exit-code taxonomy: validation failures exit 2, remote-service
// failures exit 3, aborted runs exit 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Schema, span, or config violations. Always fatal: no partial loads.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Remote call failed after all retries.
class NetworkError : public Error {
public:
    using Error::Error;
};

// A backend response that cannot be mapped onto a stance label.
class UnparseableLabel : public Error {
public:
    using Error::Error;
};

// The oracle agent was asked about a segment with no gold annotation.
class OracleMissingAnnotation : public Error {
public:
    using Error::Error;
};

// Article-level output parsing: no label word present at all.
class NoLabelFound : public Error {
public:
    using Error::Error;
};

// Article-level output parsing: more than one label word qualifies.
class AmbiguousLabel : public Error {
public:
    using Error::Error;
};

// Experiment exceeded its failure budget.
class RunAborted : public Error {
public:
    using Error::Error;
};

} // namespace joaicl

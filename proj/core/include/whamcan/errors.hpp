#pragma once

#include <stdexcept>
#include <string>

namespace whamcan {

/// Base class for all whamcan exceptions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument fell outside its documented range.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A parameter set failed validation; the message lists every violated range.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The requested bus operation is illegal under CAN rules
/// (e.g. two nodes transmitting the same identifier concurrently).
class ProtocolViolation : public Error {
public:
    using Error::Error;
};

/// Operation attempted on a halted system.
class HaltedError : public Error {
public:
    using Error::Error;
};

/// Scenario configuration could not be parsed or is invalid.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A statistical fit has no solution (degenerate regressor).
class FitError : public Error {
public:
    using Error::Error;
};

} // namespace whamcan

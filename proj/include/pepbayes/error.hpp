#pragma once

#include <stdexcept>
#include <string>

namespace pepbayes {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input text could not be parsed (bad header, ragged row, bad number).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Input parsed but violates a domain rule (bad letter, bad range).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Operation refused because the requested space is too large to enumerate.
class CapacityError : public Error {
public:
    using Error::Error;
};

} // namespace pepbayes

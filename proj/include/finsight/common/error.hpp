#pragma once

#include <stdexcept>
#include <string>

namespace finsight {

/// Base of every exception thrown by the finsight libraries.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input shapes or values violate an operation's precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Structured text could not be parsed. `position` is a byte offset when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Well-formed document whose content violates the schema. `field` names the offender.
class SchemaError : public Error {
public:
    SchemaError(const std::string& field, const std::string& what)
        : Error(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace finsight

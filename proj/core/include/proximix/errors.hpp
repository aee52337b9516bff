#pragma once

#include <stdexcept>
#include <string>

namespace proximix {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MissingColumnError : public Error {
public:
    explicit MissingColumnError(const std::string& column)
        : Error("missing column: " + column), column_(column) {}
    const std::string& column() const { return column_; }

private:
    std::string column_;
};

class EmptyAfterCleaningError : public Error {
public:
    EmptyAfterCleaningError() : Error("no rows left after cleaning") {}
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class EncodeError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

class EmptySubgroupError : public Error {
public:
    using Error::Error;
};

class LengthMismatchError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class EmptyGroupError : public Error {
public:
    using Error::Error;
};

class NoCounterfactualsError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace proximix

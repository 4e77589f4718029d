#pragma once

#include <stdexcept>
#include <string>

namespace imdr {

/// Root of everything this library throws.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad configuration (run config, index config, CLI usage). CLI exit code 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Defective input data (CSV contents, table shapes, degenerate columns). CLI exit code 2.
class DataError : public Error {
public:
    using Error::Error;
};

class ParseError : public DataError {
public:
    using DataError::DataError;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class CoverageError : public DataError {
public:
    using DataError::DataError;
};

class DuplicateError : public DataError {
public:
    using DataError::DataError;
};

class MappingError : public DataError {
public:
    using DataError::DataError;
};

/// A column or variable with no spread where spread is required.
class DegenerateError : public DataError {
public:
    using DataError::DataError;
};

/// Wrong dimensions / too few observations.
class ShapeError : public DataError {
public:
    using DataError::DataError;
};

/// A referenced key (area code, variable name) does not exist.
class LookupError : public DataError {
public:
    using DataError::DataError;
};

/// A control variable explains another variable exactly.
class CollinearityError : public DataError {
public:
    using DataError::DataError;
};

} // namespace imdr

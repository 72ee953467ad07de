#pragma once

#include <stdexcept>
#include <string>

namespace kolmo {

class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: mesh layout, degrees, configuration fields.
class ConfigError : public Error
{
public:
    using Error::Error;
};

/// Evaluation requested outside the region where an object is defined.
class DomainError : public Error
{
public:
    using Error::Error;
};

class AssemblyError : public Error
{
public:
    using Error::Error;
};

class SolverError : public Error
{
public:
    using Error::Error;
};

/// Eigensolver breakdown or non-finite intermediate results.
class NumericError : public Error
{
public:
    using Error::Error;
};

} // namespace kolmo

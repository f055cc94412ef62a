#pragma once

#include <stdexcept>
#include <string>

namespace gnnwb {

// Base for all recoverable workbench errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input: bad files, bad configs, bad arguments.
class InputError : public Error {
 public:
  using Error::Error;
};

// Problems in an experiment config file. Messages name the offending line.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

// A partitioner was asked to satisfy balance constraints that no assignment can meet.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace gnnwb

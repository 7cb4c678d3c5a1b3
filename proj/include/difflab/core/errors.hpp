#pragma once

#include <stdexcept>
#include <string>

namespace difflab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A guard of a primitive (division, log, sqrt, pow) failed at an evaluation point.
class DomainError : public Error {
public:
  using Error::Error;
};

/// A non-differentiable primitive (abs, relu, atzero) sits exactly at the base of a jet.
class KinkError : public Error {
public:
  using Error::Error;
};

class NotDifferentiable : public Error {
public:
  using Error::Error;
};

class CoincidentNodes : public Error {
public:
  using Error::Error;
};

class OrderMismatch : public Error {
public:
  using Error::Error;
};

class BasePointMismatch : public Error {
public:
  using Error::Error;
};

class InvalidWitness : public Error {
public:
  using Error::Error;
};

class InconsistentPair : public Error {
public:
  using Error::Error;
};

class NoCurves : public Error {
public:
  using Error::Error;
};

class NoCurveThroughPoint : public Error {
public:
  using Error::Error;
};

class NoWeakDerivative : public Error {
public:
  using Error::Error;
};

class SchemaError : public Error {
public:
  using Error::Error;
};

class ParseError : public SchemaError {
public:
  ParseError(const std::string& msg, std::size_t pos)
      : SchemaError(msg + " at offset " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

class UnknownEntry : public Error {
public:
  using Error::Error;
};

class UnknownClaim : public Error {
public:
  using Error::Error;
};

} // namespace difflab

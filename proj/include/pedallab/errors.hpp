#pragma once

#include <stdexcept>
#include <string>

namespace pedallab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A family/locus precondition does not hold (exterior M, M off the ellipse...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The characteristic 2x2 system of a line family is singular at `parameter`.
class SingularFamily : public Error {
 public:
  SingularFamily(double parameter, const std::string& what)
      : Error(what), parameter_(parameter) {}
  double parameter() const noexcept { return parameter_; }

 private:
  double parameter_;
};

/// The line of a family is undefined (zero normal), e.g. P(t) = M.
class DegenerateLine : public Error {
 public:
  DegenerateLine(double parameter, const std::string& what)
      : Error(what), parameter_(parameter) {}
  double parameter() const noexcept { return parameter_; }

 private:
  double parameter_;
};

/// Explicit formula hits a vanishing denominator.
class SingularParameter : public Error {
 public:
  SingularParameter(double parameter, const std::string& what)
      : Error(what), parameter_(parameter) {}
  double parameter() const noexcept { return parameter_; }

 private:
  double parameter_;
};

class ZeroTotalWeight : public Error {
 public:
  using Error::Error;
};

class ZeroRotationIndex : public Error {
 public:
  using Error::Error;
};

class CollinearVertices : public Error {
 public:
  using Error::Error;
};

/// N -> 2N refinement disagreed beyond the reporting tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Curve evaluation failed at a grid node.
class EvaluationError : public Error {
 public:
  EvaluationError(double parameter, const std::string& what)
      : Error(what), parameter_(parameter) {}
  double parameter() const noexcept { return parameter_; }

 private:
  double parameter_;
};

}  // namespace pedallab

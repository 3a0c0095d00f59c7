#pragma once

#include <stdexcept>
#include <string>

namespace surfsig {

// Exit codes used by the command line tool.
enum class ErrorKind { parse = 2, domain = 3, convergence = 4, verification = 5 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(ErrorKind::parse, w) {}
};

// Shape mismatches and out-of-domain inputs share the math-domain exit code.
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};

struct ShapeError : DomainError {
  explicit ShapeError(const std::string& w) : DomainError("shape: " + w) {}
};

struct ConvergenceError : Error {
  ConvergenceError(const std::string& w, double gap) : Error(ErrorKind::convergence, w), gap(gap) {}
  double gap;
};

struct VerificationError : Error {
  explicit VerificationError(const std::string& w) : Error(ErrorKind::verification, w) {}
};

}  // namespace surfsig

#ifndef OPKERNEL_ERRORS_HPP
#define OPKERNEL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace opk {

// Failure categories, mirrored one-to-one by the CLI exit codes:
//   negative  -> a well-formed mathematical "no" (exit 1)
//   malformed -> unusable input: bad file, bad shape, bad argument (exit 2)
//   numerical -> a residual threshold was exceeded at run time (exit 3)
enum class ErrorKind { negative, malformed, numerical };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class InvalidArgumentError : public Error {
public:
  explicit InvalidArgumentError(const std::string& what)
      : Error(ErrorKind::malformed, what) {}
};

class MalformedKernelError : public Error {
public:
  explicit MalformedKernelError(const std::string& what)
      : Error(ErrorKind::malformed, what) {}
};

// Residual left a hard threshold; never downgraded to a warning.
class IllConditionedError : public Error {
public:
  IllConditionedError(const std::string& what, double residual)
      : Error(ErrorKind::numerical, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

class ContractionViolationError : public Error {
public:
  explicit ContractionViolationError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

class CertificateInvalidError : public Error {
public:
  explicit CertificateInvalidError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

class InconsistencyError : public Error {
public:
  explicit InconsistencyError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

class InvalidEffectError : public Error {
public:
  explicit InvalidEffectError(const std::string& what)
      : Error(ErrorKind::numerical, what) {}
};

class NonCommutingEffectError : public Error {
public:
  explicit NonCommutingEffectError(const std::string& what)
      : Error(ErrorKind::malformed, what) {}
};

}  // namespace opk

#endif  // OPKERNEL_ERRORS_HPP

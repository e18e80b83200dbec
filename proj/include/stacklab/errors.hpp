#pragma once

#include <stdexcept>
#include <string>

namespace stacklab {

// Error taxonomy mapped onto CLI exit codes:
//   InputError -> 2, Precondition -> 3, Verification -> 1, Internal -> 1.
enum class ErrorKind { InputError, Precondition, Verification, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct InputError : Error {
  explicit InputError(const std::string& w) : Error(ErrorKind::InputError, w) {}
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& w) : Error(ErrorKind::Precondition, w) {}
};

struct InternalCheckFailed : Error {
  explicit InternalCheckFailed(const std::string& w) : Error(ErrorKind::Internal, w) {}
};

// words
struct FactorMismatch : PreconditionError {
  explicit FactorMismatch(const std::string& w) : PreconditionError(w) {}
};
struct NotCyclicallyReduced : PreconditionError {
  explicit NotCyclicallyReduced(const std::string& w) : PreconditionError(w) {}
};
struct ProperPower : PreconditionError {
  explicit ProperPower(const std::string& w) : PreconditionError(w) {}
};

// plline
struct MonotonicityViolation : PreconditionError {
  explicit MonotonicityViolation(const std::string& w) : PreconditionError(w) {}
};
struct OverlappingSupports : PreconditionError {
  explicit OverlappingSupports(const std::string& w) : PreconditionError(w) {}
};

// stacker
struct BadPattern : PreconditionError {
  explicit BadPattern(const std::string& w) : PreconditionError(w) {}
};
struct CapacityExceeded : PreconditionError {
  explicit CapacityExceeded(const std::string& w) : PreconditionError(w) {}
};
struct EqualElements : PreconditionError {
  explicit EqualElements(const std::string& w) : PreconditionError(w) {}
};
struct CombineFailed : Error {
  explicit CombineFailed(const std::string& w) : Error(ErrorKind::Verification, w) {}
};

// surfaces
struct InvalidMatching : InputError {
  explicit InvalidMatching(const std::string& w) : InputError(w) {}
};
struct WordMismatch : InputError {
  explicit WordMismatch(const std::string& w) : InputError(w) {}
};

// enumerator
struct CapExceeded : PreconditionError {
  explicit CapExceeded(const std::string& w) : PreconditionError(w) {}
};
struct BudgetExceeded : PreconditionError {
  explicit BudgetExceeded(const std::string& w) : PreconditionError(w) {}
};

}  // namespace stacklab

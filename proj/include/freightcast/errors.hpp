#pragma once

#include <stdexcept>
#include <string>

namespace freightcast {

// Broad classes, used by the CLI to choose an exit code.
enum class ErrorCategory { Config, Data, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorCategory::Config, m) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& m) : Error(ErrorCategory::Data, m) {}
};

class NumericalFamilyError : public Error {
 public:
  explicit NumericalFamilyError(const std::string& m) : Error(ErrorCategory::Numerical, m) {}
};

// Data-shaped failures.
class DomainError : public DataError { public: using DataError::DataError; };
class LengthError : public DataError { public: using DataError::DataError; };
class RangeError : public DataError { public: using DataError::DataError; };
class EmptyMonthError : public DataError { public: using DataError::DataError; };
class ParseError : public DataError { public: using DataError::DataError; };
class GapError : public DataError { public: using DataError::DataError; };
class NegativeValueError : public DataError { public: using DataError::DataError; };
class AlignmentError : public DataError { public: using DataError::DataError; };
class WindowError : public DataError { public: using DataError::DataError; };
class InsufficientDataError : public DataError { public: using DataError::DataError; };
class ExogMissingError : public DataError { public: using DataError::DataError; };
class NetworkError : public DataError { public: using DataError::DataError; };
class IoError : public DataError { public: using DataError::DataError; };

// Numerical failures.
class NumericalError : public NumericalFamilyError { public: using NumericalFamilyError::NumericalFamilyError; };
class DegenerateError : public NumericalFamilyError { public: using NumericalFamilyError::NumericalFamilyError; };
class DegreeOfFreedomError : public NumericalFamilyError { public: using NumericalFamilyError::NumericalFamilyError; };
class ConvergenceError : public NumericalFamilyError { public: using NumericalFamilyError::NumericalFamilyError; };
class SingularHessianError : public NumericalFamilyError { public: using NumericalFamilyError::NumericalFamilyError; };
class InstabilityError : public NumericalFamilyError { public: using NumericalFamilyError::NumericalFamilyError; };
class AllCandidatesFailedError : public NumericalFamilyError { public: using NumericalFamilyError::NumericalFamilyError; };

}  // namespace freightcast

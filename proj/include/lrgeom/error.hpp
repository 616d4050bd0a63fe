#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lrgeom {

/// Stable error categories. Values are mirrored by `lrg_status` in lrgeom.h.
enum class ErrorCode : int {
  kArgument = 1,
  kDimension = 2,
  kNumeric = 3,
  kIntegrity = 4,
  kAdmissibility = 5,
  kDegenerate = 6,
  kConfig = 7,
  kIo = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& w) : Error(ErrorCode::kArgument, w) {}
};
struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error(ErrorCode::kDimension, w) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorCode::kNumeric, w) {}
};
struct IntegrityError : Error {
  explicit IntegrityError(const std::string& w) : Error(ErrorCode::kIntegrity, w) {}
};
struct DegenerateInputError : Error {
  explicit DegenerateInputError(const std::string& w) : Error(ErrorCode::kDegenerate, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCode::kConfig, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCode::kIo, w) {}
};

// Raised when no block of the deconvolution certificate satisfies the
// two-sided projection bound. Carries every measured ||m_i^par||^2.
class AdmissibilityError : public Error {
 public:
  AdmissibilityError(const std::string& w, std::vector<double> par_sq)
      : Error(ErrorCode::kAdmissibility, w), par_norms_sq_(std::move(par_sq)) {}
  const std::vector<double>& par_norms_sq() const noexcept { return par_norms_sq_; }

 private:
  std::vector<double> par_norms_sq_;
};

}  // namespace lrgeom

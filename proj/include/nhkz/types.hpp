#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nhkz {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// Dense complex matrices of dimension 2 or 4. Row/column indices follow the
// basis ordering (H, V) for two-level modes and (UH, UV, DH, DV) for
// four-level modes.
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  NotHermitian = 2,
  Degenerate = 3,
  NonConvergence = 4,
  EpProximity = 5,
  FitFailure = 6,
  Config = 7,
  Io = 8,
  EmptyOverlap = 9,
  Internal = 99,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

bool is_hermitian(const CMatrix& m, double tol);

// Frobenius-norm relative deviation from unitarity, ||M^dagger M - I||.
double unitarity_defect(const CMatrix& m);

}  // namespace nhkz

#include "nhkz/types.hpp"

namespace nhkz {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "ok";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::NotHermitian: return "not_hermitian";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::NonConvergence: return "non_convergence";
    case ErrorCode::EpProximity: return "ep_proximity";
    case ErrorCode::FitFailure: return "fit_failure";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
    case ErrorCode::EmptyOverlap: return "empty_overlap";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

double unitarity_defect(const CMatrix& m) {
  return (m.adjoint() * m - CMatrix::Identity(m.cols(), m.cols())).norm();
}

}  // namespace nhkz

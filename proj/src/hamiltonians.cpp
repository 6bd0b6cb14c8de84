#include "nhkz/hamiltonians.hpp"

#include <algorithm>
#include <limits>

namespace nhkz {

namespace {

void require_real_couplings(const ModeParams& params, const char* where) {
  if (params.delta.imag() != 0.0 || params.gamma.imag() != 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(where) + ": delta and gamma must be real");
  }
}

Mat2 pauli_x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}

Mat2 pauli_y() {
  Mat2 m;
  m << 0, -kI, kI, 0;
  return m;
}

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace

Mat2 build_h2(const ModeParams& params) {
  const cplx p = params.p;
  const cplx d = params.delta;
  const cplx ig = kI * params.gamma;
  Mat2 h;
  h << ig, p - kI * d,
       p + kI * d, -ig;
  return h;
}

std::pair<cplx, cplx> spectrum_h2(const ModeParams& params) {
  const cplx e = std::sqrt(params.p * params.p + params.delta * params.delta -
                           params.gamma * params.gamma);
  return {e, -e};
}

Mat4 build_h4(const ModeParams& params) {
  require_real_couplings(params, "build_h4");
  const double d = params.delta.real();
  const double g = params.gamma.real();
  const double p = params.p;
  Mat4 h = Mat4::Zero();
  h(0, 1) = h(1, 2) = h(2, 3) = d - g;
  h(1, 0) = h(2, 1) = h(3, 2) = d + g;
  h(0, 3) = cplx(0.0, p);
  h(3, 0) = cplx(0.0, -p);
  return h;
}

std::array<SpectrumBranch, 4> spectrum_h4_analytic(const ModeParams& params) {
  require_real_couplings(params, "spectrum_h4_analytic");
  const double d = params.delta.real();
  const double g = params.gamma.real();
  const double p = params.p;
  const double p2 = p * p, g2 = g * g, d2 = d * d;
  const cplx inner(p2 * p2 - 2.0 * g2 * p2 + 2.0 * p2 * d2 + 5.0 * g2 * g2 -
                       10.0 * g2 * d2 + 5.0 * d2 * d2,
                   8.0 * p * g2 * g + 24.0 * g * p * d2);
  const cplx root = std::sqrt(inner);
  const double shift = 2.0 * p2 - 6.0 * g2 + 6.0 * d2;
  std::array<SpectrumBranch, 4> out;
  int k = 0;
  for (int beta : {+1, -1}) {
    const cplx outer = 0.5 * std::sqrt(2.0 * beta * root + shift);
    for (int alpha : {+1, -1}) {
      out[k++] = SpectrumBranch{alpha, beta, static_cast<double>(alpha) * outer};
    }
  }
  return out;
}

Mat4 spin_form_h4(const ModeParams& params) {
  require_real_couplings(params, "spin_form_h4");
  const double d = params.delta.real();
  const double g = params.gamma.real();
  const cplx ip(0.0, params.p);
  Mat2 raise;  // |H><V| or |U><D|
  raise << 0, 1, 0, 0;
  const Mat2 lower = raise.transpose();
  const Mat2 id = Mat2::Identity();
  return ip * (kron(raise, raise) - kron(lower, lower)) +
         d * kron(id, pauli_x()) - kI * g * kron(id, pauli_y()) +
         (d - g) * kron(raise, lower) + (d + g) * kron(lower, raise);
}

GroundState ground_state_hermitian(const CMatrix& h) {
  if (!is_hermitian(h, 1e-10)) {
    throw Error(ErrorCode::NotHermitian, "ground_state_hermitian: input is not Hermitian");
  }
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::Internal, "ground_state_hermitian: eigensolver failed");
  }
  const auto& evals = solver.eigenvalues();
  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  if (evals.size() > 1 && evals(1) - evals(0) <= 1e-9 * scale) {
    throw Error(ErrorCode::Degenerate, "ground_state_hermitian: degenerate ground level");
  }
  CVector v = solver.eigenvectors().col(0);
  v.normalize();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      break;
    }
  }
  return GroundState{v, evals(0)};
}

Mat4 my_operator() {
  Mat4 m = Mat4::Zero();
  m(0, 1) = m(1, 2) = m(2, 3) = -kI;
  m(1, 0) = m(2, 1) = m(3, 2) = kI;
  return m;
}

CVector numerical_eigenvalues(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::Internal, "numerical_eigenvalues: eigensolver failed");
  }
  return solver.eigenvalues();
}

double min_level_spacing(const CVector& eigenvalues) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    for (Eigen::Index j = i + 1; j < eigenvalues.size(); ++j)
      best = std::min(best, std::abs(eigenvalues(i) - eigenvalues(j)));
  return best;
}

}  // namespace nhkz

#pragma once

#include <array>
#include <utility>

#include "nhkz/types.hpp"

namespace nhkz {

// Couplings of a single momentum mode. `gamma` is complex so that the
// Hermitian ramp (i*gamma real) and the non-Hermitian ramps (gamma real) share
// one parameterization.
struct ModeParams {
  double p = 0.0;
  cplx delta{0.0, 0.0};
  cplx gamma{0.0, 0.0};
};

struct SpectrumBranch {
  int alpha = +1;  // overall sign
  int beta = +1;   // sign of the inner square root
  cplx energy{0.0, 0.0};
};

struct GroundState {
  CVector vector;
  double energy = 0.0;
};

// p*sigma_x + delta*sigma_y + i*gamma*sigma_z.
Mat2 build_h2(const ModeParams& params);

// (+sqrt(p^2 + delta^2 - gamma^2), -sqrt(...)), principal branch.
std::pair<cplx, cplx> spectrum_h2(const ModeParams& params);

// Four-band mode matrix with a fourth-order exceptional point at p = 0 when
// gamma == delta. Requires real delta and gamma.
Mat4 build_h4(const ModeParams& params);

// Closed-form four-band spectrum. Both square roots use the principal branch
// (cut along the negative real axis); branch order is
// (+,+), (-,+), (+,-), (-,-) for (alpha, beta).
std::array<SpectrumBranch, 4> spectrum_h4_analytic(const ModeParams& params);

// Same matrix as build_h4, assembled from the two-spin operator form with
// tau acting on the spatial (U, D) factor and sigma on polarization (H, V),
// sigma_+ = |H><V|, tau_+ = |U><D|.
Mat4 spin_form_h4(const ModeParams& params);

// Lowest eigenvector of a Hermitian matrix, phase fixed so that the first
// nonzero component is real and positive.
GroundState ground_state_hermitian(const CMatrix& h);

// i * dH4/dGamma, independent of (p, delta, gamma).
Mat4 my_operator();

// Eigenvalues through a dense general eigensolver (no ordering guarantee).
CVector numerical_eigenvalues(const CMatrix& m);

// Smallest pairwise eigenvalue separation.
double min_level_spacing(const CVector& eigenvalues);

}  // namespace nhkz

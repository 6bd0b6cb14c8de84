#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nhkz/types.hpp"

namespace nhkz {

// Setting angles (radians) of a QWP-HWP-QWP sandwich, applied right to left:
// QWP(theta) * HWP(phi) * QWP(vartheta).
struct WavePlateAngles {
  double theta = 0.0;
  double phi = 0.0;
  double vartheta = 0.0;
};

// Real rotation [[cos, -sin], [sin, cos]].
Mat2 rotation(double angle);
// rotation(t) diag(1, -1) rotation(-t)
Mat2 jones_hwp(double angle);
// rotation(t) diag(1, i) rotation(-t)
Mat2 jones_qwp(double angle);

Mat2 sandwich(const WavePlateAngles& angles);

// Maps an angle onto (-pi/2, pi/2]; wave-plate matrices are pi-periodic.
double normalize_angle(double angle);

// Angles with sandwich(angles) equal to u up to a global phase. The sandwich
// always has unit determinant, so any unitary is reachable.
WavePlateAngles su2_to_qhq(const Mat2& u);

// [[0, sin 2 phi_V], [sin 2 phi_H, 0]]
Mat2 build_loss2(double phi_h, double phi_v);

struct WavePlateCircuit2 {
  WavePlateAngles r1;
  WavePlateAngles r2;
  double phi_h = 0.0;
  double phi_v = 0.0;
  cplx global_factor{1.0, 0.0};
  Mat2 target = Mat2::Zero();

  // global_factor * R(r2) * L(phi_h, phi_v) * R(r1)
  Mat2 reconstruct() const;
  double residual() const;  // Frobenius norm of reconstruct() - target
};

// Exact realization of any nonzero 2x2 operator from two wave-plate
// sandwiches around the loss element.
WavePlateCircuit2 decompose_2x2(const Mat2& target);

// Loss element between two beam displacers on the (UH, UV, DH, DV) basis.
Mat4 build_L4(double phi_u, double phi_m, double phi_l);

// |U><U| (x) r_u + |D><D| (x) r_d
Mat4 controlled_rotation(const Mat2& r_u, const Mat2& r_d);

// 1 - |Tr[u v^dagger]| / sqrt(Tr[u u^dagger] Tr[v v^dagger]), in [0, 1].
double distance(const CMatrix& u, const CMatrix& v);

struct OpticalModule {
  WavePlateAngles first_upper, first_lower;    // controlled rotation before L4
  double phi_u = 0.0, phi_m = 0.0, phi_l = 0.0;
  WavePlateAngles second_upper, second_lower;  // controlled rotation after L4

  static constexpr int kParameters = 15;
  Mat4 matrix() const;
  static OpticalModule identity();
};

struct ModuleCascade4 {
  std::vector<OpticalModule> modules;  // applied in order: modules[0] first
  cplx global_factor{1.0, 0.0};
  double achieved_distance = 1.0;
  bool goal_met = false;
  int restarts_used = 0;

  // Product of module matrices without the global factor.
  Mat4 bare_matrix() const;
  Mat4 reconstruct() const { return global_factor * bare_matrix(); }
};

struct CompileOptions {
  int n_modules = 3;
  std::uint64_t seed = 1;
  double d_goal = 1e-4;
  int max_restarts = 64;
  // Evaluation budget for each simplex run; runs are chained on the best
  // vertex until the distance stops improving.
  int max_evaluations = 60000;
  // Optional starting cascade tried before random restarts; shorter cascades
  // are padded with identity modules.
  std::optional<ModuleCascade4> warm_start;
};

// Best-found module cascade approximating target via multi-start simplex
// search; deterministic for a fixed seed.
ModuleCascade4 compile_4x4(const Mat4& target, const CompileOptions& options = {});

}  // namespace nhkz

#include "nhkz/optics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace nhkz {

Mat2 rotation(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

Mat2 jones_hwp(double angle) {
  const double c = std::cos(2.0 * angle), s = std::sin(2.0 * angle);
  Mat2 m;
  m << c, s, s, -c;
  return m;
}

Mat2 jones_qwp(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  // rotation(t) diag(1, i) rotation(-t), expanded
  Mat2 m;
  m << c * c + kI * s * s, (1.0 - kI) * c * s,
       (1.0 - kI) * c * s, s * s + kI * c * c;
  return m;
}

Mat2 sandwich(const WavePlateAngles& a) {
  return jones_qwp(a.theta) * jones_hwp(a.phi) * jones_qwp(a.vartheta);
}

double normalize_angle(double angle) {
  double r = std::remainder(angle, kPi);  // [-pi/2, pi/2]
  if (r <= -kPi / 2) r += kPi;
  return r;
}

WavePlateAngles su2_to_qhq(const Mat2& u) {
  if (unitarity_defect(u) > 1e-10)
    throw Error(ErrorCode::InvalidArgument, "su2_to_qhq: input is not unitary");
  // A wave plate at angle t is Ry(2t) Rz(delta) Ry(-2t) up to phase, so the
  // sandwich collapses to Ry(2 theta) Rx(2 vartheta - 4 phi + 2 theta) Ry(-2 vartheta).
  // Conjugating by the 120-degree rotation about (1,1,1) maps that Y-X-Y
  // product onto a standard Z-Y-Z Euler form.
  const double third = 2.0 * kPi / 3.0;
  const double k = std::sin(third / 2.0) / std::sqrt(3.0);
  Mat2 c;
  c << std::cos(third / 2.0) - kI * k, -kI * k - k,
       -kI * k + k, std::cos(third / 2.0) + kI * k;
  Mat2 w = c * u * c.adjoint();
  w /= std::sqrt(w.determinant());
  const double beta = 2.0 * std::atan2(std::abs(w(1, 0)), std::abs(w(0, 0)));
  double sum_half = std::arg(w(1, 1));
  double diff_half = std::arg(w(1, 0));
  if (std::abs(w(0, 0)) < 1e-300) sum_half = diff_half;
  if (std::abs(w(1, 0)) < 1e-300) diff_half = sum_half;
  const double alpha = sum_half + diff_half;
  const double gamma = sum_half - diff_half;
  return WavePlateAngles{normalize_angle(alpha / 2.0), normalize_angle((alpha - gamma - beta) / 4.0),
                         normalize_angle(-gamma / 2.0)};
}

Mat2 build_loss2(double phi_h, double phi_v) {
  Mat2 m;
  m << 0, std::sin(2.0 * phi_v), std::sin(2.0 * phi_h), 0;
  return m;
}

Mat2 WavePlateCircuit2::reconstruct() const {
  return global_factor * sandwich(r2) * build_loss2(phi_h, phi_v) * sandwich(r1);
}

double WavePlateCircuit2::residual() const { return (reconstruct() - target).norm(); }

WavePlateCircuit2 decompose_2x2(const Mat2& target) {
  const double norm = target.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(ErrorCode::InvalidArgument, "decompose_2x2: target must be nonzero and finite");
  Eigen::JacobiSVD<Mat2> svd(target, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();  // descending
  Mat2 flip;
  flip << 0, 1, 1, 0;
  // target = U diag(s) V^dagger = (U sigma_x) [sigma_x diag(1, s1/s0)] V^dagger * s0
  WavePlateCircuit2 out;
  out.target = target;
  out.r2 = su2_to_qhq(svd.matrixU() * flip);
  out.r1 = su2_to_qhq(svd.matrixV().adjoint());
  out.phi_h = kPi / 4.0;
  out.phi_v = 0.5 * std::asin(std::clamp(s(1) / s(0), 0.0, 1.0));
  const Mat2 bare = sandwich(out.r2) * build_loss2(out.phi_h, out.phi_v) * sandwich(out.r1);
  out.global_factor = (bare.adjoint() * target).trace() / (bare.adjoint() * bare).trace();
  return out;
}

Mat4 build_L4(double phi_u, double phi_m, double phi_l) {
  const double su = std::sin(2.0 * phi_u);
  const double sm = std::sin(2.0 * phi_m), cm = std::cos(2.0 * phi_m);
  const double sl = std::sin(2.0 * phi_l);
  Mat4 m;
  m << 0, su, 0, 0,
       sm, 0, 0, -cm,
       cm, 0, 0, sm,
       0, 0, sl, 0;
  return m;
}

Mat4 controlled_rotation(const Mat2& r_u, const Mat2& r_d) {
  Mat4 m = Mat4::Zero();
  m.topLeftCorner<2, 2>() = r_u;
  m.bottomRightCorner<2, 2>() = r_d;
  return m;
}

double distance(const CMatrix& u, const CMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw Error(ErrorCode::InvalidArgument, "distance: dimension mismatch");
  const double nu = u.squaredNorm();
  const double nv = v.squaredNorm();
  if (!(nu > 0.0) || !(nv > 0.0)) throw Error(ErrorCode::InvalidArgument, "distance: zero matrix");
  const double overlap = std::abs((u * v.adjoint()).trace());
  return std::clamp(1.0 - overlap / std::sqrt(nu * nv), 0.0, 1.0);
}

Mat4 OpticalModule::matrix() const {
  return controlled_rotation(sandwich(second_upper), sandwich(second_lower)) *
         build_L4(phi_u, phi_m, phi_l) *
         controlled_rotation(sandwich(first_upper), sandwich(first_lower));
}

OpticalModule OpticalModule::identity() {
  // L4(pi/4, pi/4, pi/4) = 1 (x) sigma_x; undo it with sigma_x in both blocks.
  Mat2 flip;
  flip << 0, 1, 1, 0;
  const WavePlateAngles x = su2_to_qhq(flip);
  OpticalModule m;
  m.first_upper = m.first_lower = x;
  m.phi_u = m.phi_m = m.phi_l = kPi / 4.0;
  return m;
}

Mat4 ModuleCascade4::bare_matrix() const {
  Mat4 out = Mat4::Identity();
  for (const auto& m : modules) out = m.matrix() * out;
  return out;
}

namespace {

void pack(const OpticalModule& m, double* x) {
  const WavePlateAngles* plates[] = {&m.first_upper, &m.first_lower, &m.second_upper, &m.second_lower};
  int k = 0;
  for (const auto* p : plates) {
    x[k++] = p->theta;
    x[k++] = p->phi;
    x[k++] = p->vartheta;
  }
  x[k++] = m.phi_u;
  x[k++] = m.phi_m;
  x[k++] = m.phi_l;
}

OpticalModule unpack(const double* x) {
  OpticalModule m;
  WavePlateAngles* plates[] = {&m.first_upper, &m.first_lower, &m.second_upper, &m.second_lower};
  int k = 0;
  for (auto* p : plates) {
    p->theta = x[k++];
    p->phi = x[k++];
    p->vartheta = x[k++];
  }
  m.phi_u = x[k++];
  m.phi_m = x[k++];
  m.phi_l = x[k++];
  return m;
}

std::vector<OpticalModule> unpack_all(const gsl_vector* x, int n_modules) {
  std::vector<OpticalModule> out;
  out.reserve(n_modules);
  for (int i = 0; i < n_modules; ++i)
    out.push_back(unpack(x->data + static_cast<std::size_t>(i) * OpticalModule::kParameters));
  return out;
}

struct Objective {
  const Mat4* target;
  int n_modules;
};

double objective(const gsl_vector* x, void* params) {
  const auto* obj = static_cast<const Objective*>(params);
  Mat4 acc = Mat4::Identity();
  for (int i = 0; i < obj->n_modules; ++i)
    acc = unpack(x->data + static_cast<std::size_t>(i) * OpticalModule::kParameters).matrix() * acc;
  const double na = acc.squaredNorm();
  if (!(na > 0.0)) return 1.0;
  const double overlap = std::abs((acc * obj->target->adjoint()).trace());
  return 1.0 - overlap / std::sqrt(na * obj->target->squaredNorm());
}

// One chained simplex search from x (updated in place); returns the distance.
double simplex_search(const Objective& obj, gsl_vector* x, int max_evaluations) {
  const std::size_t dim = x->size;
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
  gsl_vector* step = gsl_vector_alloc(dim);
  gsl_multimin_function fn{&objective, dim, const_cast<Objective*>(&obj)};
  double best = objective(x, fn.params);
  double step_size = 0.4;
  for (int round = 0; round < 12; ++round) {
    gsl_vector_set_all(step, step_size);
    gsl_multimin_fminimizer_set(s, &fn, x, step);
    for (int it = 0; it < max_evaluations; ++it) {
      if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-11) == GSL_SUCCESS) break;
    }
    const double value = gsl_multimin_fminimizer_minimum(s);
    const bool improved = value < best * (1.0 - 1e-3);
    if (value < best) {
      best = value;
      gsl_vector_memcpy(x, gsl_multimin_fminimizer_x(s));
    }
    if (!improved) {
      if (step_size < 1e-3) break;
      step_size *= 0.25;
    }
  }
  gsl_vector_free(step);
  gsl_multimin_fminimizer_free(s);
  return best;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

ModuleCascade4 compile_4x4(const Mat4& target, const CompileOptions& options) {
  if (options.n_modules < 1) throw Error(ErrorCode::InvalidArgument, "compile_4x4: n_modules must be >= 1");
  if (options.max_restarts < 1) throw Error(ErrorCode::InvalidArgument, "compile_4x4: max_restarts must be >= 1");
  if (!(target.squaredNorm() > 0.0)) throw Error(ErrorCode::InvalidArgument, "compile_4x4: zero target");
  const auto dim = static_cast<std::size_t>(options.n_modules) * OpticalModule::kParameters;
  const Objective obj{&target, options.n_modules};
  gsl_set_error_handler_off();

  gsl_vector* x = gsl_vector_alloc(dim);
  gsl_vector* best_x = gsl_vector_alloc(dim);
  double best = 2.0;
  int used = 0;

  auto run = [&](int index) {
    const double d = simplex_search(obj, x, options.max_evaluations);
    ++used;
    if (d < best) {  // ties keep the lower restart index
      best = d;
      gsl_vector_memcpy(best_x, x);
    }
    (void)index;
  };

  int restart = 0;
  if (options.warm_start) {
    std::vector<OpticalModule> start = options.warm_start->modules;
    if (static_cast<int>(start.size()) > options.n_modules) start.resize(options.n_modules);
    while (static_cast<int>(start.size()) < options.n_modules) start.push_back(OpticalModule::identity());
    for (std::size_t i = 0; i < start.size(); ++i) pack(start[i], x->data + i * OpticalModule::kParameters);
    // The unpolished warm start is itself a candidate.
    const double d0 = objective(x, const_cast<Objective*>(&obj));
    if (d0 < best) {
      best = d0;
      gsl_vector_memcpy(best_x, x);
    }
    run(restart++);
  }
  for (; restart < options.max_restarts && !(best < options.d_goal); ++restart) {
    std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(static_cast<std::uint64_t>(restart))));
    std::uniform_real_distribution<double> angle(-kPi / 2.0, kPi / 2.0);
    for (std::size_t i = 0; i < dim; ++i) gsl_vector_set(x, i, angle(rng));
    run(restart);
  }

  ModuleCascade4 out;
  out.modules = unpack_all(best_x, options.n_modules);
  for (auto& m : out.modules) {
    for (auto* p : {&m.first_upper, &m.first_lower, &m.second_upper, &m.second_lower}) {
      p->theta = normalize_angle(p->theta);
      p->phi = normalize_angle(p->phi);
      p->vartheta = normalize_angle(p->vartheta);
    }
    m.phi_u = normalize_angle(m.phi_u);
    m.phi_m = normalize_angle(m.phi_m);
    m.phi_l = normalize_angle(m.phi_l);
  }
  const Mat4 bare = out.bare_matrix();
  out.global_factor = (bare.adjoint() * target).trace() / (bare.adjoint() * bare).trace();
  out.achieved_distance = distance(bare, target);
  out.goal_met = out.achieved_distance < options.d_goal;
  out.restarts_used = used;
  gsl_vector_free(x);
  gsl_vector_free(best_x);
  return out;
}

}  // namespace nhkz

#include "memwalk/models/model.hpp"

#include <cmath>
#include <string>

namespace memwalk::models {

ModelSpec ModelSpec::coulomb_walker(double coulomb_alpha) {
  ModelSpec m;
  m.dimension = 2;
  m.mass = 1.0;
  m.sigma = 1.0;
  m.kernel = KernelSpec::exponential(1.0, 1.0);
  m.smooth = SmoothPotentialSpec::harmonic(1.0);
  m.singular = SingularPotentialSpec::coulomb_log(coulomb_alpha);
  m.pilot = PilotForceSpec::bessel_j1();
  return m;
}

ModelSpec ModelSpec::harmonic_oscillator(int dimension) {
  ModelSpec m;
  m.dimension = dimension;
  m.mass = 1.0;
  m.sigma = 1.0;
  m.kernel = KernelSpec::exponential(1.0, 1.0);
  m.smooth = SmoothPotentialSpec::harmonic(1.0);
  m.singular = SingularPotentialSpec::none();
  m.pilot = PilotForceSpec::zero();
  return m;
}

void check_model(const ModelSpec& model) {
  if (model.dimension < 1 || model.dimension > kMaxDim) {
    throw ArgumentError("dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (!(model.mass > 0.0)) {
    throw ArgumentError("mass must be positive");
  }
  if (!(model.sigma >= 0.0)) {
    throw ArgumentError("sigma must be nonnegative");
  }
  if (!(model.x_min >= 0.0)) {
    throw ArgumentError("x_min must be nonnegative");
  }
  if (!(model.kernel.delta > 0.0) || !(model.kernel.k0 >= 0.0)) {
    throw ArgumentError("kernel needs k0 >= 0 and delta > 0");
  }
}

bool in_domain(const ModelSpec& model, const Vec& x) {
  if (!x.allFinite()) {
    return false;
  }
  if (!is_singular(model.singular)) {
    return true;
  }
  if (model.dimension == 1) {
    return x[0] > 0.0;
  }
  return x.squaredNorm() > 0.0;
}

Forces eval_forces(const ModelSpec& model, const Vec& x) {
  Forces f;
  f.grad_u = smooth_gradient(model.smooth, x);
  if (is_singular(model.singular)) {
    const double r2 = x.squaredNorm();
    if (r2 == 0.0) {
      throw SingularityError("force evaluated at the origin");
    }
    f.near_singular = r2 < model.x_min * model.x_min;
    f.grad_g = singular_gradient(model.singular, x);
  } else {
    f.grad_g = Vec::Zero(x.size());
  }
  return f;
}

Vec eval_pilot(const ModelSpec& model, const Vec& r) { return pilot_force(model.pilot, r); }

double potential_energy(const ModelSpec& model, const Vec& x) {
  double e = smooth_value(model.smooth, x);
  if (is_singular(model.singular)) {
    if (x.squaredNorm() == 0.0) {
      throw SingularityError("potential evaluated at the origin");
    }
    e += singular_value(model.singular, x);
  }
  return e;
}

}  // namespace memwalk::models

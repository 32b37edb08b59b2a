#pragma once

#include "memwalk/core.hpp"

#include <functional>
#include <limits>

namespace memwalk::models {

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;

/// Step for central differences on user callables.
inline constexpr double kFiniteDifferenceStep = 1e-5;

// ---------------------------------------------------------------- smooth U

enum class SmoothKind { harmonic, polynomial, user };

/// Confining potential U.
///   harmonic:   U = stiffness/2 |x|^2 + offset
///   polynomial: U = stiffness/exponent |x|^exponent + offset
struct SmoothPotentialSpec {
  SmoothKind kind = SmoothKind::harmonic;
  double stiffness = 1.0;
  double exponent = 2.0;
  double offset = 0.0;

  // Growth constants: <x, grad U> >= a1 |x|^q0 - a2. a0 is estimated by the validator.
  double q0 = 2.0;
  double a1 = 1.0;
  double a2 = 0.0;
  double eps1 = 1.0;

  ScalarField user_value;
  VectorField user_gradient;  // optional; central differences of user_value otherwise
  MatrixField user_hessian;   // optional; central differences of the gradient otherwise

  static SmoothPotentialSpec harmonic(double stiffness = 1.0, double offset = 0.0);
  static SmoothPotentialSpec polynomial(double stiffness, double exponent, double offset = 0.0);
  static SmoothPotentialSpec user(ScalarField value, VectorField gradient, double q0, double a1,
                                  double a2);
};

double smooth_value(const SmoothPotentialSpec& u, const Vec& x);
Vec smooth_gradient(const SmoothPotentialSpec& u, const Vec& x);
Mat smooth_hessian(const SmoothPotentialSpec& u, const Vec& x);

// -------------------------------------------------------------- singular G

enum class SingularKind { none, coulomb_log, riesz, lennard_jones, user };

/// Repulsive potential G, singular at the origin.
///   coulomb_log:   G = -coulomb_alpha log|x|
///   riesz:         G = coulomb_alpha |x|^-riesz_exponent
///   lennard_jones: G = lj_c1 |x|^-12 - lj_c2 |x|^-6
/// beta1, beta2, a4 are filled in by the named constructors; a6 is the steepness
/// constant used by the validator (NaN selects maximize mode).
struct SingularPotentialSpec {
  SingularKind kind = SingularKind::none;
  double coulomb_alpha = 1.0;
  double riesz_exponent = 1.0;
  double lj_c1 = 1.0;
  double lj_c2 = 1.0;

  double beta1 = 1.0;
  double beta2 = 0.0;
  double a4 = 0.0;
  double a6 = 1e-3;

  ScalarField user_value;
  VectorField user_gradient;
  MatrixField user_hessian;

  static SingularPotentialSpec none();
  static SingularPotentialSpec coulomb_log(double alpha);
  static SingularPotentialSpec riesz(double strength, double exponent);
  static SingularPotentialSpec lennard_jones(double c1, double c2);
  static SingularPotentialSpec user(ScalarField value, VectorField gradient, double beta1,
                                    double beta2, double a4);
};

bool is_singular(const SingularPotentialSpec& g);

/// Values below are undefined at x = 0 for singular kinds; callers guard.
double singular_value(const SingularPotentialSpec& g, const Vec& x);
Vec singular_gradient(const SingularPotentialSpec& g, const Vec& x);
Mat singular_hessian(const SingularPotentialSpec& g, const Vec& x);

/// Radial profile g(r), g'(r), g''(r) for the built-in radial kinds.
struct RadialProfile {
  double value;
  double first;
  double second;
};
RadialProfile singular_profile(const SingularPotentialSpec& g, double r);

/// Hessian of a radial function with profile (g', g'') at x.
Mat radial_hessian(const Vec& x, double first, double second);

// ------------------------------------------------------------------- pilot H

enum class PilotKind { bessel_j1, zero, user };

/// Pilot-wave force H, with growth bound max(|grad H|, |H|) <= a_h (|x|^p1 + 1).
struct PilotForceSpec {
  PilotKind kind = PilotKind::bessel_j1;
  double p1 = 0.0;
  double a_h = 1.0;

  VectorField user_force;
  MatrixField user_jacobian;  // optional

  static PilotForceSpec bessel_j1();
  static PilotForceSpec zero();
  static PilotForceSpec user(VectorField force, double p1, double a_h);
};

Vec pilot_force(const PilotForceSpec& h, const Vec& r);
Mat pilot_jacobian(const PilotForceSpec& h, const Vec& r);

/// Central-difference Jacobian of a vector field (used for user callables).
Mat numeric_jacobian(const VectorField& f, const Vec& x, double h = kFiniteDifferenceStep);
Vec numeric_gradient(const ScalarField& f, const Vec& x, double h = kFiniteDifferenceStep);

}  // namespace memwalk::models

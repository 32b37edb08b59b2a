#include "memwalk/models/potentials.hpp"

#include "memwalk/models/bessel.hpp"

#include <cmath>

namespace memwalk::models {

Vec numeric_gradient(const ScalarField& f, const Vec& x, double h) {
  Vec g(x.size());
  Vec y = x;
  for (int i = 0; i < x.size(); ++i) {
    y[i] = x[i] + h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    y[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Mat numeric_jacobian(const VectorField& f, const Vec& x, double h) {
  const int d = static_cast<int>(x.size());
  Mat jac(d, d);
  Vec y = x;
  for (int j = 0; j < d; ++j) {
    y[j] = x[j] + h;
    const Vec fp = f(y);
    y[j] = x[j] - h;
    const Vec fm = f(y);
    y[j] = x[j];
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

Mat radial_hessian(const Vec& x, double first, double second) {
  const int d = static_cast<int>(x.size());
  const double r = x.norm();
  const Vec n = x / r;
  const Mat outer = n * n.transpose();
  return second * outer + (first / r) * (Mat::Identity(d, d) - outer);
}

// ------------------------------------------------------------------ smooth

SmoothPotentialSpec SmoothPotentialSpec::harmonic(double stiffness, double offset) {
  SmoothPotentialSpec u;
  u.kind = SmoothKind::harmonic;
  u.stiffness = stiffness;
  u.exponent = 2.0;
  u.offset = offset;
  u.q0 = 2.0;
  u.a1 = stiffness;
  u.a2 = 0.0;
  return u;
}

SmoothPotentialSpec SmoothPotentialSpec::polynomial(double stiffness, double exponent,
                                                    double offset) {
  if (!(exponent >= 2.0)) {
    throw ArgumentError("polynomial potential needs exponent >= 2");
  }
  SmoothPotentialSpec u;
  u.kind = SmoothKind::polynomial;
  u.stiffness = stiffness;
  u.exponent = exponent;
  u.offset = offset;
  u.q0 = exponent;
  u.a1 = stiffness;
  u.a2 = 0.0;
  return u;
}

SmoothPotentialSpec SmoothPotentialSpec::user(ScalarField value, VectorField gradient, double q0,
                                              double a1, double a2) {
  if (!value) {
    throw ArgumentError("user potential needs a value callable");
  }
  SmoothPotentialSpec u;
  u.kind = SmoothKind::user;
  u.user_value = std::move(value);
  u.user_gradient = std::move(gradient);
  u.q0 = q0;
  u.a1 = a1;
  u.a2 = a2;
  return u;
}

double smooth_value(const SmoothPotentialSpec& u, const Vec& x) {
  switch (u.kind) {
    case SmoothKind::harmonic:
      return 0.5 * u.stiffness * x.squaredNorm() + u.offset;
    case SmoothKind::polynomial:
      return u.stiffness / u.exponent * std::pow(x.norm(), u.exponent) + u.offset;
    case SmoothKind::user:
      return u.user_value(x);
  }
  return 0.0;
}

Vec smooth_gradient(const SmoothPotentialSpec& u, const Vec& x) {
  switch (u.kind) {
    case SmoothKind::harmonic:
      return u.stiffness * x;
    case SmoothKind::polynomial: {
      const double r = x.norm();
      if (r == 0.0) {
        return Vec::Zero(x.size());
      }
      return u.stiffness * std::pow(r, u.exponent - 2.0) * x;
    }
    case SmoothKind::user:
      return u.user_gradient ? u.user_gradient(x) : numeric_gradient(u.user_value, x);
  }
  return Vec::Zero(x.size());
}

Mat smooth_hessian(const SmoothPotentialSpec& u, const Vec& x) {
  const int d = static_cast<int>(x.size());
  switch (u.kind) {
    case SmoothKind::harmonic:
      return u.stiffness * Mat::Identity(d, d);
    case SmoothKind::polynomial: {
      const double r = x.norm();
      if (r == 0.0) {
        return (u.exponent == 2.0) ? Mat(u.stiffness * Mat::Identity(d, d)) : Mat(Mat::Zero(d, d));
      }
      // g = c/p r^p: g' = c r^(p-1), g'' = c (p-1) r^(p-2)
      return radial_hessian(x, u.stiffness * std::pow(r, u.exponent - 1.0),
                            u.stiffness * (u.exponent - 1.0) * std::pow(r, u.exponent - 2.0));
    }
    case SmoothKind::user:
      if (u.user_hessian) {
        return u.user_hessian(x);
      }
      return numeric_jacobian([&u](const Vec& y) { return smooth_gradient(u, y); }, x);
  }
  return Mat::Zero(d, d);
}

// ---------------------------------------------------------------- singular

SingularPotentialSpec SingularPotentialSpec::none() {
  SingularPotentialSpec g;
  g.kind = SingularKind::none;
  return g;
}

SingularPotentialSpec SingularPotentialSpec::coulomb_log(double alpha) {
  if (!(alpha > 0.0)) {
    throw ArgumentError("coulomb_alpha must be positive");
  }
  SingularPotentialSpec g;
  g.kind = SingularKind::coulomb_log;
  g.coulomb_alpha = alpha;
  g.beta1 = 1.0;
  g.beta2 = 0.0;
  g.a4 = alpha;
  return g;
}

SingularPotentialSpec SingularPotentialSpec::riesz(double strength, double exponent) {
  if (!(strength > 0.0) || !(exponent > 0.0)) {
    throw ArgumentError("riesz potential needs positive strength and exponent");
  }
  SingularPotentialSpec g;
  g.kind = SingularKind::riesz;
  g.coulomb_alpha = strength;
  g.riesz_exponent = exponent;
  g.beta1 = exponent + 1.0;
  g.beta2 = 0.0;
  g.a4 = strength * exponent;
  return g;
}

SingularPotentialSpec SingularPotentialSpec::lennard_jones(double c1, double c2) {
  if (!(c1 > 0.0) || !(c2 >= 0.0)) {
    throw ArgumentError("lennard-jones potential needs c1 > 0 and c2 >= 0");
  }
  SingularPotentialSpec g;
  g.kind = SingularKind::lennard_jones;
  g.lj_c1 = c1;
  g.lj_c2 = c2;
  g.beta1 = 13.0;
  g.beta2 = 7.0;
  g.a4 = 12.0 * c1;
  return g;
}

SingularPotentialSpec SingularPotentialSpec::user(ScalarField value, VectorField gradient,
                                                  double beta1, double beta2, double a4) {
  if (!value) {
    throw ArgumentError("user singular potential needs a value callable");
  }
  SingularPotentialSpec g;
  g.kind = SingularKind::user;
  g.user_value = std::move(value);
  g.user_gradient = std::move(gradient);
  g.beta1 = beta1;
  g.beta2 = beta2;
  g.a4 = a4;
  return g;
}

bool is_singular(const SingularPotentialSpec& g) { return g.kind != SingularKind::none; }

RadialProfile singular_profile(const SingularPotentialSpec& g, double r) {
  switch (g.kind) {
    case SingularKind::none:
      return {0.0, 0.0, 0.0};
    case SingularKind::coulomb_log: {
      const double a = g.coulomb_alpha;
      return {-a * std::log(r), -a / r, a / (r * r)};
    }
    case SingularKind::riesz: {
      const double a = g.coulomb_alpha;
      const double s = g.riesz_exponent;
      const double rs = std::pow(r, -s);
      return {a * rs, -a * s * rs / r, a * s * (s + 1.0) * rs / (r * r)};
    }
    case SingularKind::lennard_jones: {
      const double r6 = std::pow(r, -6.0);
      const double r12 = r6 * r6;
      return {g.lj_c1 * r12 - g.lj_c2 * r6, (-12.0 * g.lj_c1 * r12 + 6.0 * g.lj_c2 * r6) / r,
              (156.0 * g.lj_c1 * r12 - 42.0 * g.lj_c2 * r6) / (r * r)};
    }
    case SingularKind::user:
      break;
  }
  throw UnsupportedError("user singular potentials have no radial profile");
}

double singular_value(const SingularPotentialSpec& g, const Vec& x) {
  if (g.kind == SingularKind::user) {
    return g.user_value(x);
  }
  if (g.kind == SingularKind::none) {
    return 0.0;
  }
  return singular_profile(g, x.norm()).value;
}

Vec singular_gradient(const SingularPotentialSpec& g, const Vec& x) {
  switch (g.kind) {
    case SingularKind::none:
      return Vec::Zero(x.size());
    case SingularKind::coulomb_log:
      // -alpha x / |x|^2, computed without the square root
      return (-g.coulomb_alpha / x.squaredNorm()) * x;
    case SingularKind::user:
      return g.user_gradient ? g.user_gradient(x) : numeric_gradient(g.user_value, x);
    default: {
      const double r = x.norm();
      return (singular_profile(g, r).first / r) * x;
    }
  }
}

Mat singular_hessian(const SingularPotentialSpec& g, const Vec& x) {
  const int d = static_cast<int>(x.size());
  switch (g.kind) {
    case SingularKind::none:
      return Mat::Zero(d, d);
    case SingularKind::user:
      if (g.user_hessian) {
        return g.user_hessian(x);
      }
      return numeric_jacobian([&g](const Vec& y) { return singular_gradient(g, y); }, x);
    default: {
      const RadialProfile p = singular_profile(g, x.norm());
      return radial_hessian(x, p.first, p.second);
    }
  }
}

// ------------------------------------------------------------------- pilot

PilotForceSpec PilotForceSpec::bessel_j1() {
  PilotForceSpec h;
  h.kind = PilotKind::bessel_j1;
  h.p1 = 0.0;
  h.a_h = 1.0;
  return h;
}

PilotForceSpec PilotForceSpec::zero() {
  PilotForceSpec h;
  h.kind = PilotKind::zero;
  h.p1 = 0.0;
  h.a_h = 1.0;
  return h;
}

PilotForceSpec PilotForceSpec::user(VectorField force, double p1, double a_h) {
  if (!force) {
    throw ArgumentError("user pilot force needs a callable");
  }
  PilotForceSpec h;
  h.kind = PilotKind::user;
  h.user_force = std::move(force);
  h.p1 = p1;
  h.a_h = a_h;
  return h;
}

Vec pilot_force(const PilotForceSpec& h, const Vec& r) {
  switch (h.kind) {
    case PilotKind::bessel_j1:
      // J1(|r|) r/|r| = (J1(|r|)/|r|) r, smooth through r = 0
      return bessel_j1_over_r_sq(r.squaredNorm()) * r;
    case PilotKind::zero:
      return Vec::Zero(r.size());
    case PilotKind::user:
      return h.user_force(r);
  }
  return Vec::Zero(r.size());
}

Mat pilot_jacobian(const PilotForceSpec& h, const Vec& r) {
  const int d = static_cast<int>(r.size());
  switch (h.kind) {
    case PilotKind::bessel_j1: {
      const double s = r.norm();
      if (s == 0.0) {
        return 0.5 * Mat::Identity(d, d);
      }
      // gradient of H = J1(s) n: J1'(s) n n^T + (J1(s)/s)(I - n n^T)
      const Vec n = r / s;
      const Mat outer = n * n.transpose();
      return bessel_j1_prime(s) * outer + bessel_j1_over_r_sq(s * s) * (Mat::Identity(d, d) - outer);
    }
    case PilotKind::zero:
      return Mat::Zero(d, d);
    case PilotKind::user:
      if (h.user_jacobian) {
        return h.user_jacobian(r);
      }
      return numeric_jacobian(h.user_force, r);
  }
  return Mat::Zero(d, d);
}

}  // namespace memwalk::models

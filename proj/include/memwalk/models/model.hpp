#pragma once

#include "memwalk/core.hpp"
#include "memwalk/models/kernel.hpp"
#include "memwalk/models/potentials.hpp"

namespace memwalk::models {

/// Full physical model: m dv = (-v - grad U - grad G + int H(x - eta(s)) K(s) ds) dt + sigma dW.
struct ModelSpec {
  int dimension = 2;
  double mass = 1.0;
  double sigma = 1.0;
  /// Below this radius force evaluations carry a proximity flag.
  double x_min = 1e-8;

  KernelSpec kernel;
  SmoothPotentialSpec smooth;
  SingularPotentialSpec singular;
  PilotForceSpec pilot;

  /// Two-dimensional walker in a harmonic well with a Coulomb-log core,
  /// Bessel pilot wave and K(t) = exp(-t); m = sigma = 1.
  static ModelSpec coulomb_walker(double coulomb_alpha);

  /// Damped harmonic oscillator: no singular term, no pilot wave.
  static ModelSpec harmonic_oscillator(int dimension = 2);
};

/// Throws ArgumentError when the model is structurally invalid (d outside [1, kMaxDim],
/// m <= 0, sigma < 0, delta <= 0, ...).
void check_model(const ModelSpec& model);

/// |x| > 0 for d >= 2, x > 0 for d = 1 (only when a singular term is present).
bool in_domain(const ModelSpec& model, const Vec& x);

struct Forces {
  Vec grad_u;
  Vec grad_g;
  bool near_singular = false;
};

/// grad U and grad G at x. Throws SingularityError at x = 0 when G is singular.
Forces eval_forces(const ModelSpec& model, const Vec& x);

/// H(r); the bessel kind is J1(|r|) r/|r| with H(0) = 0.
Vec eval_pilot(const ModelSpec& model, const Vec& r);

/// U(x) + G(x).
double potential_energy(const ModelSpec& model, const Vec& x);

}  // namespace memwalk::models

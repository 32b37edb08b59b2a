#pragma once

#include "memwalk/models/model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace memwalk::variational {

enum class PathCase { case1, case2a, case2b };
std::string to_string(PathCase c);

struct PathSegment {
  std::string name;
  double begin;
  double end;
};

/// psi_1(u) = eps + (1 - eps)(1 - cos pi u)/2 on [0, 1].
double psi1(double eps, double u);
double psi1_prime(double eps, double u);

/// Deterministic path (x~, v~) from (x0, v0) at s = 0 to (e1, 0) at s = t.
struct ControlPath {
  PathCase kind = PathCase::case1;
  Vec x0;
  Vec v0;
  double t = 0.0;
  double eps = 0.0;
  /// eps as requested, before halving.
  double eps_requested = 0.0;
  int halvings = 0;
  double r_target = 0.0;
  double p2 = 1.5;
  std::string psi1_choice = "cosine ramp eps + (1 - eps)(1 - cos pi u)/2";
  /// End point of the cubic on [0, eps]: e1, or e2 in Case 2b.
  Vec via;
  std::vector<PathSegment> segments;

  /// Knot-aligned grid and the path on it.
  std::vector<double> grid;
  std::vector<Vec> x;
  std::vector<Vec> v;
  /// Filled by gamma_residual.
  std::vector<Vec> gamma;

  double min_radius = 0.0;
  /// int_0^t |x~|^{p2} ds
  double p2_integral = 0.0;

  /// Analytic position and velocity at s in [0, t].
  void eval(double s, Vec& x_out, Vec& v_out) const;
};

/// A path is rebuilt with eps halved when min |x~| < min(kControlPathMinRadius, eps/2).
inline constexpr double kControlPathMinRadius = 1e-3;
inline constexpr int kMaxEpsHalvings = 20;

/// Case 1 when x0 is not parallel to e1 (and the segment x0 -> e1 stays 0.05 away from the
/// origin), Case 2a in one dimension (x0 > 0), Case 2b otherwise (through e2). eps is halved
/// until int |x~|^{p2} < r_target and min |x~| clears the guard radius.
/// Throws DomainError when the preconditions fail, ArgumentError when the bound is not met
/// after kMaxEpsHalvings halvings.
ControlPath build_control_path(const Vec& x0, const Vec& v0, double t, double eps, double r_target, double p2,
                               double h = 1e-3);

struct GammaResult {
  std::vector<Vec> gamma;
  /// max over cells of |dx/ds - v| + |dv/ds + v + grad U + grad G - dGamma/ds| (cell averages).
  double residual = 0.0;
};

/// Gamma(s) = v~(s) - v0 + int_0^s (v~ + grad U(x~) + grad G(x~)) on the path grid, by
/// 8-point Gauss-Legendre per cell; the residual re-checks cell averages with the same rule
/// on both half cells, so it estimates the quadrature error of Gamma.
GammaResult gamma_residual(ControlPath& path, const models::ModelSpec& model);

/// CSV `s,x1..xd,v1..vd,Gamma1..Gammad` (Gamma columns only when computed).
void write_control_path_csv(std::ostream& out, const ControlPath& path);

}  // namespace memwalk::variational

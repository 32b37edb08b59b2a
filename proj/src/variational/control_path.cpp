#include "memwalk/variational/control_path.hpp"

#include "memwalk/integrator/trajectory_io.hpp"
#include "memwalk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace memwalk::variational {

std::string to_string(PathCase c) {
  switch (c) {
    case PathCase::case1:
      return "case1";
    case PathCase::case2a:
      return "case2a";
    case PathCase::case2b:
      return "case2b";
  }
  return "?";
}

double psi1(double eps, double u) { return eps + (1.0 - eps) * 0.5 * (1.0 - std::cos(std::numbers::pi * u)); }

double psi1_prime(double eps, double u) {
  return (1.0 - eps) * 0.5 * std::numbers::pi * std::sin(std::numbers::pi * u);
}

void ControlPath::eval(double s, Vec& x_out, Vec& v_out) const {
  const int d = static_cast<int>(x0.size());
  const Vec e1 = unit_vec(d, 0);
  const double e = eps;
  auto find = [&]() -> const PathSegment& {
    for (const auto& seg : segments) {
      if (s <= seg.end) {
        return seg;
      }
    }
    return segments.back();
  };
  const PathSegment& seg = find();
  if (seg.name == "cubic") {
    const double u = s / e;
    const Vec gap = via - x0 - (e / 6.0) * v0;
    x_out = x0 - gap * (2.0 * u * u * u - 3.0 * u * u) + (2.0 / (e * e)) * (s * s * s / 3.0 - 0.75 * e * s * s) * v0 +
            s * v0;
    v_out = -gap * (6.0 / e) * (u * u - u) + 2.0 * (u * u - 1.5 * u) * v0 + v0;
  } else if (seg.name == "blend") {
    // psi2(s) = (cos(pi s/eps) + 1)/2 runs from 0 at s = eps to 1 at s = 2 eps
    const double w = 0.5 * (std::cos(std::numbers::pi * s / e) + 1.0);
    const double dw = -0.5 * std::numbers::pi / e * std::sin(std::numbers::pi * s / e);
    const Vec e2 = unit_vec(d, 1);
    x_out = (1.0 - w) * e2 + w * e1;
    v_out = dw * (e1 - e2);
  } else if (seg.name == "descent") {
    const double u = (s - seg.begin) / e;
    x_out = (1.0 + e - psi1(e, u)) * e1;
    v_out = -(psi1_prime(e, u) / e) * e1;
  } else if (seg.name == "hold") {
    x_out = e * e1;
    v_out = zero_vec(d);
  } else {  // ramp
    const double u = (s - seg.begin) / e;
    x_out = psi1(e, u) * e1;
    v_out = (psi1_prime(e, u) / e) * e1;
  }
}

namespace {

PathCase choose_case(const Vec& x0) {
  const int d = static_cast<int>(x0.size());
  if (d == 1) {
    return PathCase::case2a;
  }
  const Vec e1 = unit_vec(d, 0);
  const double off_axis = (x0 - x0.dot(e1) * e1).norm();
  if (off_axis <= 1e-12 * x0.norm()) {
    return PathCase::case2b;
  }
  // distance from the origin to the segment x0 -> e1
  const Vec dir = e1 - x0;
  const double s = std::clamp(-x0.dot(dir) / dir.squaredNorm(), 0.0, 1.0);
  if ((x0 + s * dir).norm() < 0.05) {
    return PathCase::case2b;
  }
  return PathCase::case1;
}

void lay_out(ControlPath& path) {
  const double e = path.eps;
  const double t = path.t;
  path.segments.clear();
  path.segments.push_back({"cubic", 0.0, e});
  double next = e;
  if (path.kind == PathCase::case2b) {
    path.segments.push_back({"blend", e, 2.0 * e});
    next = 2.0 * e;
  }
  path.segments.push_back({"descent", next, next + e});
  path.segments.push_back({"hold", next + e, t - e});
  path.segments.push_back({"ramp", t - e, t});
}

// Grid, samples, min radius and the p2 integral.
void sample(ControlPath& path, double h) {
  static const GaussLegendre rule = gauss_legendre(8);
  path.grid.clear();
  path.x.clear();
  path.v.clear();
  path.min_radius = std::numeric_limits<double>::infinity();
  path.p2_integral = 0.0;
  Vec x, v;
  for (std::size_t i = 0; i < path.segments.size(); ++i) {
    const auto& seg = path.segments[i];
    const double len = seg.end - seg.begin;
    // at least 4 cells per segment, so short eps segments are resolved on a coarse grid
    const long cells = std::max(4L, static_cast<long>(std::ceil(len / h - 1e-9)));
    for (long j = (i == 0 ? 0 : 1); j <= cells; ++j) {
      const double s = (j == cells) ? seg.end : seg.begin + len * static_cast<double>(j) / static_cast<double>(cells);
      path.eval(s, x, v);
      path.grid.push_back(s);
      path.x.push_back(x);
      path.v.push_back(v);
      path.min_radius = std::min(path.min_radius, x.norm());
    }
  }
  for (std::size_t k = 0; k + 1 < path.grid.size(); ++k) {
    const double a = path.grid[k];
    const double w = path.grid[k + 1] - a;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      path.eval(a + w * rule.nodes[q], x, v);
      const double r = x.norm();
      path.min_radius = std::min(path.min_radius, r);
      path.p2_integral += w * rule.weights[q] * std::pow(r, path.p2);
    }
  }
}

}  // namespace

ControlPath build_control_path(const Vec& x0, const Vec& v0, double t, double eps, double r_target, double p2,
                               double h) {
  if (x0.size() != v0.size() || x0.size() < 1 || x0.size() > kMaxDim) {
    throw ArgumentError("build_control_path: x0 and v0 must share a dimension in [1, 8]");
  }
  if (!(x0.norm() > 0.0)) {
    throw DomainError("build_control_path: |x0| must be positive");
  }
  if (x0.size() == 1 && !(x0[0] > 0.0)) {
    throw DomainError("build_control_path: in one dimension x0 must be positive");
  }
  if (!(t > 1.0)) {
    throw DomainError("build_control_path: t must exceed 1");
  }
  if (!(eps > 0.0 && eps < t / 4.0)) {
    throw DomainError("build_control_path: eps must lie in (0, t/4)");
  }
  if (!(r_target > 0.0) || !(p2 > 0.0) || !(h > 0.0)) {
    throw ArgumentError("build_control_path: r_target, p2 and h must be positive");
  }
  const int d = static_cast<int>(x0.size());
  ControlPath path;
  path.kind = choose_case(x0);
  path.x0 = x0;
  path.v0 = v0;
  path.t = t;
  path.eps_requested = eps;
  path.r_target = r_target;
  path.p2 = p2;
  path.via = (path.kind == PathCase::case2b) ? unit_vec(d, 1) : unit_vec(d, 0);
  double e = eps;
  for (int k = 0; k <= kMaxEpsHalvings; ++k, e *= 0.5) {
    path.eps = e;
    path.halvings = k;
    lay_out(path);
    sample(path, h);
    const double guard = std::min(kControlPathMinRadius, 0.5 * e);
    if (path.p2_integral < r_target && path.min_radius >= guard) {
      return path;
    }
  }
  std::ostringstream msg;
  msg << "build_control_path: after " << kMaxEpsHalvings << " halvings int |x|^p2 = " << path.p2_integral
      << " (target " << r_target << "), min |x| = " << path.min_radius;
  throw ArgumentError(msg.str());
}

GammaResult gamma_residual(ControlPath& path, const models::ModelSpec& model) {
  static const GaussLegendre fine = gauss_legendre(8);
  if (path.grid.size() < 2) {
    throw ArgumentError("gamma_residual: empty path");
  }
  if (!(path.min_radius > 0.0)) {
    throw DomainError("gamma_residual: path touches the origin");
  }
  auto integrand = [&](double s, Vec& x, Vec& v) {
    path.eval(s, x, v);
    const auto f = models::eval_forces(model, x);
    return Vec(v + f.grad_u + f.grad_g);
  };
  // averages over [a, a + w] with the rule applied on `pieces` equal sub-cells
  auto cell_average = [&](double a, double w, int pieces, Vec& v_avg) {
    Vec x, v;
    Vec f_avg = zero_vec(static_cast<int>(path.x0.size()));
    v_avg = f_avg;
    const double sub = w / pieces;
    for (int p = 0; p < pieces; ++p) {
      for (std::size_t q = 0; q < fine.nodes.size(); ++q) {
        const double weight = fine.weights[q] / pieces;
        f_avg += weight * integrand(a + p * sub + sub * fine.nodes[q], x, v);
        v_avg += weight * v;
      }
    }
    return f_avg;
  };

  GammaResult out;
  const std::size_t n = path.grid.size();
  out.gamma.reserve(n);
  Vec integral = zero_vec(static_cast<int>(path.x0.size()));
  out.gamma.push_back(path.v[0] - path.v0);
  Vec unused;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double w = path.grid[k + 1] - path.grid[k];
    integral += w * cell_average(path.grid[k], w, 1, unused);
    out.gamma.push_back(path.v[k + 1] - path.v0 + integral);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double w = path.grid[k + 1] - path.grid[k];
    Vec v_avg;
    const Vec f_avg = cell_average(path.grid[k], w, 2, v_avg);
    const double kinematic = ((path.x[k + 1] - path.x[k]) / w - v_avg).norm();
    const double dynamic =
        ((path.v[k + 1] - path.v[k]) / w + f_avg - (out.gamma[k + 1] - out.gamma[k]) / w).norm();
    out.residual = std::max(out.residual, kinematic + dynamic);
  }
  path.gamma = out.gamma;
  return out;
}

void write_control_path_csv(std::ostream& out, const ControlPath& path) {
  using integrator::format_number;
  const int d = static_cast<int>(path.x0.size());
  const bool with_gamma = path.gamma.size() == path.grid.size();
  out << "s";
  for (int i = 1; i <= d; ++i) {
    out << ",x" << i;
  }
  for (int i = 1; i <= d; ++i) {
    out << ",v" << i;
  }
  if (with_gamma) {
    for (int i = 1; i <= d; ++i) {
      out << ",Gamma" << i;
    }
  }
  out << '\n';
  for (std::size_t k = 0; k < path.grid.size(); ++k) {
    out << format_number(path.grid[k]);
    for (int i = 0; i < d; ++i) {
      out << ',' << format_number(path.x[k][i]);
    }
    for (int i = 0; i < d; ++i) {
      out << ',' << format_number(path.v[k][i]);
    }
    if (with_gamma) {
      for (int i = 0; i < d; ++i) {
        out << ',' << format_number(path.gamma[k][i]);
      }
    }
    out << '\n';
  }
}

}  // namespace memwalk::variational

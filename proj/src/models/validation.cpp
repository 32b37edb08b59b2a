#include "memwalk/models/validation.hpp"

#include "memwalk/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace memwalk::models {
namespace {

struct Sample {
  double r;
  Vec x;
};

std::vector<Sample> make_samples(const ModelSpec& model, const SamplingPlan& plan) {
  if (!(plan.r_min > 0.0) || !(plan.r_max > plan.r_min) || plan.radii < 2 || plan.directions < 1) {
    throw ArgumentError("sampling plan needs 0 < r_min < r_max, radii >= 2, directions >= 1");
  }
  const int d = model.dimension;
  std::vector<Sample> out;
  const double log_ratio = std::log(plan.r_max / plan.r_min);
  for (int k = 0; k < plan.radii; ++k) {
    const double r = plan.r_min * std::exp(log_ratio * k / (plan.radii - 1));
    Rng rng(stream_key(plan.seed, static_cast<std::uint64_t>(k)));
    for (int j = 0; j < plan.directions; ++j) {
      Vec u(d);
      if (d == 1) {
        // only the positive half-line is admissible with a singular term
        u[0] = (is_singular(model.singular) || j % 2 == 0) ? 1.0 : -1.0;
      } else {
        for (int i = 0; i < d; ++i) {
          u[i] = rng.normal();
        }
        u /= u.norm();
      }
      out.push_back({r, r * u});
    }
  }
  return out;
}

double spectral_norm(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double operator_norm(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

void add_radius(CheckResult& c, double r) {
  if (c.violations.empty() || c.violations.back() != r) {
    c.violations.push_back(r);
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

CheckResult bounded_constant(std::string name, double sup, const std::string& what) {
  CheckResult c;
  c.name = std::move(name);
  c.estimate = sup;
  if (std::isfinite(sup) && sup <= kUnboundedConstant) {
    c.verdict = Verdict::pass;
    c.message = what + " estimated as " + fmt(sup) + " on the sampling plan";
  } else {
    c.verdict = Verdict::fail;
    c.message = what + " is unbounded on the sampling plan (sup " + fmt(sup) + ")";
  }
  return c;
}

CheckResult not_applicable(std::string name) {
  CheckResult c;
  c.name = std::move(name);
  c.verdict = Verdict::pass;
  c.message = "no singular term";
  return c;
}

std::vector<double> kernel_grid(const KernelSpec& k) {
  std::vector<double> grid;
  const double end = (k.kind == KernelKind::tabulated) ? k.nodes.back() : 10.0 / k.delta;
  const double step = 0.5 / k.delta;
  for (double t = 0.0; t <= end + 1e-12; t += step) {
    grid.push_back(std::min(t, end));
  }
  return grid;
}

}  // namespace

P2Window p2_window(double p1, double eps1) {
  return {std::max(2.0 * p1, p1 + 1.0), 2.0 * std::max(1.0, p1 + eps1)};
}

ValidationReport validate_assumptions(const ModelSpec& model, const SamplingPlan& plan) {
  check_model(model);
  ValidationReport report;
  const auto samples = make_samples(model, plan);
  const SmoothPotentialSpec& u = model.smooth;
  const SingularPotentialSpec& g = model.singular;
  const PilotForceSpec& h = model.pilot;

  report.merge(validate_kernel(model.kernel, kernel_grid(model.kernel), model.kernel.delta));

  // pilot growth: max(|grad H|, |H|) <= a_H (|x|^p1 + 1)
  {
    CheckResult c;
    c.name = "pilot.growth";
    double sup = 0.0;
    for (const auto& s : samples) {
      const double bound = std::pow(s.r, h.p1) + 1.0;
      const double ratio = std::max(operator_norm(pilot_jacobian(h, s.x)), pilot_force(h, s.x).norm()) / bound;
      sup = std::max(sup, ratio);
      if (ratio > h.a_h * (1.0 + 1e-12)) {
        add_radius(c, s.r);
      }
    }
    c.estimate = sup;
    c.verdict = c.violations.empty() ? Verdict::pass : Verdict::fail;
    c.message = "sup max(|grad H|, |H|)/(|x|^p1 + 1) = " + fmt(sup) + " against a_H = " + fmt(h.a_h);
    report.checks.push_back(std::move(c));
  }

  // smooth potential growth, gradient and Hessian bounds (a0 estimated)
  {
    double sup = 0.0;
    double min_u = std::numeric_limits<double>::infinity();
    double min_u_r = 0.0;
    CheckResult coercive;
    coercive.name = "smooth.coercivity";
    double worst_gap = -std::numeric_limits<double>::infinity();
    auto visit = [&](double r, const Vec& x) {
      const double val = smooth_value(u, x);
      const Vec grad = smooth_gradient(u, x);
      const double hess = spectral_norm(smooth_hessian(u, x));
      const double rq = std::pow(r, u.q0);
      sup = std::max({sup, std::abs(val) / (rq + 1.0), grad.norm() / (std::pow(r, u.q0 - 1.0) + 1.0),
                      hess / (std::pow(r, u.q0 - 2.0) + 1.0), rq / (std::abs(val) + 1.0)});
      if (val < min_u) {
        min_u = val;
        min_u_r = r;
      }
      const double gap = (u.a1 * rq - u.a2) - x.dot(grad);
      worst_gap = std::max(worst_gap, gap);
      if (gap > 1e-9 * (1.0 + u.a1 * rq)) {
        add_radius(coercive, r);
      }
    };
    if (model.dimension >= 1) {
      visit(0.0, Vec::Zero(model.dimension));
    }
    for (const auto& s : samples) {
      visit(s.r, s.x);
    }
    report.checks.push_back(bounded_constant("smooth.growth", sup, "a0"));

    coercive.estimate = worst_gap;
    coercive.verdict = coercive.violations.empty() ? Verdict::pass : Verdict::fail;
    coercive.message = "<x, grad U> >= " + fmt(u.a1) + " |x|^" + fmt(u.q0) + " - " + fmt(u.a2) +
                       (coercive.violations.empty() ? " holds" : " violated") + " on the sampling plan";
    report.checks.push_back(std::move(coercive));

    CheckResult lower;
    lower.name = "smooth.lower_bound";
    lower.estimate = min_u;
    if (min_u >= 1.0) {
      lower.verdict = Verdict::pass;
      lower.message = "U >= 1 on the sampling plan";
    } else {
      lower.verdict = Verdict::warning;
      lower.violations.push_back(min_u_r);
      lower.message = "U drops to " + fmt(min_u) + " < 1 (at |x| = " + fmt(min_u_r) +
                      "); accepted, but the lower bound U >= 1 does not hold";
    }
    report.checks.push_back(std::move(lower));

    CheckResult q0;
    q0.name = "smooth.q0";
    const double needed = 2.0 * std::max(1.0, h.p1 + u.eps1);
    q0.estimate = needed;
    q0.verdict = (u.q0 >= needed) ? Verdict::pass : Verdict::fail;
    q0.message = "q0 = " + fmt(u.q0) + ", required >= 2 max{1, p1 + eps1} = " + fmt(needed) +
                 " (eps1 = " + fmt(u.eps1) + ")";
    report.checks.push_back(std::move(q0));
  }

  if (!is_singular(g)) {
    for (const char* name :
         {"singular.blowup", "singular.bounds", "singular.gradient_structure", "singular.steepness"}) {
      report.checks.push_back(not_applicable(name));
    }
  } else {
    // G -> infinity along a shrinking radius sequence
    {
      CheckResult c;
      c.name = "singular.blowup";
      Vec dir = Vec::Zero(model.dimension);
      dir[0] = 1.0;
      double prev = -std::numeric_limits<double>::infinity();
      bool increasing = true;
      for (int k = 0; k <= 12; ++k) {
        const double r = std::pow(10.0, -k);
        const double val = singular_value(g, r * dir);
        if (!(val > prev)) {
          increasing = false;
          add_radius(c, r);
        }
        prev = val;
      }
      c.estimate = prev;
      c.verdict = increasing ? Verdict::pass : Verdict::fail;
      c.message = increasing ? "G increases without bound along |x| = 10^-k, k = 0..12 (G = " + fmt(prev) + " at 1e-12)"
                             : "G is not increasing toward the origin";
      report.checks.push_back(std::move(c));
    }

    double sup_a3 = 0.0;
    double sup_a5 = 0.0;
    double sup_steep = 0.0;
    CheckResult steep;
    steep.name = "singular.steepness";
    const bool fixed_a6 = std::isfinite(g.a6);
    for (const auto& s : samples) {
      const double r = s.r;
      const double val = singular_value(g, s.x);
      const Vec grad = singular_gradient(g, s.x);
      const double hess = spectral_norm(singular_hessian(g, s.x));
      const double rb = std::pow(r, -g.beta1);
      sup_a3 = std::max({sup_a3, std::abs(val) / (1.0 + r + rb), grad.norm() / (1.0 + rb),
                         hess / (1.0 + rb / r)});
      const Vec residual = grad + g.a4 * std::pow(r, -g.beta1 - 1.0) * s.x;
      sup_a5 = std::max(sup_a5, residual.norm() / (std::pow(r, -g.beta2) + 1.0));

      // 1 + e^G / |x|^beta1 >= a6 |grad^2 G|^2
      const double lhs = 1.0 + std::exp(val - g.beta1 * std::log(r));
      const double hess2 = hess * hess;
      const double ratio = std::isinf(lhs) ? 0.0 : hess2 / lhs;
      sup_steep = std::max(sup_steep, ratio);
      if (fixed_a6 && g.a6 * hess2 > lhs * (1.0 + 1e-12)) {
        add_radius(steep, r);
      }
    }
    report.checks.push_back(bounded_constant("singular.bounds", sup_a3, "a3"));
    report.checks.push_back(bounded_constant("singular.gradient_structure", sup_a5, "a5"));

    steep.estimate = sup_steep;
    if (fixed_a6) {
      if (steep.violations.empty()) {
        steep.verdict = Verdict::pass;
        steep.message = "1 + e^G/|x|^beta1 >= a6 |grad^2 G|^2 holds with a6 = " + fmt(g.a6);
      } else {
        steep.verdict = Verdict::fail;
        const double worst = *std::min_element(steep.violations.begin(), steep.violations.end());
        const double largest = *std::max_element(steep.violations.begin(), steep.violations.end());
        steep.message = "1 + e^G/|x|^beta1 >= a6 |grad^2 G|^2 fails with a6 = " + fmt(g.a6) +
                        " at " + std::to_string(steep.violations.size()) + " radii in [" + fmt(worst) +
                        ", " + fmt(largest) + "]";
        if (g.kind == SingularKind::coulomb_log && model.dimension == 2) {
          steep.message += "; for G = -alpha log|x| in d = 2 the steepness condition requires coulomb_alpha >= 3 (got " +
                           fmt(g.coulomb_alpha) + ")";
        }
      }
    } else {
      steep = [&] {
        CheckResult c = bounded_constant("singular.steepness", sup_steep, "sup |grad^2 G|^2/(1 + e^G/|x|^beta1)");
        if (c.verdict == Verdict::pass && sup_steep > 0.0) {
          c.message += "; largest admissible a6 = " + fmt(1.0 / sup_steep);
        }
        return c;
      }();
    }
    report.checks.push_back(std::move(steep));
  }

  {
    CheckResult c;
    c.name = "memory.p2_window";
    const P2Window w = p2_window(h.p1, u.eps1);
    c.estimate = plan.p2;
    if (!(w.lower < w.upper)) {
      c.verdict = Verdict::fail;
      c.message = "admissible p2 window (" + fmt(w.lower) + ", " + fmt(w.upper) + ") is empty";
    } else {
      c.verdict = w.contains(plan.p2) ? Verdict::pass : Verdict::fail;
      c.message = "p2 = " + fmt(plan.p2) + ", admissible window (" + fmt(w.lower) + ", " + fmt(w.upper) + ")";
    }
    report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace memwalk::models

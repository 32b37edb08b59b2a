#include "memwalk/lyapunov/lyapunov.hpp"

#include "memwalk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace memwalk::lyapunov {
namespace {

// Phi - G = U + |v|^2/2 + kappa <x, v> - <x, v>/|x|
double phi_minus_g(const Vec& x, const Vec& v, const models::ModelSpec& model, double kappa) {
  const double xv = x.dot(v);
  return models::smooth_value(model.smooth, x) + 0.5 * v.squaredNorm() + kappa * xv - xv / x.norm();
}

std::string describe_point(const Vec& x, const Vec& v) {
  std::ostringstream out;
  out.precision(6);
  out << "x = (";
  for (int i = 0; i < x.size(); ++i) {
    out << (i ? ", " : "") << x[i];
  }
  out << "), v = (";
  for (int i = 0; i < v.size(); ++i) {
    out << (i ? ", " : "") << v[i];
  }
  out << ")";
  return out.str();
}

double log_spaced(double lo, double hi, int i, int n) {
  if (n <= 1) {
    return lo;
  }
  return lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
}

}  // namespace

double kappa_bound(double a1) {
  if (!(a1 > 0.0)) {
    throw ArgumentError("kappa_bound: a1 must be positive");
  }
  return std::min(1.0 / (2.0 * (1.0 + 1.0 / a1)), 0.5 * a1);
}

LyapunovParams choose_kappa(const models::ModelSpec& model, double safety, double p2, const SandwichPlan& plan) {
  if (!(safety > 0.0 && safety < 1.0)) {
    throw ArgumentError("choose_kappa: safety must lie in (0, 1), got " + std::to_string(safety));
  }
  if (!(model.smooth.a1 > 0.0)) {
    throw ArgumentError("choose_kappa: the model has no positive a1");
  }
  if (!(p2 > 1.0)) {
    throw ArgumentError("choose_kappa: p2 must exceed 1");
  }
  LyapunovParams params;
  params.a1 = model.smooth.a1;
  params.safety = safety;
  params.p2 = p2;
  params.kappa = safety * kappa_bound(params.a1);

  const int d = model.dimension;
  Rng rng(stream_key(plan.seed, 0x5a4d));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  Vec worst_x = zero_vec(d);
  Vec worst_v = zero_vec(d);
  for (int i = 0; i < plan.radii; ++i) {
    const double r = log_spaced(plan.r_min, plan.r_max, i, plan.radii);
    // random unit direction for x, and an orthogonal companion for v
    Vec dir(d);
    for (int k = 0; k < d; ++k) {
      dir[k] = rng.normal();
    }
    dir /= dir.norm();
    Vec perp = zero_vec(d);
    if (d >= 2) {
      for (int k = 0; k < d; ++k) {
        perp[k] = rng.normal();
      }
      perp -= perp.dot(dir) * dir;
      perp /= perp.norm();
    }
    const Vec x = r * dir;
    for (int j = 0; j < plan.speeds; ++j) {
      const double s = log_spaced(plan.r_min, plan.r_max, j, plan.speeds);
      for (int k = 0; k < plan.directions; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / plan.directions;
        const Vec v = s * (std::cos(theta) * dir + std::sin(theta) * perp);
        const double q = models::smooth_value(model.smooth, x) + 0.5 * v.squaredNorm();
        if (!(q > 0.0)) {
          continue;
        }
        const double ratio = phi_minus_g(x, v, model, params.kappa) / q;
        if (ratio < lo) {
          lo = ratio;
          worst_x = x;
          worst_v = v;
        }
        hi = std::max(hi, ratio);
      }
    }
  }
  params.c_kappa = lo;
  params.C_kappa = hi;
  if (!(lo > 0.0)) {
    std::ostringstream msg;
    msg << "sandwich lower constant is not positive (min ratio " << lo << " at " << describe_point(worst_x, worst_v)
        << "); U drops below 1 there";
    params.warnings.push_back(msg.str());
  }
  return params;
}

double phi(const WalkerState& s, const models::ModelSpec& model, const LyapunovParams& params) {
  if (s.x.norm() == 0.0) {
    throw SingularityError("phi: |x| = 0");
  }
  return phi_minus_g(s.x, s.v, model, params.kappa) + models::singular_value(model.singular, s.x);
}

double psi(const WalkerState& s, const HistoryBuffer& buffer, const models::ModelSpec& model,
           const LyapunovParams& params) {
  const auto norm = state::weighted_norm(buffer, model.kernel, params.p2);
  return phi(s, model, params) + norm.integral;
}

double psi(const WalkerState& s, const HistoryBuffer& buffer, const models::ModelSpec& model,
           const LyapunovParams& params, const std::vector<double>& weights) {
  const auto norm = state::weighted_norm(buffer, model.kernel, params.p2, weights);
  return phi(s, model, params) + norm.integral;
}

integrator::NamedObservable psi_observable(const models::ModelSpec& model, const LyapunovParams& params, double dt,
                                           int n_mem) {
  auto weights = std::make_shared<const std::vector<double>>(state::trapezoid_weights(model.kernel, dt, n_mem + 1));
  return {"psi", [model, params, weights](const WalkerState& s, const HistoryBuffer& buffer) {
            return psi(s, buffer, model, params, *weights);
          }};
}

double discounted_singular_moment(const integrator::Trajectory& traj, const models::ModelSpec& model,
                                  double discount) {
  if (traj.states.empty()) {
    throw ArgumentError("discounted_singular_moment: trajectory keeps no states");
  }
  const double w = traj.dt * traj.record_stride;
  const double beta1 = model.singular.beta1;
  double sum = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const Vec& x = traj.states[k].x;
    const double r = x.norm();
    const double g = models::singular_value(model.singular, x);
    sum += w * std::exp(-discount * traj.times[k] + g - beta1 * std::log(r));
  }
  return sum;
}

}  // namespace memwalk::lyapunov

#include "memwalk/models/kernel.hpp"

#include "memwalk/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace memwalk::models {
namespace {

constexpr double kDecayTolerance = 1e-8;

// Fritsch-Carlson slopes: monotone data gives a monotone interpolant.
std::vector<double> monotone_slopes(const std::vector<double>& t, const std::vector<double>& k) {
  const std::size_t n = t.size();
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    secant[i] = (k[i + 1] - k[i]) / (t[i + 1] - t[i]);
  }
  std::vector<double> m(n);
  m[0] = secant[0];
  m[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (secant[i - 1] * secant[i] <= 0.0) {
      m[i] = 0.0;
    } else {
      // weighted harmonic mean
      const double h0 = t[i] - t[i - 1];
      const double h1 = t[i + 1] - t[i];
      const double w0 = 2.0 * h1 + h0;
      const double w1 = h1 + 2.0 * h0;
      m[i] = (w0 + w1) / (w0 / secant[i - 1] + w1 / secant[i]);
    }
  }
  return m;
}

double hermite(const KernelSpec& spec, double t) {
  const auto& x = spec.nodes;
  if (t > x.back()) {
    throw DomainError("kernel evaluated beyond the last tabulated node");
  }
  auto it = std::upper_bound(x.begin(), x.end(), t);
  std::size_t i = (it == x.begin()) ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
  if (i + 1 >= x.size()) {
    i = x.size() - 2;
  }
  const double h = x[i + 1] - x[i];
  const double u = (t - x[i]) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1;
  const double h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2;
  const double h11 = u3 - u2;
  return h00 * spec.values[i] + h10 * h * spec.slopes[i] + h01 * spec.values[i + 1] +
         h11 * h * spec.slopes[i + 1];
}

}  // namespace

KernelSpec KernelSpec::exponential(double k0, double delta) {
  if (!(k0 >= 0.0) || !(delta > 0.0)) {
    throw ArgumentError("exponential kernel needs k0 >= 0 and delta > 0");
  }
  KernelSpec s;
  s.kind = KernelKind::exponential;
  s.k0 = k0;
  s.delta = delta;
  return s;
}

KernelSpec KernelSpec::tabulated(std::vector<double> nodes, std::vector<double> values,
                                 double delta) {
  if (nodes.size() < 2 || nodes.size() != values.size()) {
    throw ArgumentError("tabulated kernel needs at least two (t, K) pairs");
  }
  if (nodes.front() != 0.0) {
    throw ArgumentError("tabulated kernel must start at t = 0");
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0 && !(nodes[i] > nodes[i - 1])) {
      throw ArgumentError("tabulated kernel nodes must be strictly increasing");
    }
    if (!(values[i] >= 0.0)) {
      throw ArgumentError("tabulated kernel values must be nonnegative");
    }
  }
  KernelSpec s;
  s.kind = KernelKind::tabulated;
  s.k0 = values.front();
  s.delta = delta;
  s.slopes = monotone_slopes(nodes, values);
  s.nodes = std::move(nodes);
  s.values = std::move(values);
  return s;
}

double eval_kernel(const KernelSpec& spec, double t) {
  if (!(t >= 0.0)) {
    throw DomainError("kernel evaluated at negative time");
  }
  if (spec.kind == KernelKind::exponential) {
    return spec.k0 * std::exp(-spec.delta * t);
  }
  return hermite(spec, t);
}

ValidationReport validate_kernel(const KernelSpec& spec, const std::vector<double>& grid,
                                 double delta_candidate) {
  if (grid.empty()) {
    throw ArgumentError("kernel validation grid is empty");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw ArgumentError("kernel validation grid must be nonnegative and strictly increasing");
    }
  }

  CheckResult check;
  check.name = "kernel.decay";
  double worst = -std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double h = 1e-5 * std::max(1.0, t);
    double derivative;
    if (t - h < 0.0) {
      // second-order one-sided difference
      derivative = (-3.0 * eval_kernel(spec, t) + 4.0 * eval_kernel(spec, t + h) -
                    eval_kernel(spec, t + 2.0 * h)) /
                   (2.0 * h);
    } else if (spec.kind == KernelKind::tabulated && t + h > spec.nodes.back()) {
      derivative = (3.0 * eval_kernel(spec, t) - 4.0 * eval_kernel(spec, t - h) +
                    eval_kernel(spec, t - 2.0 * h)) /
                   (2.0 * h);
    } else {
      derivative = (eval_kernel(spec, t + h) - eval_kernel(spec, t - h)) / (2.0 * h);
    }
    const double excess = derivative + delta_candidate * eval_kernel(spec, t);
    worst = std::max(worst, excess);
    if (excess > kDecayTolerance) {
      check.violations.push_back(t);
    }
  }
  check.estimate = worst;
  std::ostringstream msg;
  if (check.violations.empty()) {
    check.verdict = Verdict::pass;
    msg << "K' <= -" << delta_candidate << " K holds on " << grid.size() << " grid points";
  } else {
    check.verdict = Verdict::fail;
    msg << "K' <= -" << delta_candidate << " K violated at " << check.violations.size() << " of "
        << grid.size() << " grid points (first t = " << check.violations.front() << ")";
  }
  check.message = msg.str();
  ValidationReport report;
  report.checks.push_back(std::move(check));
  return report;
}

}  // namespace memwalk::models

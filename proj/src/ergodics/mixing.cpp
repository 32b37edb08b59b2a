#include "memwalk/ergodics/mixing.hpp"

#include "memwalk/integrator/trajectory_io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace memwalk::ergodics {

std::string MixingFit::verdict() const {
  if (already_mixed) {
    return "already mixed";
  }
  if (window_points < 3) {
    return "window too short";
  }
  return rate_reported() ? "fitted" : "poor fit";
}

MixingFit mixing_rate(const integrator::Ensemble& a, const integrator::Ensemble& b, const std::string& observable,
                      double r2_threshold) {
  const auto& sa = a.find(observable);
  const auto& sb = b.find(observable);
  if (a.times.size() != b.times.size()) {
    throw ArgumentError("mixing_rate: ensembles have different time grids");
  }
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    if (std::abs(a.times[k] - b.times[k]) > 1e-9 * (1.0 + std::abs(a.times[k]))) {
      throw ArgumentError("mixing_rate: ensembles have different time grids");
    }
  }
  MixingFit fit;
  fit.observable = observable;
  fit.r2_threshold = r2_threshold;
  fit.times = a.times;
  const std::size_t n = a.times.size();
  fit.distance.resize(n);
  fit.stderr_.resize(n);
  long last = -1;
  for (std::size_t k = 0; k < n; ++k) {
    fit.distance[k] = std::abs(sa.stats[k].mean - sb.stats[k].mean);
    fit.stderr_[k] = std::hypot(sa.stats[k].stderr_of_mean(), sb.stats[k].stderr_of_mean());
    if (fit.distance[k] > 3.0 * fit.stderr_[k]) {
      last = static_cast<long>(k);
    }
  }
  if (last < 0) {
    fit.already_mixed = true;
    return fit;
  }
  fit.window_end = fit.times[static_cast<std::size_t>(last)];
  fit.window_points = static_cast<int>(last + 1);
  fit.envelope.assign(n, 0.0);
  double running = 0.0;
  for (long k = last; k >= 0; --k) {
    running = std::max(running, fit.distance[static_cast<std::size_t>(k)]);
    fit.envelope[static_cast<std::size_t>(k)] = running;
  }
  if (fit.window_points < 3) {
    return fit;
  }
  double mx = 0.0, my = 0.0;
  for (long k = 0; k <= last; ++k) {
    mx += fit.times[k];
    my += std::log(fit.envelope[k]);
  }
  mx /= fit.window_points;
  my /= fit.window_points;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (long k = 0; k <= last; ++k) {
    const double dx = fit.times[k] - mx;
    const double dy = std::log(fit.envelope[k]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  fit.rate = -slope;
  fit.prefactor = std::exp(my - slope * mx);
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

void write_mixing_csv(std::ostream& out, const MixingFit& fit) {
  using integrator::format_number;
  out << "t,D,stderr\n";
  for (std::size_t k = 0; k < fit.times.size(); ++k) {
    out << format_number(fit.times[k]) << ',' << format_number(fit.distance[k]) << ','
        << format_number(fit.stderr_[k]) << '\n';
  }
}

std::string mixing_summary_json(const MixingFit& fit) {
  using integrator::format_number;
  auto num = [](double x) { return std::isfinite(x) ? format_number(x) : std::string("null"); };
  std::ostringstream out;
  if (fit.rate_reported()) {
    out << "{\"c\": " << num(fit.rate) << ", \"C\": " << num(fit.prefactor) << ", \"r2\": " << num(fit.r2);
  } else {
    out << "{\"c\": null, \"C\": null, \"r2\": " << (fit.already_mixed ? "null" : num(fit.r2));
  }
  out << ", \"verdict\": \"" << fit.verdict() << "\"}";
  return out.str();
}

}  // namespace memwalk::ergodics

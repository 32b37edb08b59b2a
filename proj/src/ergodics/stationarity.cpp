#include "memwalk/ergodics/stationarity.hpp"

#include "memwalk/ergodics/histogram.hpp"

#include <algorithm>
#include <cmath>

namespace memwalk::ergodics {

double integrated_autocorrelation(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 4) {
    return 0.0;
  }
  double mean = 0.0;
  for (double x : series) {
    mean += x;
  }
  mean /= static_cast<double>(n);
  std::vector<double> c(series.size());
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = series[i] - mean;
  }
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) {
      s += c[i] * c[i + lag];
    }
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) {
    return 0.0;
  }
  // sum of pair sums Gamma_m = rho_{2m} + rho_{2m+1}, stopped at the first non-positive one
  double gamma_sum = 0.0;
  for (std::size_t m = 0; 2 * m + 1 < n / 2; ++m) {
    const double g = (autocov(2 * m) + autocov(2 * m + 1)) / c0;
    if (!(g > 0.0)) {
      break;
    }
    gamma_sum += g;
  }
  // 2 tau + 1 = 2 sum Gamma - 1
  return std::max(0.0, gamma_sum - 1.0);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw ArgumentError("ks_statistic: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) {
      ++i;
    }
    while (j < b.size() && b[j] == x) {
      ++j;
    }
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) {
    return 1.0;
  }
  if (lambda < 0.2) {
    return 1.0;  // the alternating series converges badly and the value is 1 to double precision
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-17) {
      break;
    }
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

StationarityResult stationarity_test(const std::vector<double>& series, double split) {
  if (!(split > 0.0 && split < 1.0)) {
    throw ArgumentError("stationarity_test: split must lie in (0, 1)");
  }
  const std::size_t cut = static_cast<std::size_t>(std::lround(split * static_cast<double>(series.size())));
  if (cut < 2 || cut + 2 > series.size()) {
    throw ArgumentError("stationarity_test: split leaves an empty part");
  }
  const std::vector<double> first(series.begin(), series.begin() + static_cast<long>(cut));
  const std::vector<double> second(series.begin() + static_cast<long>(cut), series.end());
  StationarityResult r;
  r.n_first = static_cast<long>(first.size());
  r.n_second = static_cast<long>(second.size());
  r.tau_first = integrated_autocorrelation(first);
  r.tau_second = integrated_autocorrelation(second);
  r.n_first_eff = r.n_first / (2.0 * r.tau_first + 1.0);
  r.n_second_eff = r.n_second / (2.0 * r.tau_second + 1.0);
  r.ks = ks_statistic(first, second);
  const double scale = std::sqrt(r.n_first_eff * r.n_second_eff / (r.n_first_eff + r.n_second_eff));
  r.critical = kKsCritical05 / scale;
  r.p_value = kolmogorov_survival(r.ks * scale);
  return r;
}

StationarityResult stationarity_test(const integrator::Trajectory& traj, double burn_in, double split) {
  const auto radii = post_burn_in_radii(traj, burn_in);
  if (radii.size() < static_cast<std::size_t>(kSamplesPerBin * kMinBins)) {
    throw ArgumentError("stationarity_test: too few post-burn-in samples (" + std::to_string(radii.size()) + ")");
  }
  return stationarity_test(radii, split);
}

}  // namespace memwalk::ergodics

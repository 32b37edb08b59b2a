#include "memwalk/lyapunov/diagnostics.hpp"

#include "memwalk/integrator/trajectory_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace memwalk::lyapunov {
namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  const double sse = std::max(0.0, syy - fit.slope * sxy);
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (x.size() > 2 && sxx > 0.0) {
    fit.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
  }
  return fit;
}

std::size_t nearest_index(const std::vector<double>& grid, double t) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), t);
  if (it == grid.begin()) {
    return 0;
  }
  if (it == grid.end()) {
    return grid.size() - 1;
  }
  const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  return (t - grid[hi - 1] <= grid[hi] - t) ? hi - 1 : hi;
}

}  // namespace

double log_mean_exp(const std::vector<double>& a) {
  if (a.empty()) {
    throw ArgumentError("log_mean_exp: empty sample");
  }
  const double m = *std::max_element(a.begin(), a.end());
  if (!std::isfinite(m)) {
    return m;
  }
  double s = 0.0;
  for (double x : a) {
    s += std::exp(x - m);
  }
  return m + std::log(s / static_cast<double>(a.size()));
}

LogMeanEstimate log_mean_exp_jackknife(const std::vector<double>& a) {
  LogMeanEstimate est;
  est.log_mean = log_mean_exp(a);
  const std::size_t n = a.size();
  long overflow = 0;
  for (double x : a) {
    overflow += (x > kExpOverflow) ? 1 : 0;
  }
  est.overflow_fraction = static_cast<double>(overflow) / static_cast<double>(n);
  if (n < 2 || !std::isfinite(est.log_mean)) {
    return est;
  }
  const double m = *std::max_element(a.begin(), a.end());
  std::vector<double> terms(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    terms[i] = std::exp(a[i] - m);
    total += terms[i];
  }
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rest = total - terms[i];
    if (rest >= 1e-9 * total) {
      loo[i] = m + std::log(rest / static_cast<double>(n - 1));
    } else {
      // member i dominates: redo the log-sum-exp without it
      std::vector<double> others;
      others.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) {
          others.push_back(a[j]);
        }
      }
      loo[i] = log_mean_exp(others);
    }
    loo_mean += loo[i];
  }
  loo_mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double l : loo) {
    ss += (l - loo_mean) * (l - loo_mean);
  }
  est.stderr_ = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
  return est;
}

ExpMomentDiagnostic exp_moment_diagnostic(const integrator::Ensemble& ensemble, const std::vector<double>& times,
                                          double plateau_start) {
  const auto& series = ensemble.find("psi");
  if (series.values.empty()) {
    throw ArgumentError("exp_moment_diagnostic: the ensemble kept no per-member psi values");
  }
  ExpMomentDiagnostic diag;
  std::vector<double> column(series.values.size());
  for (double t : times) {
    const std::size_t k = nearest_index(ensemble.times, t);
    for (std::size_t i = 0; i < series.values.size(); ++i) {
      column[i] = series.values[i][k];
    }
    const auto est = log_mean_exp_jackknife(column);
    diag.series.push_back({ensemble.times[k], est.log_mean, est.stderr_, est.overflow_fraction});
  }

  // Envelope: plateau C1 from t >= plateau_start, then log(E - C1) = b - c1 t on the
  // leading stretch where E clearly exceeds the plateau.
  std::vector<double> plateau;
  for (const auto& p : diag.series) {
    if (p.t >= plateau_start) {
      plateau.push_back(p.log_mean);
    }
  }
  if (plateau.empty() || diag.series.size() < 3) {
    return diag;
  }
  const double log_c1 = log_mean_exp(plateau);
  double spread = 0.0;
  {
    double mean = 0.0;
    for (double v : plateau) {
      mean += v;
    }
    mean /= static_cast<double>(plateau.size());
    for (double v : plateau) {
      spread += (v - mean) * (v - mean);
    }
    spread = plateau.size() > 1 ? std::sqrt(spread / static_cast<double>(plateau.size() - 1)) : 0.0;
  }
  std::vector<double> ts, ys;
  for (const auto& p : diag.series) {
    if (p.t >= plateau_start || p.log_mean <= log_c1 + 2.0 * spread + 0.1) {
      break;
    }
    ts.push_back(p.t);
    ys.push_back(p.log_mean + std::log1p(-std::exp(log_c1 - p.log_mean)));
  }
  if (ts.size() < 3) {
    return diag;
  }
  const LineFit fit = least_squares(ts, ys);
  if (!(fit.slope < 0.0)) {
    return diag;
  }
  const double log_psi0 = diag.series.front().log_mean;
  diag.envelope.fitted = true;
  diag.envelope.log_plateau = log_c1;
  diag.envelope.rate = -fit.slope;
  diag.envelope.log_c1 = std::max(log_c1, fit.intercept - log_psi0);
  diag.envelope.r2 = fit.r2;
  return diag;
}

void write_exp_moment_csv(std::ostream& out, const ExpMomentDiagnostic& diag) {
  using integrator::format_number;
  out << "t,mean,stderr,overflow_fraction\n";
  for (const auto& p : diag.series) {
    out << format_number(p.t) << ',' << format_number(p.log_mean) << ',' << format_number(p.stderr_) << ','
        << format_number(p.overflow_fraction) << '\n';
  }
}

DescentAssessment assess_descent(const std::vector<ExpMomentPoint>& series, double terminal_start, double slack) {
  DescentAssessment out;
  std::vector<double> ts, ys;
  for (const auto& p : series) {
    if (p.t >= terminal_start) {
      ts.push_back(p.t);
      ys.push_back(p.log_mean);
    }
  }
  if (ts.size() < 3) {
    throw ArgumentError("assess_descent: fewer than 3 points in the terminal window");
  }
  double mean = 0.0;
  for (double y : ys) {
    mean += y;
  }
  mean /= static_cast<double>(ys.size());
  double var = 0.0;
  for (double y : ys) {
    var += (y - mean) * (y - mean);
  }
  out.level = mean;
  out.spread = std::sqrt(var / static_cast<double>(ys.size() - 1));
  const LineFit fit = least_squares(ts, ys);
  out.slope = fit.slope;
  out.slope_stderr = fit.slope_stderr;
  out.terminally_flat = std::abs(fit.slope) <= 3.0 * fit.slope_stderr;

  const double band = out.level + 2.0 * out.spread;
  // Compared against every earlier point, not just the previous one: per-step slack would
  // otherwise accumulate over a fine grid and hide a slow rise.
  for (std::size_t k = 1; k < series.size(); ++k) {
    const auto& b = series[k];
    for (std::size_t j = 0; j < k; ++j) {
      const auto& a = series[j];
      if (b.log_mean > std::max(a.log_mean, band) + slack * std::hypot(a.stderr_, b.stderr_)) {
        out.rising_times.push_back(b.t);
        break;
      }
    }
  }
  out.non_increasing = out.rising_times.empty();
  out.starts_above_level = !series.empty() && series.front().log_mean > band;
  return out;
}

}  // namespace memwalk::lyapunov

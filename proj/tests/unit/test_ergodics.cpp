#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "memwalk/ergodics/histogram.hpp"
#include "memwalk/ergodics/metric.hpp"
#include "memwalk/ergodics/mixing.hpp"
#include "memwalk/ergodics/stationarity.hpp"
#include "memwalk/quadrature.hpp"
#include "memwalk/rng.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace memwalk;
using namespace memwalk::ergodics;
using memwalk::models::ModelSpec;

namespace {

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

integrator::Trajectory radial_trajectory(const std::vector<double>& radii, double dt) {
  integrator::Trajectory traj;
  traj.dim = 2;
  traj.dt = dt;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    traj.times.push_back(k * dt);
    traj.states.push_back({v2(radii[k], 0.0), v2(0, 0), k * dt});
  }
  return traj;
}

const double kDt = 1.0 / 64.0;

}  // namespace

TEST_CASE("Gauss-Legendre rule") {
  for (int n : {1, 2, 3, 7, 64}) {
    const auto rule = gauss_legendre(n);
    double total = 0.0;
    for (double w : rule.weights) {
      total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    // exact for degree 2n - 1: int_0^1 s^k = 1/(k+1)
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) {
        q += rule.weights[i] * std::pow(rule.nodes[i], k);
      }
      CHECK(q == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
    for (int i = 0; i < n; ++i) {
      CHECK(rule.nodes[i] == rule.lower[n - 1 - i]);
      CHECK(rule.weights[i] == rule.weights[n - 1 - i]);
      if (i > 0) {
        CHECK(rule.nodes[i] > rule.nodes[i - 1]);
      }
    }
  }
  CHECK_THROWS_AS(gauss_legendre(0), ArgumentError);
}

TEST_CASE("histogram of a point mass") {
  const auto traj = radial_trajectory(std::vector<double>(200, 2.0), 0.1);
  const auto pdf = radial_histogram(traj, 0.0, 10);
  CHECK(pdf.samples == 199);  // t = 0 is not after the burn-in
  CHECK(pdf.integral() == doctest::Approx(1.0).epsilon(1e-12));
  int occupied = 0;
  for (int i = 0; i < pdf.bins(); ++i) {
    if (pdf.density[i] > 0.0) {
      ++occupied;
      CHECK(pdf.edges[i] <= 2.0);
      CHECK(pdf.edges[i + 1] >= 2.0);
      CHECK(pdf.density[i] == doctest::Approx(1.0 / pdf.width()));
    }
  }
  CHECK(occupied == 1);
  const auto peak = peak_location(pdf);
  CHECK(std::abs(peak.radius - 2.0) <= 0.5 * pdf.width() + 1e-12);
  CHECK(!peak.ambiguous);
}

TEST_CASE("histogram of the density 2r matches within 3 sigma") {
  Rng rng(stream_key(11, 0));
  std::vector<double> radii(20000);
  for (double& r : radii) {
    r = std::sqrt(rng.uniform());
  }
  const int bins = 20;
  const auto pdf = radial_histogram(radii, bins);
  CHECK(std::abs(pdf.integral() - 1.0) < 1e-10);
  const double n = static_cast<double>(radii.size());
  for (int i = 0; i < bins; ++i) {
    const double lo = pdf.edges[i];
    const double hi = pdf.edges[i + 1];
    const double p = hi * hi - lo * lo;  // mass of 2r on the bin (max r is ~1)
    const double count = pdf.density[i] * (hi - lo) * n;
    CHECK(std::abs(count - n * p) <= 3.0 * std::sqrt(n * p * (1.0 - p)) + 1.0);
  }
}

TEST_CASE("histogram normalization and input errors") {
  Rng rng(stream_key(12, 0));
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> radii(500 + 37 * trial);
    for (double& r : radii) {
      r = std::exp(3.0 * rng.normal());
    }
    const auto pdf = radial_histogram(radii, 8 + trial);
    CHECK(std::abs(pdf.integral() - 1.0) < 1e-10);
    for (double p : pdf.density) {
      CHECK(p >= 0.0);
    }
  }
  CHECK_THROWS_AS(radial_histogram(std::vector<double>(1000, 1.0), 7), ArgumentError);
  CHECK_THROWS_AS(radial_histogram(std::vector<double>(79, 1.0), 8), ArgumentError);
  CHECK_NOTHROW(radial_histogram(std::vector<double>(80, 1.0), 8));
}

TEST_CASE("peak refinement and ambiguity") {
  // densities sampled from a parabola with vertex at 3.3: the 3-point fit is exact
  RadialPdf pdf;
  const int n = 10;
  for (int i = 0; i <= n; ++i) {
    pdf.edges.push_back(i * 0.5);
  }
  for (int i = 0; i < n; ++i) {
    const double c = 0.25 + 0.5 * i;
    pdf.density.push_back(10.0 - (c - 3.3) * (c - 3.3));
  }
  CHECK(peak_location(pdf).radius == doctest::Approx(3.3).epsilon(1e-12));

  RadialPdf twin;
  twin.edges = pdf.edges;
  twin.density = {0.1, 1.0, 0.2, 0.1, 0.1, 0.1, 0.995, 0.2, 0.1, 0.1};
  const auto peak = peak_location(twin);
  CHECK(peak.ambiguous);
  REQUIRE(peak.candidates.size() == 2);
  CHECK(peak.candidates[1] == doctest::Approx(twin.center(6)));

  // an adjacent near-equal bin is a flat top, not a second peak
  RadialPdf flat;
  flat.edges = pdf.edges;
  flat.density = {0.1, 0.2, 1.0, 0.999, 0.2, 0.1, 0.1, 0.1, 0.1, 0.1};
  CHECK(!peak_location(flat).ambiguous);
}

TEST_CASE("histogram CSV and plot script") {
  const auto pdf = radial_histogram(std::vector<double>(100, 1.0), 8);
  std::ostringstream csv;
  write_histogram_csv(csv, pdf);
  const std::string text = csv.str();
  CHECK(text.rfind("r,p\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 9);
  std::ostringstream gp;
  write_fig1_plot_script(gp, {"a.csv", "b.csv"}, {"alpha 1", "alpha 3"}, "fig1.png");
  CHECK(gp.str().find("'a.csv'") != std::string::npos);
  CHECK(gp.str().find("2*pi") != std::string::npos);
}

TEST_CASE("integrated autocorrelation of AR(1)") {
  // tau = sum_k phi^k = phi / (1 - phi)
  Rng rng(stream_key(13, 0));
  const double phi = 0.8;
  std::vector<double> x(200000);
  double s = 0.0;
  for (double& v : x) {
    s = phi * s + rng.normal();
    v = s;
  }
  CHECK(integrated_autocorrelation(x) == doctest::Approx(phi / (1.0 - phi)).epsilon(0.1));
  std::vector<double> iid(20000);
  for (double& v : iid) {
    v = rng.normal();
  }
  CHECK(integrated_autocorrelation(iid) < 0.05);
}

TEST_CASE("KS statistic and Kolmogorov tail") {
  CHECK(ks_statistic({1, 1, 1}, {2, 2}) == 1.0);
  CHECK(ks_statistic({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_statistic({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
  CHECK(kolmogorov_survival(kKsCritical05) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(3.0) < 1e-6);

  std::vector<double> series(100, 1.0);
  std::fill(series.begin() + 50, series.end(), 2.0);
  CHECK(stationarity_test(series, 0.5).ks == 1.0);
  CHECK(!stationarity_test(series, 0.5).stationary());
  CHECK_THROWS_AS(stationarity_test(series, 0.0), ArgumentError);
  CHECK_THROWS_AS(stationarity_test(series, 1.0), ArgumentError);
}

TEST_CASE("stationarity test keeps its level on iid and autocorrelated nulls") {
  Rng rng(stream_key(14, 0));
  int iid_pass = 0;
  int ar_pass = 0;
  int ar_naive_pass = 0;
  const int runs = 200;
  for (int run = 0; run < runs; ++run) {
    std::vector<double> iid(400);
    for (double& v : iid) {
      v = rng.normal();
    }
    iid_pass += stationarity_test(iid, 0.5).stationary() ? 1 : 0;

    std::vector<double> ar(4000);
    double s = rng.normal() / std::sqrt(1.0 - 0.81);
    for (double& v : ar) {
      s = 0.9 * s + rng.normal();
      v = s;
    }
    const auto r = stationarity_test(ar, 0.5);
    ar_pass += r.stationary() ? 1 : 0;
    const double naive = kKsCritical05 * std::sqrt(1.0 / 2000 + 1.0 / 2000);
    ar_naive_pass += (r.ks < naive) ? 1 : 0;
  }
  CHECK(iid_pass >= 0.9 * runs);
  CHECK(ar_pass >= 0.9 * runs);
  // the correction matters: the naive critical value over-rejects
  CHECK(ar_naive_pass < 0.7 * runs);
}

TEST_CASE("stationarity on trajectories needs enough samples") {
  const auto traj = radial_trajectory(std::vector<double>(100, 1.0), 1.0);
  CHECK_THROWS_AS(stationarity_test(traj, 50.0, 0.5), ArgumentError);
  CHECK_NOTHROW(stationarity_test(traj, 10.0, 0.5));
}

TEST_CASE("mixing: identical ensembles are already mixed") {
  integrator::SimConfig cfg;
  cfg.model = ModelSpec::harmonic_oscillator(2);
  cfg.t_max = 2.0;
  cfg.burn_in = 0.0;
  cfg.x0 = v2(1, 0);
  cfg.v0 = v2(0, 0);
  cfg.initial_past = cfg.x0;
  const auto a = integrator::simulate_ensemble(cfg, 16, {integrator::observable_radius()});
  const auto fit = mixing_rate(a, a, "radius");
  CHECK(fit.already_mixed);
  CHECK(!fit.rate_reported());
  CHECK(fit.verdict() == "already mixed");
  for (double d : fit.distance) {
    CHECK(d == 0.0);
  }
  CHECK(mixing_summary_json(fit).find("\"c\": null") != std::string::npos);
}

TEST_CASE("mixing: oscillator means follow the exact Euler-Maruyama mean") {
  integrator::SimConfig cfg;
  cfg.model = ModelSpec::harmonic_oscillator(2);
  cfg.t_max = 12.0;
  cfg.burn_in = 0.0;
  cfg.x0 = v2(1, 0);
  cfg.v0 = v2(0, 0);
  cfg.initial_past = cfg.x0;
  cfg.record_stride = 8;
  auto cfg_b = cfg;
  cfg_b.x0 = v2(-1, 0);
  cfg_b.initial_past = cfg_b.x0;
  cfg_b.seed = 1;
  const int n = 1024;
  const auto a = integrator::simulate_ensemble(cfg, n, {integrator::observable_coordinate(0)});
  const auto b = integrator::simulate_ensemble(cfg_b, n, {integrator::observable_coordinate(0)});
  const auto fit = mixing_rate(a, b, "x1");

  const Eigen::Matrix2d step = oracle::em_oscillator_map(cfg.dt, 1.0);
  Eigen::Matrix2d stride = Eigen::Matrix2d::Identity();
  for (int k = 0; k < cfg.record_stride; ++k) {
    stride = step * stride;
  }
  Eigen::Vector2d mean(1.0, 0.0);
  int within = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < fit.times.size(); ++k) {
    const double exact = 2.0 * std::abs(mean(0));
    const double z = std::abs(fit.distance[k] - exact) / fit.stderr_[k];
    within += (z <= 3.0) ? 1 : 0;
    worst = std::max(worst, z);
    mean = stride * mean;
  }
  CHECK(within >= 0.95 * fit.times.size());
  CHECK(worst < 5.0);

  // slowest relaxation of x'' + x' + x = 0 is 1/2
  REQUIRE(fit.rate_reported());
  CHECK(fit.rate == doctest::Approx(0.5).epsilon(0.15));

  std::ostringstream csv;
  write_mixing_csv(csv, fit);
  CHECK(csv.str().rfind("t,D,stderr\n", 0) == 0);
  CHECK(mixing_summary_json(fit).find("\"verdict\": \"fitted\"") != std::string::npos);
}

TEST_CASE("rho_line examples") {
  const auto model = ModelSpec::coulomb_walker(1.0);
  const int n_mem = state::default_memory_steps(model.kernel, kDt);
  MetricParams metric;
  metric.params = lyapunov::choose_kappa(model, 0.5);
  metric.N = 10.0;

  const auto ones = HistoryBuffer::constant_past(v2(1, 0), kDt, n_mem);
  const PhasePoint x{{v2(1, 0), v2(0, 0), 0.0}, ones};
  CHECK(rho_line(x, x, model, metric) == 0.0);
  const auto same = rho_N_and_tilde(x, x, model, metric);
  CHECK(same.rho_n == 0.0);
  CHECK(same.rho_tilde == 0.0);

  const PhasePoint left{{v2(-1, 0), v2(0, 0), 0.0}, ones};
  CHECK(std::isinf(rho_line(x, left, model, metric)));

  // v differs by 0.1 along e1: dense Simpson oracle of 0.1 * int e^{psi/2}
  const PhasePoint y{{v2(1, 0), v2(0.1, 0), 0.0}, ones};
  const double eta_term = state::weighted_norm(ones, model.kernel, metric.params.p2).integral;
  const double kappa = metric.params.kappa;
  auto half_psi = [&](double s) {
    const double v = 0.1 * (1.0 - s);
    return 0.5 * (0.5 + 0.5 * v * v + kappa * v - v + eta_term);
  };
  const int m = 4096;
  double simpson = std::exp(half_psi(0.0)) + std::exp(half_psi(1.0));
  for (int i = 1; i < m; ++i) {
    simpson += (i % 2 ? 4.0 : 2.0) * std::exp(half_psi(static_cast<double>(i) / m));
  }
  simpson /= 3.0 * m;
  CHECK(rho_line(x, y, model, metric) == doctest::Approx(0.1 * simpson).epsilon(1e-12));
}

TEST_CASE("rho_line symmetry and separation on random states") {
  const auto model = ModelSpec::coulomb_walker(3.0);
  const int n_mem = 128;
  MetricParams metric;
  metric.params = lyapunov::choose_kappa(model, 0.5);
  Rng rng(stream_key(15, 0));
  auto random_point = [&]() {
    std::vector<Vec> samples;
    for (int k = 0; k <= n_mem; ++k) {
      samples.push_back(v2(1.0 + rng.uniform(), rng.normal()));
    }
    return PhasePoint{{v2(1.0 + rng.uniform(), 1.0 + rng.uniform()), v2(rng.normal(), rng.normal()), 0.0},
                      HistoryBuffer::from_samples(samples, kDt, n_mem, samples.back())};
  };
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_point();
    const auto b = random_point();
    const double ab = rho_line(a, b, model, metric);
    const double ba = rho_line(b, a, model, metric);
    CHECK(ab == ba);
    CHECK(ab > 0.0);
    CHECK(rho_line(a, a, model, metric) == 0.0);
    // a single perturbed history sample separates the points
    auto c = a;
    std::vector<Vec> samples = a.history.samples();
    samples[5][0] += 1e-3;
    c.history = HistoryBuffer::from_samples(samples, kDt, n_mem, a.history.tail());
    CHECK(rho_line(a, c, model, metric) > 0.0);
  }
  auto other = random_point();
  other.history = HistoryBuffer::constant_past(v2(1, 0), kDt, n_mem + 1);
  CHECK_THROWS_AS(rho_line(random_point(), other, model, metric), ArgumentError);
}

TEST_CASE("rho_N saturation arithmetic") {
  const auto r = saturate(0.05, 0.0, 0.0, 10.0);
  CHECK(r.rho_n == doctest::Approx(0.5));
  CHECK(r.rho_tilde == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
  CHECK(r.rho_tilde == doctest::Approx(1.224745).epsilon(1e-6));
  const auto big = saturate(0.2, 1.0, 2.0, 10.0);
  CHECK(big.rho_n == 1.0);
  CHECK(big.rho_tilde == doctest::Approx(std::sqrt(1.0 + std::exp(1.0) + std::exp(2.0))));
  // no overflow for huge psi
  const auto huge = saturate(1.0, 2000.0, 1.0, 1.0);
  CHECK(huge.rho_tilde == std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(std::log(saturate(1e-300, 1200.0, 1.0, 1.0).rho_tilde)));
  CHECK(saturate(std::numeric_limits<double>::infinity(), 0.0, 0.0, 2.0).rho_n == 1.0);
  CHECK_THROWS_AS(saturate(1.0, 0.0, 0.0, 0.0), ArgumentError);
  for (double rho : {1e-6, 1e-3, 0.01, 0.09}) {
    CHECK(saturate(rho, 0.0, 0.0, 10.0).rho_n == doctest::Approx(10.0 * rho));
  }
}

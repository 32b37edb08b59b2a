#include "memwalk/models/bessel.hpp"

#include <cmath>
#include <numbers>

namespace memwalk::models {
namespace {

constexpr int kMaxSeriesTerms = 80;
constexpr double kSeriesTolerance = 1e-18;

// 1 / (k (k + order)) for the ascending series recurrences
struct SeriesFactors {
  double order0[kMaxSeriesTerms];
  double order1[kMaxSeriesTerms];
  constexpr SeriesFactors() : order0(), order1() {
    for (int k = 1; k < kMaxSeriesTerms; ++k) {
      order0[k] = 1.0 / (static_cast<double>(k) * k);
      order1[k] = 1.0 / (static_cast<double>(k) * (k + 1));
    }
  }
};
constexpr SeriesFactors kFactors;

// sum_k (-y)^k / (k! (k+order)!) with y = x^2/4, order in {0, 1}.
double ascending_series(double quarter_x2, int order) {
  const double* factor = (order == 0) ? kFactors.order0 : kFactors.order1;
  double term = 1.0;
  double sum = term;
  for (int k = 1; k < kMaxSeriesTerms; ++k) {
    term *= -quarter_x2 * factor[k];
    sum += term;
    if (std::abs(term) < kSeriesTolerance) {
      break;
    }
  }
  return sum;
}

// Hankel expansion for large positive x.
double hankel_asymptotic(double x, int order) {
  const double mu = 4.0 * order * order;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last_magnitude = 1.0;
  for (int k = 1; k < 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (static_cast<double>(k) * 8.0 * x);
    const double magnitude = std::abs(term);
    if (magnitude > last_magnitude) {
      break;  // asymptotic series started to diverge
    }
    last_magnitude = magnitude;
    // k odd -> Q with sign (-1)^((k-1)/2); k even -> P with sign (-1)^(k/2)
    if (k % 2 == 1) {
      q += ((k / 2) % 2 == 0) ? term : -term;
    } else {
      p += ((k / 2) % 2 == 0) ? term : -term;
    }
    if (magnitude < 1e-17) {
      break;
    }
  }
  const double chi = x - (0.5 * order + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j0(double x) {
  const double ax = std::abs(x);
  if (ax <= kBesselSeriesCutoff) {
    return ascending_series(0.25 * ax * ax, 0);
  }
  return hankel_asymptotic(ax, 0);
}

double bessel_j1(double x) {
  const double ax = std::abs(x);
  const double value = (ax <= kBesselSeriesCutoff) ? 0.5 * ax * ascending_series(0.25 * ax * ax, 1)
                                                    : hankel_asymptotic(ax, 1);
  return (x < 0.0) ? -value : value;
}

double bessel_j1_over_r_sq(double r2) {
  if (r2 <= kBesselSeriesCutoff * kBesselSeriesCutoff) {
    return 0.5 * ascending_series(0.25 * r2, 1);
  }
  const double r = std::sqrt(r2);
  return hankel_asymptotic(r, 1) / r;
}

double bessel_j1_prime(double x) {
  if (x == 0.0) {
    return 0.5;
  }
  return bessel_j0(x) - bessel_j1_over_r_sq(x * x);
}

}  // namespace memwalk::models

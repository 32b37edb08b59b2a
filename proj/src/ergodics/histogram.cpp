#include "memwalk/ergodics/histogram.hpp"

#include "memwalk/integrator/trajectory_io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace memwalk::ergodics {

double RadialPdf::integral() const {
  double total = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    total += density[i] * (edges[i + 1] - edges[i]);
  }
  return total;
}

std::vector<double> post_burn_in_radii(const integrator::Trajectory& traj, double burn_in) {
  if (traj.states.size() != traj.times.size()) {
    throw ArgumentError("trajectory keeps no states");
  }
  std::vector<double> radii;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (traj.times[k] > burn_in) {
      radii.push_back(traj.states[k].x.norm());
    }
  }
  return radii;
}

RadialPdf radial_histogram(const std::vector<double>& radii, int bins) {
  if (bins < kMinBins) {
    throw ArgumentError("radial_histogram: need at least " + std::to_string(kMinBins) + " bins");
  }
  if (radii.size() < static_cast<std::size_t>(kSamplesPerBin) * bins) {
    throw ArgumentError("radial_histogram: " + std::to_string(radii.size()) + " samples for " + std::to_string(bins) +
                        " bins (need " + std::to_string(kSamplesPerBin * bins) + ")");
  }
  const double r_max = *std::max_element(radii.begin(), radii.end());
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw ArgumentError("radial_histogram: radii must be finite and not all zero");
  }
  RadialPdf pdf;
  pdf.samples = static_cast<long>(radii.size());
  pdf.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) {
    pdf.edges[i] = r_max * i / bins;
  }
  std::vector<long> counts(bins, 0);
  for (double r : radii) {
    const int i = std::min(bins - 1, static_cast<int>(r / r_max * bins));
    ++counts[i];
  }
  // normalize by the realized widths so the integral is 1 up to rounding
  pdf.density.resize(bins);
  double total = 0.0;
  for (int i = 0; i < bins; ++i) {
    pdf.density[i] = static_cast<double>(counts[i]) / (static_cast<double>(pdf.samples) * (pdf.edges[i + 1] - pdf.edges[i]));
    total += pdf.density[i] * (pdf.edges[i + 1] - pdf.edges[i]);
  }
  for (double& p : pdf.density) {
    p /= total;
  }
  return pdf;
}

RadialPdf radial_histogram(const integrator::Trajectory& traj, double burn_in, int bins) {
  return radial_histogram(post_burn_in_radii(traj, burn_in), bins);
}

PeakLocation peak_location(const RadialPdf& pdf) {
  const int n = pdf.bins();
  if (n == 0) {
    throw ArgumentError("peak_location: empty histogram");
  }
  const auto& p = pdf.density;
  const int m = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  PeakLocation peak;
  peak.bin = m;
  peak.radius = pdf.center(m);
  if (m > 0 && m + 1 < n) {
    const double curvature = p[m - 1] - 2.0 * p[m] + p[m + 1];
    if (curvature < 0.0) {
      const double shift = 0.5 * (p[m - 1] - p[m + 1]) / curvature;
      peak.radius += std::clamp(shift, -0.5, 0.5) * pdf.width();
    }
  }
  // other local maxima within 1% of the peak; a run of equal bins counts once
  peak.candidates.push_back(peak.radius);
  for (int i = 0; i < n; ++i) {
    if (std::abs(i - m) <= 1 || p[i] < 0.99 * p[m]) {
      continue;
    }
    const bool left_ok = (i == 0) || p[i] >= p[i - 1];
    const bool right_ok = (i == n - 1) || p[i] > p[i + 1];
    if (left_ok && right_ok) {
      peak.candidates.push_back(pdf.center(i));
    }
  }
  peak.ambiguous = peak.candidates.size() > 1;
  return peak;
}

void write_histogram_csv(std::ostream& out, const RadialPdf& pdf) {
  out << "r,p\n";
  for (int i = 0; i < pdf.bins(); ++i) {
    out << integrator::format_number(pdf.center(i)) << ',' << integrator::format_number(pdf.density[i]) << '\n';
  }
}

void write_fig1_plot_script(std::ostream& out, const std::vector<std::string>& csv_files,
                            const std::vector<std::string>& labels, const std::string& output_png) {
  out << "# radial density p(r); radii are raw, the x axis divides by 2 pi\n";
  out << "set datafile separator ','\n";
  out << "set terminal pngcairo size 800,500\n";
  out << "set output '" << output_png << "'\n";
  out << "set xlabel 'r / 2{/Symbol p}'\n";
  out << "set ylabel 'p(r)'\n";
  out << "set key top right\n";
  out << "plot ";
  for (std::size_t i = 0; i < csv_files.size(); ++i) {
    out << (i ? ", \\\n     " : "") << "'" << csv_files[i] << "' skip 1 using ($1/(2*pi)):($2*2*pi) with steps title '"
        << (i < labels.size() ? labels[i] : csv_files[i]) << "'";
  }
  out << "\n";
}

}  // namespace memwalk::ergodics

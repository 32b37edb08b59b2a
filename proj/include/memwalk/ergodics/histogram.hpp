#pragma once

#include "memwalk/integrator/stepper.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace memwalk::ergodics {

/// Density of r = |x| per unit radius on uniform bins over [0, max r].
struct RadialPdf {
  std::vector<double> edges;
  std::vector<double> density;
  long samples = 0;

  int bins() const { return static_cast<int>(density.size()); }
  double width() const { return edges.size() > 1 ? edges[1] - edges[0] : 0.0; }
  double center(int i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  /// sum p_i dr_i
  double integral() const;
};

inline constexpr int kMinBins = 8;
inline constexpr int kSamplesPerBin = 10;

/// Radii of the recorded states with t > burn_in.
std::vector<double> post_burn_in_radii(const integrator::Trajectory& traj, double burn_in);

/// Throws ArgumentError for bins < 8 or fewer than 10 * bins samples.
RadialPdf radial_histogram(const std::vector<double>& radii, int bins);
RadialPdf radial_histogram(const integrator::Trajectory& traj, double burn_in, int bins);

struct PeakLocation {
  double radius = 0.0;
  int bin = -1;
  /// Another local maximum reaches 99% of the peak density.
  bool ambiguous = false;
  std::vector<double> candidates;
};

/// Center of the densest bin shifted by a 3-point parabola through it and its neighbours.
PeakLocation peak_location(const RadialPdf& pdf);

/// CSV `r,p` with r the bin center.
void write_histogram_csv(std::ostream& out, const RadialPdf& pdf);

/// gnuplot script plotting p(r) against r / 2pi from the named CSV files, one curve per label.
void write_fig1_plot_script(std::ostream& out, const std::vector<std::string>& csv_files,
                            const std::vector<std::string>& labels, const std::string& output_png);

}  // namespace memwalk::ergodics

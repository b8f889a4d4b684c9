#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gausstat/state_engine.hpp"

namespace gausstat {

struct Ambiguity {
  bool global_phase = true;  // overall phase-space rotation is never fixed by photon statistics
  bool z2_reflection = false; // sign of the relative displacement/squeezing phase left open
  std::vector<GaussianParams> discrete_solutions; // alternatives besides the primary params
  std::vector<std::string> notes;
};

struct ReconstructedState {
  GaussianParams params;
  Ambiguity ambiguity;
  double residual = 0.0; // max |observable(params) - input| over the inputs used
};

// Zero displacement, squeezing r = |z| (phase gauge theta = 0), thermal N.
ReconstructedState recon_squeezed_thermal(double g2, double nbar, double tol = 1e-9);
ReconstructedState recon_squeezed_thermal_click(double g2, double p0, double tol = 1e-9);

// Displacement |alpha| (phase gauge 0), thermal N, no squeezing.
ReconstructedState recon_displaced_thermal(double g2, double nbar, double tol = 1e-9);
ReconstructedState recon_displaced_thermal_click(double g2, double p0, double tol = 1e-9);

// Least-squares line g3 = m g2 + c through scan points.
struct ScanPoint {
  double g2 = 0.0;
  double g3 = 0.0;
  double sigma_g2 = 0.0;
  double sigma_g3 = 0.0;
};
struct LineFit {
  double m = 0.0;
  double c = 0.0;
  double residual = 0.0; // max |g3 - (m g2 + c)|
};
LineFit fit_scan_line(const std::vector<ScanPoint>& points, double tol = 1e-9);

// Phase scan of a displaced squeezed state at fixed |alpha|, |cov|.
// psi = 2 phi - theta with theta the squeezing phase (z = r e^{i theta}).
// With known phase offsets psi_k - psi_0 the reflection is resolved.
struct ScanReconstruction {
  double alpha_abs = 0.0;
  double cov_abs = 0.0;
  double r = 0.0;
  double N = 0.0;
  LineFit line;
  std::vector<double> cosines;       // cos psi_k per point
  std::vector<double> relative_phases; // psi_k in (-pi, pi]; sign open unless resolved
  bool z2_resolved = false;
  std::vector<ReconstructedState> states; // one per scan point
};
ScanReconstruction recon_dst_scan(const std::vector<ScanPoint>& points, double nbar,
                                  std::optional<std::vector<double>> phase_offsets = std::nullopt,
                                  double tol = 1e-9);

// Beam-splitter route: the zero-mean output carries (r, N); |alpha|^2 from the photon-number
// difference; cos psi from g2 of the original state.
struct BeamsplitterData {
  double g2_minus = 0.0;
  double nbar_minus = 0.0;
  std::optional<double> nbar_orig;
  std::optional<double> nbar_plus; // displaced output, 2|alpha|^2 + nbar_minus
  double g2_orig = 0.0;
  std::optional<double> g3_orig; // optional cross-check
};
ReconstructedState recon_dst_beamsplitter(const BeamsplitterData& d, double tol = 1e-9);

// cos(2 phi - theta) from g2 of a single-mode state with known |alpha|^2, |cov| and nbar.
double dst_cosine(double g2, double nbar, double alpha2, double cov_abs);

// Corrected quartic in N for the squeezed-thermal click inversion, highest power first.
std::vector<double> click_quartic(double g2, double p0);

} // namespace gausstat

#pragma once

#include <string>

#include "gausstat/state_engine.hpp"

namespace gausstat {

// Mode-blind correlations: total photon number factorial moments over all modes.
struct BucketObservables {
  double g2_b = 0.0;
  double g3_b = 0.0;
  double total_nbar = 0.0; // Tr G
};

// Trace formulas in G_ij = <a_i^dag a_j> (raw), cov and alpha.
BucketObservables bucket_correlations(const MomentSummary& m);

enum class BucketVerdict { ConsistentNonSqueezed, CertifiesSqueezing, RequiresDisplacementAndSqueezing, Inconclusive };

struct BucketCheck {
  BucketVerdict verdict = BucketVerdict::Inconclusive;
  std::string message; // always carries the Gaussian-assumption caveat
};

// sigma_g2 widens the decision band to 3 sigma; inside the band the verdict is inconclusive.
BucketCheck bucket_bounds_check(const BucketObservables& obs, double sigma_g2 = 0.0, double tol = 1e-9);
const char* verdict_name(BucketVerdict v);

// K equal, uncorrelated, pure single-beam squeezers:
//   g2_B = 1 + v + 2u,  g3_B = 1 + 3v + 6u + 6uv + 8u^2,  u = 1/K, v = 1/Tr G.
struct ModeCountEstimate {
  bool model_ok = false;
  double K = 0.0;
  double total_nbar = 0.0;
  double residual = 0.0; // how far g3_B is from the model curve when no exact solution exists
  std::string message;
};
ModeCountEstimate pure_squeezer_mode_estimate(double g2_b, double g3_b, double tol = 1e-9);

} // namespace gausstat

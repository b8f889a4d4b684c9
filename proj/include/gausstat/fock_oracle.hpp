#pragma once

#include <vector>

#include "gausstat/moment_kernel.hpp"
#include "gausstat/state_engine.hpp"
#include "gausstat/types.hpp"

namespace gausstat {

struct TruncatedDensity {
  int dim = 0;   // cutoff d per mode
  int modes = 0;
  CMat matrix;   // d^M x d^M, basis index sum_m n_m d^(M-1-m)
  double trace_deficit = 0.0;
};

struct FockOptions {
  int cutoff = 0;                   // 0 selects the default for the mode count
  double deficit_threshold = 1e-4;  // above this build_density throws Truncation
  long max_dim = 4096;
};

int default_cutoff(int modes);

// Dense truncated ladder operator acting on `mode`.
CMat ladder_matrix(const LadderOp& op, int modes, int cutoff);

// Exponentials of truncated generators.
CMat displacement_unitary(const CVec& alpha, int cutoff);
CMat squeeze_unitary(const CMat& z, int cutoff);
CMat rotation_unitary(const CMat& phi, int cutoff);

TruncatedDensity build_density(const GaussianParams& params, const FockOptions& opts = {});

cplx moment_bruteforce(const TruncatedDensity& rho, const LadderWord& word);
// Same as calling moment_bruteforce per word; words sharing a left half reuse work.
std::vector<cplx> moments_bruteforce(const TruncatedDensity& rho, const std::vector<LadderWord>& words);

double vacuum_overlap(const TruncatedDensity& rho);
RVec photon_number_distribution(const TruncatedDensity& rho, int mode);

// Total-photon-number factorial moments <N(N-1)>/<N>^2 and <N(N-1)(N-2)>/<N>^3.
struct BucketMoments {
  double g2_b = 0.0;
  double g3_b = 0.0;
  double total_nbar = 0.0;
};
BucketMoments bucket_bruteforce(const TruncatedDensity& rho);

} // namespace gausstat

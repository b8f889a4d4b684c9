#pragma once

#include <string>
#include <vector>

#include "gausstat/classifier.hpp"
#include "gausstat/recon_single.hpp"

namespace gausstat {

// A_ij = 1/2 <{a_i, a_j^dag}> - <a_i><a_j^dag>,  B_ij = cov_ij
struct ComplexCovariance {
  CMat A;
  CMat B;
  void validate(double tol = 1e-9) const;
};

// Quadratures x = (a + a^dag)/sqrt2, p = (a - a^dag)/(i sqrt2), ordered (x_1..x_M, p_1..p_M); vacuum = I/2.
struct RealCovariance {
  RMat V;
  int modes() const { return static_cast<int>(V.rows() / 2); }
};

RealCovariance complex_to_real_cov(const ComplexCovariance& c);
ComplexCovariance real_to_complex_cov(const RealCovariance& r);
ComplexCovariance complex_covariance(const MomentSummary& s);

struct WilliamsonResult {
  RVec D;  // symplectic eigenvalues, N_i + 1/2
  RMat S;  // V = S diag(D, D) S^T
  std::vector<std::string> q_ambiguity; // degenerate groups of D (free rotation inside each)
};

WilliamsonResult williamson(const RealCovariance& v, double tol = 1e-10);

// (E, F) of the Bogoliubov map of a real symplectic S, and the inverse direction.
void symplectic_to_bogoliubov(const RMat& S, CMat& E, CMat& F);

// Gaussian parameters with the given first and second moments (Williamson + polar decomposition).
// Throws on physicality violations (min symplectic eigenvalue < 1/2 - tol).
GaussianParams params_from_moments(const MomentSummary& s, double tol = 1e-9);

// max deviation of the observables of params from the entries present in m
// (nbar relative, complex g1, g2, g3, p0 for single mode)
double observable_residual(const GaussianParams& params, const MeasurementSet& m);

ReconstructedState recon_displaced_thermal_multi(const MeasurementSet& m, double tol = 1e-6);
ReconstructedState recon_squeezed_thermal_multi(const MeasurementSet& m, double tol = 1e-6);

// Beam-splitter route: `minus` is the zero-mean output, `other` the original state or,
// with other_is_plus, the displaced output (displacement sqrt2 alpha).
ReconstructedState recon_displaced_squeezed_multi(const MeasurementSet& minus, const MeasurementSet& other,
                                                  bool other_is_plus = false, double tol = 1e-6);

} // namespace gausstat

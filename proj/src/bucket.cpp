#include "gausstat/bucket.hpp"

#include <cmath>
#include <sstream>

namespace gausstat {

namespace {
const char* kCaveat = " (under the Gaussian-state assumption; model-conditional)";
}

BucketObservables bucket_correlations(const MomentSummary& m) {
  const CMat& G = m.coherence;
  const CMat& C = m.cov;
  const CVec& a = m.alpha;
  const double tr = G.trace().real();
  if (!(tr > 0.0)) throw Error(ErrorKind::UndefinedCorrelation, "bucket correlations undefined: total photon number is 0");
  const double tr2 = (G * G).trace().real();
  const double tr3 = (G * G * G).trace().real();
  const double cc = (C.adjoint() * C).trace().real();
  const double a2 = a.squaredNorm();
  const double acA = (a.adjoint() * C * a.conjugate())(0, 0).real();      // Re[alpha^dag cov alpha^*]
  const double cgc = (C * G * C.adjoint()).trace().real();                 // Tr(cov G cov^dag)
  const double aga = (a.transpose() * G * a.conjugate())(0, 0).real();     // alpha^T G alpha^*
  const double agca = (a.transpose() * G * C.adjoint() * a)(0, 0).real();  // Re[alpha^T G cov^dag alpha]

  BucketObservables o;
  o.total_nbar = tr;
  const double t2 = tr * tr, t3 = t2 * tr;
  o.g2_b = 1.0 + tr2 / t2 + (cc - a2 * a2) / t2 + 2.0 * acA / t2;
  o.g3_b = 1.0 + 3.0 * tr2 / t2 + 2.0 * tr3 / t3 + 3.0 * (cc - a2 * a2) / t2 + 6.0 * (1.0 - 2.0 * a2 / tr) * acA / t2 +
           4.0 * a2 * a2 * a2 / t3 + 6.0 * cgc / t3 - 6.0 * a2 * aga / t3 + 12.0 * agca / t3;
  return o;
}

const char* verdict_name(BucketVerdict v) {
  switch (v) {
  case BucketVerdict::ConsistentNonSqueezed: return "consistent-nonsqueezed";
  case BucketVerdict::CertifiesSqueezing: return "certifies-squeezing";
  case BucketVerdict::RequiresDisplacementAndSqueezing: return "requires-displacement-and-squeezing";
  case BucketVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

BucketCheck bucket_bounds_check(const BucketObservables& obs, double sigma_g2, double tol) {
  BucketCheck c;
  const double g = obs.g2_b, band = std::max(tol, 3.0 * sigma_g2);
  std::ostringstream os;
  os << "g2_B = " << g;
  if (!std::isfinite(g)) {
    c.verdict = BucketVerdict::Inconclusive;
    os << ": not a finite value";
  } else if (std::abs(g - 2.0) <= band && band > tol) {
    c.verdict = BucketVerdict::Inconclusive;
    os << " within the noise band of the bound 2";
  } else if (std::abs(g - 1.0) <= band && band > tol) {
    c.verdict = BucketVerdict::Inconclusive;
    os << " within the noise band of the bound 1";
  } else if (g > 2.0 + band) {
    c.verdict = BucketVerdict::CertifiesSqueezing;
    os << " > 2 certifies a nonzero squeezing parameter (evidence for cov != 0, not for sub-shot-noise variance)";
  } else if (g < 1.0 - band) {
    c.verdict = BucketVerdict::RequiresDisplacementAndSqueezing;
    os << " < 1: the state must be both displaced and squeezed";
  } else {
    c.verdict = BucketVerdict::ConsistentNonSqueezed;
    os << " lies in [1, 2]: consistent with a non-squeezed state (does not exclude squeezing)";
  }
  c.message = os.str() + kCaveat;
  return c;
}

ModeCountEstimate pure_squeezer_mode_estimate(double g2_b, double g3_b, double tol) {
  ModeCountEstimate e;
  const char* assume = "assumes a pure Gaussian state of K equal, uncorrelated single-beam squeezers with equal loss";
  // eliminate v = g2_B - 1 - 2u:  4u^2 - 6(g2_B - 1)u + (g3_B - 1 - 3(g2_B - 1)) = 0
  const double b = g2_b - 1.0;
  const double c0 = g3_b - 1.0 - 3.0 * b;
  const double disc = 36.0 * b * b - 16.0 * c0;
  double u;
  if (disc < 0.0) {
    u = 6.0 * b / 8.0;
    e.residual = std::abs(4.0 * u * u - 6.0 * b * u + c0);
  } else {
    u = (6.0 * b - std::sqrt(disc)) / 8.0; // the larger root always gives Tr G < 0
  }
  const double v = b - 2.0 * u;
  std::ostringstream os;
  if (e.residual > tol) {
    os << "model-mismatch: no equal-squeezer solution (g3_B off the model curve by " << e.residual << ")";
  } else if (!(u > 0.0) || 1.0 / u < 1.0 - 1e-9) {
    os << "model-mismatch: K = " << (u > 0 ? 1.0 / u : INFINITY) << " < 1";
  } else if (!(v > tol)) {
    os << "model-mismatch: implied mean photon number per squeezer is not positive (1/Tr G = " << v << ")";
  } else {
    e.model_ok = true;
    e.K = 1.0 / u;
    e.total_nbar = 1.0 / v;
    os << "K = " << e.K << ", Tr G = " << e.total_nbar;
  }
  e.message = os.str() + "; " + assume;
  return e;
}

} // namespace gausstat

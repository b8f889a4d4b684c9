#pragma once

#include <array>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "gausstat/moment_kernel.hpp"
#include "gausstat/types.hpp"

namespace gausstat {

// rho = D(alpha) S(z) R(phi) rho_th R^dag S^dag D^dag
struct GaussianParams {
  CVec alpha;
  CMat squeeze;  // complex symmetric z
  CMat rotation; // hermitian phi
  RVec thermal;  // N_k >= 0

  int modes() const { return static_cast<int>(alpha.size()); }
  void validate(double tol = 1e-12) const;
  static GaussianParams vacuum(int modes);
};

// a' = E a + F a^dag + alpha
struct BogoliubovMap {
  CMat E;
  CMat F;
  CVec disp; // (alpha, alpha^*)
};

struct MomentSummary {
  RVec nbar;
  CMat g1;        // G_ij / sqrt(n_i n_j); NaN where a mode has n = 0
  CMat cov;       // <a_i a_j> - alpha_i alpha_j
  CVec alpha;
  CMat coherence; // G_ij = <a_i^dag a_j>

  int modes() const { return static_cast<int>(nbar.size()); }
};

using Triple = std::array<int, 3>;

BogoliubovMap bogoliubov_map(const GaussianParams& params);
double symplectic_residual(const BogoliubovMap& map);

MomentSummary derive_moments(const GaussianParams& params);
MomentSummary summary_from_moments(const CVec& alpha, const CMat& coherence, const CMat& cov);

// First/second raw moments by propagating thermal moments through L (b' = L b + A).
MomentTable moment_table(const GaussianParams& params);
MomentTable moment_table(const MomentSummary& summary);

std::optional<double> g2_entry(const MomentSummary& m, int i, int j);
RMat g2_tensor(const MomentSummary& m);
std::optional<double> g3_entry(const MomentSummary& m, int i, int j, int k);
std::map<Triple, double> g3_tensor(const MomentSummary& m, const std::vector<Triple>& triples);
std::vector<Triple> sorted_triples(int modes);

// Normalized correlations evaluated directly from the 4- and 6-word kernel moments.
double g2_from_kernel(const MomentTable& t, int i, int j);
double g3_from_kernel(const MomentTable& t, int i, int j, int k);

double no_click_probability_single(const GaussianParams& params);

std::pair<GaussianParams, GaussianParams> balanced_beamsplitter_duplicate(const GaussianParams& params);

// Uniform loss eta on every mode: alpha -> sqrt(eta) alpha, G -> eta G, cov -> eta cov.
MomentSummary apply_uniform_loss(const MomentSummary& m, double eta);

// Conjugation identities:
//   R^dag D(alpha) R = D(e^{-i phi} alpha)
//   R^dag S(z) R = S(e^{-i phi} z e^{-i phi^T})
//   S^dag D(alpha) S = D(cosh(r) alpha + sinh(r) e^{i theta} alpha^*)
CVec rotation_through_displacement(const CVec& alpha, const CMat& phi);
CMat rotation_through_squeeze(const CMat& z, const CMat& phi);
CVec squeeze_through_displacement(const CVec& alpha, const CMat& z);

// The same unitary D(alpha) S(z) R(phi) written in two other factor orders.
struct ReorderedUnitary {
  // U = R(phi) D(alpha_r) S(z_r)
  CVec alpha_r;
  CMat z_r;
  // U = S(z) D(alpha_s) R(phi)
  CVec alpha_s;
};

ReorderedUnitary unitary_reorder_identities(const GaussianParams& params);

// cosh(r), sinh(r) e^{i theta} for z = r e^{i theta}
CMat cosh_r(const CMat& z);
CMat sinh_r_phase(const CMat& z);

} // namespace gausstat

#pragma once

#include <string>
#include <vector>

#include "gausstat/types.hpp"

namespace gausstat {

enum class PhaseKind { Displacement, Covariance };

// c_ij = cos(Phi_ij + phi_i - phi_j)            (displacement, c symmetric)
// c_ij = cos(Phi_ij + Theta_ii - Theta_ij)      (covariance, c_ij and c_ji independent)
struct PhaseSystem {
  int modes = 0;
  RMat Phi; // antisymmetric
  RMat c;
  PhaseKind kind = PhaseKind::Displacement;
};

struct PhaseSolution {
  RVec phases;              // phi_i (displacement) or Theta_ii (covariance); entry 0 is the gauge, = 0
  RMat theta;               // covariance kind only: full symmetric Theta
  std::vector<int> sigma;   // length M-1, tree edges (0,i)
  std::vector<int> epsilon; // covariance kind: one per pair i<j, row-major over pairs
  std::vector<std::string> degeneracy_notes;
  double residual = 0.0;
};

struct DegeneracyReport {
  // "pm-sigma" or "G-condition" per pair of solutions, with the edges that allow it
  std::vector<std::string> tags;
  bool empty() const { return tags.empty(); }
};

std::vector<PhaseSolution> solve_displacement_phases(const PhaseSystem& sys, double tol = 1e-8);
std::vector<PhaseSolution> solve_covariance_phases(const PhaseSystem& sys, double tol = 1e-8);

// Same solvers at the tightest tolerance (decades from 1e-12 up to max_tol) that admits a solution.
// A loose propagated tolerance otherwise merges distinct branches or collapses a sign that is resolved.
std::vector<PhaseSolution> solve_displacement_phases_tight(const PhaseSystem& sys, double max_tol);
std::vector<PhaseSolution> solve_covariance_phases_tight(const PhaseSystem& sys, double max_tol);
DegeneracyReport degeneracy_report(const PhaseSystem& sys, const std::vector<PhaseSolution>& solutions,
                                   double tol = 1e-8);

// max |c_ij - cos(...)| over every equation of the system
double phase_residual(const PhaseSystem& sys, const PhaseSolution& sol);

} // namespace gausstat

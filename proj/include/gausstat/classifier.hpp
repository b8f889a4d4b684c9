#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gausstat/phase_graph.hpp"
#include "gausstat/state_engine.hpp"

namespace gausstat {

struct Sigmas {
  double nbar = 0.0;
  double g1 = 0.0; // applies to |g1| and, divided by |g1|, to its phase
  double g2 = 0.0;
  double g3 = 0.0;
  double p0 = 0.0;
  bool any() const { return nbar > 0 || g1 > 0 || g2 > 0 || g3 > 0 || p0 > 0; }
};

struct MeasurementSet {
  int modes = 0;
  std::optional<RVec> nbar;
  std::optional<RMat> g1_abs;
  std::optional<RMat> g1_phase; // Phi_ij, antisymmetric
  RMat g2;
  std::map<Triple, double> g3; // keys sorted ascending
  std::optional<RVec> p0;
  Sigmas sigma;

  std::optional<double> g3_at(int i, int j, int k) const;
  void set_g3(int i, int j, int k, double v);
  void validate() const;
};

// Exact observables of a state; g3 for the requested triples (default: all sorted triples).
MeasurementSet simulate_measurements(const GaussianParams& params, std::vector<Triple> triples = {});
MeasurementSet measurements_from_summary(const MomentSummary& m, std::vector<Triple> triples = {});

enum class Sector { NonDisplaced, NonSqueezed, DisplacedSqueezedConsistent, CoherentLike, ThermalLike, Inconsistent };
const char* sector_name(Sector s);

struct RelationResidual {
  std::string relation;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed() const { return std::abs(value) <= tolerance; }
};

struct FeasibilityWitness {
  double a = 0.0; // |alpha|^2 / nbar
  double c = 0.0; // |cov| / nbar
  double x = 0.0; // cos arg(alpha^2 cov^*), i.e. -cos(2 phi - theta) for z = r e^{i theta}
};

struct Feasibility {
  bool feasible = false;
  std::optional<FeasibilityWitness> witness;
  double best_margin = 0.0; // max over a of the worst constraint value; >= -tol when feasible
};

struct Classification {
  Sector sector = Sector::Inconsistent;
  std::vector<Sector> passing;
  std::vector<RelationResidual> residuals;
  std::vector<std::string> notes;
  std::optional<FeasibilityWitness> witness;
  std::vector<PhaseSolution> displacement_phases; // multimode, non-squeezed hypothesis
  std::vector<PhaseSolution> covariance_phases;   // multimode, non-displaced hypothesis
};

extern const char* const kEvidenceOnly;

Classification classify_single_mode(const MeasurementSet& m, double tol = 1e-6);
Feasibility displaced_squeezed_feasibility(double g2, double g3, double tol = 1e-6,
                                           std::optional<double> nbar = std::nullopt);
Classification classify_multimode(const MeasurementSet& m, double tol = 1e-6);
Classification classify(const MeasurementSet& m, double tol = 1e-6);

// Cosine data for the phase systems built from g3_iij (exposed for reconstruction).
// Non-squeezed: c_ij = cos(Phi_ij + phi_i - phi_j); non-displaced: c_ij = cos(Phi_ij + Theta_ii - Theta_ij).
struct CosineData {
  PhaseSystem system;
  std::vector<std::string> unconstrained; // edges whose g3_iij carries no phase information
  double max_excess = 0.0;                // largest |c| - 1 before clamping
  double tol = 0.0;                       // tolerance in cosine units
};
CosineData nonsqueezed_cosines(const MeasurementSet& m, double tol);
CosineData nondisplaced_cosines(const MeasurementSet& m, double tol);

// Scale-free correlation predictions (nbar = 1 per mode) used to check unused g3 entries.
MomentSummary normalized_summary_nonsqueezed(const MeasurementSet& m, const RVec& phases);
MomentSummary normalized_summary_nondisplaced(const MeasurementSet& m, const RMat& theta);

} // namespace gausstat

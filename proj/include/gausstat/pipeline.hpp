#pragma once

#include <string>
#include <vector>

#include "gausstat/serialize.hpp"

namespace gausstat {

struct RunConfig {
  double tolerance = 1e-6;
  int fock_cutoff = 0; // 0: default for the mode count
  std::uint64_t seed = 0;
  Sigmas noise;        // estimator-level Gaussian noise, zero = exact
  std::string output_path;

  void validate() const;
  json to_json() const;
  static RunConfig from_json(const json& j);
};

// Each command is a pure function of (inputs, config).
json cmd_simulate(const json& params, const RunConfig& cfg);
json cmd_classify(const json& measurements, const RunConfig& cfg);
// sector: auto | nd | ns | dst. dst takes a scan file or two measurement files
// (zero-mean port first, then the original or the displaced port, see "port").
json cmd_reconstruct(const std::vector<json>& inputs, const std::string& sector, const RunConfig& cfg);
json cmd_verify(const json& params, const RunConfig& cfg);
// CSV with header "g2,g3"; relation "nondisplaced" (alias eq20) or "nonsqueezed" (alias eq21).
std::string cmd_curves(const std::string& relation, double g2_from, double g2_to, int points);
// Input: GaussianParams, or {"g2_b", "g3_b"[, "sigma_g2_b"]} measured bucket values.
json cmd_bucket(const json& input, const RunConfig& cfg);

} // namespace gausstat

#pragma once

#include <string>

#include <json.hpp>

#include "gausstat/bucket.hpp"
#include "gausstat/classifier.hpp"
#include "gausstat/recon_single.hpp"

namespace gausstat {

using json = nlohmann::json;

inline constexpr const char* kSchema = "gausstat/v1";

// Complex numbers are [re, im]; NaN and infinities are written as null.
json to_json(const GaussianParams& p);
json to_json(const MeasurementSet& m);
json to_json(const Classification& c);
json to_json(const ReconstructedState& s);
json to_json(const BucketObservables& b);

// Parsers throw Error(Validation) naming the offending JSON path.
GaussianParams params_from_json(const json& j);
MeasurementSet measurements_from_json(const json& j);
json parse_json(const std::string& text);

// FNV-1a of the compact dump, hex; used to tag reports with their input.
std::string content_hash(const json& j);

} // namespace gausstat

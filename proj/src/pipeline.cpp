#include "gausstat/pipeline.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "gausstat/fock_oracle.hpp"
#include "gausstat/recon_multi.hpp"

namespace gausstat {

namespace {

json header(const char* kind, const json& input, const RunConfig& cfg) {
  return {{"schema", kSchema}, {"kind", kind}, {"input_hash", content_hash(input)}, {"config", cfg.to_json()}};
}

json sigmas_json(const Sigmas& s) { return {{"nbar", s.nbar}, {"g1", s.g1}, {"g2", s.g2}, {"g3", s.g3}, {"p0", s.p0}}; }

void add_noise(MeasurementSet& m, const Sigmas& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const int M = m.modes;
  if (m.nbar && s.nbar > 0)
    for (int i = 0; i < M; ++i) (*m.nbar)(i) += s.nbar * g(rng);
  if (m.g1_abs && s.g1 > 0)
    for (int i = 0; i < M; ++i)
      for (int j = i + 1; j < M; ++j) {
        const double a = std::max(0.0, (*m.g1_abs)(i, j) + s.g1 * g(rng));
        const double ph = (*m.g1_phase)(i, j) + (a > 0 ? s.g1 / a : 0.0) * g(rng);
        (*m.g1_abs)(i, j) = (*m.g1_abs)(j, i) = a;
        (*m.g1_phase)(i, j) = ph;
        (*m.g1_phase)(j, i) = -ph;
      }
  if (s.g2 > 0)
    for (int i = 0; i < M; ++i)
      for (int j = i; j < M; ++j) m.g2(i, j) = m.g2(j, i) = m.g2(i, j) + s.g2 * g(rng);
  if (s.g3 > 0)
    for (auto& kv : m.g3) kv.second += s.g3 * g(rng);
  if (m.p0 && s.p0 > 0)
    for (int i = 0; i < M; ++i) (*m.p0)(i) += s.p0 * g(rng);
  m.sigma = s;
}

std::string verdict_string(const Classification& c) {
  if (c.sector == Sector::Inconsistent)
    return "certification: the data violate every tested Gaussian relation, so no Gaussian state of these sectors "
           "reproduces them (within tolerance)";
  return std::string("evidence: data consistent with ") + sector_name(c.sector) +
         "; the relations are necessary conditions only and do not certify a Gaussian state";
}

MeasurementSet port(const std::vector<json>& inputs, std::size_t k) { return measurements_from_json(inputs.at(k)); }

std::string port_of(const json& j) { return j.contains("port") && j["port"].is_string() ? j["port"].get<std::string>() : ""; }

json reconstruct_dst(const std::vector<json>& inputs, const RunConfig& cfg, json& extra) {
  const json& first = inputs.front();
  if (first.contains("scan")) {
    std::vector<ScanPoint> pts;
    for (std::size_t k = 0; k < first["scan"].size(); ++k) {
      const auto& p = first["scan"][k];
      const std::string path = "/scan/" + std::to_string(k);
      if (!p.contains("g2") || !p.contains("g3") || !p["g2"].is_number() || !p["g3"].is_number())
        throw Error(ErrorKind::Validation, "schema error at " + path + ": expected numbers g2 and g3");
      pts.push_back({p["g2"].get<double>(), p["g3"].get<double>(), p.value("sigma_g2", 0.0), p.value("sigma_g3", 0.0)});
    }
    if (!first.contains("nbar") || !first["nbar"].is_number())
      throw Error(ErrorKind::Validation, "schema error at /nbar: the scan needs the mean photon number");
    std::optional<std::vector<double>> offsets;
    if (first.contains("phase_offsets")) offsets = first["phase_offsets"].get<std::vector<double>>();
    const auto s = recon_dst_scan(pts, first["nbar"].get<double>(), offsets);
    extra = {{"line", {{"m", s.line.m}, {"c", s.line.c}, {"residual", s.line.residual}}},
             {"alpha_abs", s.alpha_abs}, {"cov_abs", s.cov_abs}, {"r", s.r}, {"N", s.N},
             {"cosines", s.cosines}, {"relative_phases", s.relative_phases}, {"z2_resolved", s.z2_resolved}};
    json states = json::array();
    for (const auto& st : s.states) states.push_back(to_json(st));
    extra["states"] = states;
    return to_json(s.states.front());
  }
  if (inputs.size() < 2)
    throw Error(ErrorKind::InsufficientData,
                "displaced-squeezed reconstruction needs a scan or the zero-mean beam-splitter port plus a second data set");
  std::size_t im = 0, io = 1;
  if (port_of(inputs[1]) == "minus") std::swap(im, io);
  const bool plus = port_of(inputs[io]) == "plus";
  const auto minus = port(inputs, im), other = port(inputs, io);
  if (minus.modes == 1 && !plus) {
    if (!minus.nbar || !other.nbar)
      throw Error(ErrorKind::InsufficientData, "beam-splitter route needs the mean photon numbers of both data sets");
    BeamsplitterData d;
    d.g2_minus = minus.g2(0, 0);
    d.nbar_minus = (*minus.nbar)(0);
    d.nbar_orig = (*other.nbar)(0);
    d.g2_orig = other.g2(0, 0);
    d.g3_orig = other.g3_at(0, 0, 0);
    return to_json(recon_dst_beamsplitter(d, std::max(cfg.tolerance, 1e-9)));
  }
  return to_json(recon_displaced_squeezed_multi(minus, other, plus, cfg.tolerance));
}

LadderWord normal_word(const std::vector<int>& modes) {
  LadderWord w;
  for (int m : modes) w.push_back(cre(m));
  for (auto it = modes.rbegin(); it != modes.rend(); ++it) w.push_back(ann(*it));
  return w;
}

} // namespace

// ---------------------------------------------------------------------------

void RunConfig::validate() const {
  if (!(tolerance > 0.0)) throw Error(ErrorKind::Validation, "tolerance must be > 0");
  if (fock_cutoff != 0 && fock_cutoff < 2) throw Error(ErrorKind::Validation, "Fock cutoff must be >= 2");
  for (double s : {noise.nbar, noise.g1, noise.g2, noise.g3, noise.p0})
    if (!(s >= 0.0)) throw Error(ErrorKind::Validation, "noise sigmas must be >= 0");
}

json RunConfig::to_json() const {
  return {{"tolerance", tolerance}, {"fock_cutoff", fock_cutoff}, {"seed", seed}, {"noise", sigmas_json(noise)}};
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw Error(ErrorKind::Validation, "schema error at /: config must be an object");
  try {
    c.tolerance = j.value("tolerance", c.tolerance);
    c.fock_cutoff = j.value("fock_cutoff", c.fock_cutoff);
    c.seed = j.value("seed", c.seed);
    c.output_path = j.value("output_path", std::string());
    if (j.contains("noise")) {
      const auto& n = j["noise"];
      c.noise.nbar = n.value("nbar", 0.0);
      c.noise.g1 = n.value("g1", 0.0);
      c.noise.g2 = n.value("g2", 0.0);
      c.noise.g3 = n.value("g3", 0.0);
      c.noise.p0 = n.value("p0", 0.0);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("schema error in config: ") + e.what());
  }
  c.validate();
  return c;
}

json cmd_simulate(const json& params, const RunConfig& cfg) {
  cfg.validate();
  const auto p = params_from_json(params);
  auto m = simulate_measurements(p);
  if (m.modes == 1) m.p0 = RVec::Constant(1, no_click_probability_single(p));
  add_noise(m, cfg.noise, cfg.seed);
  json out = to_json(m);
  out["kind"] = "measurements";
  out["source"] = {{"input_hash", content_hash(params)}, {"seed", cfg.seed}, {"noise", sigmas_json(cfg.noise)}};
  try {
    out["bucket"] = to_json(bucket_correlations(derive_moments(p)));
  } catch (const Error&) {
  }
  return out;
}

json cmd_classify(const json& measurements, const RunConfig& cfg) {
  cfg.validate();
  const auto m = measurements_from_json(measurements);
  const auto c = classify(m, cfg.tolerance);
  json out = header("classification", measurements, cfg);
  out["classification"] = to_json(c);
  out["verdict"] = verdict_string(c);
  return out;
}

json cmd_reconstruct(const std::vector<json>& inputs, const std::string& sector_in, const RunConfig& cfg) {
  cfg.validate();
  if (inputs.empty()) throw Error(ErrorKind::Validation, "no input data");
  std::string sector = sector_in;
  json out = header("reconstruction", inputs.size() == 1 ? inputs[0] : json(inputs), cfg);
  if (sector == "auto") {
    if (inputs[0].contains("scan")) {
      sector = "dst";
    } else {
      const auto c = classify(port(inputs, 0), cfg.tolerance);
      out["classification"] = to_json(c);
      switch (c.sector) {
      case Sector::NonDisplaced:
      case Sector::ThermalLike: sector = "nd"; break;
      case Sector::NonSqueezed:
      case Sector::CoherentLike: sector = "ns"; break;
      case Sector::DisplacedSqueezedConsistent: sector = "dst"; break;
      case Sector::Inconsistent:
        throw Error(ErrorKind::Inconsistent, "classification found no consistent Gaussian sector; nothing to reconstruct");
      }
    }
  }
  out["sector"] = sector;
  if (sector == "nd" || sector == "ns") {
    const auto m = port(inputs, 0);
    const bool nd = sector == "nd";
    ReconstructedState s;
    if (m.modes == 1) {
      const double g2 = m.g2(0, 0), t = std::max(cfg.tolerance, 1e-9);
      if (m.nbar)
        s = nd ? recon_squeezed_thermal(g2, (*m.nbar)(0), t) : recon_displaced_thermal(g2, (*m.nbar)(0), t);
      else if (m.p0)
        s = nd ? recon_squeezed_thermal_click(g2, (*m.p0)(0), t) : recon_displaced_thermal_click(g2, (*m.p0)(0), t);
      else
        throw Error(ErrorKind::InsufficientData, "single-mode reconstruction needs nbar or the no-click probability p0");
    } else {
      s = nd ? recon_squeezed_thermal_multi(m, cfg.tolerance) : recon_displaced_thermal_multi(m, cfg.tolerance);
    }
    out["state"] = to_json(s);
  } else if (sector == "dst") {
    json extra;
    out["state"] = reconstruct_dst(inputs, cfg, extra);
    if (!extra.is_null()) out["scan"] = extra;
  } else {
    throw Error(ErrorKind::Validation, "unknown sector '" + sector + "' (auto, nd, ns, dst)");
  }
  return out;
}

json cmd_verify(const json& params, const RunConfig& cfg) {
  cfg.validate();
  const auto p = params_from_json(params);
  const int M = p.modes();
  FockOptions fo;
  fo.cutoff = cfg.fock_cutoff;
  const auto rho = build_density(p, fo);
  const auto s = derive_moments(p);
  json rows = json::array();
  double worst = 0.0;
  auto row = [&](const std::string& name, double closed, double oracle) {
    const double d = std::abs(closed - oracle), rel = d / std::max(1.0, std::abs(closed));
    worst = std::max(worst, std::isfinite(rel) ? rel : 0.0);
    rows.push_back({{"observable", name}, {"closed_form", closed}, {"oracle", oracle}, {"abs_diff", d}, {"rel_diff", rel}});
  };
  RVec n(M);
  for (int i = 0; i < M; ++i) {
    n(i) = moment_bruteforce(rho, normal_word({i})).real();
    row("nbar(" + std::to_string(i) + ")", s.nbar(i), n(i));
  }
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j) {
      const cplx g1 = moment_bruteforce(rho, {cre(i), ann(j)}) / std::sqrt(n(i) * n(j));
      row("|g1(" + std::to_string(i) + "," + std::to_string(j) + ")|", std::abs(s.g1(i, j)), std::abs(g1));
      row("Re g1(" + std::to_string(i) + "," + std::to_string(j) + ")", s.g1(i, j).real(), g1.real());
    }
  for (int i = 0; i < M; ++i)
    for (int j = i; j < M; ++j) {
      const auto g = g2_entry(s, i, j);
      if (!g) continue;
      row("g2(" + std::to_string(i) + "," + std::to_string(j) + ")", *g,
          moment_bruteforce(rho, normal_word({i, j})).real() / (n(i) * n(j)));
    }
  for (const auto& t : sorted_triples(M)) {
    const auto g = g3_entry(s, t[0], t[1], t[2]);
    if (!g) continue;
    row("g3(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," + std::to_string(t[2]) + ")", *g,
        moment_bruteforce(rho, normal_word({t[0], t[1], t[2]})).real() / (n(t[0]) * n(t[1]) * n(t[2])));
  }
  if (M == 1) row("p0", no_click_probability_single(p), vacuum_overlap(rho));
  try {
    const auto b = bucket_correlations(s);
    const auto o = bucket_bruteforce(rho);
    row("g2_B", b.g2_b, o.g2_b);
    row("g3_B", b.g3_b, o.g3_b);
  } catch (const Error&) {
  }
  json out = header("verification", params, cfg);
  out["cutoff"] = rho.dim;
  out["trace_deficit"] = rho.trace_deficit;
  out["table"] = rows;
  out["max_rel_diff"] = worst;
  out["pass"] = worst <= cfg.tolerance;
  out["note"] = "oracle is the truncated-Fock density; differences include truncation error";
  return out;
}

std::string cmd_curves(const std::string& relation, double lo, double hi, int points) {
  if (points < 2) throw Error(ErrorKind::Validation, "need at least 2 points");
  if (!(hi >= lo)) throw Error(ErrorKind::Validation, "empty g2 range");
  std::function<double(double)> f;
  // eq20 / eq21 are accepted as the historical names of the two relations
  if (relation == "nondisplaced" || relation == "eq20") {
    if (lo < 2.0) throw Error(ErrorKind::Validation, "the non-displaced relation is defined for g2 >= 2");
    f = [](double g) { return 9.0 * g - 12.0; };
  } else if (relation == "nonsqueezed" || relation == "eq21") {
    if (lo < 1.0 || hi > 2.0) throw Error(ErrorKind::Validation, "the non-squeezed relation is defined for 1 <= g2 <= 2");
    f = [](double g) { return 9.0 * g - 12.0 + 4.0 * std::pow(2.0 - g, 1.5); };
  } else {
    throw Error(ErrorKind::Validation, "unknown relation '" + relation + "' (nondisplaced, nonsqueezed)");
  }
  std::ostringstream os;
  os << "g2,g3\n" << std::setprecision(15);
  for (int k = 0; k < points; ++k) {
    const double g = lo + (hi - lo) * k / (points - 1);
    os << g << "," << f(g) << "\n";
  }
  return os.str();
}

json cmd_bucket(const json& input, const RunConfig& cfg) {
  cfg.validate();
  BucketObservables b;
  double sigma = 0.0;
  json out = header("bucket", input, cfg);
  if (input.contains("g2_b")) {
    if (!input["g2_b"].is_number() || !input.contains("g3_b") || !input["g3_b"].is_number())
      throw Error(ErrorKind::Validation, "schema error at /g2_b: expected numbers g2_b and g3_b");
    b.g2_b = input["g2_b"].get<double>();
    b.g3_b = input["g3_b"].get<double>();
    b.total_nbar = input.value("total_nbar", std::nan(""));
    sigma = input.value("sigma_g2_b", 0.0);
  } else {
    b = bucket_correlations(derive_moments(params_from_json(input)));
  }
  const auto chk = bucket_bounds_check(b, sigma);
  const auto est = pure_squeezer_mode_estimate(b.g2_b, b.g3_b, std::max(cfg.tolerance, 1e-9));
  out["observables"] = to_json(b);
  out["verdict"] = verdict_name(chk.verdict);
  out["verdict_message"] = "evidence: " + chk.message;
  out["mode_estimate"] = {{"model_ok", est.model_ok}, {"K", est.K}, {"total_nbar", est.total_nbar},
                          {"residual", est.residual}, {"message", est.message}};
  out["note"] = "bucket data never feed the reconstruction: the state is not determined by mode-blind correlations";
  return out;
}

} // namespace gausstat

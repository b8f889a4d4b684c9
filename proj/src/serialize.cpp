#include "gausstat/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace gausstat {

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
json cnum(cplx z) { return json::array({num(z.real()), num(z.imag())}); }

json rvec(const RVec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}
json rmat(const RMat& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) a.push_back(rvec(m.row(i).transpose()));
  return a;
}
json cvec(const CVec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(cnum(v(i)));
  return a;
}
json cmat(const CMat& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(cnum(m(i, k)));
    a.push_back(row);
  }
  return a;
}

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  throw Error(ErrorKind::Validation, "schema error at " + path + ": " + why);
}

double get_num(const json& j, const std::string& path) {
  if (j.is_null()) return std::nan("");
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

cplx get_cplx(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) bad(path, "expected a number or [re, im]");
  return {get_num(j[0], path + "/0"), get_num(j[1], path + "/1")};
}

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) bad(path + "/" + key, "missing");
  return j.at(key);
}

RVec get_rvec(const json& j, int n, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) bad(path, "expected an array of length " + std::to_string(n));
  RVec v(n);
  for (int i = 0; i < n; ++i) v(i) = get_num(j[i], path + "/" + std::to_string(i));
  return v;
}
CVec get_cvec(const json& j, int n, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) bad(path, "expected an array of length " + std::to_string(n));
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = get_cplx(j[i], path + "/" + std::to_string(i));
  return v;
}
RMat get_rmat(const json& j, int n, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) bad(path, "expected " + std::to_string(n) + " rows");
  RMat m(n, n);
  for (int i = 0; i < n; ++i) m.row(i) = get_rvec(j[i], n, path + "/" + std::to_string(i)).transpose();
  return m;
}
CMat get_cmat(const json& j, int n, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) bad(path, "expected " + std::to_string(n) + " rows");
  CMat m(n, n);
  for (int i = 0; i < n; ++i) m.row(i) = get_cvec(j[i], n, path + "/" + std::to_string(i)).transpose();
  return m;
}

int mode_count(const json& j) {
  if (j.contains("modes")) {
    if (!j["modes"].is_number_integer() || j["modes"].get<int>() < 1) bad("/modes", "expected a positive integer");
    return j["modes"].get<int>();
  }
  for (const char* k : {"alpha", "thermal", "nbar"})
    if (j.contains(k) && j[k].is_array()) return static_cast<int>(j[k].size());
  if (j.contains("g2") && j["g2"].is_array()) return static_cast<int>(j["g2"].size());
  bad("/modes", "cannot infer the mode count");
}

json sigmas(const Sigmas& s) {
  return {{"nbar", s.nbar}, {"g1", s.g1}, {"g2", s.g2}, {"g3", s.g3}, {"p0", s.p0}};
}

json phase_solution(const PhaseSolution& p) {
  json j{{"phases", rvec(p.phases)}};
  if (p.theta.size() > 0) j["theta"] = rmat(p.theta);
  return j;
}

} // namespace

json to_json(const GaussianParams& p) {
  return {{"schema", kSchema}, {"modes", p.modes()},     {"alpha", cvec(p.alpha)},
          {"squeeze", cmat(p.squeeze)}, {"rotation", cmat(p.rotation)}, {"thermal", rvec(p.thermal)}};
}

GaussianParams params_from_json(const json& j) {
  if (!j.is_object()) bad("/", "expected an object");
  const int M = mode_count(j);
  GaussianParams p = GaussianParams::vacuum(M);
  if (j.contains("alpha")) p.alpha = get_cvec(j["alpha"], M, "/alpha");
  if (j.contains("squeeze")) p.squeeze = get_cmat(j["squeeze"], M, "/squeeze");
  // convenience: independent single-mode squeezers
  if (j.contains("squeeze_diag")) p.squeeze = get_cvec(j["squeeze_diag"], M, "/squeeze_diag").asDiagonal();
  if (j.contains("rotation")) p.rotation = get_cmat(j["rotation"], M, "/rotation");
  if (j.contains("thermal")) p.thermal = get_rvec(j["thermal"], M, "/thermal");
  try {
    p.validate(1e-9);
  } catch (const Error& e) {
    bad("/", e.what());
  }
  return p;
}

json to_json(const MeasurementSet& m) {
  json j{{"schema", kSchema}, {"modes", m.modes}, {"g2", rmat(m.g2)}};
  if (m.nbar) j["nbar"] = rvec(*m.nbar);
  if (m.g1_abs) j["g1_abs"] = rmat(*m.g1_abs);
  if (m.g1_phase) j["g1_phase"] = rmat(*m.g1_phase);
  json g3 = json::array();
  for (const auto& [t, v] : m.g3) g3.push_back({{"idx", {t[0], t[1], t[2]}}, {"value", num(v)}});
  j["g3"] = g3;
  if (m.p0) j["p0"] = rvec(*m.p0);
  j["sigma"] = sigmas(m.sigma);
  return j;
}

MeasurementSet measurements_from_json(const json& j) {
  if (!j.is_object()) bad("/", "expected an object");
  MeasurementSet m;
  m.modes = mode_count(j);
  const int M = m.modes;
  m.g2 = get_rmat(field(j, "g2", ""), M, "/g2");
  if (j.contains("nbar")) m.nbar = get_rvec(j["nbar"], M, "/nbar");
  if (j.contains("g1_abs")) m.g1_abs = get_rmat(j["g1_abs"], M, "/g1_abs");
  if (j.contains("g1_phase")) m.g1_phase = get_rmat(j["g1_phase"], M, "/g1_phase");
  if (j.contains("p0")) m.p0 = get_rvec(j["p0"], M, "/p0");
  if (j.contains("g3")) {
    const auto& g3 = j["g3"];
    if (!g3.is_array()) bad("/g3", "expected an array of {idx, value}");
    for (std::size_t k = 0; k < g3.size(); ++k) {
      const std::string p = "/g3/" + std::to_string(k);
      const auto& idx = field(g3[k], "idx", p);
      if (!idx.is_array() || idx.size() != 3) bad(p + "/idx", "expected three mode indices");
      int t[3];
      for (int a = 0; a < 3; ++a) {
        if (!idx[a].is_number_integer() || idx[a].get<int>() < 0 || idx[a].get<int>() >= M)
          bad(p + "/idx/" + std::to_string(a), "mode index out of range");
        t[a] = idx[a].get<int>();
      }
      m.set_g3(t[0], t[1], t[2], get_num(field(g3[k], "value", p), p + "/value"));
    }
  }
  if (j.contains("sigma")) {
    const auto& s = j["sigma"];
    auto rd = [&](const char* k, double& dst) {
      if (s.contains(k)) dst = get_num(s[k], std::string("/sigma/") + k);
    };
    rd("nbar", m.sigma.nbar);
    rd("g1", m.sigma.g1);
    rd("g2", m.sigma.g2);
    rd("g3", m.sigma.g3);
    rd("p0", m.sigma.p0);
  }
  try {
    m.validate();
  } catch (const Error& e) {
    bad("/", e.what());
  }
  return m;
}

json to_json(const Classification& c) {
  json res = json::array();
  for (const auto& r : c.residuals)
    res.push_back({{"relation", r.relation}, {"value", num(r.value)}, {"tolerance", num(r.tolerance)}, {"passed", r.passed()}});
  json passing = json::array();
  for (auto s : c.passing) passing.push_back(sector_name(s));
  json j{{"sector", sector_name(c.sector)}, {"passing", passing}, {"residuals", res}, {"notes", c.notes}};
  if (c.witness) j["witness"] = {{"a", c.witness->a}, {"c", c.witness->c}, {"x", c.witness->x}};
  json dp = json::array(), cp = json::array();
  for (const auto& p : c.displacement_phases) dp.push_back(phase_solution(p));
  for (const auto& p : c.covariance_phases) cp.push_back(phase_solution(p));
  if (!dp.empty()) j["displacement_phase_solutions"] = dp;
  if (!cp.empty()) j["covariance_phase_solutions"] = cp;
  return j;
}

json to_json(const ReconstructedState& s) {
  json alts = json::array();
  for (const auto& p : s.ambiguity.discrete_solutions) alts.push_back(to_json(p));
  return {{"schema", kSchema},
          {"params", to_json(s.params)},
          {"residual", num(s.residual)},
          {"ambiguity",
           {{"global_phase", s.ambiguity.global_phase},
            {"z2_reflection", s.ambiguity.z2_reflection},
            {"discrete_solutions", alts},
            {"notes", s.ambiguity.notes}}}};
}

json to_json(const BucketObservables& b) {
  return {{"g2_b", num(b.g2_b)}, {"g3_b", num(b.g3_b)}, {"total_nbar", num(b.total_nbar)}};
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Validation, std::string("invalid JSON: ") + e.what());
  }
}

std::string content_hash(const json& j) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace gausstat

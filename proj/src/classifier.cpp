#include "gausstat/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "gausstat/linalg.hpp"

namespace gausstat {

const char* const kEvidenceOnly =
    "evidence only: satisfying a correlation relation never certifies a Gaussian state "
    "(non-Gaussian Fock mixtures can satisfy the same relations)";

namespace {

Triple sorted3(int i, int j, int k) {
  Triple t{i, j, k};
  std::sort(t.begin(), t.end());
  return t;
}

std::string triple_str(const Triple& t) {
  std::ostringstream os;
  os << "g3(" << t[0] << "," << t[1] << "," << t[2] << ")";
  return os.str();
}

std::string pair_str(int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

// First-order propagated uncertainty by central differences, 3 sigma, floored at tol.
double propagated_tol(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                      const std::vector<double>& sig, double tol) {
  double var = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (sig[k] <= 0.0) continue;
    any = true;
    const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
    const double x0 = x[k];
    x[k] = x0 + h;
    const double up = f(x);
    x[k] = x0 - h;
    const double dn = f(x);
    x[k] = x0;
    const double d = (up - dn) / (2.0 * h);
    var += d * d * sig[k] * sig[k];
  }
  if (!any) return tol;
  return std::max(tol, 3.0 * std::sqrt(var));
}

double r_nondisplaced(double g2, double g3) { return g3 - (9.0 * g2 - 12.0); }
double r_nonsqueezed(double g2, double g3) {
  return g3 - (9.0 * g2 - 12.0 + 4.0 * std::pow(std::max(0.0, 2.0 - g2), 1.5));
}

RelationResidual make_res(std::string name, double v, double t) { return RelationResidual{std::move(name), v, t}; }

bool all_pass(const std::vector<RelationResidual>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const RelationResidual& r) { return r.passed(); });
}

double worst_ratio(const std::vector<RelationResidual>& rs) {
  double w = 0.0;
  for (const auto& r : rs) w = std::max(w, std::abs(r.value) / r.tolerance);
  return w;
}

void require_multimode_data(const MeasurementSet& m) {
  if (!m.g1_abs || !m.g1_phase)
    throw Error(ErrorKind::InsufficientData, "multimode classification needs |g1| and g1 phases");
  std::vector<std::string> missing;
  for (int i = 0; i < m.modes; ++i)
    for (int j = 0; j < m.modes; ++j)
      if (i != j && !m.g3_at(i, i, j)) missing.push_back(triple_str(sorted3(i, i, j)));
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::string msg = "missing g3 entries with two matching indices:";
    for (const auto& s : missing) msg += " " + s;
    throw Error(ErrorKind::InsufficientData, msg);
  }
}

} // namespace

// ---------------------------------------------------------------------------

std::optional<double> MeasurementSet::g3_at(int i, int j, int k) const {
  auto it = g3.find(sorted3(i, j, k));
  if (it == g3.end()) return std::nullopt;
  return it->second;
}

void MeasurementSet::set_g3(int i, int j, int k, double v) { g3[sorted3(i, j, k)] = v; }

void MeasurementSet::validate() const {
  if (modes < 1) throw Error(ErrorKind::Validation, "measurement set needs at least one mode");
  if (g2.rows() != modes || g2.cols() != modes) throw Error(ErrorKind::Validation, "g2 must be M x M");
  for (int i = 0; i < modes; ++i)
    for (int j = 0; j < modes; ++j) {
      if (!std::isfinite(g2(i, j)) || g2(i, j) < 0.0)
        throw Error(ErrorKind::Validation, "g2" + pair_str(i, j) + " must be finite and >= 0");
      if (std::abs(g2(i, j) - g2(j, i)) > 1e-9 * std::max(1.0, std::abs(g2(i, j))))
        throw Error(ErrorKind::Validation, "g2 must be symmetric");
    }
  for (const auto& [t, v] : g3) {
    for (int k : t)
      if (k < 0 || k >= modes) throw Error(ErrorKind::Validation, triple_str(t) + " mode out of range");
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::Validation, triple_str(t) + " must be finite and >= 0");
  }
  if (nbar) {
    if (nbar->size() != modes) throw Error(ErrorKind::Validation, "nbar must have M entries");
    for (int i = 0; i < modes; ++i)
      if (!((*nbar)(i) > 0.0)) throw Error(ErrorKind::Validation, "nbar entries must be > 0");
  }
  if (g1_abs) {
    if (g1_abs->rows() != modes || g1_abs->cols() != modes) throw Error(ErrorKind::Validation, "|g1| must be M x M");
    for (int i = 0; i < modes; ++i)
      for (int j = 0; j < modes; ++j) {
        const double v = (*g1_abs)(i, j);
        if (!(v >= -1e-12 && v <= 1.0 + 1e-9)) throw Error(ErrorKind::Validation, "|g1| entries must lie in [0,1]");
      }
  }
  if (g1_phase) {
    if (g1_phase->rows() != modes || g1_phase->cols() != modes)
      throw Error(ErrorKind::Validation, "g1 phase must be M x M");
    for (int i = 0; i < modes; ++i)
      for (int j = 0; j < modes; ++j)
        if (std::abs(linalg::wrap_angle((*g1_phase)(i, j) + (*g1_phase)(j, i))) > 1e-9)
          throw Error(ErrorKind::Validation, "g1 phase must be antisymmetric");
  }
  if (p0) {
    if (p0->size() != modes) throw Error(ErrorKind::Validation, "p0 must have M entries");
    for (int i = 0; i < modes; ++i)
      if (!((*p0)(i) > 0.0 && (*p0)(i) <= 1.0)) throw Error(ErrorKind::Validation, "p0 entries must lie in (0,1]");
  }
}

MeasurementSet measurements_from_summary(const MomentSummary& s, std::vector<Triple> triples) {
  const int m = s.modes();
  if (triples.empty()) triples = sorted_triples(m);
  MeasurementSet out;
  out.modes = m;
  out.nbar = s.nbar;
  RMat ga(m, m), gp(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      ga(i, j) = std::abs(s.g1(i, j));
      gp(i, j) = i == j ? 0.0 : std::arg(s.g1(i, j));
    }
  out.g1_abs = ga;
  out.g1_phase = gp;
  out.g2 = g2_tensor(s);
  for (const auto& [t, v] : g3_tensor(s, triples)) out.set_g3(t[0], t[1], t[2], v);
  return out;
}

MeasurementSet simulate_measurements(const GaussianParams& params, std::vector<Triple> triples) {
  auto out = measurements_from_summary(derive_moments(params), std::move(triples));
  if (params.modes() == 1) out.p0 = RVec::Constant(1, no_click_probability_single(params));
  return out;
}

const char* sector_name(Sector s) {
  switch (s) {
    case Sector::NonDisplaced: return "NonDisplaced";
    case Sector::NonSqueezed: return "NonSqueezed";
    case Sector::DisplacedSqueezedConsistent: return "DisplacedSqueezedConsistent";
    case Sector::CoherentLike: return "CoherentLike";
    case Sector::ThermalLike: return "ThermalLike";
    case Sector::Inconsistent: return "Inconsistent";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Single mode

Feasibility displaced_squeezed_feasibility(double g2, double g3, double tol, std::optional<double> nbar) {
  Feasibility out;
  if (!std::isfinite(g2) || !std::isfinite(g3)) throw Error(ErrorKind::Validation, "g2, g3 must be finite");
  // With a = |alpha|^2/nbar, c = |cov|/nbar, x = cos(2phi - theta), y = a c x:
  //   g2 = 2 + c^2 + 2y - a^2,  g3 = 6 + 9(c^2 + 2y - a^2) + 4a^3 - 12 a y
  // so for fixed a > 0 both y and c^2 follow, and x = y / (a c).
  struct Point {
    double margin;
    FeasibilityWitness w;
  };
  auto eval = [&](double a) -> Point {
    Point p{-std::numeric_limits<double>::infinity(), {a, 0.0, 0.0}};
    if (a <= 0.0) {
      const double c2 = g2 - 2.0;
      double m = std::min(c2, -std::abs(r_nondisplaced(g2, g3)));
      if (nbar) m = std::min(m, 1.0 + 1.0 / *nbar - c2);
      p.margin = m;
      p.w = {0.0, std::sqrt(std::max(0.0, c2)), 0.0};
      return p;
    }
    const double y = (6.0 + 9.0 * (g2 - 2.0) + 4.0 * a * a * a - g3) / (12.0 * a);
    const double c2 = g2 - 2.0 + a * a - 2.0 * y;
    double m = std::min(c2, a * a * std::max(c2, 0.0) - y * y); // c^2 >= 0 and |x| <= 1
    if (nbar) m = std::min(m, (1.0 - a) * (1.0 - a + 1.0 / *nbar) - c2);
    const double c = std::sqrt(std::max(0.0, c2));
    const double x = a * c > 0.0 ? std::max(-1.0, std::min(1.0, y / (a * c))) : 0.0;
    p.margin = m;
    p.w = {a, c, x};
    return p;
  };

  Point best = eval(0.0);
  if (best.margin >= -tol) {
    // zero displacement is the canonical witness when it works
    out.feasible = true;
    out.best_margin = best.margin;
    out.witness = best.w;
    return out;
  }
  const int n = 4000;
  double best_a = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double a = static_cast<double>(k) / n;
    const Point p = eval(a);
    if (p.margin > best.margin) {
      best = p;
      best_a = a;
    }
  }
  // golden-section refinement around the best grid point
  if (best_a > 0.0) {
    double lo = std::max(1e-12, best_a - 1.0 / n), hi = std::min(1.0, best_a + 1.0 / n);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
      const double a1 = hi - gr * (hi - lo), a2 = lo + gr * (hi - lo);
      if (eval(a1).margin > eval(a2).margin)
        hi = a2;
      else
        lo = a1;
    }
    const Point p = eval(0.5 * (lo + hi));
    if (p.margin > best.margin) best = p;
  }
  out.best_margin = best.margin;
  out.feasible = best.margin >= -tol;
  if (out.feasible) out.witness = best.w;
  return out;
}

Classification classify_single_mode(const MeasurementSet& m, double tol) {
  if (m.modes != 1) throw Error(ErrorKind::Validation, "single-mode classification needs M = 1");
  m.validate();
  const auto g3v = m.g3_at(0, 0, 0);
  if (!g3v) throw Error(ErrorKind::InsufficientData, "single-mode classification needs g3");
  const double g2 = m.g2(0, 0), g3 = *g3v;
  const std::vector<double> x{g2, g3};
  const std::vector<double> sig{m.sigma.g2, m.sigma.g3};

  Classification c;
  auto f_nd = [](const std::vector<double>& v) { return r_nondisplaced(v[0], v[1]); };
  auto f_ns = [](const std::vector<double>& v) { return r_nonsqueezed(v[0], v[1]); };
  const auto nd = make_res("g3 = 9 g2 - 12", f_nd(x), propagated_tol(f_nd, x, sig, tol));
  c.residuals.push_back(nd);
  std::optional<RelationResidual> ns;
  if (g2 <= 2.0 + tol) {
    ns = make_res("g3 = 9 g2 - 12 + 4 (2 - g2)^(3/2)", f_ns(x), propagated_tol(f_ns, x, sig, tol));
    c.residuals.push_back(*ns);
  }
  const double tol_pt = std::max(tol, 3.0 * std::max(m.sigma.g2, m.sigma.g3));
  const auto coh = make_res("g2 = g3 = 1", std::max(std::abs(g2 - 1.0), std::abs(g3 - 1.0)), tol_pt);
  const auto th = make_res("g2 = 2, g3 = 6", std::max(std::abs(g2 - 2.0), std::abs(g3 - 6.0)), tol_pt);
  c.residuals.push_back(coh);
  c.residuals.push_back(th);

  if (nd.passed()) c.passing.push_back(Sector::NonDisplaced);
  if (ns && ns->passed()) c.passing.push_back(Sector::NonSqueezed);
  if (coh.passed()) c.passing.push_back(Sector::CoherentLike);
  if (th.passed()) c.passing.push_back(Sector::ThermalLike);

  if (coh.passed()) {
    c.sector = Sector::CoherentLike;
  } else if (th.passed()) {
    c.sector = Sector::ThermalLike;
  } else if (nd.passed() || (ns && ns->passed())) {
    const double rnd = nd.passed() ? std::abs(nd.value) / nd.tolerance : 1e300;
    const double rns = ns && ns->passed() ? std::abs(ns->value) / ns->tolerance : 1e300;
    c.sector = rnd <= rns ? Sector::NonDisplaced : Sector::NonSqueezed;
    if (nd.passed() && ns && ns->passed()) c.notes.push_back("both the non-displaced and non-squeezed relations hold");
  } else {
    std::optional<double> nb;
    if (m.nbar) nb = (*m.nbar)(0);
    const auto f = displaced_squeezed_feasibility(g2, g3, tol, nb);
    c.residuals.push_back(make_res("displaced-squeezed feasibility margin", f.feasible ? 0.0 : -f.best_margin, tol));
    if (f.feasible) {
      c.sector = Sector::DisplacedSqueezedConsistent;
      c.witness = f.witness;
      c.passing.push_back(Sector::DisplacedSqueezedConsistent);
    } else {
      c.sector = Sector::Inconsistent;
      c.notes.push_back("no single-mode Gaussian sector fits: the state is multimode or non-Gaussian");
    }
  }
  if (c.sector == Sector::NonDisplaced && g2 < 2.0 - tol)
    c.notes.push_back("g2 < 2 lies outside the range reachable by non-displaced Gaussian states; relation satisfied "
                      "but the data cannot come from such a state");
  if (c.sector != Sector::Inconsistent) c.notes.push_back(kEvidenceOnly);
  return c;
}

// ---------------------------------------------------------------------------
// Multimode

CosineData nonsqueezed_cosines(const MeasurementSet& m, double tol) {
  const int M = m.modes;
  CosineData out;
  out.system = PhaseSystem{M, *m.g1_phase, RMat::Ones(M, M), PhaseKind::Displacement};
  out.tol = tol;
  RVec a(M);
  for (int i = 0; i < M; ++i) a(i) = std::sqrt(std::max(0.0, 2.0 - m.g2(i, i)));
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      if (i == j) continue;
      const double g = (*m.g1_abs)(i, j);
      // g3_iij = P + Q cos(Phi_ij + phi_i - phi_j)
      const double P = 2.0 + 4.0 * g * g - a(i) * a(i) - 4.0 * a(i) * a(j) + 4.0 * a(i) * a(i) * a(j);
      const double Q = -4.0 * a(i) * std::sqrt(a(i) * a(j)) * g;
      const double v = *m.g3_at(i, i, j);
      if (std::abs(Q) < 1e-8) {
        out.unconstrained.push_back(pair_str(i, j));
        out.system.c(i, j) = 0.0;
        out.max_excess = std::max(out.max_excess, std::abs(v - P) - tol);
        continue;
      }
      const double cv = (v - P) / Q;
      out.system.c(i, j) = std::max(-1.0, std::min(1.0, cv));
      out.max_excess = std::max(out.max_excess, std::abs(cv) - 1.0);
      const double s3 = m.sigma.g3 > 0 ? 3.0 * m.sigma.g3 / std::abs(Q) : 0.0;
      out.tol = std::max(out.tol, std::max(tol / std::abs(Q), s3));
    }
  return out;
}

CosineData nondisplaced_cosines(const MeasurementSet& m, double tol) {
  const int M = m.modes;
  CosineData out;
  out.system = PhaseSystem{M, *m.g1_phase, RMat::Ones(M, M), PhaseKind::Covariance};
  out.tol = tol;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      if (i == j) continue;
      const double g = (*m.g1_abs)(i, j);
      const double kij = std::max(0.0, m.g2(i, j) - g * g - 1.0);
      const double kii = std::max(0.0, m.g2(i, i) - 2.0);
      // g3_iij = g2_ii + 4 g2_ij - 4 + Q cos(Phi_ij + Theta_ii - Theta_ij)
      const double P = m.g2(i, i) + 4.0 * m.g2(i, j) - 4.0;
      const double Q = 4.0 * g * std::sqrt(kij * kii);
      const double v = *m.g3_at(i, i, j);
      if (std::abs(Q) < 1e-8) {
        out.unconstrained.push_back(pair_str(i, j));
        out.system.c(i, j) = 0.0;
        out.max_excess = std::max(out.max_excess, std::abs(v - P) - tol);
        continue;
      }
      const double cv = (v - P) / Q;
      out.system.c(i, j) = std::max(-1.0, std::min(1.0, cv));
      out.max_excess = std::max(out.max_excess, std::abs(cv) - 1.0);
      const double s3 = m.sigma.g3 > 0 ? 3.0 * m.sigma.g3 / std::abs(Q) : 0.0;
      out.tol = std::max(out.tol, std::max(tol / std::abs(Q), s3));
    }
  return out;
}

MomentSummary normalized_summary_nonsqueezed(const MeasurementSet& m, const RVec& phases) {
  const int M = m.modes;
  CVec alpha(M);
  CMat g(M, M);
  for (int i = 0; i < M; ++i) {
    alpha(i) = std::polar(std::sqrt(std::sqrt(std::max(0.0, 2.0 - m.g2(i, i)))), phases(i));
    for (int j = 0; j < M; ++j) g(i, j) = i == j ? cplx(1.0) : std::polar((*m.g1_abs)(i, j), (*m.g1_phase)(i, j));
  }
  MomentSummary s;
  s.nbar = RVec::Ones(M);
  s.alpha = alpha;
  s.coherence = g;
  s.g1 = g;
  s.cov = CMat::Zero(M, M);
  return s;
}

MomentSummary normalized_summary_nondisplaced(const MeasurementSet& m, const RMat& theta) {
  const int M = m.modes;
  CMat g(M, M), cov(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      g(i, j) = i == j ? cplx(1.0) : std::polar((*m.g1_abs)(i, j), (*m.g1_phase)(i, j));
      const double k = i == j ? m.g2(i, i) - 2.0 : m.g2(i, j) - std::pow((*m.g1_abs)(i, j), 2) - 1.0;
      cov(i, j) = std::polar(std::sqrt(std::max(0.0, k)), theta(i, j));
    }
  MomentSummary s;
  s.nbar = RVec::Ones(M);
  s.alpha = CVec::Zero(M);
  s.coherence = g;
  s.g1 = g;
  s.cov = cov;
  return s;
}

namespace {

struct Hypothesis {
  std::vector<RelationResidual> residuals;
  std::vector<PhaseSolution> solutions;
  std::vector<std::string> notes;
  bool ok = false;
};

// g3 entries with three distinct indices, checked against the predicted values of a phase solution.
std::vector<RelationResidual> distinct_triple_residuals(const MeasurementSet& m, const MomentSummary& s,
                                                        double tol, const std::string& tag) {
  std::vector<RelationResidual> out;
  for (const auto& [t, v] : m.g3) {
    if (t[0] == t[1] || t[1] == t[2]) continue;
    const double pred = *g3_entry(s, t[0], t[1], t[2]);
    const double tl = std::max(tol, 3.0 * m.sigma.g3);
    out.push_back(make_res(tag + " " + triple_str(t), v - pred, tl));
  }
  return out;
}

Hypothesis test_nonsqueezed(const MeasurementSet& m, double tol) {
  Hypothesis h;
  const int M = m.modes;
  for (int i = 0; i < M; ++i) {
    h.residuals.push_back(make_res("g2(" + std::to_string(i) + "," + std::to_string(i) + ") <= 2",
                                   std::max(0.0, m.g2(i, i) - 2.0), std::max(tol, 3.0 * m.sigma.g2)));
    if (auto g3 = m.g3_at(i, i, i)) {
      const std::vector<double> x{m.g2(i, i), *g3};
      auto f = [](const std::vector<double>& v) { return r_nonsqueezed(v[0], v[1]); };
      h.residuals.push_back(make_res("single-mode non-squeezed relation, mode " + std::to_string(i), f(x),
                                     propagated_tol(f, x, {m.sigma.g2, m.sigma.g3}, tol)));
    }
  }
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j) {
      const std::vector<double> x{m.g2(i, j), (*m.g1_abs)(i, j), m.g2(i, i), m.g2(j, j)};
      auto f = [](const std::vector<double>& v) {
        return v[0] - (1.0 + v[1] * v[1] - std::sqrt(std::max(0.0, (2.0 - v[2]) * (2.0 - v[3]))));
      };
      h.residuals.push_back(make_res("g2 = 1 + |g1|^2 - sqrt((2-g2_ii)(2-g2_jj)) " + pair_str(i, j), f(x),
                                     propagated_tol(f, x, {m.sigma.g2, m.sigma.g1, m.sigma.g2, m.sigma.g2}, tol)));
    }
  if (!all_pass(h.residuals)) return h;

  const auto cd = nonsqueezed_cosines(m, tol);
  h.residuals.push_back(make_res("displacement cosines within [-1,1]", std::max(0.0, cd.max_excess), cd.tol));
  if (!h.residuals.back().passed()) return h;
  if (!cd.unconstrained.empty()) {
    std::string e;
    for (const auto& s : cd.unconstrained) e += " " + s;
    h.notes.push_back("phase system underdetermined (zero displacement or zero |g1| on edges" + e +
                      "); only residuals checked");
    h.ok = true;
    return h;
  }
  h.solutions = solve_displacement_phases_tight(cd.system, cd.tol);
  h.residuals.push_back(make_res("displacement phase system solutions", h.solutions.empty() ? 1.0 : 0.0, 0.5));
  if (h.solutions.empty()) return h;
  // keep the phase solution that best explains the distinct-index g3 entries
  std::vector<RelationResidual> best;
  double best_w = 1e300;
  for (const auto& s : h.solutions) {
    auto rs = distinct_triple_residuals(m, normalized_summary_nonsqueezed(m, s.phases), tol, "non-squeezed");
    const double w = worst_ratio(rs);
    if (w < best_w) {
      best_w = w;
      best = rs;
    }
  }
  h.residuals.insert(h.residuals.end(), best.begin(), best.end());
  h.ok = all_pass(h.residuals);
  return h;
}

Hypothesis test_nondisplaced(const MeasurementSet& m, double tol) {
  Hypothesis h;
  const int M = m.modes;
  for (int i = 0; i < M; ++i) {
    h.residuals.push_back(make_res("g2(" + std::to_string(i) + "," + std::to_string(i) + ") >= 2",
                                   std::max(0.0, 2.0 - m.g2(i, i)), std::max(tol, 3.0 * m.sigma.g2)));
    if (auto g3 = m.g3_at(i, i, i)) {
      const std::vector<double> x{m.g2(i, i), *g3};
      auto f = [](const std::vector<double>& v) { return r_nondisplaced(v[0], v[1]); };
      h.residuals.push_back(make_res("single-mode non-displaced relation, mode " + std::to_string(i), f(x),
                                     propagated_tol(f, x, {m.sigma.g2, m.sigma.g3}, tol)));
    }
  }
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j) {
      const double g = (*m.g1_abs)(i, j);
      h.residuals.push_back(make_res("|cov|^2 >= 0 " + pair_str(i, j), std::max(0.0, 1.0 + g * g - m.g2(i, j)),
                                     std::max(tol, 3.0 * std::hypot(m.sigma.g2, 2.0 * g * m.sigma.g1))));
    }
  if (!all_pass(h.residuals)) return h;

  const auto cd = nondisplaced_cosines(m, tol);
  h.residuals.push_back(make_res("covariance cosines within [-1,1]", std::max(0.0, cd.max_excess), cd.tol));
  if (!h.residuals.back().passed()) return h;
  if (!cd.unconstrained.empty()) {
    std::string e;
    for (const auto& s : cd.unconstrained) e += " " + s;
    h.notes.push_back("phase system underdetermined (vanishing covariance or |g1| on edges" + e +
                      "); only residuals checked");
    h.ok = true;
    return h;
  }
  h.solutions = solve_covariance_phases_tight(cd.system, cd.tol);
  h.residuals.push_back(make_res("covariance phase system solutions", h.solutions.empty() ? 1.0 : 0.0, 0.5));
  if (h.solutions.empty()) return h;
  std::vector<RelationResidual> best;
  double best_w = 1e300;
  for (const auto& s : h.solutions) {
    auto rs = distinct_triple_residuals(m, normalized_summary_nondisplaced(m, s.theta), tol, "non-displaced");
    const double w = worst_ratio(rs);
    if (w < best_w) {
      best_w = w;
      best = rs;
    }
  }
  h.residuals.insert(h.residuals.end(), best.begin(), best.end());
  h.ok = all_pass(h.residuals);
  return h;
}

} // namespace

Classification classify_multimode(const MeasurementSet& m, double tol) {
  if (m.modes < 2) throw Error(ErrorKind::Validation, "multimode classification needs M >= 2");
  m.validate();
  require_multimode_data(m);
  Classification c;
  const auto ns = test_nonsqueezed(m, tol);
  const auto nd = test_nondisplaced(m, tol);
  for (const auto& r : ns.residuals) c.residuals.push_back({"[non-squeezed] " + r.relation, r.value, r.tolerance});
  for (const auto& r : nd.residuals) c.residuals.push_back({"[non-displaced] " + r.relation, r.value, r.tolerance});
  c.notes.insert(c.notes.end(), ns.notes.begin(), ns.notes.end());
  c.notes.insert(c.notes.end(), nd.notes.begin(), nd.notes.end());
  c.displacement_phases = ns.solutions;
  c.covariance_phases = nd.solutions;
  if (ns.ok) c.passing.push_back(Sector::NonSqueezed);
  if (nd.ok) c.passing.push_back(Sector::NonDisplaced);

  if (ns.ok && nd.ok) {
    bool thermal = true, coherent = true;
    for (int i = 0; i < m.modes; ++i) {
      thermal = thermal && std::abs(m.g2(i, i) - 2.0) <= tol;
      coherent = coherent && std::abs(m.g2(i, i) - 1.0) <= tol;
    }
    if (thermal) {
      c.sector = Sector::ThermalLike;
    } else if (coherent) {
      c.sector = Sector::CoherentLike;
    } else if (ns.residuals.size() != nd.residuals.size()) {
      c.sector = ns.residuals.size() > nd.residuals.size() ? Sector::NonSqueezed : Sector::NonDisplaced;
    } else {
      c.sector = worst_ratio(ns.residuals) <= worst_ratio(nd.residuals) ? Sector::NonSqueezed : Sector::NonDisplaced;
    }
    c.notes.push_back("both non-squeezed and non-displaced hypotheses pass");
  } else if (ns.ok) {
    c.sector = Sector::NonSqueezed;
  } else if (nd.ok) {
    c.sector = Sector::NonDisplaced;
  } else {
    c.sector = Sector::Inconsistent;
    c.notes.push_back("neither the non-squeezed nor the non-displaced constraint system is satisfiable; a displaced "
                      "squeezed state is not excluded (use the beam-splitter reduction) but no tested sector fits");
  }
  if (c.sector != Sector::Inconsistent) {
    const auto& sols = c.sector == Sector::NonDisplaced ? nd.solutions : ns.solutions;
    if (sols.size() > 1) c.notes.push_back(std::to_string(sols.size()) + " discrete phase solutions");
    c.notes.push_back(kEvidenceOnly);
  }
  return c;
}

Classification classify(const MeasurementSet& m, double tol) {
  return m.modes == 1 ? classify_single_mode(m, tol) : classify_multimode(m, tol);
}

} // namespace gausstat

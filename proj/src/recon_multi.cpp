#include "gausstat/recon_multi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gausstat/linalg.hpp"

namespace gausstat {

namespace {

double scale_of(const CMat& m) { return std::max(1.0, linalg::max_abs(m)); }

std::string pair_str(int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

CMat g1_complex(const MeasurementSet& m) {
  const int M = m.modes;
  CMat g(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) g(i, j) = i == j ? cplx(1.0) : std::polar((*m.g1_abs)(i, j), (*m.g1_phase)(i, j));
  return g;
}

// G_ij = <a_i^dag a_j> from nbar and g1
CMat coherence_from(const MeasurementSet& m) {
  const CMat g = g1_complex(m);
  CMat G(m.modes, m.modes);
  for (int i = 0; i < m.modes; ++i)
    for (int j = 0; j < m.modes; ++j) G(i, j) = std::sqrt((*m.nbar)(i) * (*m.nbar)(j)) * g(i, j);
  return G;
}

void require_recon_inputs(const MeasurementSet& m) {
  m.validate();
  if (!m.nbar) throw Error(ErrorKind::InsufficientData, "reconstruction needs the mean photon number of every mode");
  if (m.modes > 1 && (!m.g1_abs || !m.g1_phase))
    throw Error(ErrorKind::InsufficientData, "multimode reconstruction needs |g1| and g1 phases");
  if (m.modes == 1 && !m.g1_abs) return;
}

// degenerate groups of a sorted-or-not spectrum, relative tolerance
std::vector<std::string> degenerate_groups(const RVec& d, double rel = 1e-7) {
  std::vector<std::string> out;
  const int n = static_cast<int>(d.size());
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<int> grp{i};
    for (int j = i + 1; j < n; ++j)
      if (!used[j] && std::abs(d(i) - d(j)) <= rel * std::max(1.0, std::abs(d(i)))) grp.push_back(j);
    if (grp.size() < 2) continue;
    std::ostringstream os;
    os << "degenerate eigenvalue " << d(i) << " shared by modes";
    for (int k : grp) {
      used[k] = true;
      os << " " << k;
    }
    os << ": free unitary rotation inside the group";
    out.push_back(os.str());
  }
  return out;
}

struct Candidate {
  GaussianParams params;
  double residual;
};

ReconstructedState collect(std::vector<Candidate> cands, double tol, const char* what) {
  if (cands.empty()) throw Error(ErrorKind::Inconsistent, std::string("no ") + what + " solution reproduces the data");
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
  const double keep = std::max(tol, 10.0 * cands.front().residual);
  ReconstructedState out;
  out.params = cands.front().params;
  out.residual = cands.front().residual;
  for (std::size_t k = 1; k < cands.size(); ++k)
    if (cands[k].residual <= keep) {
      out.ambiguity.discrete_solutions.push_back(cands[k].params);
      out.residual = std::max(out.residual, cands[k].residual);
    }
  return out;
}

} // namespace

// ---------------------------------------------------------------------------

void ComplexCovariance::validate(double tol) const {
  const auto m = A.rows();
  if (A.cols() != m || B.rows() != m || B.cols() != m) throw Error(ErrorKind::Validation, "A and B must be M x M");
  if (linalg::max_abs(CMat(A - A.adjoint())) > tol * scale_of(A)) throw Error(ErrorKind::Validation, "A must be hermitian");
  if (linalg::max_abs(CMat(B - B.transpose())) > tol * scale_of(B)) throw Error(ErrorKind::Validation, "B must be symmetric");
}

RealCovariance complex_to_real_cov(const ComplexCovariance& c) {
  c.validate();
  const auto m = c.A.rows();
  RealCovariance r;
  r.V.resize(2 * m, 2 * m);
  r.V.topLeftCorner(m, m) = (c.A + c.B).real();
  r.V.bottomRightCorner(m, m) = (c.A - c.B).real();
  r.V.topRightCorner(m, m) = c.B.imag() - c.A.imag();
  r.V.bottomLeftCorner(m, m) = r.V.topRightCorner(m, m).transpose();
  return r;
}

ComplexCovariance real_to_complex_cov(const RealCovariance& r) {
  const int m = r.modes();
  if (r.V.rows() != 2 * m || r.V.cols() != 2 * m) throw Error(ErrorKind::Validation, "V must be 2M x 2M");
  if (linalg::max_abs(RMat(r.V - r.V.transpose())) > 1e-9 * std::max(1.0, linalg::max_abs(r.V)))
    throw Error(ErrorKind::Validation, "V must be symmetric");
  const RMat xx = r.V.topLeftCorner(m, m), pp = r.V.bottomRightCorner(m, m);
  const RMat xp = r.V.topRightCorner(m, m), px = r.V.bottomLeftCorner(m, m);
  ComplexCovariance c;
  const RMat reA = 0.5 * (xx + pp), reB = 0.5 * (xx - pp);
  const RMat imB = 0.5 * (xp + px), imA = 0.5 * (px - xp);
  c.A = reA.cast<cplx>() + cplx(0, 1) * imA.cast<cplx>();
  c.B = reB.cast<cplx>() + cplx(0, 1) * imB.cast<cplx>();
  return c;
}

ComplexCovariance complex_covariance(const MomentSummary& s) {
  const auto m = s.alpha.size();
  const CMat gc = s.coherence - s.alpha.conjugate() * s.alpha.transpose();
  ComplexCovariance c;
  c.A = gc.transpose() + 0.5 * CMat::Identity(m, m);
  c.B = s.cov;
  return c;
}

WilliamsonResult williamson(const RealCovariance& v, double tol) {
  const int m = v.modes();
  if (m < 1 || v.V.rows() != 2 * m || v.V.cols() != 2 * m) throw Error(ErrorKind::Validation, "V must be 2M x 2M");
  const double sc = std::max(1.0, linalg::max_abs(v.V));
  if (linalg::max_abs(RMat(v.V - v.V.transpose())) > 1e-9 * sc) throw Error(ErrorKind::Validation, "V must be symmetric");
  const RMat Vs = 0.5 * (v.V + v.V.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> ev(Vs);
  if (ev.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorKind::Validation, "V is not positive definite (min eigenvalue " +
                                           std::to_string(ev.eigenvalues().minCoeff()) + ")");
  const RVec lam = ev.eigenvalues();
  const RMat Q = ev.eigenvectors();
  const RMat Vh = Q * lam.cwiseSqrt().asDiagonal() * Q.transpose();
  const RMat Vmh = Q * lam.cwiseSqrt().cwiseInverse().asDiagonal() * Q.transpose();
  const RMat Om = linalg::omega(m);
  // K = V^{-1/2} Omega V^{-1/2} is antisymmetric with eigenvalues +-i/d_k; H = iK is hermitian.
  const RMat K = Vmh * Om * Vmh;
  const CMat H = cplx(0, 1) * K.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> eh(0.5 * (H + H.adjoint()));
  WilliamsonResult out;
  out.D.resize(m);
  RMat O(2 * m, 2 * m);
  for (int k = 0; k < m; ++k) {
    const int idx = m + k; // positive half of the ascending spectrum
    const double mu = eh.eigenvalues()(idx);
    if (mu <= 0.0) throw Error(ErrorKind::Numerical, "Williamson: spectrum of i V^-1/2 Omega V^-1/2 not paired");
    const CVec u = eh.eigenvectors().col(idx) * std::sqrt(2.0);
    out.D(k) = 1.0 / mu;
    O.col(k) = u.real();
    O.col(m + k) = -u.imag();
  }
  RVec dd(2 * m);
  dd << out.D, out.D;
  out.S = Vh * O * dd.cwiseSqrt().cwiseInverse().asDiagonal();
  const double sympl = linalg::max_abs(RMat(out.S * Om * out.S.transpose() - Om));
  if (sympl > 1e-8)
    throw Error(ErrorKind::Numerical, "Williamson: symplectic residual " + std::to_string(sympl) + " exceeds 1e-8");
  (void)tol;
  out.q_ambiguity = degenerate_groups(out.D);
  return out;
}

void symplectic_to_bogoliubov(const RMat& S, CMat& E, CMat& F) {
  const auto m = S.rows() / 2;
  const RMat xx = S.topLeftCorner(m, m), xp = S.topRightCorner(m, m);
  const RMat px = S.bottomLeftCorner(m, m), pp = S.bottomRightCorner(m, m);
  const CMat plus = xx.cast<cplx>() + cplx(0, 1) * px.cast<cplx>();  // E + F
  const CMat minus = pp.cast<cplx>() - cplx(0, 1) * xp.cast<cplx>(); // E - F
  E = 0.5 * (plus + minus);
  F = 0.5 * (plus - minus);
}

GaussianParams params_from_moments(const MomentSummary& s, double tol) {
  const int m = s.modes();
  const auto rc = complex_to_real_cov(complex_covariance(s));
  {
    // uncertainty relation V + i Omega / 2 >= 0
    const CMat u = rc.V.cast<cplx>() + cplx(0, 0.5) * linalg::omega(m).cast<cplx>();
    const double mn = Eigen::SelfAdjointEigenSolver<CMat>(0.5 * (u + u.adjoint())).eigenvalues().minCoeff();
    if (mn < -tol)
      throw Error(ErrorKind::Infeasible, "unphysical covariance: V + i Omega/2 has eigenvalue " + std::to_string(mn));
  }
  const auto w = williamson(rc);
  GaussianParams p = GaussianParams::vacuum(m);
  p.alpha = s.alpha;
  for (int k = 0; k < m; ++k) {
    const double N = w.D(k) - 0.5;
    if (N < -tol)
      throw Error(ErrorKind::Infeasible, "unphysical covariance: symplectic eigenvalue " + std::to_string(w.D(k)) +
                                             " < 1/2 (violation " + std::to_string(-N) + ")");
    p.thermal(k) = std::max(0.0, N);
  }
  CMat E, F;
  symplectic_to_bogoliubov(w.S, E, F);
  // E = cosh(r) e^{i phi}, F = -sinh(r) e^{i theta} e^{-i phi^T}
  const CMat P = linalg::hermitian_function(E * E.adjoint(), [](double x) { return std::sqrt(std::max(x, 1.0)); });
  const CMat U = P.inverse() * E;
  p.rotation = linalg::log_unitary(U);
  p.rotation = 0.5 * (p.rotation + p.rotation.adjoint()).eval();
  const CMat W = -F * U.transpose(); // sinh(r) e^{i theta}
  const CMat g = linalg::hermitian_function(W * W.adjoint(), [](double x) {
    const double r = std::sqrt(std::max(x, 0.0));
    return r < 1e-8 ? 1.0 - r * r / 6.0 : std::asinh(r) / r;
  });
  const CMat z = g * W;
  p.squeeze = 0.5 * (z + z.transpose());
  return p;
}

double observable_residual(const GaussianParams& params, const MeasurementSet& m) {
  std::vector<Triple> triples;
  for (const auto& kv : m.g3) triples.push_back(kv.first);
  const auto s = derive_moments(params);
  double r = 0.0;
  const int M = m.modes;
  if (m.nbar)
    for (int i = 0; i < M; ++i) r = std::max(r, std::abs(s.nbar(i) - (*m.nbar)(i)) / std::max(1.0, (*m.nbar)(i)));
  for (int i = 0; i < M; ++i)
    for (int j = i; j < M; ++j) {
      const auto v = g2_entry(s, i, j);
      r = std::max(r, v ? std::abs(*v - m.g2(i, j)) : 1e300);
    }
  if (m.g1_abs && m.g1_phase)
    for (int i = 0; i < M; ++i)
      for (int j = i + 1; j < M; ++j)
        r = std::max(r, std::abs(s.g1(i, j) - std::polar((*m.g1_abs)(i, j), (*m.g1_phase)(i, j))));
  for (const auto& [t, v] : m.g3) {
    const auto p = g3_entry(s, t[0], t[1], t[2]);
    r = std::max(r, p ? std::abs(*p - v) : 1e300);
  }
  if (m.p0 && M == 1) r = std::max(r, std::abs(no_click_probability_single(params) - (*m.p0)(0)));
  return r;
}

// ---------------------------------------------------------------------------

ReconstructedState recon_displaced_thermal_multi(const MeasurementSet& m, double tol) {
  require_recon_inputs(m);
  const int M = m.modes;
  RVec amp(M);
  std::vector<int> active;
  for (int i = 0; i < M; ++i) {
    if (m.g2(i, i) > 2.0 + tol)
      throw Error(ErrorKind::SectorMismatch, "g2(" + std::to_string(i) + "," + std::to_string(i) + ") > 2: not a displaced thermal state");
    if (m.g2(i, i) < 1.0 - tol)
      throw Error(ErrorKind::SectorMismatch, "g2(" + std::to_string(i) + "," + std::to_string(i) + ") < 1: not a displaced thermal state");
    const double a = std::sqrt(std::clamp(2.0 - m.g2(i, i), 0.0, 1.0));
    amp(i) = std::sqrt((*m.nbar)(i) * a);
    if (a > 1e-8) active.push_back(i);
  }

  // displacement phases on the modes that carry a displacement
  std::vector<RVec> phase_sets;
  std::vector<std::string> notes;
  if (active.size() <= 1) {
    phase_sets.push_back(RVec::Zero(M));
  } else {
    for (int i : active)
      for (int j : active)
        if (i != j && !m.g3_at(i, i, j))
          throw Error(ErrorKind::InsufficientData, "missing g3 entry for modes " + pair_str(i, j));
    MeasurementSet sub;
    const int K = static_cast<int>(active.size());
    sub.modes = K;
    sub.g2.resize(K, K);
    RMat ga(K, K), gp(K, K);
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b) {
        sub.g2(a, b) = m.g2(active[a], active[b]);
        ga(a, b) = (*m.g1_abs)(active[a], active[b]);
        gp(a, b) = (*m.g1_phase)(active[a], active[b]);
        if (a != b) sub.set_g3(a, a, b, *m.g3_at(active[a], active[a], active[b]));
      }
    sub.g1_abs = ga;
    sub.g1_phase = gp;
    sub.sigma = m.sigma;
    const auto cd = nonsqueezed_cosines(sub, tol);
    if (!cd.unconstrained.empty())
      throw Error(ErrorKind::InsufficientData, "displacement phases undetermined: vanishing |g1| between displaced modes");
    if (cd.max_excess > cd.tol)
      throw Error(ErrorKind::Inconsistent, "displacement cosine outside [-1,1] by " + std::to_string(cd.max_excess));
    const auto sols = solve_displacement_phases_tight(cd.system, cd.tol);
    if (sols.empty()) throw Error(ErrorKind::Inconsistent, "displacement phase system has no solution");
    for (const auto& s : sols) {
      RVec ph = RVec::Zero(M);
      for (int a = 0; a < K; ++a) ph(active[a]) = s.phases(a);
      phase_sets.push_back(ph);
    }
    if (sols.size() > 1) notes.push_back(std::to_string(sols.size()) + " discrete displacement-phase solutions");
  }
  if (static_cast<int>(active.size()) < M) notes.push_back("modes without displacement have no displacement phase");

  const CMat G = M > 1 ? coherence_from(m) : CMat::Constant(1, 1, (*m.nbar)(0));
  std::vector<Candidate> cands;
  std::vector<std::string> q;
  for (const auto& ph : phase_sets) {
    CVec alpha(M);
    for (int i = 0; i < M; ++i) alpha(i) = std::polar(amp(i), ph(i));
    // (e^{i phi} D e^{-i phi})_{ji} = G_ij - alpha_i^* alpha_j
    const CMat Hm = (G - alpha.conjugate() * alpha.transpose()).transpose();
    const CMat Hh = 0.5 * (Hm + Hm.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(Hh);
    const double mn = es.eigenvalues().minCoeff();
    if (mn < -std::max(tol, 1e-9) * std::max(1.0, m.nbar->maxCoeff())) continue;
    GaussianParams p = GaussianParams::vacuum(M);
    p.alpha = alpha;
    p.thermal = es.eigenvalues().cwiseMax(0.0);
    p.rotation = linalg::log_unitary(es.eigenvectors());
    p.rotation = 0.5 * (p.rotation + p.rotation.adjoint()).eval();
    cands.push_back({p, observable_residual(p, m)});
    q = degenerate_groups(p.thermal);
  }
  if (cands.empty())
    throw Error(ErrorKind::Inconsistent, "thermal matrix from nbar, g1 and displacements is not positive semidefinite");
  auto out = collect(cands, tol, "displaced-thermal");
  out.ambiguity.notes = notes;
  out.ambiguity.notes.push_back("global displacement phase fixed by phi_0 = 0");
  out.ambiguity.notes.push_back("local phases Q of the mode rotation are unobservable");
  for (const auto& s : q) out.ambiguity.notes.push_back(s);
  return out;
}

namespace {

// Covariance-phase candidates (full symmetric Theta) for a non-displaced data set.
std::vector<RMat> covariance_phase_sets(const MeasurementSet& m, double tol, std::vector<std::string>& notes) {
  const int M = m.modes;
  if (M == 1) return {RMat::Zero(1, 1)};
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      if (i != j && !m.g3_at(i, i, j)) throw Error(ErrorKind::InsufficientData, "missing g3 entry for modes " + pair_str(i, j));
  const auto cd = nondisplaced_cosines(m, tol);
  if (!cd.unconstrained.empty()) {
    // only acceptable when the modes are independent: no field or pair correlations at all
    bool independent = true;
    for (int i = 0; i < M; ++i)
      for (int j = i + 1; j < M; ++j) {
        const double g = (*m.g1_abs)(i, j);
        independent = independent && g < 1e-8 && std::abs(m.g2(i, j) - 1.0 - g * g) < std::max(tol, 1e-8);
      }
    if (!independent)
      throw Error(ErrorKind::InsufficientData, "covariance phases undetermined on some edges (vanishing |g1| or |cov|)");
    notes.push_back("modes are uncorrelated: relative squeezing phases are unobservable and set to 0");
    return {RMat::Zero(M, M)};
  }
  if (cd.max_excess > cd.tol)
    throw Error(ErrorKind::Inconsistent, "covariance cosine outside [-1,1] by " + std::to_string(cd.max_excess));
  const auto sols = solve_covariance_phases_tight(cd.system, cd.tol);
  if (sols.empty()) throw Error(ErrorKind::Inconsistent, "covariance phase system has no solution");
  if (sols.size() > 1) notes.push_back(std::to_string(sols.size()) + " discrete covariance-phase solutions");
  std::vector<RMat> out;
  for (const auto& s : sols) out.push_back(s.theta);
  return out;
}

CMat covariance_moduli(const MeasurementSet& m, double tol) {
  const int M = m.modes;
  CMat c(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const double g = i == j ? 1.0 : (*m.g1_abs)(i, j);
      const double k = m.g2(i, j) - g * g - 1.0;
      if (k < -std::max(tol, 3.0 * m.sigma.g2))
        throw Error(ErrorKind::Inconsistent, "g2 - |g1|^2 - 1 < 0 at " + pair_str(i, j) + ": not a non-displaced state");
      c(i, j) = std::sqrt((*m.nbar)(i) * (*m.nbar)(j) * std::max(0.0, k));
    }
  return c;
}

std::vector<Candidate> squeezed_thermal_candidates(const MeasurementSet& m, double tol, std::vector<std::string>& notes) {
  require_recon_inputs(m);
  const int M = m.modes;
  const CMat mod = covariance_moduli(m, tol);
  const CMat G = M > 1 ? coherence_from(m) : CMat::Constant(1, 1, (*m.nbar)(0));
  std::vector<Candidate> cands;
  std::string last_error;
  const auto sets = covariance_phase_sets(m, tol, notes);
  int rejected = 0;
  for (const auto& theta : sets) {
    CMat cov(M, M);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) cov(i, j) = mod(i, j).real() * std::exp(cplx(0, theta(i, j)));
    try {
      const auto p = params_from_moments(summary_from_moments(CVec::Zero(M), G, cov), std::max(tol, 1e-9));
      cands.push_back({p, observable_residual(p, m)});
    } catch (const Error& e) {
      last_error = e.what();
      ++rejected;
    }
  }
  if (cands.empty())
    throw Error(ErrorKind::Infeasible, "no physical squeezed-thermal state: " + last_error);
  if (rejected > 0)
    notes.push_back(std::to_string(rejected) + " of " + std::to_string(sets.size()) +
                    " covariance-phase solutions violate the uncertainty relation and were discarded (" + last_error + ")");
  return cands;
}

} // namespace

ReconstructedState recon_squeezed_thermal_multi(const MeasurementSet& m, double tol) {
  std::vector<std::string> notes;
  auto out = collect(squeezed_thermal_candidates(m, tol, notes), tol, "squeezed-thermal");
  out.ambiguity.notes = notes;
  out.ambiguity.notes.push_back("global covariance phase fixed by Theta_00 = 0");
  out.ambiguity.notes.push_back("z and phi are recovered only up to rotations that leave the state invariant");
  const auto w = williamson(complex_to_real_cov(complex_covariance(derive_moments(out.params))));
  for (const auto& s : w.q_ambiguity) out.ambiguity.notes.push_back(s);
  return out;
}

ReconstructedState recon_displaced_squeezed_multi(const MeasurementSet& minus, const MeasurementSet& other,
                                                  bool other_is_plus, double tol) {
  if (minus.modes != other.modes) throw Error(ErrorKind::Validation, "both ports must have the same mode count");
  require_recon_inputs(other);
  std::vector<std::string> notes;
  const auto st = squeezed_thermal_candidates(minus, tol, notes);
  const int M = minus.modes;
  const double sc = other_is_plus ? std::sqrt(2.0) : 1.0;

  RVec amp2(M);
  for (int i = 0; i < M; ++i) {
    double a2 = (*other.nbar)(i) - (*minus.nbar)(i);
    if (other_is_plus) a2 *= 0.5;
    if (a2 < -std::max(tol, 1e-9) * std::max(1.0, (*other.nbar)(i)))
      throw Error(ErrorKind::Inconsistent, "negative |alpha|^2 from the photon-number difference in mode " + std::to_string(i));
    amp2(i) = std::max(0.0, a2);
  }

  MeasurementSet pair_only = other; // nbar, g1, g2: the relative-phase content used to pick phi
  pair_only.g3.clear();
  std::vector<Candidate> cands;
  std::vector<std::string> branch_notes;
  for (std::size_t bi = 0; bi < st.size(); ++bi) {
    const auto& base = st[bi];
    const auto sm = derive_moments(base.params);
    // per-mode displacement-phase candidates from g2_ii of the other port
    std::vector<std::vector<double>> opts(M);
    bool first = true;
    for (int i = 0; i < M; ++i) {
      if (amp2(i) <= 1e-12 * std::max(1.0, (*other.nbar)(i))) {
        opts[i] = {0.0};
        continue;
      }
      const double a2 = sc * sc * amp2(i);
      const double cabs = std::abs(sm.cov(i, i));
      if (cabs <= 1e-12)
        throw Error(ErrorKind::InsufficientData, "displacement phase of mode " + std::to_string(i) +
                                                     " is not fixed by g2 (no single-mode squeezing)");
      const double n = (*other.nbar)(i);
      // g2 n^2 - 2 n^2 = |cov|^2 - |alpha|^4 + 2 |alpha|^2 |cov| cos(arg cov - 2 phi)
      double x = (n * n * (other.g2(i, i) - 2.0) - cabs * cabs + a2 * a2) / (2.0 * a2 * cabs);
      if (std::abs(x) > 1.0 + 1e-6)
        throw Error(ErrorKind::Inconsistent, "displacement cosine outside [-1,1] in mode " + std::to_string(i));
      x = std::clamp(x, -1.0, 1.0);
      const double th = std::arg(sm.cov(i, i)), ac = std::acos(x);
      for (double sgn : {1.0, -1.0}) {
        const double ph = 0.5 * (th - sgn * ac);
        opts[i].push_back(ph);
        // alpha -> -alpha for all modes together is a symmetry; fix it on the first displaced mode
        if (!first) opts[i].push_back(ph + M_PI);
      }
      first = false;
    }
    // within this covariance branch keep the completions that match nbar, g1 and g2 of the other port
    std::vector<Candidate> local;
    std::vector<std::size_t> idx(M, 0);
    while (true) {
      GaussianParams p = base.params;
      for (int i = 0; i < M; ++i) p.alpha(i) = std::polar(std::sqrt(amp2(i)), opts[i][idx[i]]);
      GaussianParams po = p;
      po.alpha *= sc;
      const double r2 = observable_residual(po, pair_only);
      bool dup = false;
      for (const auto& c : local) dup = dup || linalg::max_abs(CMat(c.params.alpha - p.alpha)) < 1e-9;
      if (!dup) local.push_back({p, r2});
      int k = 0;
      while (k < M && ++idx[k] == opts[k].size()) idx[k++] = 0;
      if (k == M) break;
    }
    std::sort(local.begin(), local.end(), [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
    const double keep = std::max(tol, 10.0 * local.front().residual);
    for (auto& c : local) {
      if (c.residual > keep) break;
      GaussianParams po = c.params;
      po.alpha *= sc;
      c.residual = std::max({observable_residual(po, other), base.residual});
      cands.push_back(c);
    }
    branch_notes.push_back("covariance branch " + std::to_string(bi) + ": residual against the other port " +
                           std::to_string(cands.back().residual));
  }
  auto out = collect(cands, tol, "displaced-squeezed");
  out.ambiguity.notes = notes;
  if (st.size() > 1) {
    out.ambiguity.notes.push_back("inherited " + std::to_string(st.size()) +
                                  "-fold covariance ambiguity; branches whose residual exceeds tolerance are excluded by the other port");
    for (const auto& b : branch_notes) out.ambiguity.notes.push_back(b);
  }
  out.ambiguity.notes.push_back("global phase fixed by Theta_00 = 0 and the sign of the first displacement");
  if (M == 1 && !out.ambiguity.discrete_solutions.empty()) out.ambiguity.z2_reflection = true;
  return out;
}

} // namespace gausstat

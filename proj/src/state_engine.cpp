#include "gausstat/state_engine.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gausstat/linalg.hpp"

namespace gausstat {

namespace {

constexpr double kZeroPhotons = 1e-15;

double sinhc(double x) { return std::abs(x) < 1e-6 ? 1.0 + x * x / 6.0 : std::sinh(x) / x; }

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::Validation, msg);
}

} // namespace

void GaussianParams::validate(double tol) const {
  const auto m = alpha.size();
  require(m >= 1, "GaussianParams needs at least one mode");
  require(squeeze.rows() == m && squeeze.cols() == m, "squeeze must be M x M");
  require(rotation.rows() == m && rotation.cols() == m, "rotation must be M x M");
  require(thermal.size() == m, "thermal must have length M");
  require(alpha.allFinite() && squeeze.allFinite() && rotation.allFinite() && thermal.allFinite(),
          "GaussianParams contains non-finite entries");
  const double zs = std::max(1.0, linalg::max_abs(squeeze));
  require(linalg::max_abs(CMat(squeeze - squeeze.transpose())) <= tol * zs * 1e3,
          "squeeze matrix z must be symmetric");
  const double ps = std::max(1.0, linalg::max_abs(rotation));
  require(linalg::max_abs(CMat(rotation - rotation.adjoint())) <= tol * ps * 1e3,
          "rotation matrix phi must be hermitian");
  for (Eigen::Index k = 0; k < m; ++k)
    require(thermal(k) >= 0.0, "thermal occupation N_" + std::to_string(k) + " is negative");
}

GaussianParams GaussianParams::vacuum(int modes) {
  GaussianParams p;
  p.alpha = CVec::Zero(modes);
  p.squeeze = CMat::Zero(modes, modes);
  p.rotation = CMat::Zero(modes, modes);
  p.thermal = RVec::Zero(modes);
  return p;
}

CMat cosh_r(const CMat& z) {
  return linalg::hermitian_function(z * z.adjoint(),
                                    [](double l) { return std::cosh(std::sqrt(std::max(l, 0.0))); });
}

CMat sinh_r_phase(const CMat& z) {
  return linalg::hermitian_function(z * z.adjoint(),
                                    [](double l) { return sinhc(std::sqrt(std::max(l, 0.0))); }) *
         z;
}

BogoliubovMap bogoliubov_map(const GaussianParams& params) {
  params.validate();
  const int m = params.modes();
  const CMat u = linalg::expi_hermitian(params.rotation);
  // exp(-i phi^T) = conj(exp(i phi)) for hermitian phi
  const CMat u_minus_t = u.conjugate();
  BogoliubovMap map;
  map.E = cosh_r(params.squeeze) * u;
  map.F = -sinh_r_phase(params.squeeze) * u_minus_t;
  map.disp.resize(2 * m);
  map.disp.head(m) = params.alpha;
  map.disp.tail(m) = params.alpha.conjugate();
  return map;
}

double symplectic_residual(const BogoliubovMap& map) {
  const auto m = map.E.rows();
  const CMat a = map.E * map.E.adjoint() - map.F * map.F.adjoint() - CMat::Identity(m, m);
  const CMat b = map.E * map.F.transpose() - map.F * map.E.transpose();
  return std::max(linalg::max_abs(a), linalg::max_abs(b));
}

MomentSummary summary_from_moments(const CVec& alpha, const CMat& coherence, const CMat& cov) {
  const auto m = alpha.size();
  MomentSummary s;
  s.alpha = alpha;
  s.coherence = 0.5 * (coherence + coherence.adjoint());
  s.cov = 0.5 * (cov + cov.transpose());
  s.nbar.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) s.nbar(i) = std::max(0.0, s.coherence(i, i).real());
  s.g1.resize(m, m);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) {
        s.g1(i, j) = 1.0;
      } else if (s.nbar(i) > kZeroPhotons && s.nbar(j) > kZeroPhotons) {
        s.g1(i, j) = s.coherence(i, j) / std::sqrt(s.nbar(i) * s.nbar(j));
      } else {
        s.g1(i, j) = cplx(nan, nan);
      }
    }
  return s;
}

MomentSummary derive_moments(const GaussianParams& params) {
  const auto map = bogoliubov_map(params);
  const auto m = params.modes();
  const RMat d = params.thermal.asDiagonal();
  const RMat d1 = (params.thermal.array() + 1.0).matrix().asDiagonal();
  const CMat cov = map.E * d1 * map.F.transpose() + map.F * d * map.E.transpose();
  CMat g = map.E.conjugate() * d * map.E.transpose() + map.F.conjugate() * d1 * map.F.transpose();
  g += params.alpha.conjugate() * params.alpha.transpose();
  (void)m;
  return summary_from_moments(params.alpha, g, cov);
}

MomentTable moment_table(const GaussianParams& params) {
  const auto map = bogoliubov_map(params);
  const int m = params.modes();
  CMat l(2 * m, 2 * m);
  l << map.E, map.F, map.F.conjugate(), map.E.conjugate();
  CMat th = CMat::Zero(2 * m, 2 * m);
  for (int k = 0; k < m; ++k) {
    th(k, k + m) = params.thermal(k) + 1.0; // <a a^dag>
    th(k + m, k) = params.thermal(k);       // <a^dag a>
  }
  MomentTable t;
  t.modes = m;
  t.first = map.disp;
  t.second = l * th * l.transpose() + map.disp * map.disp.transpose();
  return t;
}

MomentTable moment_table(const MomentSummary& s) {
  const int m = s.modes();
  MomentTable t;
  t.modes = m;
  t.first.resize(2 * m);
  t.first.head(m) = s.alpha;
  t.first.tail(m) = s.alpha.conjugate();
  t.second.resize(2 * m, 2 * m);
  const CMat aa = s.cov + s.alpha * s.alpha.transpose();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      t.second(i, j) = aa(i, j);
      t.second(i + m, j + m) = std::conj(aa(i, j));
      t.second(i + m, j) = s.coherence(i, j);
      t.second(i, j + m) = s.coherence(j, i) + (i == j ? 1.0 : 0.0);
    }
  return t;
}

std::optional<double> g2_entry(const MomentSummary& s, int i, int j) {
  const double ni = s.nbar(i), nj = s.nbar(j);
  if (ni <= kZeroPhotons || nj <= kZeroPhotons) return std::nullopt;
  const cplx ai = s.alpha(i), aj = s.alpha(j);
  const double g1sq = std::norm(s.coherence(i, j)) / (ni * nj);
  return 1.0 + g1sq + (std::norm(s.cov(i, j) + ai * aj) - 2.0 * std::norm(ai) * std::norm(aj)) / (ni * nj);
}

RMat g2_tensor(const MomentSummary& s) {
  const int m = s.modes();
  RMat out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      auto v = g2_entry(s, i, j);
      if (!v)
        throw Error(ErrorKind::UndefinedCorrelation,
                    "g2 undefined: mode " + std::to_string(s.nbar(i) <= kZeroPhotons ? i : j) + " has zero mean photon number");
      out(i, j) = *v;
    }
  return out;
}

std::optional<double> g3_entry(const MomentSummary& s, int i, int j, int k) {
  const RVec& n = s.nbar;
  if (n(i) <= kZeroPhotons || n(j) <= kZeroPhotons || n(k) <= kZeroPhotons) return std::nullopt;
  const auto g = [&](int a, int b) { return s.coherence(a, b) / std::sqrt(n(a) * n(b)); };
  const auto c = [&](int a, int b) { return s.cov(a, b); };
  const auto al = [&](int a) { return s.alpha(a); };
  const auto ab2 = [&](int a) { return std::norm(s.alpha(a)); };
  const auto cj = [](cplx x) { return std::conj(x); };
  const double sij = std::sqrt(n(i) * n(j)), sjk = std::sqrt(n(j) * n(k)), sik = std::sqrt(n(i) * n(k));

  double v = 1.0 + std::norm(g(i, j)) + std::norm(g(j, k)) + std::norm(g(i, k)) +
             2.0 * std::real(g(i, j) * g(j, k) * g(k, i));
  v += (std::norm(c(i, j)) - ab2(i) * ab2(j)) / (n(i) * n(j));
  v += (std::norm(c(j, k)) - ab2(j) * ab2(k)) / (n(j) * n(k));
  v += (std::norm(c(i, k)) - ab2(i) * ab2(k)) / (n(i) * n(k));
  v += (2.0 - 4.0 * ab2(k) / n(k)) * std::real(c(i, j) * cj(al(i)) * cj(al(j))) / (n(i) * n(j));
  v += (2.0 - 4.0 * ab2(j) / n(j)) * std::real(c(i, k) * cj(al(i)) * cj(al(k))) / (n(i) * n(k));
  v += (2.0 - 4.0 * ab2(i) / n(i)) * std::real(c(j, k) * cj(al(j)) * cj(al(k))) / (n(j) * n(k));
  v += 4.0 * ab2(i) * ab2(j) * ab2(k) / (n(i) * n(j) * n(k));
  v += 2.0 * std::real(g(i, j) * cj(c(j, k)) * c(i, k)) / (n(k) * sij);
  v += 2.0 * std::real(g(j, k) * cj(c(i, k)) * c(i, j)) / (n(i) * sjk);
  v += 2.0 * std::real(g(k, i) * cj(c(i, j)) * c(j, k)) / (n(j) * sik);
  v -= 2.0 * ab2(k) / n(k) * std::real(g(i, j) * al(i) * cj(al(j))) / sij;
  v -= 2.0 * ab2(i) / n(i) * std::real(g(j, k) * al(j) * cj(al(k))) / sjk;
  v -= 2.0 * ab2(j) / n(j) * std::real(g(k, i) * al(k) * cj(al(i))) / sik;
  v += 2.0 * (std::real(g(i, j) * al(i) * al(k) * cj(c(j, k))) + std::real(g(i, j) * cj(al(j)) * cj(al(k)) * c(i, k))) / (n(k) * sij);
  v += 2.0 * (std::real(g(j, k) * al(i) * al(j) * cj(c(i, k))) + std::real(g(j, k) * cj(al(i)) * cj(al(k)) * c(i, j))) / (n(i) * sjk);
  v += 2.0 * (std::real(g(k, i) * al(j) * al(k) * cj(c(i, j))) + std::real(g(k, i) * cj(al(i)) * cj(al(j)) * c(j, k))) / (n(j) * sik);
  return v;
}

std::map<Triple, double> g3_tensor(const MomentSummary& s, const std::vector<Triple>& triples) {
  std::map<Triple, double> out;
  for (const auto& t : triples) {
    for (int idx : t)
      if (idx < 0 || idx >= s.modes())
        throw Error(ErrorKind::Validation, "g3 triple index out of range");
    auto v = g3_entry(s, t[0], t[1], t[2]);
    if (!v) throw Error(ErrorKind::UndefinedCorrelation, "g3 undefined: a requested mode has zero mean photon number");
    out[t] = *v;
  }
  return out;
}

std::vector<Triple> sorted_triples(int modes) {
  std::vector<Triple> out;
  for (int i = 0; i < modes; ++i)
    for (int j = i; j < modes; ++j)
      for (int k = j; k < modes; ++k) out.push_back({i, j, k});
  return out;
}

double g2_from_kernel(const MomentTable& t, int i, int j) {
  const double ni = t.two(cre(i), ann(i)).real();
  const double nj = t.two(cre(j), ann(j)).real();
  return gaussian_moment({cre(i), cre(j), ann(i), ann(j)}, t).real() / (ni * nj);
}

double g3_from_kernel(const MomentTable& t, int i, int j, int k) {
  const double ni = t.two(cre(i), ann(i)).real();
  const double nj = t.two(cre(j), ann(j)).real();
  const double nk = t.two(cre(k), ann(k)).real();
  return gaussian_moment({cre(i), cre(j), cre(k), ann(i), ann(j), ann(k)}, t).real() / (ni * nj * nk);
}

double no_click_probability_single(const GaussianParams& params) {
  params.validate();
  if (params.modes() != 1)
    throw Error(ErrorKind::Validation, "closed-form no-click probability is single-mode only; use the Fock oracle");
  const cplx a = params.alpha(0);
  const cplx z = params.squeeze(0, 0);
  const double r = std::abs(z);
  const double theta = std::arg(z);
  const double phi = std::arg(a);
  const double n = params.thermal(0);
  const double ch2 = std::cosh(r) * std::cosh(r);
  const double denom = n * n + (2.0 * n + 1.0) * ch2;
  const double num = 1.0 + (2.0 * n + 1.0) * std::cosh(2.0 * r) +
                     (2.0 * n + 1.0) * std::sinh(2.0 * r) * std::cos(2.0 * phi - theta);
  return std::exp(-num / (2.0 * denom) * std::norm(a)) / std::sqrt(denom);
}

std::pair<GaussianParams, GaussianParams> balanced_beamsplitter_duplicate(const GaussianParams& params) {
  params.validate();
  GaussianParams plus = params;
  GaussianParams minus = params;
  plus.alpha = std::sqrt(2.0) * params.alpha;
  minus.alpha.setZero();
  return {plus, minus};
}

MomentSummary apply_uniform_loss(const MomentSummary& s, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw Error(ErrorKind::Validation, "loss transmissivity must lie in (0, 1]");
  return summary_from_moments(std::sqrt(eta) * s.alpha, eta * s.coherence, eta * s.cov);
}

CVec rotation_through_displacement(const CVec& alpha, const CMat& phi) {
  return linalg::expi_hermitian(-phi) * alpha;
}

CMat rotation_through_squeeze(const CMat& z, const CMat& phi) {
  const CMat u = linalg::expi_hermitian(-phi);
  return u * z * u.transpose();
}

CVec squeeze_through_displacement(const CVec& alpha, const CMat& z) {
  return cosh_r(z) * alpha + sinh_r_phase(z) * alpha.conjugate();
}

ReorderedUnitary unitary_reorder_identities(const GaussianParams& params) {
  params.validate();
  ReorderedUnitary out;
  // D S R = R (R^dag D R)(R^dag S R)
  out.alpha_r = rotation_through_displacement(params.alpha, params.rotation);
  out.z_r = rotation_through_squeeze(params.squeeze, params.rotation);
  // D S = S (S^dag D S)
  out.alpha_s = squeeze_through_displacement(params.alpha, params.squeeze);
  return out;
}

} // namespace gausstat

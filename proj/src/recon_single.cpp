#include "gausstat/recon_single.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "gausstat/linalg.hpp"

namespace gausstat {

namespace {

struct SingleObs {
  double nbar, g2, g3, p0;
};

SingleObs observe(const GaussianParams& p) {
  const auto s = derive_moments(p);
  SingleObs o{s.nbar(0), 1.0, 1.0, no_click_probability_single(p)};
  if (auto v = g2_entry(s, 0, 0)) o.g2 = *v;
  if (auto v = g3_entry(s, 0, 0, 0)) o.g3 = *v;
  return o;
}

GaussianParams make_single(double alpha_abs, double alpha_phase, double r, double N) {
  auto p = GaussianParams::vacuum(1);
  p.alpha(0) = std::polar(alpha_abs, alpha_phase);
  p.squeeze(0, 0) = r;
  p.thermal(0) = N;
  return p;
}

double clamp_nonneg(double v, double tol, const char* what) {
  if (v < -tol) throw Error(ErrorKind::Infeasible, std::string(what) + " would be negative (" + std::to_string(v) + ")");
  return std::max(0.0, v);
}

void check_p0(double p0) {
  if (!(p0 > 0.0 && p0 <= 1.0)) throw Error(ErrorKind::Validation, "no-click probability must lie in (0, 1]");
}

// (r, N) of a zero-mean squeezed thermal state from n_c = nbar - |alpha|^2 and |cov|.
std::pair<double, double> squeeze_from_centered(double nc, double cov2, double tol) {
  const double disc = (2.0 * nc + 1.0) * (2.0 * nc + 1.0) - 4.0 * cov2;
  if (disc <= 0.0) throw Error(ErrorKind::Infeasible, "negative discriminant: data incompatible with a squeezed thermal state");
  const double sq = std::sqrt(disc);
  const double s2 = clamp_nonneg(0.5 * (2.0 * nc + 1.0) / sq - 0.5, tol, "sinh^2 r");
  const double N = clamp_nonneg(0.5 * sq - 0.5, tol, "thermal occupation");
  return {std::asinh(std::sqrt(s2)), N};
}

// Real roots of a polynomial (highest power first) from companion-matrix eigenvalues, Newton polished.
std::vector<double> real_roots(std::vector<double> coef) {
  double scale = 0.0;
  for (double c : coef) scale = std::max(scale, std::abs(c));
  while (!coef.empty() && std::abs(coef.front()) <= 1e-13 * scale) coef.erase(coef.begin());
  const int n = static_cast<int>(coef.size()) - 1;
  std::vector<double> out;
  if (n < 1) return out;
  RMat comp = RMat::Zero(n, n);
  for (int k = 0; k < n; ++k) comp(0, k) = -coef[k + 1] / coef[0];
  for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
  Eigen::EigenSolver<RMat> es(comp, false);
  auto eval = [&](double x, double& d) {
    double v = 0.0;
    d = 0.0;
    for (double c : coef) {
      d = d * x + v;
      v = v * x + c;
    }
    return v;
  };
  for (int k = 0; k < n; ++k) {
    const cplx z = es.eigenvalues()(k);
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) continue;
    double x = z.real();
    for (int it = 0; it < 8; ++it) {
      double d;
      const double v = eval(x, d);
      if (d == 0.0) break;
      x -= v / d;
    }
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

// ---------------------------------------------------------------------------

ReconstructedState recon_squeezed_thermal(double g2, double nbar, double tol) {
  if (!(nbar > 0.0)) throw Error(ErrorKind::Validation, "mean photon number must be > 0");
  if (g2 < 2.0 - std::max(tol, 1e-9))
    throw Error(ErrorKind::SectorMismatch, "g2 < 2 is outside the squeezed-thermal sector");
  const auto [r, N] = squeeze_from_centered(nbar, nbar * nbar * std::max(0.0, g2 - 2.0), tol);
  ReconstructedState out;
  out.params = make_single(0.0, 0.0, r, N);
  const auto o = observe(out.params);
  out.residual = std::max(std::abs(o.g2 - g2), std::abs(o.nbar - nbar) / nbar);
  out.ambiguity.notes.push_back("squeezing phase fixed to 0 (needs an external phase reference)");
  return out;
}

std::vector<double> click_quartic(double g2, double p0) {
  const double q = 1.0 / (p0 * p0);
  const double u = g2 - 3.0;
  return {u, 2.0 * u, 3.0 * g2 - 7.0 - 2.0 * u * q, 2.0 * g2 - 4.0 - 2.0 * u * q, (1.0 - q) * ((g2 - 2.0) - u * q)};
}

ReconstructedState recon_squeezed_thermal_click(double g2, double p0, double tol) {
  check_p0(p0);
  if (g2 < 2.0 - std::max(tol, 1e-9))
    throw Error(ErrorKind::SectorMismatch, "g2 < 2 is outside the squeezed-thermal sector");
  std::vector<GaussianParams> found;
  double worst = 0.0;
  if (p0 >= 1.0 - 1e-15) {
    // only the vacuum has unit overlap
    found.push_back(make_single(0.0, 0.0, 0.0, 0.0));
  } else {
    for (double N : real_roots(click_quartic(g2, p0))) {
      if (N < -1e-10) continue;
      N = std::max(0.0, N);
      const double s2 = (1.0 - (N + 1.0) * (N + 1.0) * p0 * p0) / ((2.0 * N + 1.0) * p0 * p0);
      if (s2 < -1e-10) continue;
      const auto p = make_single(0.0, 0.0, std::asinh(std::sqrt(std::max(0.0, s2))), N);
      const auto o = observe(p);
      // reject spurious roots that do not reproduce g2
      if (std::abs(o.g2 - g2) > std::max(1e-6, 1e3 * tol) * std::max(1.0, g2)) continue;
      bool dup = false;
      for (const auto& f : found) dup = dup || std::abs(f.thermal(0) - N) < 1e-9;
      if (dup) continue;
      found.push_back(p);
      worst = std::max(worst, std::max(std::abs(o.g2 - g2), std::abs(o.p0 - p0)));
    }
  }
  if (found.empty()) throw Error(ErrorKind::Infeasible, "no admissible root N >= 0 with sinh^2 r >= 0");
  ReconstructedState out;
  out.params = found.front();
  out.ambiguity.discrete_solutions.assign(found.begin() + 1, found.end());
  if (found.size() > 1) out.ambiguity.notes.push_back(std::to_string(found.size()) + " admissible quartic roots");
  out.ambiguity.notes.push_back("squeezing phase fixed to 0 (needs an external phase reference)");
  out.residual = worst;
  return out;
}

ReconstructedState recon_displaced_thermal(double g2, double nbar, double tol) {
  if (!(nbar > 0.0)) throw Error(ErrorKind::Validation, "mean photon number must be > 0");
  if (g2 > 2.0 + tol) throw Error(ErrorKind::SectorMismatch, "g2 > 2 is outside the displaced-thermal sector");
  if (g2 < 1.0 - tol) throw Error(ErrorKind::SectorMismatch, "g2 < 1 is outside the displaced-thermal sector");
  const double s = std::sqrt(std::clamp(2.0 - g2, 0.0, 1.0));
  ReconstructedState out;
  out.params = make_single(std::sqrt(nbar * s), 0.0, 0.0, nbar * (1.0 - s));
  const auto o = observe(out.params);
  out.residual = std::max(std::abs(o.g2 - g2), std::abs(o.nbar - nbar) / nbar);
  out.ambiguity.notes.push_back("displacement phase fixed to 0 (needs an external phase reference)");
  return out;
}

ReconstructedState recon_displaced_thermal_click(double g2, double p0, double tol) {
  check_p0(p0);
  if (g2 > 2.0 + tol) throw Error(ErrorKind::SectorMismatch, "g2 > 2 is outside the displaced-thermal sector");
  if (g2 < 1.0 - tol) throw Error(ErrorKind::SectorMismatch, "g2 < 1 is outside the displaced-thermal sector");
  const double s = std::sqrt(std::clamp(2.0 - g2, 0.0, 1.0)); // |alpha|^2 / (|alpha|^2 + N)
  double N = 0.0, a2 = 0.0;
  if (1.0 - s < 1e-14) {
    a2 = -std::log(p0);
  } else {
    // p0 (N+1) e^{a2/(N+1)} = 1 with a2 = s N / (1 - s); increasing in N
    auto f = [&](double n) { return std::log(p0) + std::log1p(n) + s * n / ((1.0 - s) * (n + 1.0)); };
    double lo = 0.0, hi = 10.0 / p0;
    if (f(lo) >= 0.0) {
      hi = 0.0;
    } else {
      for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
      }
    }
    N = 0.5 * (lo + hi);
    a2 = s * N / (1.0 - s);
  }
  ReconstructedState out;
  out.params = make_single(std::sqrt(a2), 0.0, 0.0, N);
  const auto o = observe(out.params);
  out.residual = std::max(std::abs(o.g2 - g2), std::abs(o.p0 - p0));
  out.ambiguity.notes.push_back("displacement phase fixed to 0 (needs an external phase reference)");
  return out;
}

// ---------------------------------------------------------------------------

LineFit fit_scan_line(const std::vector<ScanPoint>& points, double tol) {
  if (points.size() < 2) throw Error(ErrorKind::InsufficientData, "a scan needs at least two points");
  double lo = points.front().g2, hi = lo, sig = 0.0;
  bool weighted = false;
  for (const auto& p : points) {
    lo = std::min(lo, p.g2);
    hi = std::max(hi, p.g2);
    weighted = weighted || p.sigma_g2 > 0 || p.sigma_g3 > 0;
    sig = std::max(sig, std::max(p.sigma_g2, p.sigma_g3));
  }
  if (hi - lo <= std::max(tol, 1e-12))
    throw Error(ErrorKind::InsufficientData, "scan points are not distinct in g2 (collinearity-degenerate)");
  auto solve = [&](double slope_guess) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : points) {
      double w = 1.0;
      if (weighted) {
        const double v = p.sigma_g3 * p.sigma_g3 + slope_guess * slope_guess * p.sigma_g2 * p.sigma_g2;
        w = v > 0 ? 1.0 / v : 1.0;
      }
      sw += w;
      sx += w * p.g2;
      sy += w * p.g3;
      sxx += w * p.g2 * p.g2;
      sxy += w * p.g2 * p.g3;
    }
    const double m = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
    return LineFit{m, (sy - m * sx) / sw, 0.0};
  };
  LineFit f = solve(9.0);
  if (weighted) f = solve(f.m);
  for (const auto& p : points) f.residual = std::max(f.residual, std::abs(p.g3 - (f.m * p.g2 + f.c)));
  const double allowed = std::max(tol, 3.0 * sig) * std::max(1.0, std::abs(f.m));
  if (f.residual > allowed)
    throw Error(ErrorKind::Inconsistent,
                "scan points are not collinear (max deviation " + std::to_string(f.residual) + ")");
  return f;
}

double dst_cosine(double g2, double nbar, double alpha2, double cov_abs) {
  if (alpha2 <= 0.0 || cov_abs <= 0.0)
    throw Error(ErrorKind::SectorMismatch,
                alpha2 <= 0.0 ? "no displacement: use the squeezed-thermal reconstruction"
                              : "no squeezing: use the displaced-thermal reconstruction");
  return -(nbar * nbar * (g2 - 2.0) - cov_abs * cov_abs + alpha2 * alpha2) / (2.0 * alpha2 * cov_abs);
}

namespace {

double checked_cos(double x, double tol) {
  if (std::abs(x) > 1.0 + std::max(tol, 1e-9))
    throw Error(ErrorKind::Inconsistent, "relative-phase cosine outside [-1, 1]: " + std::to_string(x));
  return std::clamp(x, -1.0, 1.0);
}

// D(alpha) S(r): psi = 2 phi - theta with theta = 0
GaussianParams dst_params(double alpha2, double psi, double r, double N) {
  return make_single(std::sqrt(alpha2), 0.5 * psi, r, N);
}

} // namespace

ScanReconstruction recon_dst_scan(const std::vector<ScanPoint>& points, double nbar,
                                  std::optional<std::vector<double>> offsets, double tol) {
  if (!(nbar > 0.0)) throw Error(ErrorKind::Validation, "mean photon number must be > 0");
  if (offsets && offsets->size() != points.size())
    throw Error(ErrorKind::Validation, "one phase offset per scan point is required");
  ScanReconstruction out;
  out.line = fit_scan_line(points, tol);
  const double m = out.line.m, c = out.line.c;
  const double stol = std::max(tol, 1e-9) * 10.0;
  // slope m = 9 - 6 |alpha|^2/nbar
  const double a = (9.0 - m) / 6.0;
  if (a < -stol) throw Error(ErrorKind::SectorMismatch, "scan slope m > 9 implies negative |alpha|^2");
  if (a <= stol)
    throw Error(ErrorKind::SectorMismatch, "scan slope m = 9: no displacement, use the squeezed-thermal reconstruction");
  const double C2 = (c + 12.0) / (9.0 - m) - 2.0 + (9.0 - m) * (9.0 - m) / 108.0;
  if (C2 < -stol) throw Error(ErrorKind::Inconsistent, "scan intercept implies negative |cov|^2");
  if (C2 <= stol) throw Error(ErrorKind::SectorMismatch, "no squeezing: use the displaced-thermal reconstruction");
  out.alpha_abs = std::sqrt(a * nbar);
  out.cov_abs = std::sqrt(C2) * nbar;
  const double alpha2 = a * nbar;
  std::tie(out.r, out.N) = squeeze_from_centered(nbar - alpha2, out.cov_abs * out.cov_abs, tol);
  for (const auto& p : points) out.cosines.push_back(checked_cos(dst_cosine(p.g2, nbar, alpha2, out.cov_abs), 1e-6));

  std::vector<double> psi(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) psi[k] = std::acos(out.cosines[k]);
  if (offsets) {
    // psi_k = psi_0 + delta_k: pick the reflection that fits every point
    double best = 1e300, second = 1e300, best_psi0 = 0.0;
    for (double sgn : {1.0, -1.0}) {
      const double psi0 = sgn * psi[0] - (*offsets)[0];
      double cost = 0.0;
      for (std::size_t k = 0; k < points.size(); ++k)
        cost = std::max(cost, std::abs(std::cos(psi0 + (*offsets)[k]) - out.cosines[k]));
      if (cost < best) {
        second = best;
        best = cost;
        best_psi0 = psi0;
      } else {
        second = std::min(second, cost);
      }
    }
    if (best > 1e-4) throw Error(ErrorKind::Inconsistent, "phase offsets do not match the scan cosines");
    out.z2_resolved = second > 1e-6 && std::abs(linalg::wrap_angle(best_psi0 + best_psi0)) > 1e-9;
    if (out.z2_resolved)
      for (std::size_t k = 0; k < points.size(); ++k) psi[k] = linalg::wrap_angle(best_psi0 + (*offsets)[k]);
  }
  out.relative_phases = psi;
  for (std::size_t k = 0; k < points.size(); ++k) {
    ReconstructedState st;
    st.params = dst_params(alpha2, psi[k], out.r, out.N);
    st.ambiguity.z2_reflection = !out.z2_resolved;
    if (!out.z2_resolved) st.ambiguity.discrete_solutions.push_back(dst_params(alpha2, -psi[k], out.r, out.N));
    st.ambiguity.notes.push_back("absolute phases need an external reference; only 2 phi - theta is physical");
    const auto o = observe(st.params);
    st.residual = std::max({std::abs(o.g2 - points[k].g2), std::abs(o.g3 - points[k].g3), std::abs(o.nbar - nbar) / nbar});
    out.states.push_back(st);
  }
  return out;
}

ReconstructedState recon_dst_beamsplitter(const BeamsplitterData& d, double tol) {
  if (!d.nbar_orig && !d.nbar_plus)
    throw Error(ErrorKind::InsufficientData, "need the mean photon number of the original state or of the displaced output");
  auto st = recon_squeezed_thermal(d.g2_minus, d.nbar_minus, tol);
  const double r = std::abs(st.params.squeeze(0, 0)), N = st.params.thermal(0);
  double alpha2 = d.nbar_orig ? *d.nbar_orig - d.nbar_minus : 0.5 * (*d.nbar_plus - d.nbar_minus);
  const double scale = std::max(1.0, d.nbar_orig.value_or(d.nbar_plus.value_or(1.0)));
  if (alpha2 < -1e-9 * scale)
    throw Error(ErrorKind::Inconsistent, "photon-number difference gives negative |alpha|^2");
  alpha2 = std::max(0.0, alpha2);
  const double nbar = alpha2 + d.nbar_minus;
  const double cov_abs = (2.0 * N + 1.0) * std::cosh(r) * std::sinh(r);

  ReconstructedState out;
  out.ambiguity.notes.push_back("absolute phases need an external reference; only 2 phi - theta is physical");
  if (alpha2 <= 1e-12 * scale || cov_abs <= 1e-12) {
    out.params = make_single(std::sqrt(alpha2), 0.0, r, N);
    out.ambiguity.notes.push_back(alpha2 <= 1e-12 * scale ? "no displacement: reduces to the squeezed-thermal case"
                                                          : "no squeezing: relative phase undefined");
  } else {
    const double x = checked_cos(dst_cosine(d.g2_orig, nbar, alpha2, cov_abs), 1e-6);
    const double psi = std::acos(x);
    out.params = dst_params(alpha2, psi, r, N);
    if (std::abs(std::sin(psi)) > 1e-9) {
      out.ambiguity.z2_reflection = true;
      out.ambiguity.discrete_solutions.push_back(dst_params(alpha2, -psi, r, N));
      out.ambiguity.notes.push_back("sign of 2 phi - theta cannot be fixed by photon statistics");
    }
  }
  const auto o = observe(out.params);
  out.residual = std::max({std::abs(o.g2 - d.g2_orig), std::abs(o.nbar - nbar) / nbar, st.residual});
  if (d.nbar_orig && d.nbar_plus) {
    const double a2p = 0.5 * (*d.nbar_plus - d.nbar_minus);
    out.residual = std::max(out.residual, std::abs(a2p - alpha2) / scale);
  }
  if (d.g3_orig) out.residual = std::max(out.residual, std::abs(o.g3 - *d.g3_orig));
  return out;
}

} // namespace gausstat

#include "gausstat/phase_graph.hpp"

#include <cmath>
#include <sstream>

#include "gausstat/linalg.hpp"

namespace gausstat {

namespace {

void validate(const PhaseSystem& sys, PhaseKind want, double tol) {
  if (sys.kind != want) throw Error(ErrorKind::Validation, "phase system has the wrong kind");
  const int m = sys.modes;
  if (m < 1) throw Error(ErrorKind::Validation, "phase system needs at least one mode");
  if (sys.Phi.rows() != m || sys.Phi.cols() != m || sys.c.rows() != m || sys.c.cols() != m)
    throw Error(ErrorKind::Validation, "phase system matrices must be M x M");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      if (!std::isfinite(sys.c(i, j)) || !std::isfinite(sys.Phi(i, j)))
        throw Error(ErrorKind::Validation, "phase system entries must be finite");
      if (std::abs(sys.c(i, j)) > 1.0 + tol) {
        std::ostringstream os;
        os << "|c(" << i << "," << j << ")| = " << std::abs(sys.c(i, j)) << " exceeds 1";
        throw Error(ErrorKind::Validation, os.str());
      }
      if (std::abs(linalg::wrap_angle(sys.Phi(i, j) + sys.Phi(j, i))) > 1e-9)
        throw Error(ErrorKind::Validation, "Phi must be antisymmetric");
    }
}

double clamp1(double x) { return std::max(-1.0, std::min(1.0, x)); }

// acos with the degenerate flag for |c| = 1 (sigma collapses)
double acos_c(double c, double tol, bool& collapsed) {
  collapsed = 1.0 - std::abs(c) <= tol;
  return std::acos(clamp1(c));
}

bool same_phases(const RVec& a, const RVec& b, double tol) {
  for (Eigen::Index k = 0; k < a.size(); ++k)
    if (std::abs(linalg::wrap_angle(a(k) - b(k))) > tol) return false;
  return true;
}

bool same_theta(const RMat& a, const RMat& b, double tol) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (std::abs(linalg::wrap_angle(a(i, j) - b(i, j))) > tol) return false;
  return true;
}

std::vector<std::pair<int, int>> pairs_of(int m) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) out.emplace_back(i, j);
  return out;
}

double cov_C(double cij, double cji, int eps) {
  return clamp1(cij * cji + eps * std::sqrt(std::max(0.0, (1.0 - cij * cij) * (1.0 - cji * cji))));
}

} // namespace

double phase_residual(const PhaseSystem& sys, const PhaseSolution& sol) {
  double worst = 0.0;
  const int m = sys.modes;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      double model;
      if (sys.kind == PhaseKind::Displacement)
        model = std::cos(sys.Phi(i, j) + sol.phases(i) - sol.phases(j));
      else
        model = std::cos(sys.Phi(i, j) + sol.theta(i, i) - sol.theta(i, j));
      worst = std::max(worst, std::abs(clamp1(sys.c(i, j)) - model));
    }
  return worst;
}

std::vector<PhaseSolution> solve_displacement_phases(const PhaseSystem& sys, double tol) {
  validate(sys, PhaseKind::Displacement, tol);
  const int m = sys.modes;
  std::vector<PhaseSolution> out;
  if (m == 1) {
    PhaseSolution s;
    s.phases = RVec::Zero(1);
    out.push_back(s);
    return out;
  }

  std::vector<double> ct(m, 0.0);
  std::vector<bool> collapsed(m, false);
  std::vector<std::string> notes;
  for (int i = 1; i < m; ++i) {
    bool col = false;
    ct[i] = acos_c(sys.c(0, i), tol, col);
    collapsed[i] = col;
    if (col) notes.push_back("c(0," + std::to_string(i) + ") = +-1: sigma_" + std::to_string(i) + " collapsed");
  }

  const long n_sig = 1L << (m - 1);
  for (long code = 0; code < n_sig; ++code) {
    std::vector<int> sigma(m - 1);
    bool skip = false;
    for (int i = 1; i < m; ++i) {
      sigma[i - 1] = (code >> (i - 1)) & 1 ? -1 : 1;
      if (collapsed[i] && sigma[i - 1] < 0) skip = true;
    }
    if (skip) continue;
    PhaseSolution s;
    s.phases = RVec::Zero(m);
    for (int i = 1; i < m; ++i) s.phases(i) = linalg::wrap_angle(sys.Phi(0, i) + sigma[i - 1] * ct[i]);
    s.sigma = sigma;
    s.residual = phase_residual(sys, s);
    if (s.residual > tol) continue;
    bool dup = false;
    for (const auto& o : out) dup = dup || same_phases(o.phases, s.phases, 10.0 * tol);
    if (dup) continue;
    s.degeneracy_notes = notes;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PhaseSolution> solve_covariance_phases(const PhaseSystem& sys, double tol) {
  validate(sys, PhaseKind::Covariance, tol);
  const int m = sys.modes;
  std::vector<PhaseSolution> out;
  const auto pairs = pairs_of(m);
  if (m == 1) {
    PhaseSolution s;
    s.phases = RVec::Zero(1);
    s.theta = RMat::Zero(1, 1);
    out.push_back(s);
    return out;
  }

  // tree edges (0,i): C_0i(eps) = cos(2 Phi_0i - Theta_ii)
  std::vector<bool> eps_free(m, true);
  std::vector<std::string> notes;
  for (int i = 1; i < m; ++i) {
    const double a = sys.c(0, i), b = sys.c(i, 0);
    if ((1.0 - a * a) * (1.0 - b * b) <= tol * tol) {
      eps_free[i] = false;
      notes.push_back("edge (0," + std::to_string(i) + "): |c| = 1, epsilon collapsed");
    }
  }

  const long n_sig = 1L << (m - 1);
  for (long ecode = 0; ecode < n_sig; ++ecode) {
    std::vector<int> eps_tree(m, 1);
    bool skip = false;
    for (int i = 1; i < m; ++i) {
      eps_tree[i] = (ecode >> (i - 1)) & 1 ? -1 : 1;
      if (!eps_free[i] && eps_tree[i] < 0) skip = true;
    }
    if (skip) continue;
    std::vector<double> ct(m, 0.0);
    std::vector<bool> collapsed(m, false);
    for (int i = 1; i < m; ++i) {
      bool col = false;
      ct[i] = acos_c(cov_C(sys.c(0, i), sys.c(i, 0), eps_tree[i]), tol, col);
      collapsed[i] = col;
    }
    for (long code = 0; code < n_sig; ++code) {
      std::vector<int> sigma(m - 1);
      bool skip_s = false;
      for (int i = 1; i < m; ++i) {
        sigma[i - 1] = (code >> (i - 1)) & 1 ? -1 : 1;
        if (collapsed[i] && sigma[i - 1] < 0) skip_s = true;
      }
      if (skip_s) continue;
      RVec diag = RVec::Zero(m);
      for (int i = 1; i < m; ++i) diag(i) = linalg::wrap_angle(2.0 * sys.Phi(0, i) + sigma[i - 1] * ct[i]);

      // Off-diagonal Theta_ij from c_ij, checked against c_ji; branch where both signs fit.
      std::vector<std::vector<double>> options(pairs.size());
      bool ok = true;
      for (std::size_t p = 0; p < pairs.size() && ok; ++p) {
        const auto [i, j] = pairs[p];
        const double a = std::acos(clamp1(sys.c(i, j)));
        for (int s : {1, -1}) {
          const double t = linalg::wrap_angle(sys.Phi(i, j) + diag(i) - s * a);
          if (std::abs(clamp1(sys.c(j, i)) - std::cos(sys.Phi(j, i) + diag(j) - t)) > tol) continue;
          bool dup = false;
          for (double o : options[p]) dup = dup || std::abs(linalg::wrap_angle(o - t)) <= 10.0 * tol;
          if (!dup) options[p].push_back(t);
        }
        ok = !options[p].empty();
      }
      if (!ok) continue;

      std::vector<std::size_t> idx(pairs.size(), 0);
      while (true) {
        PhaseSolution s;
        s.phases = diag;
        s.theta = RMat::Zero(m, m);
        for (int i = 0; i < m; ++i) s.theta(i, i) = diag(i);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          const auto [i, j] = pairs[p];
          s.theta(i, j) = s.theta(j, i) = options[p][idx[p]];
        }
        s.sigma = sigma;
        for (const auto& [i, j] : pairs) {
          const double sa = std::sin(sys.Phi(i, j) + diag(i) - s.theta(i, j));
          const double sb = std::sin(sys.Phi(j, i) + diag(j) - s.theta(i, j));
          s.epsilon.push_back(sa * sb < 0.0 ? -1 : 1);
        }
        s.residual = phase_residual(sys, s);
        if (s.residual <= tol) {
          bool dup = false;
          for (const auto& o : out) dup = dup || same_theta(o.theta, s.theta, 10.0 * tol);
          if (!dup) {
            s.degeneracy_notes = notes;
            for (std::size_t p = 0; p < pairs.size(); ++p)
              if (options[p].size() > 1)
                s.degeneracy_notes.push_back("c(" + std::to_string(pairs[p].first) + "," +
                                             std::to_string(pairs[p].second) + ") = 0: Theta branch");
            out.push_back(std::move(s));
          }
        }
        std::size_t p = 0;
        while (p < idx.size() && ++idx[p] == options[p].size()) idx[p++] = 0;
        if (p == idx.size()) break;
      }
    }
  }
  return out;
}

namespace {
template <class Solve>
std::vector<PhaseSolution> tightest(const PhaseSystem& sys, double max_tol, Solve solve) {
  for (double t = std::min(1e-12, max_tol);; t *= 10.0) {
    t = std::min(t, max_tol);
    auto sols = solve(sys, t);
    if (!sols.empty() || t >= max_tol) return sols;
  }
}
} // namespace

std::vector<PhaseSolution> solve_displacement_phases_tight(const PhaseSystem& sys, double max_tol) {
  return tightest(sys, max_tol, solve_displacement_phases);
}

std::vector<PhaseSolution> solve_covariance_phases_tight(const PhaseSystem& sys, double max_tol) {
  return tightest(sys, max_tol, solve_covariance_phases);
}

DegeneracyReport degeneracy_report(const PhaseSystem& sys, const std::vector<PhaseSolution>& solutions, double tol) {
  DegeneracyReport rep;
  if (solutions.size() < 2) return rep;
  const int m = sys.modes;
  const bool cov = sys.kind == PhaseKind::Covariance;
  auto near_pi_multiple = [&](double x) { return std::abs(std::sin(x)) <= 10.0 * tol; };
  auto edge = [](int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; };

  for (std::size_t a = 0; a < solutions.size(); ++a)
    for (std::size_t b = a + 1; b < solutions.size(); ++b) {
      const auto& s = solutions[a];
      const auto& t = solutions[b];
      std::ostringstream os;
      if (cov && s.epsilon != t.epsilon && s.sigma == t.sigma) {
        os << "epsilon-branch: solutions " << a << "," << b << " differ only in epsilon";
        rep.tags.push_back(os.str());
        continue;
      }
      bool all_flip = true;
      for (std::size_t k = 0; k < s.sigma.size(); ++k) all_flip = all_flip && s.sigma[k] == -t.sigma[k];
      if (all_flip) {
        os << "pm-sigma: solutions " << a << "," << b;
        for (int i = 1; i < m; ++i)
          for (int j = i + 1; j < m; ++j) {
            const double gamma = sys.Phi(i, j) + sys.Phi(0, i) - sys.Phi(0, j);
            const double g = cov ? 2.0 * gamma : gamma;
            const double delta = cov ? (s.phases(i) - 2.0 * sys.Phi(0, i)) - (s.phases(j) - 2.0 * sys.Phi(0, j))
                                     : (s.phases(i) - sys.Phi(0, i)) - (s.phases(j) - sys.Phi(0, j));
            if (near_pi_multiple(g)) os << "; Gamma" << edge(i, j) << " = 0 mod pi";
            if (near_pi_multiple(delta)) os << "; Delta" << edge(i, j) << " = 0 mod pi";
          }
        rep.tags.push_back(os.str());
        continue;
      }
      os << "G-condition: solutions " << a << "," << b;
      for (int i = 1; i < m; ++i)
        for (int j = 1; j < m; ++j) {
          if (i == j || s.sigma[i - 1] != t.sigma[i - 1] || s.sigma[j - 1] == t.sigma[j - 1]) continue;
          const double gamma = sys.Phi(i, j) + sys.Phi(0, i) - sys.Phi(0, j);
          if (1.0 - std::abs(sys.c(0, i)) <= tol)
            os << "; c(0," << i << ") = +-1";
          else if (std::abs(sys.c(0, j) - sys.c(i, j)) <= 10.0 * tol &&
                   std::abs(sys.c(0, i) - std::cos(cov ? 2.0 * gamma : gamma)) <= 10.0 * tol)
            os << "; c(0," << j << ") = c" << edge(i, j) << " and c(0," << i << ") = cos Gamma" << edge(i, j);
          else
            os << "; edge " << edge(i, j);
        }
      rep.tags.push_back(os.str());
    }
  return rep;
}

} // namespace gausstat

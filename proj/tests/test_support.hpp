#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "gausstat/moment_kernel.hpp"
#include "gausstat/state_engine.hpp"

namespace testsupport {

using namespace gausstat;

struct Ranges {
  double alpha_max = 0.8;
  double r_max = 0.7;
  double n_max = 0.5;
  double phi_scale = 1.0;
};

inline CMat random_hermitian(std::mt19937_64& rng, int m, double scale) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat h(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) h(i, j) = cplx(g(rng), g(rng));
  return scale * 0.5 * (h + h.adjoint());
}

// Complex symmetric z with largest singular value `r`.
inline CMat random_symmetric(std::mt19937_64& rng, int m, double r) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat z(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) z(i, j) = cplx(g(rng), g(rng));
  z = 0.5 * (z + z.transpose()).eval();
  Eigen::JacobiSVD<CMat> svd(z);
  const double s = svd.singularValues()(0);
  return s > 0 ? CMat(z * (r / s)) : z;
}

inline GaussianParams random_params(std::mt19937_64& rng, int m, const Ranges& rg = {}) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GaussianParams p = GaussianParams::vacuum(m);
  for (int k = 0; k < m; ++k) {
    p.alpha(k) = std::polar(rg.alpha_max * u(rng), 2.0 * M_PI * u(rng));
    p.thermal(k) = rg.n_max * u(rng);
  }
  p.squeeze = random_symmetric(rng, m, rg.r_max * u(rng));
  p.rotation = random_hermitian(rng, m, rg.phi_scale);
  return p;
}

// Raw moment from the singleton/pair expansion with centered pairs; independent of
// the compressed formula used by the kernel, valid at any order.
inline cplx wick_oracle(const LadderWord& w, const MomentTable& t) {
  std::vector<int> pos(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) pos[k] = static_cast<int>(k);
  auto centered = [&](int p, int q) { return t.two(w[p], w[q]) - t.one(w[p]) * t.one(w[q]); };
  std::function<cplx(std::vector<int>)> rec = [&](std::vector<int> rest) -> cplx {
    if (rest.empty()) return 1.0;
    const int head = rest.front();
    std::vector<int> tail(rest.begin() + 1, rest.end());
    cplx s = t.one(w[head]) * rec(tail);
    for (std::size_t k = 0; k < tail.size(); ++k) {
      std::vector<int> r2;
      for (std::size_t m = 0; m < tail.size(); ++m)
        if (m != k) r2.push_back(tail[m]);
      s += centered(head, tail[k]) * rec(r2);
    }
    return s;
  };
  return rec(pos);
}

inline std::vector<LadderWord> all_words(int modes, int length) {
  std::vector<LadderWord> out;
  const int base = 2 * modes;
  long total = 1;
  for (int k = 0; k < length; ++k) total *= base;
  for (long code = 0; code < total; ++code) {
    LadderWord w(length);
    long c = code;
    for (int k = length - 1; k >= 0; --k) {
      const int s = static_cast<int>(c % base);
      c /= base;
      w[k] = s < modes ? ann(s) : cre(s - modes);
    }
    out.push_back(w);
  }
  return out;
}

} // namespace testsupport

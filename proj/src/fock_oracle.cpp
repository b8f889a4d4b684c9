#include "gausstat/fock_oracle.hpp"

#include <cmath>
#include <string>

#include "gausstat/linalg.hpp"

namespace gausstat {

namespace {

long ipow(int base, int e) {
  long v = 1;
  for (int k = 0; k < e; ++k) v *= base;
  return v;
}

int occupation(long index, int mode, int modes, int d) {
  return static_cast<int>((index / ipow(d, modes - 1 - mode)) % d);
}

CMat single_annihilation(int d) {
  CMat a = CMat::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Applies a word (rightmost operator first) to basis state `col`; returns target index or -1.
long apply_to_basis(const LadderWord& word, std::size_t begin, std::size_t end, long col, int modes,
                    int d, double& amp) {
  amp = 1.0;
  for (std::size_t p = end; p-- > begin;) {
    const auto& op = word[p];
    const int n = occupation(col, op.mode, modes, d);
    const long stride = ipow(d, modes - 1 - op.mode);
    if (op.kind == OpKind::Annihilation) {
      if (n == 0) return -1;
      amp *= std::sqrt(static_cast<double>(n));
      col -= stride;
    } else {
      if (n + 1 >= d) return -1;
      amp *= std::sqrt(static_cast<double>(n + 1));
      col += stride;
    }
  }
  return col;
}

// X <- X * op, op a truncated ladder operator.
CMat right_apply(const CMat& x, const LadderOp& op, int modes, int d) {
  const long dim = x.cols();
  const long stride = ipow(d, modes - 1 - op.mode);
  CMat out = CMat::Zero(x.rows(), dim);
  for (long c = 0; c < dim; ++c) {
    const int n = occupation(c, op.mode, modes, d);
    if (op.kind == OpKind::Annihilation) {
      // (X a)_{:,c} = sqrt(n) X_{:, c - e}
      if (n > 0) out.col(c) = std::sqrt(static_cast<double>(n)) * x.col(c - stride);
    } else {
      if (n + 1 < d) out.col(c) = std::sqrt(static_cast<double>(n + 1)) * x.col(c + stride);
    }
  }
  return out;
}

} // namespace

int default_cutoff(int modes) {
  switch (modes) {
    case 1: return 25;
    case 2: return 12;
    case 3: return 8;
    default: throw Error(ErrorKind::Validation, "Fock oracle supports at most 3 modes");
  }
}

CMat ladder_matrix(const LadderOp& op, int modes, int cutoff) {
  const CMat a = single_annihilation(cutoff);
  const CMat id = CMat::Identity(cutoff, cutoff);
  CMat out = CMat::Identity(1, 1);
  for (int m = 0; m < modes; ++m) {
    const CMat f = m == op.mode ? (op.kind == OpKind::Annihilation ? a : CMat(a.adjoint())) : id;
    out = kron(out, f);
  }
  return out;
}

CMat displacement_unitary(const CVec& alpha, int cutoff) {
  const CMat a = single_annihilation(cutoff);
  CMat out = CMat::Identity(1, 1);
  for (Eigen::Index m = 0; m < alpha.size(); ++m) {
    // exp(alpha a^dag - alpha^* a) = exp(i H), H = -i (alpha a^dag - alpha^* a)
    const CMat gen = alpha(m) * a.adjoint() - std::conj(alpha(m)) * a;
    out = kron(out, linalg::expi_hermitian(cplx(0.0, -1.0) * gen));
  }
  return out;
}

// Hermitian matrix sum_terms coeff * (word acting on basis), assembled column by column.
static CMat assemble(const std::vector<std::pair<cplx, LadderWord>>& terms, int modes, int d) {
  const long dim = ipow(d, modes);
  CMat h = CMat::Zero(dim, dim);
  for (long c = 0; c < dim; ++c)
    for (const auto& [coef, word] : terms) {
      double amp = 0.0;
      const long r = apply_to_basis(word, 0, word.size(), c, modes, d, amp);
      if (r >= 0) h(r, c) += coef * amp;
    }
  return h;
}

CMat squeeze_unitary(const CMat& z, int cutoff) {
  const int modes = static_cast<int>(z.rows());
  // H = -i G with G = 1/2 sum (z*_kl a_k a_l - z_kl a_k^dag a_l^dag)
  std::vector<std::pair<cplx, LadderWord>> terms;
  const cplx mi(0.0, -1.0);
  for (int k = 0; k < modes; ++k)
    for (int l = 0; l < modes; ++l) {
      terms.push_back({mi * 0.5 * std::conj(z(k, l)), {ann(k), ann(l)}});
      terms.push_back({-mi * 0.5 * z(k, l), {cre(k), cre(l)}});
    }
  return linalg::expi_hermitian(assemble(terms, modes, cutoff));
}

CMat rotation_unitary(const CMat& phi, int cutoff) {
  const int modes = static_cast<int>(phi.rows());
  std::vector<std::pair<cplx, LadderWord>> terms;
  for (int k = 0; k < modes; ++k)
    for (int l = 0; l < modes; ++l) terms.push_back({phi(k, l), {cre(k), ann(l)}});
  return linalg::expi_hermitian(assemble(terms, modes, cutoff));
}

TruncatedDensity build_density(const GaussianParams& params, const FockOptions& opts) {
  params.validate();
  const int modes = params.modes();
  if (modes > 3) throw Error(ErrorKind::Validation, "Fock oracle supports at most 3 modes");
  const int d = opts.cutoff > 0 ? opts.cutoff : default_cutoff(modes);
  if (d < 2) throw Error(ErrorKind::Validation, "Fock cutoff must be at least 2");
  const long dim = ipow(d, modes);
  if (dim > opts.max_dim)
    throw Error(ErrorKind::Validation, "Fock space dimension " + std::to_string(dim) + " exceeds limit " +
                                           std::to_string(opts.max_dim));

  RVec th = RVec::Ones(1);
  for (int m = 0; m < modes; ++m) {
    const double n = params.thermal(m);
    RVec p(d);
    for (int k = 0; k < d; ++k) p(k) = std::pow(n / (n + 1.0), k) / (n + 1.0);
    RVec next(th.size() * d);
    for (Eigen::Index i = 0; i < th.size(); ++i) next.segment(i * d, d) = th(i) * p;
    th = next;
  }

  CMat u = displacement_unitary(params.alpha, d);
  if (linalg::max_abs(params.squeeze) > 0.0) u = u * squeeze_unitary(params.squeeze, d);
  if (linalg::max_abs(params.rotation) > 0.0) u = u * rotation_unitary(params.rotation, d);

  TruncatedDensity rho;
  rho.dim = d;
  rho.modes = modes;
  rho.matrix = u * th.cast<cplx>().asDiagonal() * u.adjoint();
  rho.matrix = 0.5 * (rho.matrix + rho.matrix.adjoint()).eval();

  double inner = 0.0;
  for (long i = 0; i < dim; ++i) {
    bool edge = false;
    for (int m = 0; m < modes; ++m) edge = edge || occupation(i, m, modes, d) == d - 1;
    if (!edge) inner += rho.matrix(i, i).real();
  }
  rho.trace_deficit = std::max(0.0, 1.0 - inner);
  if (rho.trace_deficit > opts.deficit_threshold)
    throw Error(ErrorKind::Truncation, "Fock cutoff " + std::to_string(d) + " too small: trace deficit " +
                                           std::to_string(rho.trace_deficit));
  return rho;
}

cplx moment_bruteforce(const TruncatedDensity& rho, const LadderWord& word) {
  return moments_bruteforce(rho, {word}).front();
}

std::vector<cplx> moments_bruteforce(const TruncatedDensity& rho, const std::vector<LadderWord>& words) {
  const int d = rho.dim, modes = rho.modes;
  const long dim = rho.matrix.rows();
  std::vector<cplx> out;
  out.reserve(words.size());
  LadderWord cached_left;
  bool have_cache = false;
  CMat y;
  for (const auto& word : words) {
    for (const auto& op : word)
      if (op.mode < 0 || op.mode >= modes) throw Error(ErrorKind::Validation, "word mode out of range");
    const std::size_t half = word.size() / 2;
    LadderWord left(word.begin(), word.begin() + static_cast<long>(half));
    bool same = have_cache && left.size() == cached_left.size();
    for (std::size_t p = 0; same && p < left.size(); ++p)
      same = left[p].mode == cached_left[p].mode && left[p].kind == cached_left[p].kind;
    if (!same) {
      y = rho.matrix;
      for (const auto& op : left) y = right_apply(y, op, modes, d);
      cached_left = left;
      have_cache = true;
    }
    // Tr[Y R] with R the monomial matrix of the right half
    cplx tr = 0.0;
    for (long c = 0; c < dim; ++c) {
      double amp = 0.0;
      const long r = apply_to_basis(word, half, word.size(), c, modes, d, amp);
      if (r >= 0) tr += y(c, r) * amp;
    }
    out.push_back(tr);
  }
  return out;
}

double vacuum_overlap(const TruncatedDensity& rho) { return rho.matrix(0, 0).real(); }

RVec photon_number_distribution(const TruncatedDensity& rho, int mode) {
  if (mode < 0 || mode >= rho.modes) throw Error(ErrorKind::Validation, "mode out of range");
  RVec p = RVec::Zero(rho.dim);
  for (long i = 0; i < rho.matrix.rows(); ++i) p(occupation(i, mode, rho.modes, rho.dim)) += rho.matrix(i, i).real();
  return p;
}

BucketMoments bucket_bruteforce(const TruncatedDensity& rho) {
  double n1 = 0.0, f2 = 0.0, f3 = 0.0;
  for (long i = 0; i < rho.matrix.rows(); ++i) {
    double tot = 0.0;
    for (int m = 0; m < rho.modes; ++m) tot += occupation(i, m, rho.modes, rho.dim);
    const double p = rho.matrix(i, i).real();
    n1 += p * tot;
    f2 += p * tot * (tot - 1.0);
    f3 += p * tot * (tot - 1.0) * (tot - 2.0);
  }
  BucketMoments b;
  b.total_nbar = n1;
  b.g2_b = f2 / (n1 * n1);
  b.g3_b = f3 / (n1 * n1 * n1);
  return b;
}

} // namespace gausstat

#include "gausstat/moment_kernel.hpp"

#include <algorithm>
#include <string>

namespace gausstat {

namespace {

void pair_up(std::vector<int>& free_pos, std::vector<std::pair<int, int>>& acc,
             std::vector<PairPartition>& out) {
  if (free_pos.empty()) {
    out.push_back({acc});
    return;
  }
  const int head = free_pos.front();
  for (std::size_t k = 1; k < free_pos.size(); ++k) {
    const int partner = free_pos[k];
    std::vector<int> rest;
    rest.reserve(free_pos.size() - 2);
    for (std::size_t m = 1; m < free_pos.size(); ++m)
      if (m != k) rest.push_back(free_pos[m]);
    acc.emplace_back(head, partner);
    pair_up(rest, acc, out);
    acc.pop_back();
  }
}

void check_modes(const LadderWord& word, int modes) {
  for (const auto& op : word)
    if (op.mode < 0 || op.mode >= modes)
      throw Error(ErrorKind::Validation, "ladder word mode index " + std::to_string(op.mode) +
                                             " out of range for " + std::to_string(modes) + " modes");
}

} // namespace

std::vector<PairPartition> enumerate_pair_partitions(int length) {
  if (length <= 0 || length % 2 != 0 || length > 6)
    throw Error(ErrorKind::UnsupportedOrder,
                "pair partitions need an even word length <= 6, got " + std::to_string(length));
  std::vector<int> pos(length);
  for (int k = 0; k < length; ++k) pos[k] = k;
  std::vector<std::pair<int, int>> acc;
  std::vector<PairPartition> out;
  pair_up(pos, acc, out);
  return out;
}

std::vector<PairPartition> enumerate_pair_partitions(const LadderWord& word) {
  return enumerate_pair_partitions(static_cast<int>(word.size()));
}

std::vector<Bipartition42> enumerate_bipartitions_4_2(int length) {
  if (length != 6)
    throw Error(ErrorKind::UnsupportedOrder,
                "(4,2) bipartitions need a 6-word, got length " + std::to_string(length));
  std::vector<Bipartition42> out;
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b)
      for (int c = b + 1; c < 6; ++c)
        for (int d = c + 1; d < 6; ++d) {
          Bipartition42 bp{{a, b, c, d}, {0, 0}};
          int n = 0;
          for (int p = 0; p < 6; ++p)
            if (p != a && p != b && p != c && p != d) bp.chi[n++] = p;
          out.push_back(bp);
        }
  return out;
}

std::vector<Bipartition42> enumerate_bipartitions_4_2(const LadderWord& word) {
  return enumerate_bipartitions_4_2(static_cast<int>(word.size()));
}

cplx thermal_second_moment(const LadderOp& first, const LadderOp& second, const RVec& n_thermal) {
  if (first.mode != second.mode || first.kind == second.kind) return 0.0;
  const double n = n_thermal(first.mode);
  return first.kind == OpKind::Creation ? n : n + 1.0;
}

cplx thermal_moment(const LadderWord& word, const RVec& n_thermal) {
  if (word.empty()) return 1.0;
  if (word.size() % 2 != 0) return 0.0;
  check_modes(word, static_cast<int>(n_thermal.size()));
  cplx sum = 0.0;
  for (const auto& part : enumerate_pair_partitions(word)) {
    cplx prod = 1.0;
    for (const auto& [p, q] : part.pairs) prod *= thermal_second_moment(word[p], word[q], n_thermal);
    sum += prod;
  }
  return sum;
}

cplx gaussian_moment(const LadderWord& word, const MomentTable& t) {
  check_modes(word, t.modes);
  const auto n = word.size();
  const auto A = [&](int p) { return t.one(word[p]); };
  const auto O = [&](int p, int q) { return t.two(word[p], word[q]); };
  switch (n) {
    case 0: return 1.0;
    case 1: return A(0);
    case 2: return O(0, 1);
    case 3: return O(0, 1) * A(2) + O(0, 2) * A(1) + O(1, 2) * A(0) - 2.0 * A(0) * A(1) * A(2);
    case 4: {
      cplx s = 0.0;
      for (const auto& part : enumerate_pair_partitions(4))
        s += O(part.pairs[0].first, part.pairs[0].second) * O(part.pairs[1].first, part.pairs[1].second);
      return s - 2.0 * A(0) * A(1) * A(2) * A(3);
    }
    case 6: {
      cplx pairs = 0.0;
      for (const auto& part : enumerate_pair_partitions(6)) {
        cplx prod = 1.0;
        for (const auto& [p, q] : part.pairs) prod *= O(p, q);
        pairs += prod;
      }
      cplx mixed = 0.0;
      for (const auto& bp : enumerate_bipartitions_4_2(6))
        mixed += O(bp.chi[0], bp.chi[1]) * A(bp.psi[0]) * A(bp.psi[1]) * A(bp.psi[2]) * A(bp.psi[3]);
      cplx all = 1.0;
      for (int p = 0; p < 6; ++p) all *= A(p);
      return pairs - 2.0 * mixed + 16.0 * all;
    }
    default:
      throw Error(ErrorKind::UnsupportedOrder,
                  "gaussian_moment supports orders 1,2,3,4,6; got " + std::to_string(n));
  }
}

LadderWord adjoint_word(const LadderWord& word) {
  LadderWord out(word.rbegin(), word.rend());
  for (auto& op : out)
    op.kind = op.kind == OpKind::Creation ? OpKind::Annihilation : OpKind::Creation;
  return out;
}

} // namespace gausstat

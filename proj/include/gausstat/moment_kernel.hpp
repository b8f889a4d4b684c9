#pragma once

#include <array>
#include <utility>
#include <vector>

#include "gausstat/types.hpp"

namespace gausstat {

enum class OpKind { Annihilation, Creation };

struct LadderOp {
  int mode = 0;
  OpKind kind = OpKind::Annihilation;
};

using LadderWord = std::vector<LadderOp>;

inline LadderOp ann(int mode) { return {mode, OpKind::Annihilation}; }
inline LadderOp cre(int mode) { return {mode, OpKind::Creation}; }

// Pairs of word positions; first < second in each pair.
struct PairPartition {
  std::vector<std::pair<int, int>> pairs;
};

struct Bipartition42 {
  std::array<int, 4> psi;
  std::array<int, 2> chi;
};

// Raw first and second moments of b = (a_1..a_M, a_1^dag..a_M^dag).
struct MomentTable {
  int modes = 0;
  CVec first;  // 2M
  CMat second; // 2M x 2M, ordered: second(mu, nu) = <b_mu b_nu>

  static int index(const LadderOp& op, int modes) {
    return op.kind == OpKind::Creation ? op.mode + modes : op.mode;
  }
  cplx one(const LadderOp& op) const { return first(index(op, modes)); }
  cplx two(const LadderOp& x, const LadderOp& y) const {
    return second(index(x, modes), index(y, modes));
  }
};

std::vector<PairPartition> enumerate_pair_partitions(int length);
std::vector<PairPartition> enumerate_pair_partitions(const LadderWord& word);
std::vector<Bipartition42> enumerate_bipartitions_4_2(int length);
std::vector<Bipartition42> enumerate_bipartitions_4_2(const LadderWord& word);

cplx thermal_second_moment(const LadderOp& first, const LadderOp& second, const RVec& n_thermal);
cplx thermal_moment(const LadderWord& word, const RVec& n_thermal);

cplx gaussian_moment(const LadderWord& word, const MomentTable& table);

// Reverse the word and swap creation/annihilation (the adjoint operator product).
LadderWord adjoint_word(const LadderWord& word);

} // namespace gausstat

#pragma once

#include <utility>
#include <vector>

#include "capkm/rational.hpp"
#include "capkm/rng.hpp"

namespace capkm {

// Dependent rounding of a fractional vector v in [0,1]^n to {0,1}^n.
//
// The pair step moves probability mass between two fractional entries so
// that at least one of them becomes integral while E[v_i] stays put and the
// total sum is preserved exactly. A final singleton step rounds the at most
// one entry still fractional by an independent coin with its own value.
//
// Guarantees, all exact in rational arithmetic:
//   per step       v_i + v_j unchanged,
//   termination    at most one fractional entry before the singleton step,
//   marginals      P[final v_i = 1] == initial v_i,
//   correlation    P[v_i = 1 and v_j = 1] <= v_i * v_j for processed pairs.
//
// Schedules differ only in which two fractional entries get paired next.
enum class ScheduleKind {
  Sequential,  // lowest two fractional indices
  PairsFirst,  // given pairs first, then sequential over what is left
  GroupChains, // top two of each chain, then across chains in given order
};

struct Schedule {
  ScheduleKind kind = ScheduleKind::Sequential;
  std::vector<std::pair<int, int>> pairs;  // PairsFirst
  std::vector<std::vector<int>> chains;    // GroupChains, each chain top first
};

// One pair step. Both entries must be strictly fractional on entry; at least
// one is integral on exit.
void round_pair(Rat& vi, Rat& vj, Rng& rng);

// Runs the whole process and returns the resulting 0/1 vector.
std::vector<char> dependent_round(std::vector<Rat> v, const Schedule& sched, Rng& rng);

}  // namespace capkm

#include "capkm/depround.hpp"

#include <algorithm>
#include <stdexcept>

namespace capkm {

namespace {

bool fractional(const Rat& v) { return v > 0 && v < 1; }

void check_unit(const Rat& v) {
  if (v < 0 || v > 1) throw ValidationError("dependent rounding input outside [0,1]");
}

// Applies pair steps to (a, b) index pairs pulled from `next` until fewer
// than two fractional entries remain, then flips the last one on its own.
struct Process {
  std::vector<Rat>& v;
  Rng& rng;

  void step(int a, int b) {
    if (a == b) throw std::logic_error("dependent rounding paired an entry with itself");
    round_pair(v[a], v[b], rng);
  }

  void finish() {
    for (Rat& val : v) {
      if (!fractional(val)) continue;
      val = rng.bernoulli(val) ? Rat(1) : Rat(0);
      break;  // at most one fractional entry can remain
    }
    for (const Rat& val : v) {
      if (fractional(val))
        throw std::logic_error("dependent rounding left more than one fractional entry");
    }
  }
};

}  // namespace

void round_pair(Rat& vi, Rat& vj, Rng& rng) {
  if (!fractional(vi) || !fractional(vj))
    throw std::logic_error("pair step needs two strictly fractional entries");
  const Rat head_i = Rat(1) - vi;
  const Rat head_j = Rat(1) - vj;
  const Rat eps = std::min(head_i, vj);
  const Rat del = std::min(vi, head_j);
  // With probability delta/(eps+delta) raise vi and lower vj, otherwise the
  // reverse. Either branch makes at least one entry hit 0 or 1.
  if (rng.bernoulli(del / (eps + del))) {
    vi += eps;
    vj -= eps;
  } else {
    vi -= del;
    vj += del;
  }
  if (fractional(vi) && fractional(vj))
    throw std::logic_error("pair step failed to round an entry");
}

std::vector<char> dependent_round(std::vector<Rat> v, const Schedule& sched, Rng& rng) {
  const int n = static_cast<int>(v.size());
  for (const Rat& val : v) check_unit(val);
  Process p{v, rng};

  auto lowest_two = [&](int& a, int& b) {
    a = b = -1;
    for (int i = 0; i < n; ++i) {
      if (!fractional(v[i])) continue;
      if (a < 0) {
        a = i;
      } else {
        b = i;
        return true;
      }
    }
    return false;
  };

  switch (sched.kind) {
    case ScheduleKind::Sequential:
      break;
    case ScheduleKind::PairsFirst:
      for (auto [a, b] : sched.pairs) {
        if (a < 0 || a >= n || b < 0 || b >= n) throw ValidationError("pair index out of range");
        if (fractional(v[a]) && fractional(v[b])) p.step(a, b);
      }
      break;
    case ScheduleKind::GroupChains: {
      for (const auto& chain : sched.chains) {
        for (int i : chain)
          if (i < 0 || i >= n) throw ValidationError("chain index out of range");
      }
      // Within each chain pair the two topmost fractional entries until at
      // most one is left per chain.
      for (const auto& chain : sched.chains) {
        for (;;) {
          int a = -1, b = -1;
          for (int i : chain) {
            if (!fractional(v[i])) continue;
            if (a < 0) {
              a = i;
            } else {
              b = i;
              break;
            }
          }
          if (b < 0) break;
          p.step(a, b);
        }
      }
      // Across chains, survivors pair up in chain order.
      int carry = -1;
      for (const auto& chain : sched.chains) {
        for (int i : chain) {
          if (!fractional(v[i])) continue;
          if (carry < 0) {
            carry = i;
          } else {
            p.step(carry, i);
            if (fractional(v[carry])) {
              // carry stays fractional, keep it
            } else {
              carry = fractional(v[i]) ? i : -1;
            }
          }
        }
      }
      break;
    }
  }

  // Mop up whatever the schedule left fractional, lowest indices first.
  int a, b;
  while (lowest_two(a, b)) p.step(a, b);
  p.finish();

  std::vector<char> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = (v[i] == 1) ? 1 : 0;
  return out;
}

}  // namespace capkm

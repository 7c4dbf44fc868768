// Compares the OpenMP kernels against their serial reference paths and
// checks that both produce identical results. Two kernels are exercised:
// the simplex row elimination inside the CKFL LP solve and the subset
// enumeration inside the exact oracle.

#include <chrono>
#include <iomanip>
#include <iostream>
#include <string>

#include "capkm/instance.hpp"
#include "capkm/lp.hpp"
#include "capkm/oracle.hpp"
#include "capkm/rng.hpp"

using namespace capkm;

namespace {

double seconds(std::chrono::steady_clock::time_point t0) {
  const auto dt = std::chrono::steady_clock::now() - t0;
  return std::chrono::duration_cast<std::chrono::duration<double>>(dt).count();
}

void row(const std::string& label, double serial, double parallel, bool same) {
  std::cout << std::left << std::setw(24) << label << std::right << std::fixed
            << std::setprecision(4) << std::setw(10) << serial << std::setw(10) << parallel
            << std::setw(10) << (parallel > 0 ? serial / parallel : 0.0) << std::setw(10)
            << (same ? "ok" : "MISMATCH") << '\n';
}

Instance make_instance(int n, int m, long long k, std::uint64_t seed, bool uniform) {
  GenConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.k = k;
  // keep the k largest capacities able to cover all clients
  if (uniform) {
    cfg.cap_uniform = (n + k - 1) / k + 1;
  } else {
    cfg.cap_lo = 1;
    cfg.cap_hi = (2 * n) / k + 2;
  }
  Rng rng(seed);
  return generate_instance(cfg, rng);
}

}  // namespace

int main() {
  std::cout << std::left << std::setw(24) << "kernel" << std::right << std::setw(10) << "serial"
            << std::setw(10) << "openmp" << std::setw(10) << "speedup" << std::setw(10)
            << "match" << '\n';

  bool all_ok = true;

  const int lp_sizes[][2] = {{12, 5}, {20, 8}, {30, 12}};
  for (const auto& sz : lp_sizes) {
    const Instance inst = make_instance(sz[0], sz[1], 4, 7u * sz[0], false);
    SimplexOptions serial_opt;
    serial_opt.threads = 1;
    const auto t0 = std::chrono::steady_clock::now();
    const CkflLpResult a = solve_ckfl_lp(inst, serial_opt);
    const double ts = seconds(t0);
    SimplexOptions par_opt;
    par_opt.threads = 0;
    const auto t1 = std::chrono::steady_clock::now();
    const CkflLpResult b = solve_ckfl_lp(inst, par_opt);
    const double tp = seconds(t1);
    const bool same = a.feasible == b.feasible && a.sol.value == b.sol.value &&
                      a.sol.pivots == b.sol.pivots && a.sol.x == b.sol.x && a.sol.y == b.sol.y;
    all_ok = all_ok && same;
    row("simplex n=" + std::to_string(sz[0]) + " m=" + std::to_string(sz[1]), ts, tp, same);
  }

  const int oracle_sizes[][2] = {{8, 10}, {10, 14}, {12, 16}};
  for (const auto& sz : oracle_sizes) {
    const Instance inst = make_instance(sz[1], sz[0], 3, 11u * sz[0], true);
    OracleOptions serial_opt;
    serial_opt.parallel = false;
    const auto t0 = std::chrono::steady_clock::now();
    const ExactOptResult a = exact_opt(inst, Rat(1), serial_opt);
    const double ts = seconds(t0);
    OracleOptions par_opt;
    par_opt.parallel = true;
    const auto t1 = std::chrono::steady_clock::now();
    const ExactOptResult b = exact_opt(inst, Rat(1), par_opt);
    const double tp = seconds(t1);
    const bool same = a.feasible == b.feasible && a.cost == b.cost && a.open == b.open;
    all_ok = all_ok && same;
    row("oracle m=" + std::to_string(sz[0]) + " n=" + std::to_string(sz[1]), ts, tp, same);
  }

  if (!all_ok) {
    std::cerr << "parallel kernels disagree with the serial reference\n";
    return 1;
  }
  return 0;
}

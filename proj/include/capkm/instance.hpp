#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "capkm/rational.hpp"
#include "capkm/rng.hpp"

namespace capkm {

// Hard capacitated k-facility-location instance. Unit client demands.
// Point order for the distance matrix: clients 0..n-1, then facilities.
// Distances are exact rationals; for coordinate instances they are the
// Euclidean value rounded up onto the 2^-48 grid, which keeps the triangle
// inequality exact (see sqrt_ceil_grid).
struct Instance {
  int n = 0;  // clients
  int m = 0;  // facilities
  long long k = 0;

  std::vector<int> client_id;
  std::vector<int> fac_id;
  bool has_coords = false;
  std::vector<Rat> cx, cy;  // client coordinates (when has_coords)
  std::vector<Rat> fx, fy;  // facility coordinates
  std::vector<long long> cap;  // u_i >= 1
  std::vector<Rat> fcost;      // f_i >= 0

  std::vector<Rat> D;  // (n+m)^2 symmetric, row-major

  int points() const { return n + m; }
  const Rat& dist(int p, int q) const { return D[static_cast<size_t>(p) * points() + q]; }
  // facility i vs client j
  const Rat& dist_fc(int i, int j) const { return dist(n + i, j); }
  const Rat& dist_cc(int j, int j2) const { return dist(j, j2); }
  const Rat& dist_ff(int i, int i2) const { return dist(n + i, n + i2); }

  bool uniform_caps() const;
  bool zero_open_costs() const;
};

// Structural validation: shapes, unique ids, u >= 1, f >= 0, k >= 1, metric
// symmetric with zero diagonal and triangle inequality within 1e-9.
// Throws ValidationError.
void validate_instance(const Instance& inst);

// True iff the k largest capacities sum to at least n (exact feasibility
// condition for the relaxation at violation 1).
bool capacity_feasible(const Instance& inst);

Instance load_instance(std::istream& in);
Instance load_instance_file(const std::string& path);
void save_instance(const Instance& inst, std::ostream& out, bool matrix_format = false);
void save_instance_file(const Instance& inst, const std::string& path, bool matrix_format = false);

struct GenConfig {
  int n = 10;
  int m = 4;
  long long k = 2;
  long long cap_uniform = 0;         // > 0: all capacities equal this
  long long cap_lo = 1, cap_hi = 5;  // used when cap_uniform == 0
  Rat cost_lo = 0, cost_hi = 0;      // opening costs; zero when cost_hi == 0
  long grid = 1000000;               // coordinate grid denominator
};

// Random Euclidean instance on the unit square. Capacities are resampled
// until the k largest cover all clients, so the relaxation is feasible.
Instance generate_instance(const GenConfig& cfg, Rng& rng);

struct IntegralSolution {
  std::vector<int> open;            // facility indices, ascending
  std::vector<std::vector<Rat>> x;  // x[i][j] demand of client j on facility i
};

struct SolutionStats {
  Rat conn_cost = 0;
  Rat open_cost = 0;
  Rat total_cost = 0;
  Rat max_violation = 0;  // max_i (load_i / u_i)
  int open_count = 0;
  bool assignment_ok = false;  // conservation, nonnegativity, support in open
};

SolutionStats eval_solution(const Instance& inst, const IntegralSolution& sol);

}  // namespace capkm

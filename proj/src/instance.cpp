#include "capkm/instance.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace capkm {

namespace {

constexpr unsigned kDistGridBits = 48;

Rat sq_dist(const Rat& ax, const Rat& ay, const Rat& bx, const Rat& by) {
  Rat dx = ax - bx;
  Rat dy = ay - by;
  return dx * dx + dy * dy;
}

void build_distances(Instance& inst) {
  int P = inst.points();
  inst.D.assign(static_cast<size_t>(P) * P, Rat(0));
  auto px = [&](int p) -> const Rat& { return p < inst.n ? inst.cx[p] : inst.fx[p - inst.n]; };
  auto py = [&](int p) -> const Rat& { return p < inst.n ? inst.cy[p] : inst.fy[p - inst.n]; };
  for (int a = 0; a < P; ++a) {
    for (int b = a + 1; b < P; ++b) {
      Rat d = sqrt_ceil_grid(sq_dist(px(a), py(a), px(b), py(b)), kDistGridBits);
      inst.D[static_cast<size_t>(a) * P + b] = d;
      inst.D[static_cast<size_t>(b) * P + a] = d;
    }
  }
}

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

}  // namespace

bool Instance::uniform_caps() const {
  for (long long u : cap)
    if (u != cap[0]) return false;
  return true;
}

bool Instance::zero_open_costs() const {
  for (const Rat& f : fcost)
    if (f != 0) return false;
  return true;
}

void validate_instance(const Instance& inst) {
  if (inst.n < 1) fail("instance needs at least one client");
  if (inst.m < 1) fail("instance needs at least one facility");
  if (inst.k < 1) fail("k must be >= 1");
  if (static_cast<int>(inst.client_id.size()) != inst.n ||
      static_cast<int>(inst.fac_id.size()) != inst.m)
    fail("id vector size mismatch");
  if (static_cast<int>(inst.cap.size()) != inst.m ||
      static_cast<int>(inst.fcost.size()) != inst.m)
    fail("facility attribute size mismatch");
  {
    auto ids = inst.client_id;
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) fail("duplicate client id");
    ids = inst.fac_id;
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) fail("duplicate facility id");
  }
  for (int i = 0; i < inst.m; ++i) {
    if (inst.cap[i] < 1) fail("capacity must be >= 1 (facility " + std::to_string(inst.fac_id[i]) + ")");
    if (inst.fcost[i] < 0) fail("opening cost must be >= 0 (facility " + std::to_string(inst.fac_id[i]) + ")");
  }
  int P = inst.points();
  if (inst.D.size() != static_cast<size_t>(P) * P) fail("distance matrix size mismatch");
  for (int a = 0; a < P; ++a) {
    if (inst.dist(a, a) != 0) fail("nonzero metric diagonal");
    for (int b = 0; b < P; ++b) {
      if (inst.dist(a, b) < 0) fail("negative distance");
      if (inst.dist(a, b) != inst.dist(b, a)) fail("asymmetric distance matrix");
    }
  }
  const Rat tol(1, 1000000000);  // 1e-9, matrix-format inputs may carry rounding
  for (int a = 0; a < P; ++a)
    for (int b = 0; b < P; ++b)
      for (int c = 0; c < P; ++c)
        if (inst.dist(a, c) > inst.dist(a, b) + inst.dist(b, c) + tol)
          fail("triangle inequality violated beyond tolerance");
}

bool capacity_feasible(const Instance& inst) {
  std::vector<long long> caps = inst.cap;
  std::sort(caps.begin(), caps.end(), std::greater<>());
  long long total = 0;
  for (long long i = 0; i < std::min<long long>(inst.k, caps.size()); ++i) total += caps[i];
  return total >= inst.n;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> toks;
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

}  // namespace

Instance load_instance(std::istream& in) {
  Instance inst;
  std::string line;
  int lineno = 0;
  auto next_line = [&](std::vector<std::string>& toks) {
    while (std::getline(in, line)) {
      ++lineno;
      toks = tokenize(line);
      if (!toks.empty() && toks[0][0] != '#') return true;
    }
    return false;
  };
  std::vector<std::string> toks;
  if (!next_line(toks)) fail("empty instance file");
  bool matrix = false;
  if (toks[0] == "CKFL") {
    matrix = false;
  } else if (toks[0] == "CKFL-MATRIX") {
    matrix = true;
  } else {
    fail("expected CKFL or CKFL-MATRIX header, got '" + toks[0] + "'");
  }
  if (toks.size() != 4) fail("header needs: CKFL[-MATRIX] n_clients n_facilities k");
  inst.n = std::stoi(toks[1]);
  inst.m = std::stoi(toks[2]);
  inst.k = std::stoll(toks[3]);
  inst.has_coords = !matrix;
  for (int j = 0; j < inst.n; ++j) {
    if (!next_line(toks)) fail("unexpected end of file in client list");
    size_t want = matrix ? 2 : 4;
    if (toks[0] != "C" || toks.size() != want)
      fail("bad client line " + std::to_string(lineno) + ": " + line);
    inst.client_id.push_back(std::stoi(toks[1]));
    if (!matrix) {
      inst.cx.push_back(rat_from_decimal(toks[2]));
      inst.cy.push_back(rat_from_decimal(toks[3]));
    }
  }
  for (int i = 0; i < inst.m; ++i) {
    if (!next_line(toks)) fail("unexpected end of file in facility list");
    size_t want = matrix ? 4 : 6;
    if (toks[0] != "F" || toks.size() != want)
      fail("bad facility line " + std::to_string(lineno) + ": " + line);
    inst.fac_id.push_back(std::stoi(toks[1]));
    size_t at = 2;
    if (!matrix) {
      inst.fx.push_back(rat_from_decimal(toks[at++]));
      inst.fy.push_back(rat_from_decimal(toks[at++]));
    }
    inst.cap.push_back(std::stoll(toks[at++]));
    inst.fcost.push_back(rat_from_decimal(toks[at++]));
  }
  if (matrix) {
    if (!next_line(toks) || toks[0] != "D") fail("expected D section in matrix instance");
    int P = inst.points();
    inst.D.assign(static_cast<size_t>(P) * P, Rat(0));
    for (int a = 0; a < P; ++a) {
      if (!next_line(toks)) fail("unexpected end of file in distance matrix");
      if (static_cast<int>(toks.size()) != P)
        fail("distance row " + std::to_string(a) + " has " + std::to_string(toks.size()) +
             " entries, expected " + std::to_string(P));
      for (int b = 0; b < P; ++b)
        inst.D[static_cast<size_t>(a) * P + b] = rat_from_decimal(toks[b]);
    }
  } else {
    build_distances(inst);
  }
  validate_instance(inst);
  return inst;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open instance file: " + path);
  return load_instance(in);
}

void save_instance(const Instance& inst, std::ostream& out, bool matrix_format) {
  if (!matrix_format && !inst.has_coords)
    fail("cannot save coordinate format: instance has no coordinates");
  out << (matrix_format ? "CKFL-MATRIX " : "CKFL ") << inst.n << " " << inst.m << " " << inst.k
      << "\n";
  for (int j = 0; j < inst.n; ++j) {
    out << "C " << inst.client_id[j];
    if (!matrix_format) out << " " << rat_to_decimal(inst.cx[j], 6) << " " << rat_to_decimal(inst.cy[j], 6);
    out << "\n";
  }
  for (int i = 0; i < inst.m; ++i) {
    out << "F " << inst.fac_id[i];
    if (!matrix_format) out << " " << rat_to_decimal(inst.fx[i], 6) << " " << rat_to_decimal(inst.fy[i], 6);
    out << " " << inst.cap[i] << " " << rat_to_decimal(inst.fcost[i], 6) << "\n";
  }
  if (matrix_format) {
    out << "D\n";
    int P = inst.points();
    for (int a = 0; a < P; ++a) {
      for (int b = 0; b < P; ++b) {
        if (b) out << " ";
        // 48 fractional digits: exact for the generator's dyadic grid
        out << rat_to_decimal(inst.dist(a, b), 48);
      }
      out << "\n";
    }
  }
}

void save_instance_file(const Instance& inst, const std::string& path, bool matrix_format) {
  std::ofstream out(path);
  if (!out) fail("cannot open output file: " + path);
  save_instance(inst, out, matrix_format);
}

Instance generate_instance(const GenConfig& cfg, Rng& rng) {
  if (cfg.n < 1 || cfg.m < 1 || cfg.k < 1) fail("generator needs n, m, k >= 1");
  Instance inst;
  inst.n = cfg.n;
  inst.m = cfg.m;
  inst.k = std::min<long long>(cfg.k, cfg.m);
  inst.has_coords = true;
  auto coord = [&] { return Rat(int_ll(rng.uniform_int(0, cfg.grid)), int_ll(cfg.grid)); };
  for (int j = 0; j < cfg.n; ++j) {
    inst.client_id.push_back(j);
    Rat x = coord(), y = coord();
    x.canonicalize();
    y.canonicalize();
    inst.cx.push_back(x);
    inst.cy.push_back(y);
  }
  for (int i = 0; i < cfg.m; ++i) {
    inst.fac_id.push_back(i);
    Rat x = coord(), y = coord();
    x.canonicalize();
    y.canonicalize();
    inst.fx.push_back(x);
    inst.fy.push_back(y);
    if (cfg.cost_hi > 0) {
      // opening cost on the 1e-6 grid inside [lo, hi]
      Rat span = cfg.cost_hi - cfg.cost_lo;
      Rat f = cfg.cost_lo + span * Rat(int_ll(rng.uniform_int(0, cfg.grid)), int_ll(cfg.grid));
      f.canonicalize();
      inst.fcost.push_back(f);
    } else {
      inst.fcost.push_back(Rat(0));
    }
  }
  // capacities: resample until the k largest cover all clients
  for (int attempt = 0;; ++attempt) {
    if (attempt > 1000) fail("generator cannot satisfy capacity feasibility; raise capacities");
    inst.cap.clear();
    for (int i = 0; i < cfg.m; ++i) {
      long long u = cfg.cap_uniform > 0 ? cfg.cap_uniform : rng.uniform_int(cfg.cap_lo, cfg.cap_hi);
      inst.cap.push_back(u);
    }
    if (capacity_feasible(inst)) break;
  }
  build_distances(inst);
  validate_instance(inst);
  return inst;
}

SolutionStats eval_solution(const Instance& inst, const IntegralSolution& sol) {
  SolutionStats st;
  st.open_count = static_cast<int>(sol.open.size());
  std::vector<char> is_open(inst.m, 0);
  for (int i : sol.open) {
    st.open_cost += inst.fcost[i];
    is_open[i] = 1;
  }
  st.assignment_ok = static_cast<int>(sol.x.size()) == inst.m;
  std::vector<Rat> served(inst.n, Rat(0));
  for (int i = 0; i < inst.m && st.assignment_ok; ++i) {
    if (static_cast<int>(sol.x[i].size()) != inst.n) {
      st.assignment_ok = false;
      break;
    }
    Rat load(0);
    for (int j = 0; j < inst.n; ++j) {
      const Rat& v = sol.x[i][j];
      if (v < 0) st.assignment_ok = false;
      if (v > 0 && !is_open[i]) st.assignment_ok = false;
      served[j] += v;
      load += v;
      st.conn_cost += v * inst.dist_fc(i, j);
    }
    Rat viol = load / rat_ll(inst.cap[i]);
    if (viol > st.max_violation) st.max_violation = viol;
  }
  for (int j = 0; j < inst.n; ++j)
    if (served[j] != 1) st.assignment_ok = false;
  st.total_cost = st.conn_cost + st.open_cost;
  return st;
}

}  // namespace capkm

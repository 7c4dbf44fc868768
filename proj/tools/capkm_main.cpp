#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "capkm/ckm_nonuniform.hpp"
#include "capkm/instance.hpp"
#include "capkm/kfl_uniform.hpp"
#include "capkm/lp.hpp"
#include "capkm/report.hpp"
#include "capkm/rng.hpp"

namespace {

using namespace capkm;

std::uint64_t env_seed() {
  if (const char* env = std::getenv("CAPKM_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

long long elapsed_ms(std::chrono::steady_clock::time_point t0) {
  const auto dt = std::chrono::steady_clock::now() - t0;
  return std::chrono::duration_cast<std::chrono::milliseconds>(dt).count();
}

void split_range(const std::string& text, std::string& lo, std::string& hi) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("range must look like lo:hi");
  lo = text.substr(0, colon);
  hi = text.substr(colon + 1);
}

std::string canonical_bytes(const Instance& inst) {
  std::ostringstream ss;
  save_instance(inst, ss, !inst.has_coords);
  return ss.str();
}

void human_line(const std::string& key, const std::string& value) {
  std::cout << "  " << std::left << std::setw(16) << key << value << '\n';
}

struct GenerateArgs {
  GenConfig cfg;
  std::string nonuniform_cap;
  std::string open_cost;
  std::uint64_t seed = 0;
  bool matrix = false;
  std::string out;
};

int cmd_generate(GenerateArgs a) {
  if (!a.nonuniform_cap.empty()) {
    std::string lo, hi;
    split_range(a.nonuniform_cap, lo, hi);
    a.cfg.cap_uniform = 0;
    a.cfg.cap_lo = std::stoll(lo);
    a.cfg.cap_hi = std::stoll(hi);
  }
  if (!a.open_cost.empty()) {
    std::string lo, hi;
    split_range(a.open_cost, lo, hi);
    a.cfg.cost_lo = rat_from_decimal(lo);
    a.cfg.cost_hi = rat_from_decimal(hi);
  }
  Rng rng(a.seed);
  const Instance inst = generate_instance(a.cfg, rng);
  save_instance_file(inst, a.out, a.matrix);
  std::cout << "wrote " << a.out << " (clients=" << inst.n << " facilities=" << inst.m
            << " k=" << inst.k << ")\n";
  return 0;
}

struct SolveArgs {
  std::string path;
  std::string alg = "nonuniform3e";
  std::string eps = "0.5";
  int ell = 2;
  std::uint64_t seed = 0;
  std::string report_path;
  std::string json_path;
  std::string lp_dump;
};

int cmd_solve(const SolveArgs& a) {
  const Instance inst = load_instance_file(a.path);
  const auto t0 = std::chrono::steady_clock::now();

  RunReport rep;
  rep.add("algorithm", a.alg);
  rep.add("instance", a.path);
  rep.add("digest", instance_digest(canonical_bytes(inst)));
  rep.add("clients", static_cast<long long>(inst.n));
  rep.add("facilities", static_cast<long long>(inst.m));
  rep.add("k", inst.k);
  rep.add("seed", std::to_string(a.seed));
  rep.add("ell", static_cast<long long>(a.ell));

  if (!a.lp_dump.empty()) {
    std::ofstream out(a.lp_dump);
    if (!out) throw ValidationError("cannot write " + a.lp_dump);
    dump_ckfl_lp(inst, out);
  }

  Rat lp_value, gamma, cost_bound, witness, final_cost, violation;
  long long open_count = 0;
  bool audit_ok = true;
  std::string audit_error;

  try {
    if (a.alg == "nonuniform3e") {
      const Rat eps = rat_from_decimal(a.eps);
      rep.add("epsilon", eps);
      const NonuniformResult r = solve_ckm_nonuniform(inst, eps, a.ell);
      rep.add("lp_value", r.lp_value);
      rep.add("lp_pivots", static_cast<long long>(r.lp_pivots));
      rep.add("centers", static_cast<long long>(r.centers));
      rep.add("cost_transport", r.transport_cost);
      rep.add("cost_consolidate", r.consolidate_cost);
      rep.add("cost_snap", r.snap_cost);
      rep.add("cost_round", r.round_cost);
      rep.add("cost_flow", r.flow_cost);
      rep.add("witness_cost", r.witness_cost);
      rep.add("cost_bound_stated", r.cost_bound_stated);
      lp_value = r.lp_value;
      gamma = r.gamma;
      cost_bound = r.cost_bound;
      witness = r.witness_cost;
      final_cost = r.stats.total_cost;
      violation = r.stats.max_violation;
      open_count = r.stats.open_count;
    } else if (a.alg == "match6" || a.alg == "group2e") {
      const UniformResult r = a.alg == "match6"
                                  ? solve_kfl_match6(inst, a.seed)
                                  : solve_kfl_group(inst, a.ell, a.seed);
      rep.add("lp_value", r.lp_value);
      rep.add("lp_pivots", r.lp_pivots);
      rep.add("centers", static_cast<long long>(r.centers));
      rep.add("trees", static_cast<long long>(r.trees));
      if (a.alg == "match6")
        rep.add("matched_pairs", static_cast<long long>(r.matched_pairs));
      else
        rep.add("groups", static_cast<long long>(r.groups));
      rep.add("diag_budget", static_cast<long long>(r.budget_diag));
      rep.add("diag_reroute", static_cast<long long>(r.reroute_diag));
      rep.add("cost_transport", r.transport_cost);
      rep.add("cost_routing", r.routing_cost);
      rep.add("cost_flow", r.flow_cost);
      rep.add("witness_cost", r.witness_cost);
      lp_value = r.lp_value;
      gamma = r.gamma;
      cost_bound = r.cost_bound;
      witness = r.witness_cost;
      final_cost = r.stats.total_cost;
      violation = r.stats.max_violation;
      open_count = r.stats.open_count;
    } else {
      throw ValidationError("unknown algorithm " + a.alg);
    }
  } catch (const std::logic_error& e) {
    audit_ok = false;
    audit_error = e.what();
  }

  int rc = 0;
  if (audit_ok) {
    const bool v_cost = final_cost <= cost_bound;
    const bool v_violation = violation <= gamma;
    const bool v_open = open_count <= inst.k;
    const bool v_witness = witness <= cost_bound;
    rep.add("gamma", gamma);
    rep.add("cost_bound", cost_bound);
    rep.add("final_cost", final_cost);
    Rat ratio = 0;
    if (lp_value > 0) ratio = final_cost / lp_value;
    rep.add_decimal("cost_ratio", ratio);
    rep.add("max_violation", violation);
    rep.add_decimal("max_violation_dec", violation, 4);
    rep.add("open_count", open_count);
    rep.verdict("bound_cost", v_cost);
    rep.verdict("bound_violation", v_violation);
    rep.verdict("bound_open", v_open);
    rep.verdict("bound_witness", v_witness);
    if (!(v_cost && v_violation && v_open && v_witness)) rc = 1;
  } else {
    rep.verdict("audit", false);
    rep.add("audit_error", audit_error);
    rc = 1;
  }
  rep.add("time_total_ms", elapsed_ms(t0));

  std::cout << "capkm solve\n";
  human_line("algorithm", a.alg);
  human_line("instance", a.path);
  if (audit_ok) {
    human_line("lp value", rat_to_decimal(lp_value, 6));
    human_line("final cost", rat_to_decimal(final_cost, 6));
    human_line("violation", rat_to_decimal(violation, 4) + "  (bound " +
                                rat_to_decimal(gamma, 4) + ")");
    human_line("open", std::to_string(open_count) + " of k=" + std::to_string(inst.k));
  } else {
    human_line("audit", "failed: " + audit_error);
  }
  human_line("status", rc == 0 ? "pass" : "fail");

  if (!a.report_path.empty()) {
    std::ofstream out(a.report_path);
    if (!out) throw ValidationError("cannot write " + a.report_path);
    out << rep.text();
  }
  if (!a.json_path.empty()) {
    std::ofstream out(a.json_path);
    if (!out) throw ValidationError("cannot write " + a.json_path);
    out << rep.json();
  }
  if (a.report_path.empty() && a.json_path.empty()) {
    std::cout << "-- report --\n" << rep.text();
  }
  return rc;
}

struct BenchArgs {
  std::string alg = "match6";
  std::string sizes = "12:5:3,20:8:4";
  std::string eps_list = "0.5";
  std::string ell_list = "2";
  int count = 3;
  int seeds = 2;
  long long uniform_cap = 4;
  std::string cap_range = "1:5";
  std::uint64_t seed = 0;
};

struct BenchCell {
  int n = 0, m = 0;
  long long k = 0;
  std::string param;  // eps or ell rendering, empty for match6
  Rat eps;
  int ell = 2;
};

struct BenchRun {
  int cell = 0;
  std::uint64_t gen_seed = 0;
  std::uint64_t solve_seed = 0;
};

struct BenchOutcome {
  bool ok = false;
  Rat violation, ratio;
  std::string error;
};

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

int cmd_bench(const BenchArgs& a) {
  std::vector<BenchCell> cells;
  for (const std::string& size : split_list(a.sizes, ',')) {
    const auto parts = split_list(size, ':');
    if (parts.size() != 3) throw ValidationError("size cell must look like n:m:k");
    BenchCell base;
    base.n = std::stoi(parts[0]);
    base.m = std::stoi(parts[1]);
    base.k = std::stoll(parts[2]);
    if (a.alg == "nonuniform3e") {
      for (const std::string& e : split_list(a.eps_list, ',')) {
        BenchCell c = base;
        c.eps = rat_from_decimal(e);
        c.param = "eps=" + e;
        cells.push_back(c);
      }
    } else if (a.alg == "group2e") {
      for (const std::string& l : split_list(a.ell_list, ',')) {
        BenchCell c = base;
        c.ell = std::stoi(l);
        c.param = "ell=" + l;
        cells.push_back(c);
      }
    } else if (a.alg == "match6") {
      cells.push_back(base);
    } else {
      throw ValidationError("unknown algorithm " + a.alg);
    }
  }

  std::vector<BenchRun> runs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const int per_instance = a.alg == "nonuniform3e" ? 1 : a.seeds;
    for (int i = 0; i < a.count; ++i)
      for (int s = 0; s < per_instance; ++s)
        runs.push_back({static_cast<int>(c),
                        a.seed + 1000003ull * c + 101ull * static_cast<unsigned>(i),
                        a.seed + 7919ull * c + 13ull * static_cast<unsigned>(i) +
                            static_cast<unsigned>(s)});
  }

  long long cap_lo = 1, cap_hi = 5;
  {
    std::string lo, hi;
    split_range(a.cap_range, lo, hi);
    cap_lo = std::stoll(lo);
    cap_hi = std::stoll(hi);
  }

  std::vector<BenchOutcome> out(runs.size());
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < static_cast<int>(runs.size()); ++r) {
    const BenchCell& cell = cells[runs[r].cell];
    BenchOutcome& o = out[r];
    try {
      GenConfig cfg;
      cfg.n = cell.n;
      cfg.m = cell.m;
      cfg.k = cell.k;
      if (a.alg == "nonuniform3e") {
        cfg.cap_lo = cap_lo;
        cfg.cap_hi = cap_hi;
      } else {
        cfg.cap_uniform = a.uniform_cap;
      }
      Rng rng(runs[r].gen_seed);
      const Instance inst = generate_instance(cfg, rng);
      Rat lp, cost, violation;
      if (a.alg == "nonuniform3e") {
        const NonuniformResult res = solve_ckm_nonuniform(inst, cell.eps, cell.ell);
        lp = res.lp_value;
        cost = res.stats.total_cost;
        violation = res.stats.max_violation;
      } else if (a.alg == "match6") {
        const UniformResult res = solve_kfl_match6(inst, runs[r].solve_seed);
        lp = res.lp_value;
        cost = res.stats.total_cost;
        violation = res.stats.max_violation;
      } else {
        const UniformResult res = solve_kfl_group(inst, cell.ell, runs[r].solve_seed);
        lp = res.lp_value;
        cost = res.stats.total_cost;
        violation = res.stats.max_violation;
      }
      o.ok = true;
      o.violation = violation;
      o.ratio = lp > 0 ? Rat(cost / lp) : Rat(0);
    } catch (const std::exception& e) {
      o.ok = false;
      o.error = e.what();
    }
  }

  std::cout << std::left << std::setw(26) << "cell" << std::setw(6) << "runs" << std::setw(12)
            << "max_viol" << std::setw(12) << "mean_viol" << std::setw(12) << "max_ratio"
            << std::setw(12) << "mean_ratio" << std::setw(12) << "viol_bound"
            << "verdict\n";
  int rc = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const BenchCell& cell = cells[c];
    Rat max_v = 0, sum_v = 0, max_r = 0, sum_r = 0;
    int cnt = 0;
    bool errors = false;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      if (runs[r].cell != static_cast<int>(c)) continue;
      if (!out[r].ok) {
        errors = true;
        std::cerr << "run failed: " << out[r].error << '\n';
        continue;
      }
      ++cnt;
      if (out[r].violation > max_v) max_v = out[r].violation;
      if (out[r].ratio > max_r) max_r = out[r].ratio;
      sum_v += out[r].violation;
      sum_r += out[r].ratio;
    }
    Rat gamma;
    if (a.alg == "nonuniform3e")
      gamma = Rat(3) + Rat(3) * cell.eps;
    else if (a.alg == "match6")
      gamma = 6;
    else
      gamma = Rat(2) + rat_frac(3, cell.ell - 1);
    const bool pass = !errors && cnt > 0 && max_v <= gamma;
    if (!pass) rc = 1;
    std::ostringstream name;
    name << "n" << cell.n << "_m" << cell.m << "_k" << cell.k;
    if (!cell.param.empty()) name << "_" << cell.param;
    const Rat mean_v = cnt > 0 ? Rat(sum_v / cnt) : Rat(0);
    const Rat mean_r = cnt > 0 ? Rat(sum_r / cnt) : Rat(0);
    std::cout << std::left << std::setw(26) << name.str() << std::setw(6) << cnt << std::setw(12)
              << rat_to_decimal(max_v, 4) << std::setw(12) << rat_to_decimal(mean_v, 4)
              << std::setw(12) << rat_to_decimal(max_r, 4) << std::setw(12)
              << rat_to_decimal(mean_r, 4) << std::setw(12) << rat_to_decimal(gamma, 4)
              << (pass ? "pass" : "fail") << '\n';
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bi-factor LP rounding for hard capacitated k-median / k-facility location"};
  app.require_subcommand(1);

  GenerateArgs gen;
  gen.seed = env_seed();
  CLI::App* cgen = app.add_subcommand("generate", "write a random instance");
  cgen->add_option("--clients", gen.cfg.n, "number of clients");
  cgen->add_option("--facilities", gen.cfg.m, "number of facilities");
  cgen->add_option("--k", gen.cfg.k, "facility budget");
  cgen->add_option("--uniform-cap", gen.cfg.cap_uniform, "uniform capacity (0: sample a range)");
  cgen->add_option("--nonuniform-cap", gen.nonuniform_cap, "capacity range lo:hi");
  cgen->add_option("--open-cost", gen.open_cost, "opening cost range lo:hi (decimals)");
  cgen->add_option("--grid", gen.cfg.grid, "coordinate grid denominator");
  cgen->add_option("--seed", gen.seed, "generator seed (default CAPKM_SEED or 0)");
  cgen->add_flag("--matrix", gen.matrix, "write the explicit distance matrix format");
  cgen->add_option("out", gen.out, "output path")->required();

  SolveArgs sol;
  sol.seed = env_seed();
  CLI::App* csol = app.add_subcommand("solve", "run one rounding pipeline");
  csol->add_option("instance", sol.path, "instance file")->required();
  csol->add_option("--alg", sol.alg, "nonuniform3e | match6 | group2e");
  csol->add_option("--eps", sol.eps, "epsilon for nonuniform3e (decimal)");
  csol->add_option("--ell", sol.ell, "bundling parameter, at least 2");
  csol->add_option("--seed", sol.seed, "rounding seed (default CAPKM_SEED or 0)");
  csol->add_option("--report", sol.report_path, "write the key=value report here");
  csol->add_option("--json", sol.json_path, "write the JSON sidecar here");
  csol->add_option("--lp-dump", sol.lp_dump, "write the LP in LP format before solving");

  BenchArgs ben;
  ben.seed = env_seed();
  CLI::App* cben = app.add_subcommand("bench", "Monte-Carlo sweep over a size grid");
  cben->add_option("--alg", ben.alg, "nonuniform3e | match6 | group2e");
  cben->add_option("--sizes", ben.sizes, "comma list of n:m:k cells");
  cben->add_option("--eps", ben.eps_list, "comma list of epsilons (nonuniform3e)");
  cben->add_option("--ell", ben.ell_list, "comma list of ells (group2e)");
  cben->add_option("--count", ben.count, "instances per cell");
  cben->add_option("--seeds", ben.seeds, "rounding seeds per instance");
  cben->add_option("--uniform-cap", ben.uniform_cap, "capacity for the uniform algorithms");
  cben->add_option("--cap-range", ben.cap_range, "capacity range lo:hi (nonuniform3e)");
  cben->add_option("--seed", ben.seed, "base seed (default CAPKM_SEED or 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cgen->parsed()) return cmd_generate(gen);
    if (csol->parsed()) return cmd_solve(sol);
    if (cben->parsed()) return cmd_bench(ben);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "audit failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

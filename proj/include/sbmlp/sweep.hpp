#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "sbmlp/rng.hpp"

namespace sbmlp::harness {

// Experiment sweep: a cross product of (m, d, s, C) cells for one of the
// construction kinds. Every cell runs on a derived stream that is a pure
// function of (master seed, cell index); failures become status rows, never
// aborts. results.csv is byte-reproducible per master seed; wall-clock goes
// to the timings.csv sidecar.
struct SweepConfig {
    std::string kind = "uand-basis";
    // uand-basis | uand-superposed | uand-highfanin | uand-random |
    // error-correction | norm-balancer
    std::vector<std::size_t> m_grid = {256};
    std::vector<std::size_t> d_grid = {1024};
    std::vector<std::size_t> s_grid = {3};
    std::vector<double> c_grid = {1.0};
    std::size_t fanin = 3;     // uand-highfanin
    std::size_t pairs = 100;   // targeted pairs/tuples per cell
    std::size_t samples = 500; // per pair (targeted) or per cell (monte carlo)
    std::string mode = "targeted"; // targeted | monte-carlo | exhaustive
    std::uint64_t master_seed = 0;
    std::size_t threads = 1;
    double noise_eps = 0.03125; // error-correction
    double threshold_k = 1.0;   // error-correction precondition constant K
    std::size_t trials = 200;   // error-correction / norm-balancer / uand-random
    double s0 = 64.0;           // norm-balancer

    std::string to_json() const;
    static SweepConfig from_json(const std::string& text);
};

inline const char* kSweepCsvHeader =
    "schema,kind,cell,m,d,s,n,C,mode,pairs,samples,cell_seed,status,"
    "eps_max,eps_mean,eps_p50,eps_p90,eps_p99,eps_p100,"
    "case11_mean,case10_mean,case00_mean,readoff_std,"
    "lb_violations,empty_index_sets,collisions,"
    "median_eps_in,median_eps_out,ec_floor,norm_dev_max,mean_perturbation";

struct SweepRow {
    std::string csv_line; // pre-rendered, deterministic
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<double> wallclock_ms; // per cell, not reproducible
    std::string csv_body() const;     // header + rows
};

SweepResult run_sweep(const SweepConfig& cfg);
// Replays a single cell in isolation; its row is byte-identical to the same
// cell of the full sweep (cell streams depend only on master seed + index).
SweepResult run_sweep_cell(const SweepConfig& cfg, std::size_t cell_index);
// Writes <out_dir>/results.csv and <out_dir>/timings.csv.
void write_sweep(const SweepResult& result, const std::string& out_dir);

} // namespace sbmlp::harness

#include "sbmlp/sweep.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sbmlp/dictionary.hpp"
#include "sbmlp/error_correction.hpp"
#include "sbmlp/kernels.hpp"
#include "sbmlp/norm_balancer.hpp"
#include "sbmlp/random_uand.hpp"
#include "sbmlp/samplers.hpp"
#include "sbmlp/sbmat.hpp"
#include "sbmlp/thread_pool.hpp"
#include "sbmlp/uand.hpp"

namespace sbmlp::harness {

std::string SweepConfig::to_json() const {
    nlohmann::json j;
    j["kind"] = kind;
    j["m_grid"] = m_grid;
    j["d_grid"] = d_grid;
    j["s_grid"] = s_grid;
    j["c_grid"] = c_grid;
    j["fanin"] = fanin;
    j["pairs"] = pairs;
    j["samples"] = samples;
    j["mode"] = mode;
    j["master_seed"] = master_seed;
    j["threads"] = threads;
    j["noise_eps"] = noise_eps;
    j["threshold_k"] = threshold_k;
    j["trials"] = trials;
    j["s0"] = s0;
    return j.dump(2);
}

SweepConfig SweepConfig::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SweepConfig c;
    c.kind = j.value("kind", c.kind);
    if (j.contains("m_grid")) c.m_grid = j["m_grid"].get<std::vector<std::size_t>>();
    if (j.contains("d_grid")) c.d_grid = j["d_grid"].get<std::vector<std::size_t>>();
    if (j.contains("s_grid")) c.s_grid = j["s_grid"].get<std::vector<std::size_t>>();
    if (j.contains("c_grid")) c.c_grid = j["c_grid"].get<std::vector<double>>();
    c.fanin = j.value("fanin", c.fanin);
    c.pairs = j.value("pairs", c.pairs);
    c.samples = j.value("samples", c.samples);
    c.mode = j.value("mode", c.mode);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.threads = j.value("threads", c.threads);
    c.noise_eps = j.value("noise_eps", c.noise_eps);
    c.threshold_k = j.value("threshold_k", c.threshold_k);
    c.trials = j.value("trials", c.trials);
    c.s0 = j.value("s0", c.s0);
    return c;
}

namespace {

struct CellParams {
    std::size_t index, m, d, s;
    double c;
};

struct CellStats {
    std::string status = "ok";
    // eps distribution over the cell's error observations
    bool has_eps = false;
    double eps_max = 0, eps_mean = 0, p50 = 0, p90 = 0, p99 = 0, p100 = 0;
    bool has_cases = false;
    double case11 = 0, case10 = 0, case00 = 0;
    bool has_std = false;
    double readoff_std = 0;
    long long lb_violations = -1, empty_sets = -1, collisions = -1;
    bool has_ec = false;
    double median_in = 0, median_out = 0, ec_floor = 0;
    bool has_balancer = false;
    double norm_dev_max = 0, mean_pert = 0;
};

void fill_eps(CellStats& st, std::vector<double>& errors) {
    if (errors.empty()) return;
    st.has_eps = true;
    std::sort(errors.begin(), errors.end());
    auto pct = [&](double q) {
        return errors[static_cast<std::size_t>(q * static_cast<double>(errors.size() - 1))];
    };
    st.eps_max = errors.back();
    double sum = 0;
    for (double e : errors) sum += e;
    st.eps_mean = sum / static_cast<double>(errors.size());
    st.p50 = pct(0.50);
    st.p90 = pct(0.90);
    st.p99 = pct(0.99);
    st.p100 = errors.back();
}

CellStats run_uand_basis_cell(const SweepConfig& cfg, const CellParams& cell,
                              core::RngStream cell_rng) {
    CellStats st;
    core::RngStream build_rng = cell_rng.derive(0);
    auto net = uand::build_uand_basis(cell.m, cell.d, cell.s, cell.c, build_rng);

    core::RngStream pair_rng = cell_rng.derive(1);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::size_t i = 0; i < cfg.pairs; ++i) {
        auto k1 = static_cast<std::uint32_t>(pair_rng.next_below(cell.m));
        auto k2 = static_cast<std::uint32_t>((k1 + 1 + pair_rng.next_below(cell.m - 1)) % cell.m);
        pairs.push_back({std::min(k1, k2), std::max(k1, k2)});
    }

    if (cfg.mode == "targeted") {
        core::RngStream ver_rng = cell_rng.derive(2);
        auto stats = uand::verify_uand_targeted(net, pairs, cell.s, cfg.samples, ver_rng);
        st.has_eps = true;
        st.eps_max = stats.eps_on.global_eps;
        st.eps_mean = stats.eps_on.mean_error;
        st.p50 = stats.eps_on.p50;
        st.p90 = stats.eps_on.p90;
        st.p99 = stats.eps_on.p99;
        st.p100 = stats.eps_on.p100;
        st.has_cases = true;
        st.case11 = stats.mean_err_on;
        st.case10 = stats.mean_err_half;
        st.case00 = stats.mean_err_off;
        st.lb_violations = static_cast<long long>(stats.lower_bound_violations);
        st.empty_sets = static_cast<long long>(stats.empty_pairs);
    } else {
        // monte-carlo / exhaustive: evaluate full activations, read every pair
        core::RngStream sample_rng = cell_rng.derive(2);
        auto mode = cfg.mode == "exhaustive" ? features::SamplingMode::Exhaustive
                                             : features::SamplingMode::MonteCarlo;
        auto inputs = sample_sparse_inputs(cell.m, cell.s, cfg.samples, mode, sample_rng);
        std::vector<double> errors;
        long long lb = 0, empty = 0;
        for (const auto& b : inputs) {
            auto act = net.eval(b);
            for (auto [k1, k2] : pairs) {
                auto r = net.readoff_vector({k1, k2});
                if (!r) {
                    ++empty;
                    continue;
                }
                double truth = (b.get(k1) && b.get(k2)) ? 1.0 : 0.0;
                double v = r->apply(act);
                if (v < truth) ++lb;
                errors.push_back(std::abs(v - truth));
            }
        }
        fill_eps(st, errors);
        st.lb_violations = lb;
        st.empty_sets = empty;
    }
    return st;
}

CellStats run_uand_superposed_cell(const SweepConfig& cfg, const CellParams& cell,
                                   core::RngStream cell_rng) {
    CellStats st;
    core::RngStream dict_rng = cell_rng.derive(0);
    auto dict = features::random_unit_dictionary(cell.m, cell.d, dict_rng);
    core::RngStream build_rng = cell_rng.derive(1);
    auto sup = uand::build_uand_superposed(dict, cell.d, cell.s, cell.c, build_rng);

    core::RngStream pair_rng = cell_rng.derive(2);
    core::RngStream sample_rng = cell_rng.derive(3);
    std::vector<double> errors;
    long long lb = 0, empty = 0;
    for (std::size_t pi = 0; pi < cfg.pairs; ++pi) {
        auto k1 = static_cast<std::uint32_t>(pair_rng.next_below(cell.m));
        auto k2 = static_cast<std::uint32_t>((k1 + 1 + pair_rng.next_below(cell.m - 1)) % cell.m);
        uand::Tuple t{std::min(k1, k2), std::max(k1, k2)};
        if (sup.basis.gamma(t).empty()) {
            ++empty;
            continue;
        }
        auto inputs = sample_sparse_inputs(cell.m, cell.s, cfg.samples,
                                           features::SamplingMode::TargetedPair, sample_rng,
                                           std::pair<std::uint32_t, std::uint32_t>{t[0], t[1]});
        for (const auto& b : inputs) {
            auto act = sup.eval(features::encode(dict, b));
            double v = uand::readoff_tuple(sup.basis, act, t);
            if (v < 1.0) ++lb; // both features forced on
            errors.push_back(std::abs(v - 1.0));
        }
    }
    fill_eps(st, errors);
    st.lb_violations = lb;
    st.empty_sets = empty;
    return st;
}

CellStats run_uand_highfanin_cell(const SweepConfig& cfg, const CellParams& cell,
                                  core::RngStream cell_rng) {
    CellStats st;
    const auto n = static_cast<std::uint32_t>(cfg.fanin);
    core::RngStream build_rng = cell_rng.derive(0);
    auto net = uand::build_uand_highfanin(cell.m, cell.d, cell.s, n, cell.c, build_rng);

    core::RngStream tuple_rng = cell_rng.derive(1);
    core::RngStream sample_rng = cell_rng.derive(2);
    std::vector<double> errors;
    double on_sum = 0, off_sum = 0, gamma_sum = 0;
    std::size_t on_n = 0, off_n = 0;
    long long empty = 0, lb = 0;
    for (std::size_t t = 0; t < cfg.pairs; ++t) {
        uand::Tuple tuple;
        while (tuple.size() < n) {
            auto k = static_cast<std::uint32_t>(tuple_rng.next_below(cell.m));
            if (std::find(tuple.begin(), tuple.end(), k) == tuple.end()) tuple.push_back(k);
        }
        std::sort(tuple.begin(), tuple.end());
        const auto& g = net.gamma(tuple);
        gamma_sum += static_cast<double>(g.size());
        if (g.empty()) {
            ++empty;
            continue;
        }
        // exact tuple on (s = n case exercises the zero-interference path)
        features::BooleanVector exact(cell.m, tuple);
        auto act = net.eval(exact);
        double v_on = uand::readoff_tuple(net, act, tuple);
        if (v_on < 1.0) ++lb;
        errors.push_back(std::abs(v_on - 1.0));
        on_sum += v_on;
        ++on_n;
        // random non-tuple inputs
        for (std::size_t i = 0; i < cfg.samples; ++i) {
            auto b = random_support(cell.m, cell.s, sample_rng);
            bool all = true;
            for (auto k : tuple)
                if (!b.get(k)) {
                    all = false;
                    break;
                }
            if (all) continue;
            auto a = net.eval(b);
            double v = uand::readoff_tuple(net, a, tuple);
            if (v < 0.0) ++lb;
            errors.push_back(std::abs(v));
            off_sum += v;
            ++off_n;
        }
    }
    fill_eps(st, errors);
    st.has_cases = true;
    st.case11 = on_n ? on_sum / static_cast<double>(on_n) : 0.0;
    st.case00 = off_n ? off_sum / static_cast<double>(off_n) : 0.0;
    st.case10 = gamma_sum / static_cast<double>(cfg.pairs); // realized mean |Gamma(tuple)|
    st.lb_violations = lb;
    st.empty_sets = empty;
    return st;
}

CellStats run_uand_random_cell(const SweepConfig& cfg, const CellParams& cell,
                               core::RngStream cell_rng) {
    CellStats st;
    core::RngStream w_rng = cell_rng.derive(0);
    auto w = core::sample_gaussian_matrix(cell.d, cell.m, 1.0, w_rng);
    core::RngStream cal_rng = cell_rng.derive(1);
    auto cal = uand::calibrate_eta(w, cell.s, 1.0, std::max<std::size_t>(cfg.samples, 200'000),
                                   cal_rng);

    core::RngStream pair_rng = cell_rng.derive(2);
    core::RngStream sample_rng = cell_rng.derive(3);
    std::vector<double> errors;
    std::vector<double> on_values;
    double on_sum = 0, half_sum = 0, off_sum = 0;
    std::size_t half_n = 0, off_n = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        auto k1 = static_cast<std::uint32_t>(pair_rng.next_below(cell.m));
        auto k2 = static_cast<std::uint32_t>((k1 + 1 + pair_rng.next_below(cell.m - 1)) % cell.m);
        auto r = uand::random_mlp_readoff(w, k1, k2, cal);
        auto read = [&](const features::BooleanVector& b) {
            auto act = uand::random_mlp_eval(w, b);
            return kernels::dot(r.data(), act.data(), act.size());
        };
        // (1,1)
        std::vector<std::uint32_t> idx = {k1, k2};
        while (idx.size() < cell.s) {
            auto k = static_cast<std::uint32_t>(sample_rng.next_below(cell.m));
            if (k != k1 && k != k2 && std::find(idx.begin(), idx.end(), k) == idx.end())
                idx.push_back(k);
        }
        double v_on = read(features::BooleanVector(cell.m, idx));
        on_values.push_back(v_on);
        on_sum += v_on;
        errors.push_back(std::abs(v_on - 1.0));
        // (0, .): k1 off
        std::vector<std::uint32_t> off;
        while (off.size() < cell.s) {
            auto k = static_cast<std::uint32_t>(sample_rng.next_below(cell.m));
            if (k != k1 && std::find(off.begin(), off.end(), k) == off.end()) off.push_back(k);
        }
        double v_off = read(features::BooleanVector(cell.m, off));
        (std::find(off.begin(), off.end(), k2) != off.end() ? half_sum : off_sum) += v_off;
        (std::find(off.begin(), off.end(), k2) != off.end() ? half_n : off_n) += 1;
        errors.push_back(std::abs(v_off));
    }
    fill_eps(st, errors);
    st.has_cases = true;
    st.case11 = on_sum / static_cast<double>(cfg.trials);
    st.case10 = half_n ? half_sum / static_cast<double>(half_n) : 0.0;
    st.case00 = off_n ? off_sum / static_cast<double>(off_n) : 0.0;
    double mean = st.case11;
    double var = 0;
    for (double v : on_values) var += (v - mean) * (v - mean);
    st.has_std = true;
    st.readoff_std = on_values.size() > 1
                         ? std::sqrt(var / static_cast<double>(on_values.size() - 1))
                         : 0.0;
    return st;
}

CellStats run_ec_cell(const SweepConfig& cfg, const CellParams& cell, core::RngStream cell_rng) {
    CellStats st;
    core::RngStream dict_rng = cell_rng.derive(0);
    auto dict = features::random_unit_dictionary(cell.m, cell.d, dict_rng);
    core::RngStream ec_rng = cell_rng.derive(1);
    auto ec = ecc::build_error_correction(cell.m, cell.d, cell.s,
                                          features::ReadoffMatrix{dict.phi_t(), std::nullopt},
                                          ec_rng, cfg.threshold_k);
    core::RngStream b_rng = cell_rng.derive(2);
    auto b = random_support(cell.m, cell.s, b_rng);
    core::RngStream trial_rng = cell_rng.derive(3);
    auto res = ecc::apply_and_measure_contraction(ec, dict, b, cfg.noise_eps, cfg.trials,
                                                  trial_rng);
    std::vector<double> errors;
    for (const auto& t : res.trials) errors.push_back(t.eps_out);
    fill_eps(st, errors);
    st.has_ec = true;
    st.median_in = res.median_eps_in;
    st.median_out = res.median_eps_out;
    st.ec_floor = res.intrinsic_floor;
    st.collisions = static_cast<long long>(res.collision_count);
    st.empty_sets = static_cast<long long>(ec.empty_features().size());
    return st;
}

CellStats run_balancer_cell(const SweepConfig& cfg, const CellParams& cell,
                            core::RngStream cell_rng) {
    CellStats st;
    core::RngStream build_rng = cell_rng.derive(0);
    auto nb = ecc::build_norm_balancer(cell.d, cfg.s0, cell.d, build_rng);
    core::RngStream in_rng = cell_rng.derive(1);
    double worst_rel = 0, pert_sum = 0;
    std::size_t pert_n = 0;
    const double root = std::sqrt(cfg.s0);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        std::vector<double> a(cell.d);
        for (auto& v : a) v = in_rng.next_gaussian();
        double norm = std::sqrt(kernels::dot(a.data(), a.data(), a.size()));
        double target = in_rng.next_double() * root / std::sqrt(2.0);
        kernels::scale(target / norm, a.data(), a.size());
        auto out = nb.balance(a);
        double bn = std::sqrt(kernels::dot(out.data(), out.data(), out.size()));
        worst_rel = std::max(worst_rel, std::abs(bn - root) / root);
        std::vector<double> diff(cell.d);
        for (std::size_t i = 0; i < cell.d; ++i) diff[i] = out[i] - a[i];
        std::vector<double> phi(cell.d);
        for (auto& v : phi) v = in_rng.next_gaussian();
        double pn = std::sqrt(kernels::dot(phi.data(), phi.data(), phi.size()));
        kernels::scale(1.0 / pn, phi.data(), phi.size());
        pert_sum += std::abs(kernels::dot(phi.data(), diff.data(), diff.size()));
        ++pert_n;
    }
    st.has_balancer = true;
    st.norm_dev_max = worst_rel;
    st.mean_pert = pert_sum / static_cast<double>(pert_n);
    return st;
}

std::string render_row(const SweepConfig& cfg, const CellParams& cell, std::uint64_t cell_seed,
                       const CellStats& st) {
    using core::format_double;
    std::ostringstream os;
    auto num = [&](bool present, double v) { return present ? format_double(v) : std::string(); };
    auto cnt = [&](long long v) { return v >= 0 ? std::to_string(v) : std::string(); };
    os << "v1," << cfg.kind << "," << cell.index << "," << cell.m << "," << cell.d << ","
       << cell.s << "," << (cfg.kind == "uand-highfanin" ? cfg.fanin : 2) << ","
       << format_double(cell.c) << "," << cfg.mode << "," << cfg.pairs << "," << cfg.samples
       << "," << cell_seed << "," << st.status << "," << num(st.has_eps, st.eps_max) << ","
       << num(st.has_eps, st.eps_mean) << "," << num(st.has_eps, st.p50) << ","
       << num(st.has_eps, st.p90) << "," << num(st.has_eps, st.p99) << ","
       << num(st.has_eps, st.p100) << "," << num(st.has_cases, st.case11) << ","
       << num(st.has_cases, st.case10) << "," << num(st.has_cases, st.case00) << ","
       << num(st.has_std, st.readoff_std) << "," << cnt(st.lb_violations) << ","
       << cnt(st.empty_sets) << "," << cnt(st.collisions) << "," << num(st.has_ec, st.median_in)
       << "," << num(st.has_ec, st.median_out) << "," << num(st.has_ec, st.ec_floor) << ","
       << num(st.has_balancer, st.norm_dev_max) << "," << num(st.has_balancer, st.mean_pert);
    return os.str();
}

} // namespace

std::string SweepResult::csv_body() const {
    std::ostringstream os;
    os << kSweepCsvHeader << "\n";
    for (const auto& row : rows) os << row.csv_line << "\n";
    return os.str();
}

static SweepResult run_cells(const SweepConfig& cfg, const std::vector<CellParams>& cells);

SweepResult run_sweep(const SweepConfig& cfg) {
    std::vector<CellParams> cells;
    std::size_t idx = 0;
    for (auto m : cfg.m_grid)
        for (auto d : cfg.d_grid)
            for (auto s : cfg.s_grid)
                for (auto c : cfg.c_grid) cells.push_back({idx++, m, d, s, c});
    return run_cells(cfg, cells);
}

SweepResult run_sweep_cell(const SweepConfig& cfg, std::size_t cell_index) {
    std::vector<CellParams> cells;
    std::size_t idx = 0;
    for (auto m : cfg.m_grid)
        for (auto d : cfg.d_grid)
            for (auto s : cfg.s_grid)
                for (auto c : cfg.c_grid) {
                    if (idx == cell_index) cells.push_back({idx, m, d, s, c});
                    ++idx;
                }
    if (cells.empty()) throw std::invalid_argument("run_sweep_cell: cell index out of range");
    return run_cells(cfg, cells);
}

static SweepResult run_cells(const SweepConfig& cfg, const std::vector<CellParams>& cells) {
    SweepResult result;
    result.rows.resize(cells.size());
    result.wallclock_ms.resize(cells.size());

    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
        const CellParams& cell = cells[i];
        core::RngStream cell_rng = core::RngStream(cfg.master_seed, 0).derive(cell.index);
        auto t0 = std::chrono::steady_clock::now();
        CellStats st;
        try {
            if (cfg.kind == "uand-basis") st = run_uand_basis_cell(cfg, cell, cell_rng);
            else if (cfg.kind == "uand-superposed") st = run_uand_superposed_cell(cfg, cell, cell_rng);
            else if (cfg.kind == "uand-highfanin") st = run_uand_highfanin_cell(cfg, cell, cell_rng);
            else if (cfg.kind == "uand-random") st = run_uand_random_cell(cfg, cell, cell_rng);
            else if (cfg.kind == "error-correction") st = run_ec_cell(cfg, cell, cell_rng);
            else if (cfg.kind == "norm-balancer") st = run_balancer_cell(cfg, cell, cell_rng);
            else st.status = "unknown-kind";
        } catch (const std::exception& e) {
            st = CellStats{};
            std::string msg = e.what();
            for (auto& ch : msg)
                if (ch == ',' || ch == '\n') ch = ';';
            st.status = "failed:" + msg;
        }
        auto t1 = std::chrono::steady_clock::now();
        result.rows[i].csv_line =
            render_row(cfg, cell, cell_rng.derive(0).next_u64(), st);
        result.wallclock_ms[i] =
            std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() / 1000.0;
    });
    return result;
}

void write_sweep(const SweepResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream f(out_dir + "/results.csv", std::ios::binary);
        f << result.csv_body();
    }
    {
        std::ofstream f(out_dir + "/timings.csv", std::ios::binary);
        f << "cell,wallclock_ms\n";
        for (std::size_t i = 0; i < result.wallclock_ms.size(); ++i)
            f << i << "," << result.wallclock_ms[i] << "\n";
    }
}

} // namespace sbmlp::harness

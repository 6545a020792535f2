#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ftopt/config.hpp"
#include "ftopt/io.hpp"
#include "ftopt/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalidInput = 2;

struct CheckSet {
    bool gap = true;
    bool dist = true;
    bool hulls = true;
    bool weight = true;
    bool relation = true;
    bool any() const { return gap || dist || hulls || weight || relation; }
};

CheckSet parse_checks(const std::string& spec) {
    CheckSet cs;
    if (spec == "all") return cs;
    cs = {false, false, false, false, false};
    if (spec == "none") return cs;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "gap")
            cs.gap = true;
        else if (item == "dist")
            cs.dist = true;
        else if (item == "hulls")
            cs.hulls = true;
        else if (item == "weight")
            cs.weight = true;
        else if (item == "relation")
            cs.relation = true;
        else
            throw ftopt::ConfigError("unknown check '" + item + "'");
    }
    return cs;
}

ftopt::ValidSet valid_set_for(const ftopt::ScenarioConfig& cfg, double tol) {
    switch (cfg.protocol) {
        case ftopt::Protocol::alg1:
        case ftopt::Protocol::alg2:
            return ftopt::compute_valid_set_crash(cfg.functions, cfg.split(), tol);
        case ftopt::Protocol::alg3: {
            std::vector<ftopt::AdmissibleFunction> nf;
            for (int i : cfg.split().non_faulty) nf.push_back(cfg.functions[i]);
            return ftopt::compute_valid_set_byz(nf, cfg.f, tol);
        }
        case ftopt::Protocol::alg4:
            return ftopt::compute_valid_set_async(cfg.functions, cfg.n, cfg.f, tol);
    }
    throw std::logic_error("unreachable");
}

ftopt::Trace run_scenario(const ftopt::ScenarioConfig& cfg) {
    return cfg.protocol == ftopt::Protocol::alg4 ? ftopt::run_async(cfg) : ftopt::run_sync(cfg);
}

double max_gradient_bound(const ftopt::ScenarioConfig& cfg) {
    double L = 0;
    for (const auto& f : cfg.functions) L = std::max(L, f.gradient_bound());
    return L;
}

// runs one scenario, writes the artifacts, returns the process exit code
int do_run(const std::string& config_path, const std::string& out_dir, int iters_override,
           const std::string& checks_spec, double gap_tol, double dist_tol, bool quiet) {
    ftopt::ScenarioConfig cfg = ftopt::parse_scenario(ftopt::load_config_file(config_path));
    if (iters_override >= 0) cfg.max_iters = iters_override;
    CheckSet checks = parse_checks(checks_spec);
    if (cfg.max_iters == 0) checks = parse_checks("none");

    const auto start = std::chrono::steady_clock::now();
    ftopt::Trace trace = run_scenario(cfg);
    const ftopt::ValidSet vs = valid_set_for(cfg, 1e-11);

    const auto gap = ftopt::consensus_gap(trace);
    const auto dist = ftopt::max_dist_series(trace, vs);
    const auto grad_hull = ftopt::check_gradient_hull(trace);
    const auto est_hull = ftopt::check_estimate_hull(trace);
    const auto weight = ftopt::check_weight_bound(trace, cfg.f);

    fs::create_directories(out_dir);
    const std::string trace_path = out_dir + "/trace.jsonl";
    const std::string metrics_path = out_dir + "/metrics.csv";
    const std::string svg_path = out_dir + "/convergence.svg";
    ftopt::write_trace_jsonl(trace, trace_path);
    ftopt::write_metrics_csv(trace, gap, dist, grad_hull, est_hull, weight, metrics_path);
    ftopt::write_convergence_svg({gap, dist}, svg_path);

    bool ok = true;
    auto report = [&](const std::string& name, bool pass, const std::string& detail) {
        if (!pass) ok = false;
        if (!quiet)
            std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    };
    if (checks.gap)
        report("final_gap", gap.values.back() < gap_tol,
               std::to_string(gap.values.back()) + " vs " + std::to_string(gap_tol));
    if (checks.dist)
        report("final_max_dist", dist.values.back() < dist_tol,
               std::to_string(dist.values.back()) + " vs " + std::to_string(dist_tol));
    if (checks.hulls) {
        report("gradient_hull", grad_hull.empty(),
               std::to_string(grad_hull.size()) + " violations");
        report("estimate_hull", est_hull.empty(), std::to_string(est_hull.size()) + " violations");
    }
    if (checks.weight)
        report("weight_bound", weight.empty(), std::to_string(weight.size()) + " violations");
    if (checks.relation && cfg.protocol == ftopt::Protocol::alg1) {
        const auto rel = ftopt::check_iteration_relation(trace, vs, max_gradient_bound(cfg));
        report("iteration_relation", rel.empty(), std::to_string(rel.size()) + " violations");
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);

    const int status = ok ? kExitPass : kExitCheckFailed;
    json manifest = {{"scenario", config_path},
                     {"out_dir", out_dir},
                     {"files", {trace_path, metrics_path, svg_path}},
                     {"exit_status", status},
                     {"wall_time_ms", elapsed.count()},
                     {"valid_set", {vs.lo, vs.hi}},
                     {"trace_hash", trace.hash()}};
    std::ofstream(out_dir + "/manifest.json") << manifest.dump(2) << "\n";
    if (!quiet) {
        std::cout << "valid set [" << vs.lo << ", " << vs.hi << "], "
                  << trace.rounds.size() - 1 << " rounds, final gap " << gap.values.back()
                  << ", final max_dist " << dist.values.back() << "\n";
    }
    return status;
}

int do_validset(const std::string& config_path, bool oracle, double weight_res, double tol,
                double x_res, double bound) {
    ftopt::ScenarioConfig cfg = ftopt::parse_scenario(ftopt::load_config_file(config_path));
    const ftopt::ValidSet vs = valid_set_for(cfg, tol);
    std::cout << "valid set [" << vs.lo << ", " << vs.hi << "]\n";
    if (!oracle) return kExitPass;

    double wlo = 1e300, whi = -1e300;
    for (const auto& f : cfg.functions) {
        auto [a, b] = f.argmin_interval();
        wlo = std::min(wlo, a);
        whi = std::max(whi, b);
    }
    wlo -= 1;
    whi += 1;
    ftopt::BruteForceResult bf;
    switch (cfg.protocol) {
        case ftopt::Protocol::alg1:
        case ftopt::Protocol::alg2:
            bf = ftopt::brute_force_valid_set_crash(cfg.functions, cfg.split(), weight_res, wlo,
                                                    whi, x_res);
            break;
        case ftopt::Protocol::alg3: {
            std::vector<ftopt::AdmissibleFunction> nf;
            for (int i : cfg.split().non_faulty) nf.push_back(cfg.functions[i]);
            const int nn = static_cast<int>(nf.size());
            ftopt::WeightConstraint c{1.0 / (2.0 * (nn - cfg.f)), nn - cfg.f};
            bf = ftopt::brute_force_valid_set_constrained(nf, c, weight_res, wlo, whi, x_res);
            break;
        }
        case ftopt::Protocol::alg4: {
            ftopt::WeightConstraint c{1.0 / cfg.n, cfg.n - cfg.f};
            bf = ftopt::brute_force_valid_set_constrained(cfg.functions, c, weight_res, wlo, whi,
                                                          x_res);
            break;
        }
    }
    const double hausdorff =
        std::max(std::abs(vs.lo - bf.set.lo), std::abs(vs.hi - bf.set.hi));
    std::cout << "oracle set [" << bf.set.lo << ", " << bf.set.hi << "], Hausdorff distance "
              << hausdorff << (bf.window_hit_boundary ? " (window boundary hit)" : "") << "\n";
    return hausdorff <= bound ? kExitPass : kExitCheckFailed;
}

int do_sweep(const std::string& config_path, const std::string& param,
             const std::vector<std::string>& values, const std::string& out_dir, double gap_tol,
             double dist_tol) {
    if (values.empty()) throw ftopt::ConfigError("sweep requires a non-empty value list");
    json base = ftopt::load_config_file(config_path);

    fs::create_directories(out_dir);
    std::ofstream agg(out_dir + "/sweep.csv");
    agg << "value,final_gap,final_max_dist,pass\n";
    agg.precision(17);

    bool all_ok = true;
    for (const auto& value : values) {
        json j = base;
        if (param == "seed") {
            j["seed"] = std::stoull(value);
        } else if (param == "strategy") {
            if (!j.contains("adversary"))
                throw ftopt::ConfigError("strategy sweep requires an adversary section");
            json adv = j["adversary"];
            adv["strategy"] = value;
            // per-strategy parameter defaults so that a bare name is enough
            if (value == "constant" && !adv.contains("w")) {
                adv["w"] = 100.0;
                adv["g"] = 100.0;
            } else if (value == "random_uniform" && !adv.contains("w_lo")) {
                adv["w_lo"] = -50.0;
                adv["w_hi"] = 50.0;
                adv["g_lo"] = -50.0;
                adv["g_hi"] = 50.0;
            } else if (value == "collude_shift" && !adv.contains("target")) {
                adv["target"] = 10.0;
            } else if (value == "mimic" && !adv.contains("victim")) {
                adv["victim"] = 0;
            }
            j["adversary"] = adv;
        } else if (param == "n") {
            const int n = std::stoi(value);
            if (n < 1) throw ftopt::ConfigError("n must be >= 1");
            json fns = json::array(), inits = json::array();
            const json base_fns = j["functions"];
            const json base_inits = j["init_estimates"];
            for (int i = 0; i < n; ++i) {
                fns.push_back(base_fns[i % base_fns.size()]);
                inits.push_back(base_inits[i % base_inits.size()]);
            }
            j["n"] = n;
            j["functions"] = fns;
            j["init_estimates"] = inits;
            json faulty = json::array();
            if (j.contains("faulty_ids"))
                for (const auto& v : j["faulty_ids"])
                    if (v.get<int>() < n) faulty.push_back(v);
            j["faulty_ids"] = faulty;
        } else {
            throw ftopt::ConfigError("unknown sweep parameter '" + param + "'");
        }

        ftopt::ScenarioConfig cfg = ftopt::parse_scenario(j);
        ftopt::Trace trace = run_scenario(cfg);
        const ftopt::ValidSet vs = valid_set_for(cfg, 1e-11);
        const auto gap = ftopt::consensus_gap(trace);
        const auto dist = ftopt::max_dist_series(trace, vs);

        const std::string sub = out_dir + "/" + value;
        fs::create_directories(sub);
        ftopt::write_trace_jsonl(trace, sub + "/trace.jsonl");
        const auto grad_hull = ftopt::check_gradient_hull(trace);
        const auto est_hull = ftopt::check_estimate_hull(trace);
        const auto weight = ftopt::check_weight_bound(trace, cfg.f);
        ftopt::write_metrics_csv(trace, gap, dist, grad_hull, est_hull, weight,
                                 sub + "/metrics.csv");
        ftopt::write_convergence_svg({gap, dist}, sub + "/convergence.svg");

        const bool pass = gap.values.back() < gap_tol && dist.values.back() < dist_tol &&
                          grad_hull.empty() && est_hull.empty() && weight.empty();
        all_ok = all_ok && pass;
        agg << value << "," << gap.values.back() << "," << dist.values.back() << ","
            << (pass ? 1 : 0) << "\n";
        std::cout << (pass ? "PASS " : "FAIL ") << param << "=" << value << " final_gap "
                  << gap.values.back() << " final_max_dist " << dist.values.back() << "\n";
    }
    return all_ok ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fault-tolerant multi-agent optimization simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", checks = "all", param;
    std::vector<std::string> values;
    int iters = -1;
    double gap_tol = 1e-3, dist_tol = 5e-2, weight_res = 0.05, tol = 1e-9, x_res = 1e-3,
           bound = 0.1;
    bool oracle = false, quiet = false;

    auto* run = app.add_subcommand("run", "run a scenario and check its trace");
    run->add_option("config", config_path, "scenario file (TOML or JSON)")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--iters", iters, "override max_iters");
    run->add_option("--checks", checks, "all | none | comma list (gap,dist,hulls,weight,relation)");
    run->add_option("--gap-tol", gap_tol, "final consensus gap threshold");
    run->add_option("--dist-tol", dist_tol, "final max distance threshold");
    run->add_flag("--quiet", quiet, "suppress the per-check report");

    auto* vset = app.add_subcommand("validset", "compute the achievable-optima interval");
    vset->add_option("config", config_path, "scenario file (TOML or JSON)")->required();
    vset->add_flag("--oracle", oracle, "cross-check against the brute-force oracle");
    vset->add_option("--weight-res", weight_res, "oracle simplex grid resolution");
    vset->add_option("--x-res", x_res, "oracle x grid resolution");
    vset->add_option("--tol", tol, "bisection tolerance");
    vset->add_option("--bound", bound, "maximum accepted Hausdorff distance");

    auto* sweep = app.add_subcommand("sweep", "run a scenario across parameter values");
    sweep->add_option("config", config_path, "scenario file (TOML or JSON)")->required();
    sweep->add_option("--param", param, "seed | strategy | n")->required();
    sweep->add_option("--values", values, "values to sweep")->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--gap-tol", gap_tol, "final consensus gap threshold");
    sweep->add_option("--dist-tol", dist_tol, "final max distance threshold");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return do_run(config_path, out_dir, iters, checks, gap_tol, dist_tol, quiet);
        if (vset->parsed())
            return do_validset(config_path, oracle, weight_res, tol, x_res, bound);
        return do_sweep(config_path, param, values, out_dir, gap_tol, dist_tol);
    } catch (const ftopt::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    }
}

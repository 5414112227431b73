// Command-line front end: reproduces the expected-latency figure panels and
// runs stability and tail experiments, writing plot-ready CSV.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "redsim/csv.hpp"
#include "redsim/errors.hpp"
#include "redsim/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

constexpr const char* kConfigHelp = R"(Config file format (flat key = value, '#' comments):

  [scenario]
  kind = figure1-left        # must match the subcommand when present
  servers = 3                # N (alias: n)
  replicas = 2               # d
  lambda = 1.0
  discipline = both          # fcfs | ps | both
  dependence = iid           # iid | identical
  horizon = 200000           # simulated time units
  warmup = 20000             # default 10% of horizon
  seed = 1
  replications = 5
  batches = 20               # batch-means batches per replication
  lambda_grid = 0.3, 0.6     # analytic / figure1-left sweep
  d_grid = 1, 2, 3           # figure1-right / stability-scan sweep
  d_max = 10                 # shorthand for d_grid = 1..d_max
  probe_factors = 0.5, 0.6   # stability-scan grid as multiples of N/(d E[X_min])
  k_fraction = 0.05          # Hill estimator fraction
  target_load = 0.6          # tail-scan: choose lambda so that rho_tilde = target
  backlog_samples = 200
  threads = 0                # 0 = all cores
  out = results

  [distribution]             # repeatable; replaces the default list
  label = WeibullNBU
  kind = weibull             # exponential | weibull | pareto | deterministic
  shape = 1.2                # weibull: shape, scale; pareto: index, minimum;
  unit_mean = true           # exponential: rate; deterministic: value

Command-line flags override file values.)";

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> replications;
    std::optional<double> horizon;
    std::optional<double> warmup;
    bool full = false;
    std::optional<unsigned> threads;
    std::optional<int> servers;
    std::optional<int> replicas;
    std::optional<double> lambda;
    std::optional<std::string> discipline;
    std::optional<std::string> dependence;
    std::vector<std::string> dists;
    std::optional<std::string> lambda_grid;
    std::optional<std::string> d_grid;
    std::optional<double> k_fraction;
    std::optional<double> target_load;
};

redsim::ExperimentSpec build_spec(redsim::Scenario scenario, const Overrides& o) {
    using namespace redsim;
    ExperimentSpec spec = default_spec(scenario, o.full);
    if (!o.config.empty()) apply_config(spec, load_config_file(o.config));

    SimConfig& b = spec.base;
    if (o.servers) b.servers = *o.servers;
    if (o.replicas) b.replicas = *o.replicas;
    if (o.lambda) b.lambda = *o.lambda;
    if (o.discipline) {
        if (*o.discipline == "both") {
            spec.disciplines = {Discipline::FCFS, Discipline::PS};
        } else {
            b.discipline = parse_discipline(*o.discipline);
            spec.disciplines = {b.discipline};
        }
    }
    if (o.dependence) b.dependence = parse_dependence(*o.dependence);
    if (o.horizon) {
        b.horizon = *o.horizon;
        b.warmup = 0.1 * b.horizon;
    }
    if (o.warmup) b.warmup = *o.warmup;
    if (o.seed) b.seed = *o.seed;
    if (o.replications) spec.replications = *o.replications;
    if (o.out) spec.out_dir = *o.out;
    if (o.threads) spec.threads = *o.threads;
    if (!o.dists.empty()) {
        spec.distributions.clear();
        for (const auto& d : o.dists) spec.distributions.push_back(parse_distribution_shorthand(d));
    }
    if (o.lambda_grid) spec.lambda_grid = parse_real_list(*o.lambda_grid);
    if (o.d_grid) spec.d_grid = parse_int_list(*o.d_grid);
    if (o.k_fraction) spec.k_fraction = *o.k_fraction;
    if (o.target_load) spec.target_load = *o.target_load;
    b.dist = spec.distributions.front().dist;
    validate(spec);
    return spec;
}

std::string out_path(const redsim::ExperimentSpec& spec, const std::string& name) {
    return (std::filesystem::path(spec.out_dir) / name).string();
}

void print_cell(const std::optional<double>& v) {
    std::cout << ' ' << (v ? redsim::format_number(*v) : std::string("-"));
}

void print_table(const char* title, const redsim::LatencyTable& t) {
    std::cout << title << ": " << t.axis_name;
    for (const auto& l : t.labels) std::cout << ' ' << l;
    std::cout << '\n';
    for (std::size_t r = 0; r < t.axis.size(); ++r) {
        std::cout << "  " << redsim::format_number(t.axis[r]);
        for (const auto& c : t.value[r]) print_cell(c);
        std::cout << '\n';
    }
}

int run(redsim::Scenario scenario, const Overrides& o) {
    using namespace redsim;
    const ExperimentSpec spec = build_spec(scenario, o);
    switch (scenario) {
        case Scenario::Single: {
            const auto res = run_single(spec);
            auto path = out_path(spec, "latencies.csv");
            std::filesystem::create_directories(spec.out_dir);
            std::ofstream os(path, std::ios::binary);
            write_latency_csv(os, res.output);
            std::cout << "discipline " << to_string(spec.base.discipline) << ", N "
                      << spec.base.servers << ", d " << spec.base.replicas << ", lambda "
                      << format_number(spec.base.lambda) << '\n'
                      << "jobs observed " << res.output.jobs_observed << ", completed "
                      << res.output.jobs_completed << ", recorded " << res.output.latencies.size()
                      << '\n';
            if (res.summary) {
                std::cout << "mean latency " << format_number(res.summary->mean) << " +- "
                          << format_number(res.summary->ci_halfwidth) << " (95%, "
                          << res.summary->n_batches << " batches)\n";
            }
            std::cout << "max backlog " << format_number(res.output.max_backlog) << '\n'
                      << "wrote " << path << '\n';
            return kExitOk;
        }
        case Scenario::Analytic: {
            const auto res = run_analytic(spec);
            write_table(res.fcfs, out_path(spec, "analytic_FCFS.csv"), false);
            write_table(res.ps, out_path(spec, "analytic_PS.csv"), false);
            print_table("FCFS", res.fcfs);
            print_table("PS", res.ps);
            for (const auto& [label, pref] : res.verdicts) {
                std::cout << "replication preference " << label << ": " << to_string(pref) << '\n';
            }
            return kExitOk;
        }
        case Scenario::Figure1Left:
        case Scenario::Figure1Right: {
            const auto fig = scenario == Scenario::Figure1Left ? run_figure1_left(spec)
                                                               : run_figure1_right(spec);
            const std::string stem = "ExpectedLatency_N" + std::to_string(spec.base.servers);
            write_figure(fig, spec.out_dir, stem);
            print_table("FCFS", fig.fcfs);
            print_table("PS", fig.ps);
            std::cout << "wrote " << out_path(spec, stem + "_{FCFS,PS}[_ci].csv") << '\n';
            return kExitOk;
        }
        case Scenario::StabilityScan: {
            const auto rows = run_stability_scan(spec);
            write_stability_scan(rows, out_path(spec, "stability_scan.csv"));
            for (const auto& r : rows) {
                std::cout << to_string(r.discipline) << ' ' << r.label << " d=" << r.d
                          << " lambda*=" << format_number(r.lambda_star)
                          << " ps_bound=" << format_number(r.analytic_ps)
                          << " gap=" << format_number(r.relative_gap) << '\n';
            }
            return kExitOk;
        }
        case Scenario::TailScan: {
            const auto res = run_tail_scan(spec);
            write_tail_scan(res, out_path(spec, "tail_scan.csv"));
            for (const auto& r : res.rows) {
                std::cout << to_string(r.discipline) << ' ' << r.label
                          << " index=" << format_number(r.estimate.index) << " +- "
                          << format_number(r.estimate.ci_halfwidth)
                          << " predicted=" << format_number(r.predicted_index)
                          << " samples=" << r.samples << '\n';
            }
            if (res.ps_minus_fcfs) {
                std::cout << "PS - FCFS index gap " << format_number(*res.ps_minus_fcfs) << '\n';
            }
            return kExitOk;
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cancel-on-completion redundancy-d simulator (FCFS vs PS)"};
    app.footer(kConfigHelp);
    app.require_subcommand(1);

    Overrides o;
    app.add_option("--config", o.config, "Experiment config file")->check(CLI::ExistingFile);
    app.add_option("--seed", o.seed, "Master RNG seed");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--replications", o.replications, "Independent seeds per point");
    app.add_option("--horizon", o.horizon, "Simulated time per run");
    app.add_option("--warmup", o.warmup, "Discarded initial time (default 10% of horizon)");
    app.add_flag("--full", o.full, "Large scale instead of desk scale");
    app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    app.add_option("--servers,-N", o.servers, "Number of servers N");
    app.add_option("--replicas,-d", o.replicas, "Replicas per job d");
    app.add_option("--lambda", o.lambda, "Arrival rate");
    app.add_option("--discipline", o.discipline, "fcfs | ps | both");
    app.add_option("--dependence", o.dependence, "iid | identical");
    app.add_option("--dist", o.dists,
                   "Distribution shorthand, e.g. weibull:shape=1.2,unit_mean (repeatable)");
    app.add_option("--lambda-grid", o.lambda_grid, "Comma-separated lambda sweep");
    app.add_option("--d-grid", o.d_grid, "Comma-separated d sweep");
    app.add_option("--k-fraction", o.k_fraction, "Hill estimator top fraction");
    app.add_option("--target-load", o.target_load, "tail-scan target rho_tilde");

    using redsim::Scenario;
    const std::vector<std::pair<Scenario, const char*>> commands{
        {Scenario::Analytic, "Closed-form expected latency for d = 1 or d = N"},
        {Scenario::Single, "One simulation run; writes latencies.csv"},
        {Scenario::Figure1Left, "Latency vs lambda (default N=3, d=2)"},
        {Scenario::Figure1Right, "Latency vs d (default N=100, lambda=75)"},
        {Scenario::StabilityScan, "Empirical critical arrival rate per discipline"},
        {Scenario::TailScan, "Hill tail index of latency under Pareto job sizes"},
    };
    for (const auto& [scenario, help] : commands) {
        app.add_subcommand(redsim::to_string(scenario), help)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    Scenario chosen = Scenario::Single;
    for (const auto& [scenario, help] : commands) {
        if (app.got_subcommand(redsim::to_string(scenario))) chosen = scenario;
    }

    try {
        return run(chosen, o);
    } catch (const redsim::ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return kExitConfig;
    } catch (const redsim::HeavyTailError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return kExitConfig;
    } catch (const redsim::InfeasibleError& e) {
        std::cerr << "infeasible experiment: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const redsim::UnstableLoadError& e) {
        std::cerr << "infeasible experiment: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

#include "redsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "redsim/csv.hpp"
#include "redsim/errors.hpp"
#include "redsim/parallel.hpp"
#include "redsim/stability.hpp"

namespace redsim {

namespace {

std::vector<DistributionSpec> figure_distributions(bool shape_suffixes) {
    return {
        {shape_suffixes ? "WeibullNBU_1.2" : "WeibullNBU",
         normalize_to_unit_mean(JobSizeDistribution::weibull(1.2, 1.0))},
        {"Exp", JobSizeDistribution::exponential(1.0)},
        {shape_suffixes ? "WeibullNWU_0.8" : "WeibullNWU",
         normalize_to_unit_mean(JobSizeDistribution::weibull(0.8, 1.0))},
    };
}

std::vector<double> arithmetic(double first, double step, double last) {
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double v = first + step * i;
        if (v > last + 1e-9) break;
        out.push_back(std::round(v * 1e9) / 1e9);
    }
    return out;
}

std::vector<int> one_to(int n) {
    std::vector<int> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i + 1;
    return out;
}

void set_horizon(SimConfig& cfg, double horizon) {
    cfg.horizon = horizon;
    cfg.warmup = 0.1 * horizon;
}

std::ofstream open_output(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + path + "'");
    return os;
}

// One simulated table cell: pooled batch means over replications, or empty
// when the configuration is unstable (analytically for PS, by backlog drift
// for FCFS) or produced too few samples.
struct CellTask {
    std::size_t row;
    std::size_t col;
    SimConfig cfg;
};

struct RepOutcome {
    std::vector<double> batch_means;
    bool stable = true;
    bool enough = true;
};

LatencyTable empty_table(const std::string& axis_name, std::vector<double> axis,
                         const std::vector<DistributionSpec>& dists) {
    LatencyTable t;
    t.axis_name = axis_name;
    t.axis = std::move(axis);
    for (const auto& d : dists) t.labels.push_back(d.label);
    t.value.assign(t.axis.size(), std::vector<std::optional<double>>(dists.size()));
    t.ci = t.value;
    return t;
}

void fill_by_simulation(LatencyTable& table, const std::vector<CellTask>& cells,
                        const ExperimentSpec& spec) {
    const auto reps = static_cast<std::size_t>(spec.replications);
    std::vector<RepOutcome> outcomes(cells.size() * reps);
    parallel_for(
        outcomes.size(),
        [&](std::size_t i) {
            SimConfig cfg = cells[i / reps].cfg;
            cfg.seed = replication_seed(spec, static_cast<int>(i % reps));
            const SimOutput out = run_simulation(cfg);
            RepOutcome& o = outcomes[i];
            if (cfg.discipline == Discipline::FCFS) {
                o.stable = backlog_is_stable(out, default_slope_threshold(cfg.servers));
            }
            const auto values = out.latency_values();
            if (values.size() < 10 * static_cast<std::size_t>(spec.n_batches)) {
                o.enough = false;
                return;
            }
            o.batch_means = batch_mean_values(values, spec.n_batches);
        },
        spec.threads);

    for (std::size_t c = 0; c < cells.size(); ++c) {
        std::vector<double> pooled;
        bool ok = true;
        for (std::size_t r = 0; r < reps; ++r) {
            const RepOutcome& o = outcomes[c * reps + r];
            ok = ok && o.stable && o.enough;
            pooled.insert(pooled.end(), o.batch_means.begin(), o.batch_means.end());
        }
        if (!ok) continue;
        const BatchMeansResult bm = summarize_batch_means(pooled);
        table.value[cells[c].row][cells[c].col] = bm.mean;
        table.ci[cells[c].row][cells[c].col] = bm.ci_halfwidth;
    }
}

bool ps_stable(const SimConfig& cfg) {
    return load_summary(cfg.servers, cfg.lambda, cfg.replicas, cfg.dist, cfg.dependence).stable_ps;
}

FigureResult run_figure(const ExperimentSpec& spec, const std::string& axis_name,
                        const std::vector<double>& axis, bool sweep_d) {
    validate(spec);
    FigureResult fig{empty_table(axis_name, axis, spec.distributions),
                     empty_table(axis_name, axis, spec.distributions)};
    for (const Discipline disc : {Discipline::FCFS, Discipline::PS}) {
        if (std::find(spec.disciplines.begin(), spec.disciplines.end(), disc) ==
            spec.disciplines.end()) {
            continue;
        }
        std::vector<CellTask> cells;
        for (std::size_t row = 0; row < axis.size(); ++row) {
            for (std::size_t col = 0; col < spec.distributions.size(); ++col) {
                SimConfig cfg = spec.base;
                cfg.discipline = disc;
                cfg.dist = spec.distributions[col].dist;
                if (sweep_d) {
                    cfg.replicas = static_cast<int>(axis[row]);
                } else {
                    cfg.lambda = axis[row];
                }
                if (disc == Discipline::PS && !ps_stable(cfg)) continue;
                cells.push_back({row, col, cfg});
            }
        }
        fill_by_simulation(disc == Discipline::FCFS ? fig.fcfs : fig.ps, cells, spec);
    }
    return fig;
}

}  // namespace

const char* to_string(Scenario s) noexcept {
    switch (s) {
        case Scenario::Analytic: return "analytic";
        case Scenario::Single: return "simulate";
        case Scenario::Figure1Left: return "figure1-left";
        case Scenario::Figure1Right: return "figure1-right";
        case Scenario::StabilityScan: return "stability-scan";
        case Scenario::TailScan: return "tail-scan";
    }
    return "?";
}

Scenario parse_scenario(const std::string& text) {
    for (const Scenario s : {Scenario::Analytic, Scenario::Single, Scenario::Figure1Left,
                             Scenario::Figure1Right, Scenario::StabilityScan, Scenario::TailScan}) {
        if (text == to_string(s)) return s;
    }
    throw ConfigError("unknown scenario '" + text + "'");
}

ExperimentSpec default_spec(Scenario scenario, bool full) {
    ExperimentSpec spec;
    spec.scenario = scenario;
    SimConfig& b = spec.base;
    switch (scenario) {
        case Scenario::Single:
            b.servers = 3;
            b.replicas = 2;
            b.lambda = 1.0;
            set_horizon(b, full ? 1e6 : 1e5);
            spec.distributions = {{"Exp", JobSizeDistribution::exponential(1.0)}};
            spec.replications = 1;
            break;
        case Scenario::Analytic:
            b.servers = 3;
            b.replicas = 3;
            spec.lambda_grid = arithmetic(0.25, 0.25, 3.5);
            spec.distributions = figure_distributions(false);
            break;
        case Scenario::Figure1Left:
            b.servers = 3;
            b.replicas = 2;
            spec.lambda_grid = {0.01};
            for (double l : arithmetic(0.3, 0.3, 3.3)) spec.lambda_grid.push_back(l);
            set_horizon(b, full ? 1e6 : 2e5);
            spec.distributions = figure_distributions(false);
            break;
        case Scenario::Figure1Right:
            b.servers = 100;
            b.replicas = 1;
            b.lambda = 75.0;
            spec.d_grid = one_to(10);
            if (full) {
                for (int d : {15, 20, 30, 40, 50, 60, 70, 80, 90, 100}) spec.d_grid.push_back(d);
            }
            set_horizon(b, full ? 2e4 : 2e3);
            spec.distributions = figure_distributions(true);
            break;
        case Scenario::StabilityScan:
            b.servers = 3;
            b.replicas = 2;
            spec.d_grid = {1, 2, 3};
            spec.probe_factors = arithmetic(0.5, 0.1, 1.5);
            set_horizon(b, full ? 1e5 : 2e4);
            spec.distributions = figure_distributions(false);
            spec.replications = 1;
            break;
        case Scenario::TailScan:
            b.servers = 2;
            b.replicas = 2;
            spec.target_load = 0.6;
            set_horizon(b, full ? 1e7 : 1.5e6);
            spec.distributions = {
                {"Pareto_2.5", normalize_to_unit_mean(JobSizeDistribution::pareto(2.5, 1.0))}};
            spec.replications = 1;
            break;
    }
    b.dist = spec.distributions.front().dist;
    return spec;
}

void apply_config(ExperimentSpec& spec, const ConfigFile& file) {
    SimConfig& b = spec.base;
    bool warmup_set = false;
    for (const auto& [key, value] : file.scenario) {
        auto real = [&] { return parse_real_list(value).at(0); };
        auto integer = [&] { return parse_int_list(value).at(0); };
        if (key == "kind" || key == "scenario") {
            if (parse_scenario(value) != spec.scenario) {
                throw ConfigError("config is for scenario '" + value + "', not '" +
                                  to_string(spec.scenario) + "'");
            }
        } else if (key == "servers" || key == "n") {
            b.servers = integer();
        } else if (key == "replicas" || key == "d") {
            b.replicas = integer();
        } else if (key == "lambda") {
            b.lambda = real();
        } else if (key == "discipline") {
            if (value == "both") {
                spec.disciplines = {Discipline::FCFS, Discipline::PS};
            } else {
                b.discipline = parse_discipline(value);
                spec.disciplines = {b.discipline};
            }
        } else if (key == "dependence") {
            b.dependence = parse_dependence(value);
        } else if (key == "horizon") {
            b.horizon = real();
            if (!warmup_set) b.warmup = 0.1 * b.horizon;
        } else if (key == "warmup") {
            b.warmup = real();
            warmup_set = true;
        } else if (key == "seed") {
            b.seed = std::stoull(value);
        } else if (key == "replications") {
            spec.replications = integer();
        } else if (key == "batches") {
            spec.n_batches = integer();
        } else if (key == "k_fraction") {
            spec.k_fraction = real();
        } else if (key == "target_load") {
            spec.target_load = real();
        } else if (key == "lambda_grid") {
            spec.lambda_grid = parse_real_list(value);
        } else if (key == "d_grid") {
            spec.d_grid = parse_int_list(value);
        } else if (key == "d_max") {
            spec.d_grid = one_to(integer());
        } else if (key == "probe_factors") {
            spec.probe_factors = parse_real_list(value);
        } else if (key == "backlog_samples") {
            b.backlog_samples = integer();
        } else if (key == "out") {
            spec.out_dir = value;
        } else if (key == "threads") {
            spec.threads = static_cast<unsigned>(integer());
        } else {
            throw ConfigError("unknown scenario key '" + key + "'");
        }
    }
    if (!file.distributions.empty()) {
        spec.distributions.clear();
        for (const auto& block : file.distributions) {
            spec.distributions.push_back(parse_distribution(block));
        }
        b.dist = spec.distributions.front().dist;
    }
}

void validate(const ExperimentSpec& spec) {
    validate(spec.base);
    if (spec.distributions.empty()) throw ConfigError("at least one distribution is required");
    std::set<std::string> labels;
    for (const auto& d : spec.distributions) {
        if (d.label.empty()) throw ConfigError("distribution labels must be non-empty");
        if (!labels.insert(d.label).second) throw ConfigError("duplicate label '" + d.label + "'");
    }
    auto increasing = [](const auto& v) {
        return std::adjacent_find(v.begin(), v.end(),
                                  [](auto a, auto b) { return !(a < b); }) == v.end();
    };
    if (!increasing(spec.lambda_grid) ||
        std::any_of(spec.lambda_grid.begin(), spec.lambda_grid.end(), [](double l) { return !(l > 0); })) {
        throw ConfigError("lambda_grid must be positive and strictly increasing");
    }
    if (!increasing(spec.d_grid) ||
        std::any_of(spec.d_grid.begin(), spec.d_grid.end(),
                    [&](int d) { return d < 1 || d > spec.base.servers; })) {
        throw ConfigError("d_grid must be strictly increasing within 1..N");
    }
    if (!increasing(spec.probe_factors) ||
        std::any_of(spec.probe_factors.begin(), spec.probe_factors.end(), [](double f) { return !(f > 0); })) {
        throw ConfigError("probe_factors must be positive and strictly increasing");
    }
    if (spec.replications < 1) throw ConfigError("replications must be >= 1");
    if (spec.n_batches < 10) throw ConfigError("batches must be >= 10");
    if (spec.disciplines.empty()) throw ConfigError("no discipline selected");
    if (spec.target_load && !(*spec.target_load > 0.0 && *spec.target_load < 1.0)) {
        throw ConfigError("target_load must be in (0, 1)");
    }
}

std::uint64_t replication_seed(const ExperimentSpec& spec, int r) {
    return spec.base.seed + static_cast<std::uint64_t>(r);
}

AnalyticResult run_analytic(const ExperimentSpec& spec) {
    validate(spec);
    const SimConfig& b = spec.base;
    if (b.replicas != 1 && b.replicas != b.servers) {
        throw ConfigError("analytic formulas hold only for d = 1 (no replication) or d = N "
                          "(full replication); got d = " + std::to_string(b.replicas) +
                          ", N = " + std::to_string(b.servers));
    }
    const std::vector<double> axis =
        spec.lambda_grid.empty() ? std::vector<double>{b.lambda} : spec.lambda_grid;
    AnalyticResult res{empty_table("lambda", axis, spec.distributions),
                       empty_table("lambda", axis, spec.distributions),
                       {}};
    res.fcfs.ci.clear();
    res.ps.ci.clear();
    bool any = false;
    for (std::size_t col = 0; col < spec.distributions.size(); ++col) {
        const auto& dist = spec.distributions[col].dist;
        const double e_min = expected_min(dist, b.replicas, b.dependence);
        const Moment e_min2 = second_moment_min(dist, b.replicas, b.dependence);
        for (std::size_t row = 0; row < axis.size(); ++row) {
            const auto load = load_summary(b.servers, axis[row], b.replicas, dist, b.dependence);
            if (!load.stable_ps) continue;
            res.ps.value[row][col] = ps_latency(load.rho_tilde, e_min);
            if (e_min2.is_finite()) {
                res.fcfs.value[row][col] = pk_fcfs_latency(load.rho_tilde, e_min, e_min2);
            }
            any = true;
        }
        res.verdicts.emplace_back(spec.distributions[col].label,
                                  replication_preference(dist, b.servers));
    }
    if (!any) throw InfeasibleError("every analytic cell has rho_tilde >= 1 (unstable)");
    return res;
}

FigureResult run_figure1_left(const ExperimentSpec& spec) {
    if (spec.lambda_grid.empty()) throw ConfigError("figure1-left needs a lambda grid");
    return run_figure(spec, "lambda", spec.lambda_grid, false);
}

FigureResult run_figure1_right(const ExperimentSpec& spec) {
    if (spec.d_grid.empty()) throw ConfigError("figure1-right needs a d grid");
    std::vector<double> axis(spec.d_grid.begin(), spec.d_grid.end());
    return run_figure(spec, "d", axis, true);
}

void write_table(const LatencyTable& table, const std::string& path, bool ci_columns) {
    auto os = open_output(path);
    CsvWriter csv(os);
    std::vector<std::string> header{table.axis_name};
    for (const auto& l : table.labels) header.push_back(ci_columns ? l + "_ci" : l);
    csv.header(header);
    const auto& cells = ci_columns ? table.ci : table.value;
    for (std::size_t row = 0; row < table.axis.size(); ++row) {
        std::vector<std::optional<double>> r{table.axis[row]};
        r.insert(r.end(), cells[row].begin(), cells[row].end());
        csv.row(r);
    }
}

void write_figure(const FigureResult& fig, const std::string& dir, const std::string& stem) {
    const std::filesystem::path base(dir);
    write_table(fig.fcfs, (base / (stem + "_FCFS.csv")).string(), false);
    write_table(fig.fcfs, (base / (stem + "_FCFS_ci.csv")).string(), true);
    write_table(fig.ps, (base / (stem + "_PS.csv")).string(), false);
    write_table(fig.ps, (base / (stem + "_PS_ci.csv")).string(), true);
}

std::vector<StabilityScanRow> run_stability_scan(const ExperimentSpec& spec) {
    validate(spec);
    if (spec.probe_factors.size() < 2) throw ConfigError("stability-scan needs >= 2 probe factors");
    const std::vector<int> ds = spec.d_grid.empty() ? std::vector<int>{spec.base.replicas} : spec.d_grid;
    std::vector<StabilityScanRow> rows;
    for (const Discipline disc : spec.disciplines) {
        for (const auto& dist : spec.distributions) {
            for (const int d : ds) {
                SimConfig cfg = spec.base;
                cfg.discipline = disc;
                cfg.dist = dist.dist;
                cfg.replicas = d;
                const double analytic = ps_critical_lambda(cfg.servers, d, dist.dist, cfg.dependence);
                std::vector<double> grid;
                for (double f : spec.probe_factors) grid.push_back(f * analytic);
                StabilityProbeOptions opts;
                opts.threads = spec.threads;
                const auto probe = stability_probe(cfg, grid, opts);
                rows.push_back({disc, dist.label, d, probe.lambda_star, analytic,
                                (probe.lambda_star - analytic) / analytic});
            }
        }
    }
    return rows;
}

void write_stability_scan(const std::vector<StabilityScanRow>& rows, const std::string& path) {
    auto os = open_output(path);
    CsvWriter csv(os);
    csv.header({"discipline", "distribution", "d", "lambda_star", "analytic_ps_lambda_star",
                "relative_gap"});
    for (const auto& r : rows) {
        csv.row(std::vector<std::string>{to_string(r.discipline), r.label, std::to_string(r.d),
                                         format_number(r.lambda_star), format_number(r.analytic_ps),
                                         format_number(r.relative_gap)});
    }
}

TailScanResult run_tail_scan(const ExperimentSpec& spec) {
    validate(spec);
    TailScanResult result;
    for (const auto& dist : spec.distributions) {
        const auto* pareto = std::get_if<Pareto>(&dist.dist.params());
        if (!pareto) {
            throw ConfigError("tail-scan needs Pareto job sizes; '" + dist.label +
                              "' is light-tailed and the Hill estimator does not apply");
        }
        SimConfig cfg = spec.base;
        cfg.dist = dist.dist;
        const double e_min = expected_min(cfg.dist, cfg.replicas, cfg.dependence);
        if (spec.target_load) cfg.lambda = *spec.target_load * cfg.servers / (cfg.replicas * e_min);
        const auto load = load_summary(cfg.servers, cfg.lambda, cfg.replicas, cfg.dist, cfg.dependence);
        if (!load.stable_ps) throw InfeasibleError("tail-scan load rho_tilde >= 1");
        const double min_index =
            cfg.dependence == ReplicaDependence::IID ? cfg.replicas * pareto->index : pareto->index;

        std::vector<TailScanRow> rows(spec.disciplines.size());
        parallel_for(
            rows.size(),
            [&](std::size_t i) {
                SimConfig run = cfg;
                run.discipline = spec.disciplines[i];
                std::vector<double> pooled;
                for (int r = 0; r < spec.replications; ++r) {
                    run.seed = replication_seed(spec, r);
                    const auto values = run_simulation(run).latency_values();
                    pooled.insert(pooled.end(), values.begin(), values.end());
                }
                const double predicted =
                    run.discipline == Discipline::PS ? min_index : min_index - 1.0;
                rows[i] = {run.discipline, dist.label, run.lambda, load.rho_tilde,
                           hill_tail_index(pooled, spec.k_fraction), predicted, pooled.size()};
            },
            spec.threads);

        const auto find = [&](Discipline d) {
            return std::find_if(rows.begin(), rows.end(),
                                [d](const TailScanRow& r) { return r.discipline == d; });
        };
        if (!result.ps_minus_fcfs && find(Discipline::PS) != rows.end() &&
            find(Discipline::FCFS) != rows.end()) {
            result.ps_minus_fcfs =
                find(Discipline::PS)->estimate.index - find(Discipline::FCFS)->estimate.index;
        }
        result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    }
    return result;
}

void write_tail_scan(const TailScanResult& result, const std::string& path) {
    auto os = open_output(path);
    CsvWriter csv(os);
    csv.header({"discipline", "distribution", "lambda", "rho_tilde", "index", "ci_halfwidth",
                "k_used", "predicted_index", "samples"});
    for (const auto& r : result.rows) {
        csv.row(std::vector<std::string>{
            to_string(r.discipline), r.label, format_number(r.lambda), format_number(r.rho_tilde),
            format_number(r.estimate.index), format_number(r.estimate.ci_halfwidth),
            std::to_string(r.estimate.k_used), format_number(r.predicted_index),
            std::to_string(r.samples)});
    }
}

SingleRunResult run_single(const ExperimentSpec& spec) {
    validate(spec);
    SimConfig cfg = spec.base;
    cfg.dist = spec.distributions.front().dist;
    SingleRunResult res{run_simulation(cfg), std::nullopt};
    const auto values = res.output.latency_values();
    if (values.size() >= 10 * static_cast<std::size_t>(spec.n_batches)) {
        res.summary = batch_means(values, spec.n_batches);
    }
    return res;
}

}  // namespace redsim

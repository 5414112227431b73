#pragma once

#include <optional>
#include <string>
#include <vector>

#include "redsim/analytics.hpp"
#include "redsim/config.hpp"
#include "redsim/simulation.hpp"
#include "redsim/statistics.hpp"

namespace redsim {

enum class Scenario { Analytic, Single, Figure1Left, Figure1Right, StabilityScan, TailScan };

const char* to_string(Scenario s) noexcept;
Scenario parse_scenario(const std::string& text);

/// Everything one CLI invocation needs. Built from scenario defaults, then a
/// config file, then command-line overrides.
struct ExperimentSpec {
    Scenario scenario = Scenario::Single;
    SimConfig base;
    std::vector<Discipline> disciplines{Discipline::FCFS, Discipline::PS};
    std::vector<double> lambda_grid;  // sweep axis for analytic / figure1-left
    std::vector<int> d_grid;          // sweep axis for figure1-right / stability-scan
    std::vector<DistributionSpec> distributions;
    int replications = 5;
    int n_batches = 20;        // per replication
    double k_fraction = 0.05;  // Hill
    std::optional<double> target_load;  // tail-scan: choose lambda so rho_tilde hits this
    std::vector<double> probe_factors;  // stability-scan grid, multiples of N / (d E[X_min])
    std::string out_dir = ".";
    unsigned threads = 0;
};

/// Figure defaults for each scenario; `full` restores the large scale where
/// the desk-scale default is smaller.
ExperimentSpec default_spec(Scenario scenario, bool full = false);

/// Overlays values from a parsed config file. Distribution blocks, if any,
/// replace the default distribution list.
void apply_config(ExperimentSpec& spec, const ConfigFile& file);

/// Throws ConfigError on inconsistent specs (non-increasing sweeps, duplicate
/// labels, out-of-range parameters).
void validate(const ExperimentSpec& spec);

/// Seed of replication r: base seed + r. FCFS and PS share it.
std::uint64_t replication_seed(const ExperimentSpec& spec, int r);

/// Rows indexed by the sweep axis, one column per distribution label.
struct LatencyTable {
    std::string axis_name;
    std::vector<double> axis;
    std::vector<std::string> labels;
    std::vector<std::vector<std::optional<double>>> value;  // [row][column]
    std::vector<std::vector<std::optional<double>>> ci;     // 95% half-widths; empty for analytic
};

struct AnalyticResult {
    LatencyTable fcfs;
    LatencyTable ps;
    std::vector<std::pair<std::string, ReplicationPreference>> verdicts;
};

/// Formula values for d = 1 or d = N; rejects 1 < d < N with ConfigError and
/// throws InfeasibleError when no cell is stable.
AnalyticResult run_analytic(const ExperimentSpec& spec);

struct FigureResult {
    LatencyTable fcfs;
    LatencyTable ps;
};

/// Latency vs lambda at fixed N, d.
FigureResult run_figure1_left(const ExperimentSpec& spec);

/// Latency vs d at fixed N, lambda.
FigureResult run_figure1_right(const ExperimentSpec& spec);

/// Writes <stem>_FCFS.csv, <stem>_PS.csv and their _ci companions.
void write_figure(const FigureResult& fig, const std::string& dir, const std::string& stem);
void write_table(const LatencyTable& table, const std::string& path, bool ci_columns);

struct StabilityScanRow {
    Discipline discipline;
    std::string label;
    int d;
    double lambda_star;
    double analytic_ps;   // N / (d E[X_min])
    double relative_gap;  // (lambda_star - analytic_ps) / analytic_ps
};

std::vector<StabilityScanRow> run_stability_scan(const ExperimentSpec& spec);
void write_stability_scan(const std::vector<StabilityScanRow>& rows, const std::string& path);

struct TailScanRow {
    Discipline discipline;
    std::string label;
    double lambda;
    double rho_tilde;
    TailIndexEstimate estimate;
    double predicted_index;  // PS: d nu (iid) or nu (identical); FCFS: one less
    std::size_t samples;
};

struct TailScanResult {
    std::vector<TailScanRow> rows;
    std::optional<double> ps_minus_fcfs;  // per distribution when both disciplines ran; first one
};

/// Requires Pareto job sizes (ConfigError otherwise) and a stable load.
TailScanResult run_tail_scan(const ExperimentSpec& spec);
void write_tail_scan(const TailScanResult& result, const std::string& path);

struct SingleRunResult {
    SimOutput output;
    std::optional<BatchMeansResult> summary;  // when enough samples
};

SingleRunResult run_single(const ExperimentSpec& spec);

}  // namespace redsim

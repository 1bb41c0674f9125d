#pragma once

// Experiment runner: resolved solve -> uniform snapshots -> DMD / POD-DEIM
// fits on the first m snapshots -> full-horizon prediction -> error reports
// and a timing/accuracy comparison table, optionally written as CSV.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmdx/dmd.hpp"
#include "dmdx/error_analysis.hpp"
#include "dmdx/pod_deim.hpp"
#include "dmdx/solvers.hpp"

namespace dmdx {

enum class Method { Dmd, PodDeim, Resolved };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view text);

struct ExperimentConfig {
    std::string test_id = "1a";
    Eigen::Index n_grid = 0;       // 0: 500 (parabolic) or 512 (nls)
    Eigen::Index n_snapshots = 0;  // 0: 500 (parabolic) or 41 (nls)
    Eigen::Index m = 0;            // 0: 200 (parabolic) or 20 (nls)
    double rank_eps = 1e-8;
    std::vector<std::string> observables;  // empty: the test's default pair
    std::vector<Method> methods{Method::Dmd, Method::PodDeim, Method::Resolved};
    std::filesystem::path output_dir;  // empty: nothing written
    int timing_repeats = 3;
    bool write_trajectories = false;

    /// Fills the 0/empty fields with the per-test defaults.
    ExperimentConfig resolved() const;
    void validate() const;
};

/// Default observable list for a test id ("u" only for the linear tests).
std::vector<std::string> default_observables(std::string_view test_id);

/// Applies key=value pairs (test, n_grid, n_snapshots, m, rank_eps,
/// observables (';'-separated), methods (','-separated), out, repeats,
/// write_trajectories). Unknown keys are an InvalidArgument error.
void apply_settings(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv);

/// Reads a flat key=value file; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

struct ComparisonRow {
    std::string method;
    std::string observable;
    Eigen::Index rank = 0;
    double fit_time_s = 0.0;
    double predict_time_s = 0.0;
    double total_time_s = 0.0;
    double max_error = 0.0;
    double final_error = 0.0;
};

struct TimingSample {
    double fit_time_s = 0.0;
    double predict_time_s = 0.0;
    double total_time_s() const noexcept { return fit_time_s + predict_time_s; }
};

struct DmdRun {
    std::string observable;
    DmdModel model;
    ErrorReport report;
    ComparisonRow row;
    std::vector<TimingSample> timings;
};

struct PodRun {
    PodBasis pod;
    DeimOperator deim;
    std::vector<double> e_measured;  // steps m..n_max
    ComparisonRow row;
    std::vector<TimingSample> timings;
};

struct ExperimentResult {
    ExperimentConfig config;  // with defaults filled in
    PdeProblem problem;
    TimeGrid grid;
    Trajectory reference;  // uniform snapshots
    std::vector<DmdRun> dmd;
    std::optional<PodRun> pod;
    std::optional<ComparisonRow> resolved;
    std::vector<TimingSample> resolved_timings;
    std::vector<ComparisonRow> table;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct SummaryRow {
    ComparisonRow row;
    std::size_t time_rank = 0;   // 1 = fastest
    std::size_t error_rank = 0;  // 1 = most accurate
};

/// Rows ordered by total_time_s (stable), with rank columns for time and error.
std::vector<SummaryRow> compare_methods(const std::vector<ComparisonRow>& rows);

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::filesystem::path& path);
std::vector<ComparisonRow> read_comparison_csv(const std::filesystem::path& path);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);

/// Writes every artifact of a finished experiment into `dir`.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

/// Filesystem-friendly tag for an observable name, e.g. "u,u^3" -> "u+u3".
std::string observable_tag(std::string_view name);

/// Median of the samples' total times (upper median for even counts).
double median_total(const std::vector<TimingSample>& samples);

struct SweepPoint {
    std::string value;
    ExperimentResult result;
};

/// Runs one experiment per value of `param` ("m" or "rank_eps"); results go to
/// <out>/<param>=<value>/ plus a combined <out>/sweep.csv.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& param,
                                  const std::vector<std::string>& values);

}  // namespace dmdx

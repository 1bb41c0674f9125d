// dmdx: run DMD / POD-DEIM experiments on the built-in benchmark problems.
//
//   dmdx run --test 2b --m 200 --rank-eps 1e-8 --out runs/2b
//   dmdx sweep --test 1a --param m --values 100,200,300 --out runs/1a-m
//   dmdx compare --out merged a/comparison.csv b/comparison.csv
//
// Exit status: 0 success, 1 error, 2 invariant violation (--assert-bound).

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dmdx/error.hpp"
#include "dmdx/harness.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

struct Overrides {
    std::string config;
    std::map<std::string, std::string> kv;

    void bind(CLI::App* app) {
        app->add_option("--config", config, "key=value file; flags take precedence")->check(CLI::ExistingFile);
        add(app, "--test", "test", "benchmark id: 1a 1b 2a 2b 3 4");
        add(app, "--m", "m", "training snapshot count");
        add(app, "--rank-eps", "rank_eps", "SVD truncation threshold");
        add(app, "--n-grid", "n_grid", "spatial nodes");
        add(app, "--n-snapshots", "n_snapshots", "uniform snapshots over the horizon");
        add(app, "--observables", "observables", "';'-separated observable names, e.g. \"u;u,u^3\"");
        add(app, "--methods", "methods", "comma list from dmd,pod_deim,resolved");
        add(app, "--repeats", "repeats", "timing repeats (median reported)");
        add(app, "--out", "out", "output directory");
        app->add_flag_callback("--trajectories", [this] { kv["write_trajectories"] = "1"; },
                               "also write reference and predicted trajectories");
    }

    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        app->add_option_function<std::string>(flag, [this, key](const std::string& v) { kv[key] = v; }, help);
    }

    dmdx::ExperimentConfig build() const {
        dmdx::ExperimentConfig cfg;
        if (!config.empty()) dmdx::apply_settings(cfg, dmdx::read_config_file(config));
        dmdx::apply_settings(cfg, kv);
        return cfg;
    }
};

void print_header() {
    std::printf("%-9s %-14s %5s %11s %11s %11s %11s\n", "method", "observable", "rank", "fit_s", "predict_s",
                "max_error", "final_error");
}

void print_row(const dmdx::ComparisonRow& r) {
    std::printf("%-9s %-14s %5lld %11.4g %11.4g %11.4g %11.4g\n", r.method.c_str(), r.observable.c_str(),
                static_cast<long long>(r.rank), r.fit_time_s, r.predict_time_s, r.max_error, r.final_error);
}

void print_table(const std::vector<dmdx::ComparisonRow>& rows) {
    print_header();
    for (const auto& r : rows) print_row(r);
}

long long count_violations(const dmdx::ExperimentResult& result) {
    long long total = 0;
    for (const auto& d : result.dmd) {
        const auto v = d.report.bound_violations();
        if (v > 0) {
            std::fprintf(stderr, "bound violated at %lld steps for observable %s\n", static_cast<long long>(v),
                         d.observable.c_str());
        }
        total += v;
    }
    return total;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto end = comma == std::string::npos ? s.size() : comma;
        if (end > start) out.push_back(s.substr(start, end - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DMD / POD-DEIM prediction experiments with a posteriori error bounds"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run one experiment");
    Overrides run_opts;
    run_opts.bind(run);
    bool assert_bound = false;
    run->add_flag("--assert-bound", assert_bound, "exit 2 if a measured DMD error exceeds its bound");

    auto* sweep = app.add_subcommand("sweep", "repeat an experiment over values of m or rank_eps");
    Overrides sweep_opts;
    sweep_opts.bind(sweep);
    std::string param;
    std::string values;
    sweep->add_option("--param", param, "m or rank_eps")->required()->check(CLI::IsMember({"m", "rank_eps"}));
    sweep->add_option("--values", values, "comma-separated values")->required();
    bool sweep_assert = false;
    sweep->add_flag("--assert-bound", sweep_assert, "exit 2 if any measured DMD error exceeds its bound");

    auto* compare = app.add_subcommand("compare", "merge comparison tables into one ranked summary");
    std::vector<std::string> tables;
    std::string compare_out;
    compare->add_option("tables", tables, "comparison.csv files")->required()->check(CLI::ExistingFile);
    compare->add_option("--out", compare_out, "directory for comparison.csv and summary.csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto result = dmdx::run_experiment(run_opts.build());
            print_table(result.table);
            if (!result.config.output_dir.empty()) {
                std::printf("wrote %s\n", result.config.output_dir.string().c_str());
            }
            if (count_violations(result) > 0 && assert_bound) return kExitViolation;
        } else if (sweep->parsed()) {
            const auto points = dmdx::run_sweep(sweep_opts.build(), param, split_list(values));
            long long violations = 0;
            for (const auto& p : points) {
                std::printf("%s=%s\n", param.c_str(), p.value.c_str());
                print_table(p.result.table);
                violations += count_violations(p.result);
            }
            if (violations > 0 && sweep_assert) return kExitViolation;
        } else if (compare->parsed()) {
            std::vector<dmdx::ComparisonRow> rows;
            for (const auto& t : tables) {
                auto part = dmdx::read_comparison_csv(t);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            const auto summary = dmdx::compare_methods(rows);
            std::printf("%4s %4s ", "time", "err");
            print_header();
            for (const auto& s : summary) {
                std::printf("%4zu %4zu ", s.time_rank, s.error_rank);
                print_row(s.row);
            }
            if (!compare_out.empty()) {
                std::filesystem::create_directories(compare_out);
                dmdx::write_comparison_csv(rows, std::filesystem::path(compare_out) / "comparison.csv");
                dmdx::write_summary_csv(summary, std::filesystem::path(compare_out) / "summary.csv");
            }
        }
    } catch (const dmdx::Error& e) {
        std::fprintf(stderr, "dmdx: %s: %s\n", std::string(dmdx::to_string(e.code())).c_str(), e.what());
        return kExitError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "dmdx: %s\n", e.what());
        return kExitError;
    }
    return 0;
}

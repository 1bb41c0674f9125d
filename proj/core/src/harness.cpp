#include "dmdx/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dmdx/error.hpp"

namespace dmdx {

namespace fs = std::filesystem;

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::Dmd: return "dmd";
        case Method::PodDeim: return "pod_deim";
        case Method::Resolved: return "resolved";
    }
    return "unknown";
}

Method parse_method(std::string_view text) {
    if (text == "dmd") return Method::Dmd;
    if (text == "pod_deim" || text == "pod") return Method::PodDeim;
    if (text == "resolved") return Method::Resolved;
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(text) + "'");
}

std::vector<std::string> default_observables(std::string_view test_id) {
    if (test_id == "2a" || test_id == "2b") return {"u", "u,u^3"};
    if (test_id == "3") return {"u", "u,u^2,u^3"};
    if (test_id == "4") return {"q", "q,|q|^2q"};
    return {"u"};
}

ExperimentConfig ExperimentConfig::resolved() const {
    ExperimentConfig out = *this;
    const bool nls = test_id == "4";
    if (out.n_grid == 0) out.n_grid = nls ? 512 : 500;
    if (out.n_snapshots == 0) out.n_snapshots = nls ? 41 : 500;
    if (out.m == 0) out.m = nls ? 20 : 200;
    if (out.observables.empty()) out.observables = default_observables(test_id);
    return out;
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> known{"1a", "1b", "2a", "2b", "3", "4"};
    DMDX_REQUIRE(std::find(known.begin(), known.end(), test_id) != known.end(), ErrorCode::InvalidArgument,
                 "unknown test id '" + test_id + "'");
    DMDX_REQUIRE(n_snapshots >= 3, ErrorCode::InvalidArgument, "n_snapshots must be >= 3");
    DMDX_REQUIRE(m >= 2, ErrorCode::InvalidArgument, "m must be >= 2");
    DMDX_REQUIRE(m < n_snapshots, ErrorCode::TooFewStates, "m must be below n_snapshots");
    DMDX_REQUIRE(rank_eps > 0.0 && rank_eps < 1.0, ErrorCode::InvalidArgument,
                 "rank_eps must lie in (0, 1)");
    DMDX_REQUIRE(timing_repeats >= 1, ErrorCode::InvalidArgument, "repeats must be >= 1");
    DMDX_REQUIRE(!methods.empty(), ErrorCode::InvalidArgument, "no methods selected");
    for (const auto& name : observables) (void)ObservableMap::parse(name);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

Eigen::Index parse_index(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used == v.size()) return static_cast<Eigen::Index>(x);
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidArgument, "bad integer for " + key + ": '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidArgument, "bad number for " + key + ": '" + v + "'");
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

void fill_times(ComparisonRow& row, const std::vector<TimingSample>& samples) {
    std::vector<double> fit, pred;
    for (const auto& s : samples) {
        fit.push_back(s.fit_time_s);
        pred.push_back(s.predict_time_s);
    }
    row.fit_time_s = median_of(fit);
    row.predict_time_s = median_of(pred);
    row.total_time_s = median_total(samples);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    DMDX_REQUIRE(out.good(), ErrorCode::Io, "cannot open " + path.string());
    return out;
}

void write_timings_csv(const ExperimentResult& r, const fs::path& path) {
    auto out = open_out(path);
    out << "method,observable,repeat,fit_time_s,predict_time_s,total_time_s\n";
    auto emit = [&](const std::string& method, const std::string& obs, const std::vector<TimingSample>& ts) {
        for (std::size_t i = 0; i < ts.size(); ++i) {
            out << method << ",\"" << obs << "\"," << i << ',' << fmt17(ts[i].fit_time_s) << ','
                << fmt17(ts[i].predict_time_s) << ',' << fmt17(ts[i].total_time_s()) << '\n';
        }
    };
    if (r.resolved) emit("resolved", "-", r.resolved_timings);
    for (const auto& d : r.dmd) emit("dmd", d.observable, d.timings);
    if (r.pod) emit("pod_deim", "u", r.pod->timings);
}

void write_dmd_files(const DmdRun& run, const Trajectory& reference, bool trajectories, const fs::path& dir) {
    const std::string tag = observable_tag(run.observable);
    write_error_report_csv(run.report, dir / ("errors_dmd_" + tag + ".csv"));
    save_model(run.model, dir / ("dmd_" + tag + ".model"));

    auto eig = open_out(dir / ("eigenvalues_" + tag + ".csv"));
    eig << "k,re,im,abs\n";
    for (Eigen::Index k = 0; k < run.model.rank(); ++k) {
        const Complex l = run.model.lambda(k);
        eig << k << ',' << fmt17(l.real()) << ',' << fmt17(l.imag()) << ',' << fmt17(std::abs(l)) << '\n';
    }
    auto sv = open_out(dir / ("singular_values_" + tag + ".csv"));
    sv << "i,sigma\n";
    for (Eigen::Index i = 0; i < run.model.singular_values.size(); ++i) {
        sv << i << ',' << fmt17(run.model.singular_values(i)) << '\n';
    }
    if (trajectories) {
        Trajectory pred = reference;
        for (Eigen::Index n = 0; n < reference.size(); ++n) pred.states.col(n) = predict(run.model, n);
        write_trajectory_csv(pred, dir / ("prediction_dmd_" + tag + ".csv"));
    }
}

void write_overview_csv(const ExperimentResult& r, const fs::path& path) {
    auto out = open_out(path);
    out << "observable,rank,lifted_dim,m,eps_m,e_m,phi_pinv_fro,max_tau,max_e_measured,max_e_bound,"
           "bound_violations,max_abs_lambda\n";
    for (const auto& d : r.dmd) {
        const auto& rep = d.report;
        const double max_tau = *std::max_element(rep.tau.begin(), rep.tau.end());
        const double max_bound = *std::max_element(rep.e_bound.begin(), rep.e_bound.end());
        const double max_lambda = d.model.lambda.cwiseAbs().maxCoeff();
        out << '"' << d.observable << "\"," << d.model.rank() << ',' << d.model.lifted_dim() << ','
            << d.model.m << ',' << fmt17(rep.eps_m) << ',' << fmt17(rep.e_m) << ','
            << fmt17(rep.phi_pinv_fro) << ',' << fmt17(max_tau) << ',' << fmt17(rep.max_measured())
            << ',' << fmt17(max_bound) << ',' << rep.bound_violations() << ',' << fmt17(max_lambda)
            << '\n';
    }
}

void write_run_info(const ExperimentResult& r, const fs::path& path) {
    auto out = open_out(path);
    const auto& c = r.config;
    out << "key,value\n"
        << "test," << c.test_id << '\n'
        << "kind," << to_string(r.problem.kind) << '\n'
        << "n_grid," << c.n_grid << '\n'
        << "n_snapshots," << c.n_snapshots << '\n'
        << "m," << c.m << '\n'
        << "rank_eps," << fmt17(c.rank_eps) << '\n'
        << "t_final," << fmt17(r.problem.t_final) << '\n'
        << "fine_dt," << fmt17(r.grid.dt) << '\n'
        << "fine_steps," << r.grid.steps << '\n'
        << "snapshot_dt," << fmt17(r.reference.dt) << '\n';
    if (r.pod) {
        out << "pod_rank," << r.pod->pod.r << '\n' << "deim_points," << r.pod->deim.size() << '\n';
    }
}

void write_pod_files(const ExperimentResult& r, const fs::path& dir) {
    const auto& pod = *r.pod;
    auto out = open_out(dir / "errors_pod_deim.csv");
    out << "step,t,e_measured\n";
    for (std::size_t i = 0; i < pod.e_measured.size(); ++i) {
        const Eigen::Index n = r.config.m + static_cast<Eigen::Index>(i);
        out << n << ',' << fmt17(r.reference.time(n)) << ',' << fmt17(pod.e_measured[i]) << '\n';
    }
    auto idx = open_out(dir / "deim_indices.csv");
    idx << "k,index,x\n";
    const RealVector x = r.problem.grid();
    for (std::size_t k = 0; k < pod.deim.indices.size(); ++k) {
        idx << k << ',' << pod.deim.indices[k] << ',' << fmt17(x(pod.deim.indices[k])) << '\n';
    }
}

}  // namespace

void apply_settings(ExperimentConfig& cfg, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "test") cfg.test_id = value;
        else if (key == "n_grid") cfg.n_grid = parse_index(key, value);
        else if (key == "n_snapshots") cfg.n_snapshots = parse_index(key, value);
        else if (key == "m") cfg.m = parse_index(key, value);
        else if (key == "rank_eps") cfg.rank_eps = parse_double(key, value);
        else if (key == "observables") cfg.observables = split(value, ';');
        else if (key == "methods") {
            cfg.methods.clear();
            for (const auto& m : split(value, ',')) cfg.methods.push_back(parse_method(m));
        } else if (key == "out") cfg.output_dir = value;
        else if (key == "repeats") cfg.timing_repeats = static_cast<int>(parse_index(key, value));
        else if (key == "write_trajectories") cfg.write_trajectories = value == "1" || value == "true";
        else throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
    std::ifstream in(path);
    DMDX_REQUIRE(in.good(), ErrorCode::Io, "cannot open config " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        DMDX_REQUIRE(eq != std::string::npos, ErrorCode::InvalidArgument,
                     path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return kv;
}

double median_total(const std::vector<TimingSample>& samples) {
    DMDX_REQUIRE(!samples.empty(), ErrorCode::InvalidArgument, "no timing samples");
    std::vector<double> totals;
    for (const auto& s : samples) totals.push_back(s.total_time_s());
    return median_of(std::move(totals));
}

std::string observable_tag(std::string_view name) {
    std::string out;
    for (std::size_t i = 0; i < name.size(); ++i) {
        const char c = name[i];
        if (c == ',') out += '+';
        else if (c == '|') {
            // |q|^2q -> absq2q
            if (i + 2 < name.size() && name[i + 2] == '|') {
                out += "abs";
                out += name[i + 1];
                i += 2;
            }
        } else if (c != '^' && c != ' ') out += c;
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& input) {
    ExperimentResult result;
    result.config = input.resolved();
    const ExperimentConfig& cfg = result.config;
    cfg.validate();
    const bool writing = !cfg.output_dir.empty();
    if (writing) fs::create_directories(cfg.output_dir);
    const auto wants = [&](Method m) {
        return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
    };

    result.problem = make_test_problem(cfg.test_id, cfg.n_grid);
    const PdeProblem& problem = result.problem;
    result.grid = plan_time_grid(problem, cfg.n_snapshots - 1);
    SolveOptions opts;
    opts.grid = result.grid;
    opts.record_every = result.grid.steps / (cfg.n_snapshots - 1);

    const int solve_repeats = wants(Method::Resolved) ? cfg.timing_repeats : 1;
    Trajectory fine;
    for (int rep = 0; rep < solve_repeats; ++rep) {
        const auto t0 = Clock::now();
        Trajectory out = solve(problem, opts);
        result.resolved_timings.push_back({0.0, seconds_since(t0)});
        if (rep == 0) fine = std::move(out);
    }
    const Trajectory interior = subsample_uniform(fine, cfg.n_snapshots);
    result.reference = with_boundary_nodes(interior, problem);
    const Trajectory& ref = result.reference;
    const Eigen::Index n_max = ref.size() - 1;
    if (writing) {
        write_run_info(result, cfg.output_dir / "run_info.csv");
        if (cfg.write_trajectories) {
            write_trajectory(ref, cfg.output_dir / "reference.traj");
            write_trajectory_csv(ref, cfg.output_dir / "reference.csv");
        }
    }
    if (wants(Method::Resolved)) {
        ComparisonRow row;
        row.method = "resolved";
        row.observable = "-";
        row.rank = problem.n_grid;
        fill_times(row, result.resolved_timings);
        result.resolved = row;
        result.table.push_back(row);
    }

    const SnapshotPair training = build_snapshot_pair(ref, cfg.m);

    if (wants(Method::Dmd)) {
        for (const auto& name : cfg.observables) {
            const ObservableMap g = ObservableMap::parse(name);
            DmdRun run;
            run.observable = g.name();
            Matrix predictions(ref.dim(), ref.size());
            for (int rep = 0; rep < cfg.timing_repeats; ++rep) {
                const auto t0 = Clock::now();
                DmdModel model = fit(training, g, cfg.rank_eps);
                const double fit_s = seconds_since(t0);
                const auto t1 = Clock::now();
                for (Eigen::Index n = 0; n <= n_max; ++n) predictions.col(n) = predict(model, n);
                run.timings.push_back({fit_s, seconds_since(t1)});
                if (rep == 0) run.model = std::move(model);
            }
            run.report = build_error_report(run.model, ref);
            run.row.method = "dmd";
            run.row.observable = run.observable;
            run.row.rank = run.model.rank();
            fill_times(run.row, run.timings);
            run.row.max_error = run.report.max_measured();
            run.row.final_error = run.report.e_measured.back();
            if (writing) write_dmd_files(run, ref, cfg.write_trajectories, cfg.output_dir);
            result.table.push_back(run.row);
            result.dmd.push_back(std::move(run));
        }
        if (writing) write_overview_csv(result, cfg.output_dir / "dmd_overview.csv");
    }

    if (wants(Method::PodDeim)) {
        PodRun run;
        const Matrix train_states = interior.states.leftCols(cfg.m + 1);
        Trajectory rom;
        for (int rep = 0; rep < cfg.timing_repeats; ++rep) {
            const auto t0 = Clock::now();
            PodBasis pod = fit_pod(train_states, cfg.rank_eps);
            DeimOperator deim = fit_deim(pod, nonlinear_snapshots(problem, train_states), cfg.rank_eps);
            const double fit_s = seconds_since(t0);
            const auto t1 = Clock::now();
            Trajectory out = with_boundary_nodes(rom_integrate(pod, deim, problem, opts), problem);
            run.timings.push_back({fit_s, seconds_since(t1)});
            if (rep == 0) {
                run.pod = std::move(pod);
                run.deim = std::move(deim);
                rom = std::move(out);
            }
        }
        for (Eigen::Index n = cfg.m; n <= n_max; ++n) {
            run.e_measured.push_back((ref.states.col(n) - rom.states.col(n)).norm());
        }
        run.row.method = "pod_deim";
        run.row.observable = problem.is_real ? "u" : "q";
        run.row.rank = run.pod.r;
        fill_times(run.row, run.timings);
        run.row.max_error = *std::max_element(run.e_measured.begin(), run.e_measured.end());
        run.row.final_error = run.e_measured.back();
        result.table.push_back(run.row);
        result.pod = std::move(run);
        if (writing) {
            write_pod_files(result, cfg.output_dir);
            write_run_info(result, cfg.output_dir / "run_info.csv");
            if (cfg.write_trajectories) write_trajectory_csv(rom, cfg.output_dir / "prediction_pod_deim.csv");
        }
    }

    if (writing) write_experiment(result, cfg.output_dir);
    return result;
}

void write_experiment(const ExperimentResult& result, const fs::path& dir) {
    fs::create_directories(dir);
    write_comparison_csv(result.table, dir / "comparison.csv");
    write_summary_csv(compare_methods(result.table), dir / "summary.csv");
    write_timings_csv(result, dir / "timings.csv");
}

std::vector<SummaryRow> compare_methods(const std::vector<ComparisonRow>& rows) {
    std::vector<SummaryRow> out;
    for (const auto& r : rows) out.push_back({r, 0, 0});
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rows[a].max_error < rows[b].max_error;
    });
    for (std::size_t k = 0; k < order.size(); ++k) out[order[k]].error_rank = k + 1;
    std::stable_sort(out.begin(), out.end(), [](const SummaryRow& a, const SummaryRow& b) {
        return a.row.total_time_s < b.row.total_time_s;
    });
    for (std::size_t k = 0; k < out.size(); ++k) out[k].time_rank = k + 1;
    return out;
}

namespace {

constexpr const char* kComparisonHeader =
    "method,observable,rank,fit_time_s,predict_time_s,total_time_s,max_error,final_error";

void write_row(std::ostream& out, const ComparisonRow& r) {
    out << r.method << ",\"" << r.observable << "\"," << r.rank << ',' << fmt17(r.fit_time_s) << ','
        << fmt17(r.predict_time_s) << ',' << fmt17(r.total_time_s) << ',' << fmt17(r.max_error) << ','
        << fmt17(r.final_error);
}

// Splits one CSV record, honoring double-quoted fields.
std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        else if (c == ',' && !quoted) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') cur += c;
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const fs::path& path) {
    auto out = open_out(path);
    out << kComparisonHeader << '\n';
    for (const auto& r : rows) {
        write_row(out, r);
        out << '\n';
    }
}

std::vector<ComparisonRow> read_comparison_csv(const fs::path& path) {
    std::ifstream in(path);
    DMDX_REQUIRE(in.good(), ErrorCode::Io, "cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    DMDX_REQUIRE(line == kComparisonHeader, ErrorCode::Io, path.string() + ": not a comparison table");
    std::vector<ComparisonRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = csv_fields(line);
        DMDX_REQUIRE(f.size() == 8, ErrorCode::Io, path.string() + ": malformed row '" + line + "'");
        ComparisonRow r;
        r.method = f[0];
        r.observable = f[1];
        r.rank = parse_index("rank", f[2]);
        r.fit_time_s = parse_double("fit_time_s", f[3]);
        r.predict_time_s = parse_double("predict_time_s", f[4]);
        r.total_time_s = parse_double("total_time_s", f[5]);
        r.max_error = parse_double("max_error", f[6]);
        r.final_error = parse_double("final_error", f[7]);
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const fs::path& path) {
    auto out = open_out(path);
    out << "time_rank,error_rank," << kComparisonHeader << '\n';
    for (const auto& s : rows) {
        out << s.time_rank << ',' << s.error_rank << ',';
        write_row(out, s.row);
        out << '\n';
    }
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& param,
                                  const std::vector<std::string>& values) {
    DMDX_REQUIRE(param == "m" || param == "rank_eps", ErrorCode::InvalidArgument,
                 "sweep parameter must be m or rank_eps");
    DMDX_REQUIRE(!values.empty(), ErrorCode::InvalidArgument, "sweep needs at least one value");
    std::vector<SweepPoint> points;
    for (const auto& v : values) {
        ExperimentConfig cfg = base;
        apply_settings(cfg, {{param, v}});
        if (!base.output_dir.empty()) cfg.output_dir = base.output_dir / (param + "=" + v);
        points.push_back({v, run_experiment(cfg)});
    }
    if (!base.output_dir.empty()) {
        fs::create_directories(base.output_dir);
        auto out = open_out(base.output_dir / "sweep.csv");
        out << "param,value,method,observable,rank,eps_m,max_tau,max_error,final_error,bound_violations\n";
        for (const auto& p : points) {
            for (const auto& d : p.result.dmd) {
                const double max_tau = *std::max_element(d.report.tau.begin(), d.report.tau.end());
                out << param << ',' << p.value << ",dmd,\"" << d.observable << "\"," << d.row.rank << ','
                    << fmt17(d.report.eps_m) << ',' << fmt17(max_tau) << ',' << fmt17(d.row.max_error)
                    << ',' << fmt17(d.row.final_error) << ',' << d.report.bound_violations() << '\n';
            }
            if (p.result.pod) {
                const auto& r = p.result.pod->row;
                out << param << ',' << p.value << ",pod_deim,\"" << r.observable << "\"," << r.rank
                    << ",,," << fmt17(r.max_error) << ',' << fmt17(r.final_error) << ",\n";
            }
        }
    }
    return points;
}

}  // namespace dmdx

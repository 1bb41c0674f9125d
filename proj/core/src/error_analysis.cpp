#include "dmdx/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "dmdx/error.hpp"

namespace dmdx {

std::size_t ErrorReport::bound_violations() const {
    std::size_t count = 0;
    for (std::size_t i = 0; i < e_bound.size(); ++i) {
        if (e_bound[i] < e_measured[i]) ++count;
    }
    return count;
}

double ErrorReport::max_measured() const {
    return e_measured.empty() ? 0.0 : *std::max_element(e_measured.begin(), e_measured.end());
}

std::vector<double> local_truncation_errors(const DmdModel& model, const Matrix& lifted,
                                            Eigen::Index first, Eigen::Index last) {
    DMDX_REQUIRE(lifted.rows() == model.lifted_dim(), ErrorCode::ShapeError,
                 "reference dimension does not match the model");
    DMDX_REQUIRE(first >= 1 && first <= last && last < lifted.cols(), ErrorCode::RangeError,
                 "local truncation range outside the reference");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(last - first + 1));
    for (Eigen::Index n = first; n <= last; ++n) {
        const Vector tau = lifted.col(n) - apply_propagator(model, lifted.col(n - 1));
        out.push_back(tau.norm());
    }
    return out;
}

std::vector<double> local_truncation_errors(const DmdModel& model, const Trajectory& reference,
                                            Eigen::Index first, Eigen::Index last) {
    DMDX_REQUIRE(last < reference.size(), ErrorCode::RangeError, "range beyond reference");
    DMDX_REQUIRE(first >= 1 && first <= last, ErrorCode::RangeError, "bad local truncation range");
    const Matrix window = reference.states.middleCols(first - 1, last - first + 2);
    const Matrix lifted = model.observable.is_identity() ? window : model.observable.lift_columns(window);
    // Shift indices into the window.
    return local_truncation_errors(model, lifted, 1, last - first + 1);
}

double epsilon_m(const DmdModel& model, const SnapshotPair& training) {
    const ObservableMap& g = model.observable;
    double eps = 0.0;
    for (Eigen::Index k = 0; k < training.m; ++k) {
        const Vector y_prev = g.lift(training.x.col(k));
        const Vector y_next = g.lift(training.x_prime.col(k));
        eps = std::max(eps, (y_next - apply_propagator(model, y_prev)).norm());
    }
    return eps;
}

double anchor_error(const DmdModel& model, const Trajectory& reference) {
    DMDX_REQUIRE(model.m < reference.size(), ErrorCode::RangeError, "reference shorter than m+1");
    const Vector y_m = model.observable.lift(reference.state(model.m));
    return (y_m - predict_observable(model, model.m)).norm();
}

namespace {

// Squared column norms of Phi and |lambda|^2, the ingredients of |Phi L^k|_F.
struct ModeScales {
    RealVector col_sq;
    RealVector lambda_sq;

    explicit ModeScales(const DmdModel& model)
        : col_sq(model.phi.colwise().squaredNorm().transpose()),
          lambda_sq(model.lambda.cwiseAbs2()) {}
};

}  // namespace

double global_error_bound(const DmdModel& model, double eps_m, double e_m_anchor, Eigen::Index n) {
    DMDX_REQUIRE(n >= model.m, ErrorCode::RangeError, "bound is defined for n >= m");
    const ModeScales s(model);
    const double pinv_fro = model.phi_pinv.norm();
    const Eigen::Index steps = n - model.m;
    RealVector pw = RealVector::Ones(s.col_sq.size());
    double running_max = 0.0;
    for (Eigen::Index k = 0; k < steps; ++k) {
        running_max = std::max(running_max, std::sqrt(s.col_sq.dot(pw)));
        pw = pw.cwiseProduct(s.lambda_sq);
    }
    const double head = std::sqrt(s.col_sq.dot(pw)) * pinv_fro * e_m_anchor;
    return head + static_cast<double>(steps) * eps_m * running_max * pinv_fro;
}

std::vector<double> global_error_bounds(const DmdModel& model, double eps_m, double e_m_anchor,
                                        Eigen::Index n_max) {
    DMDX_REQUIRE(n_max >= model.m, ErrorCode::RangeError, "bound horizon ends before m");
    const ModeScales s(model);
    const double pinv_fro = model.phi_pinv.norm();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_max - model.m + 1));
    RealVector pw = RealVector::Ones(s.col_sq.size());
    double running_max = 0.0;  // over k < n - m
    for (Eigen::Index steps = 0; steps <= n_max - model.m; ++steps) {
        const double current = std::sqrt(s.col_sq.dot(pw));  // |Phi L^steps|_F
        out.push_back(current * pinv_fro * e_m_anchor +
                      static_cast<double>(steps) * eps_m * running_max * pinv_fro);
        running_max = std::max(running_max, current);
        pw = pw.cwiseProduct(s.lambda_sq);
    }
    return out;
}

std::vector<double> measured_global_error(const DmdModel& model, const Trajectory& reference,
                                          Eigen::Index first, Eigen::Index last) {
    DMDX_REQUIRE(first >= 0 && first <= last && last < reference.size(), ErrorCode::RangeError,
                 "measured error range outside the reference");
    DMDX_REQUIRE(reference.dim() * static_cast<Eigen::Index>(model.observable.block_count()) ==
                     model.lifted_dim(),
                 ErrorCode::ShapeError, "reference dimension does not match the model");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(last - first + 1));
    for (Eigen::Index n = first; n <= last; ++n) {
        out.push_back((reference.states.col(n) - predict(model, n)).norm());
    }
    return out;
}

ErrorReport build_error_report(const DmdModel& model, const Trajectory& reference) {
    const Eigen::Index m = model.m;
    const Eigen::Index n_max = reference.size() - 1;
    DMDX_REQUIRE(m >= 1 && n_max >= m, ErrorCode::RangeError, "reference must extend to step m");

    ErrorReport report;
    report.first_step = m;
    report.last_step = n_max;
    const SnapshotPair training = build_snapshot_pair(reference, m);
    report.eps_m = epsilon_m(model, training);
    report.e_m = anchor_error(model, reference);
    report.tau = local_truncation_errors(model, reference, m, n_max);
    report.e_measured = measured_global_error(model, reference, m, n_max);
    report.e_bound = global_error_bounds(model, report.eps_m, report.e_m, n_max);
    report.phi_pinv_fro = model.phi_pinv.norm();

    const ModeScales s(model);
    RealVector pw = RealVector::Ones(s.col_sq.size());
    for (Eigen::Index k = 0; k <= n_max - m; ++k) {
        report.phi_lambda_fro.push_back(std::sqrt(s.col_sq.dot(pw)));
        pw = pw.cwiseProduct(s.lambda_sq);
    }
    for (Eigen::Index n = m; n <= n_max; ++n) report.time.push_back(reference.time(n));
    return report;
}

void write_error_report_csv(const ErrorReport& report, std::ostream& out) {
    out << "step,t,tau,e_measured,e_bound\n";
    char buf[160];
    for (std::size_t i = 0; i < report.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<long long>(report.step(i)), report.time[i], report.tau[i],
                      report.e_measured[i], report.e_bound[i]);
        out << buf;
    }
}

void write_error_report_csv(const ErrorReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    DMDX_REQUIRE(out.good(), ErrorCode::Io, "cannot open " + path.string());
    write_error_report_csv(report, out);
}

}  // namespace dmdx

#pragma once

// Local/global truncation errors of a DMD extrapolation and the computable
// a-posteriori bound on the global error.
//
// With A = Phi L Phi^+ the one-step map of a fitted model and y^n the lifted
// reference states, the local truncation error is tau^n = y^n - A y^{n-1}
// and the global error e^n = y^n - Phi L^n b obeys e^n = tau^n + A e^{n-1}.
// Unrolling that recurrence from the anchor step m gives
//
//   |e^n| <= |Phi L^{n-m}|_F |Phi^+|_F |e^m|
//            + (n-m) eps_m max_{0<=k<n-m} |Phi L^k|_F |Phi^+|_F,
//
// where eps_m bounds |tau|. eps_m is estimated from data as the largest
// local truncation error over the training window.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "dmdx/dmd.hpp"
#include "dmdx/snapshots.hpp"

namespace dmdx {

struct ErrorReport {
    Eigen::Index first_step = 0;  // m
    Eigen::Index last_step = 0;   // n_max
    std::vector<double> time;
    std::vector<double> tau;
    std::vector<double> e_measured;
    std::vector<double> e_bound;
    double eps_m = 0.0;
    double e_m = 0.0;  // observable-space anchor error at step m
    double phi_pinv_fro = 0.0;
    std::vector<double> phi_lambda_fro;  // |Phi L^k|_F for k = 0..n_max-m

    std::size_t size() const noexcept { return tau.size(); }
    Eigen::Index step(std::size_t i) const noexcept {
        return first_step + static_cast<Eigen::Index>(i);
    }
    /// Count of steps where the bound falls below the measured error.
    std::size_t bound_violations() const;
    double max_measured() const;
};

/// |tau^n|_2 for n in [first, last]; `lifted` holds y^0.. as columns.
std::vector<double> local_truncation_errors(const DmdModel& model, const Matrix& lifted,
                                            Eigen::Index first, Eigen::Index last);

/// Same, lifting the state trajectory with the model's observable first.
std::vector<double> local_truncation_errors(const DmdModel& model, const Trajectory& reference,
                                            Eigen::Index first, Eigen::Index last);

/// Largest |tau^k| over the training window k = 1..m.
double epsilon_m(const DmdModel& model, const SnapshotPair& training);

/// |y^m - Phi L^m b|_2 in observable space.
double anchor_error(const DmdModel& model, const Trajectory& reference);

/// Bound at a single step n >= m (direct evaluation, O(r (n-m))).
double global_error_bound(const DmdModel& model, double eps_m, double e_m_anchor, Eigen::Index n);

/// Bound for every n in [m, n_max], with the running max kept incrementally.
std::vector<double> global_error_bounds(const DmdModel& model, double eps_m, double e_m_anchor,
                                        Eigen::Index n_max);

/// |u^n - predict(model, n)|_2 in state space for n in [first, last].
std::vector<double> measured_global_error(const DmdModel& model, const Trajectory& reference,
                                          Eigen::Index first, Eigen::Index last);

/// Full report over [m, n_max] where n_max is the last reference state.
/// The first m+1 reference states must be the training data.
ErrorReport build_error_report(const DmdModel& model, const Trajectory& reference);

/// CSV with header "step,t,tau,e_measured,e_bound", 17 significant digits.
void write_error_report_csv(const ErrorReport& report, std::ostream& out);
void write_error_report_csv(const ErrorReport& report, const std::filesystem::path& path);

}  // namespace dmdx

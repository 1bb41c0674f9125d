#pragma once

// Rank-truncated dynamic mode decomposition on state or observable space.
//
// fit() lifts both snapshot matrices by the observable map, reduces the
// one-step operator onto the leading left singular vectors of the lifted
// input matrix, and recovers exact DMD modes from the shifted data:
//
//   Y = U S V^H (truncated),  K = U^H Y' V S^-1,  K W = W L,
//   Phi = Y' V S^-1 W,        b = Phi^+ y^0.
//
// Predictions are closed form, y^n = Phi L^n b, so evaluating step n costs
// the same for every n.

#include <filesystem>

#include "dmdx/numerics.hpp"
#include "dmdx/snapshots.hpp"

namespace dmdx {

struct DmdModel {
    Matrix phi;       // p x r modes
    Vector lambda;    // r eigenvalues
    Vector b;         // r amplitudes
    Matrix phi_pinv;  // r x p left inverse of phi
    Eigen::Index m = 0;
    double dt = 0.0;
    ObservableMap observable = ObservableMap::identity();
    bool real_output = true;      // predictions keep only the real part
    RealVector singular_values;   // full spectrum of the lifted input matrix

    Eigen::Index rank() const noexcept { return lambda.size(); }
    Eigen::Index lifted_dim() const noexcept { return phi.rows(); }

    /// Assembles a model from given factors (phi_pinv is computed).
    static DmdModel from_parts(Matrix phi, Vector lambda, Vector b, ObservableMap observable,
                               Eigen::Index m = 0, double dt = 1.0, bool real_output = true);
};

DmdModel fit(const SnapshotPair& pair, const ObservableMap& g, double rank_eps);

/// lambda^n for every mode, by repeated squaring. Throws Overflow when any
/// |lambda_k|^n leaves the double range.
Vector eigenvalue_powers(const Vector& lambda, Eigen::Index n);

/// Phi L^n b in observable space.
Vector predict_observable(const DmdModel& model, Eigen::Index n);

/// Observable prediction mapped back to the state (real part for real data).
Vector predict(const DmdModel& model, Eigen::Index n);

/// Phi L Phi^+ y without forming the p x p matrix.
Vector apply_propagator(const DmdModel& model, const Vector& y);

/// Dense one-step map A = Phi L Phi^+.
Matrix propagator_matrix(const DmdModel& model);

// Model file: 8-byte magic "DMDXMDL1", then little-endian int64 p, r, m,
// float64 dt, uint8 real_output, int64 name length + observable name bytes,
// int64 sigma count + float64 singular values, then complex128 arrays
// lambda[r], b[r], phi[p*r], phi_pinv[r*p] (column-major).
void save_model(const DmdModel& model, const std::filesystem::path& path);
DmdModel load_model(const std::filesystem::path& path);

}  // namespace dmdx

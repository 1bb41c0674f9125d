#pragma once

// POD-Galerkin reduced models with DEIM for the nonlinear terms.
//
// Every benchmark problem is written in the semi-discrete form
//
//   du/dt = L u + c(t) + f(u)
//
// with L the linear part (diffusion stencil minus the linear reaction rate,
// or i/2 times the spectral second derivative), c(t) the Dirichlet data
// entering the stencil, and f a pointwise or nearest-neighbor nonlinearity.
// The reduced model advances a = V^H u with
//
//   da/dt = (V^H L V) a + V^H c(t) + V^H U_f (P^T U_f)^-1 P^T f(V a),
//
// where only the DEIM rows P of f(V a) are ever evaluated.

#include <vector>

#include "dmdx/numerics.hpp"
#include "dmdx/snapshots.hpp"
#include "dmdx/solvers.hpp"

namespace dmdx {

struct PodBasis {
    Matrix modes;  // N x r, orthonormal columns
    RealVector singular_values;
    Eigen::Index r = 0;
};

struct DeimOperator {
    Matrix basis_nl;                    // N x s
    std::vector<Eigen::Index> indices;  // s distinct rows
    Matrix projector;                   // r x s

    Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(indices.size()); }
};

PodBasis fit_pod(const Matrix& snapshots, double rank_eps);

/// Greedy DEIM point selection; ties go to the lowest index.
std::vector<Eigen::Index> deim_select(const Matrix& basis_nl);

/// POD of the nonlinear snapshots, DEIM points, and the r x s projector.
/// An all-zero snapshot set yields an empty operator (linear problems).
DeimOperator fit_deim(const PodBasis& pod, const Matrix& nonlinear_snapshots, double rank_eps);

/// Full-order pieces of the semi-discrete system.
Matrix full_linear_operator(const PdeProblem& p);
Vector boundary_forcing(const PdeProblem& p, double t);
Vector nonlinear_term(const PdeProblem& p, const Vector& u);
/// f(u^j) for each column of `states`.
Matrix nonlinear_snapshots(const PdeProblem& p, const Matrix& states);

struct ReducedSystem {
    Matrix linear;        // r x r, V^H L V
    Vector left_weight;   // V^H e_0 scaled by the stencil coefficient
    Vector right_weight;  // V^H e_{N-1} scaled likewise
};

ReducedSystem reduce(const PodBasis& pod, const PdeProblem& p);

/// Integrates the reduced model over the problem horizon with the resolved
/// solver's step policy and returns V a at every recorded step.
Trajectory rom_integrate(const PodBasis& pod, const DeimOperator& deim, const PdeProblem& p,
                         const SolveOptions& opts = {});

}  // namespace dmdx

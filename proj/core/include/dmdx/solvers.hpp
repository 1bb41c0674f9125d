#pragma once

// Fully resolved reference solvers for the benchmark problems.
//
// Parabolic kinds share one explicit kernel on the interior nodes of a
// uniform grid on [x_left, x_right]:
//
//   u_i' = theta (psi(u_{i-1}) - 2 psi(u_i) + psi(u_{i+1})) / dx^2 - mu (u_i - u_i^3)
//
// with psi(u) = u for linear diffusion and psi(u) = u^2/2 (the Kirchhoff
// potential of the diffusivity u) for the nonlinear kind. Dirichlet values
// enter the stencil as known terms, so the state holds interior nodes only.
//
// The Schrodinger kind, i q_t + q_xx / 2 + |q|^2 q = 0, is solved on a
// periodic grid with spectral derivatives and classical RK4.

#include <functional>
#include <string>

#include "dmdx/numerics.hpp"
#include "dmdx/snapshots.hpp"

namespace dmdx {

enum class ProblemKind { HeatDirichlet, ReactionDiffusion, NonlinearRdKirchhoff, Nls };

std::string_view to_string(ProblemKind kind) noexcept;

struct PdeProblem {
    ProblemKind kind = ProblemKind::HeatDirichlet;
    std::string label;
    double x_left = 0.0;
    double x_right = 1.0;
    Eigen::Index n_grid = 500;  // interior nodes (periodic nodes for nls)
    double t_final = 1.0;
    double theta = 1.0;  // diffusivity scale
    double mu = 0.0;     // reaction rate
    std::function<double(double)> initial;            // u(x, 0), real kinds
    std::function<Complex(double)> initial_complex;   // q(x, 0), nls
    std::function<double(double)> left_bc = [](double) { return 0.0; };
    std::function<double(double)> right_bc = [](double) { return 0.0; };
    bool is_real = true;
    double dt = 0.0;  // 0 selects a stable step automatically

    double dx() const noexcept;
    RealVector grid() const;
    /// Largest explicit-stable step for the parabolic kinds.
    double cfl_limit() const noexcept;
    void validate() const;
};

/// Built-in benchmark problems "1a", "1b", "2a", "2b", "3" and "4".
PdeProblem make_test_problem(std::string_view test_id, Eigen::Index n_grid);

struct TimeGrid {
    double dt = 0.0;
    Eigen::Index steps = 0;  // dt * steps == t_final
};

/// Picks the step count: the smallest multiple of `multiple` whose step
/// fits the stability limit (with a 0.9 safety factor). A problem with an
/// explicit dt is honored as long as it is stable and divides t_final into
/// a multiple of `multiple` steps.
TimeGrid plan_time_grid(const PdeProblem& p, Eigen::Index multiple = 1);

struct SolveOptions {
    Eigen::Index record_every = 1;  // keep every k-th state (state 0 always kept)
    TimeGrid grid;                  // steps == 0 means plan_time_grid(p, record_every)
};

Trajectory solve_heat(const PdeProblem& p, const SolveOptions& opts = {});
Trajectory solve_reaction_diffusion(const PdeProblem& p, const SolveOptions& opts = {});
Trajectory solve_nonlinear_rd(const PdeProblem& p, const SolveOptions& opts = {});
Trajectory solve_nls(const PdeProblem& p, const SolveOptions& opts = {});

/// Dispatches on p.kind.
Trajectory solve(const PdeProblem& p, const SolveOptions& opts = {});

/// Full nodal trajectory: each state gains the Dirichlet values at x_left and
/// x_right as its first and last entries. Periodic problems pass through.
Trajectory with_boundary_nodes(const Trajectory& interior, const PdeProblem& p);

/// Trapezoid (periodic: rectangle) rule for the mass integral of |q|^2.
double nls_mass(const Vector& q, double dx);

/// Kirchhoff potential eta(u) with eta' = u, i.e. u^2 / 2.
inline double kirchhoff_potential(double u) noexcept { return 0.5 * u * u; }

}  // namespace dmdx

#include "dmdx/solvers.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "dmdx/error.hpp"

namespace dmdx {

namespace {

constexpr double kSafety = 0.9;
// Step cap for the Schrodinger solver; keeps RK4 mass drift near 1e-10 on
// the 2 sech(x) benchmark over t in [0, pi].
constexpr double kNlsMaxDt = 2.5e-4;
constexpr double kBlowUp = 10.0;

bool is_parabolic(ProblemKind k) { return k != ProblemKind::Nls; }

}  // namespace

std::string_view to_string(ProblemKind kind) noexcept {
    switch (kind) {
        case ProblemKind::HeatDirichlet: return "heat_dirichlet";
        case ProblemKind::ReactionDiffusion: return "reaction_diffusion";
        case ProblemKind::NonlinearRdKirchhoff: return "nonlinear_rd_kirchhoff";
        case ProblemKind::Nls: return "nls";
    }
    return "unknown";
}

double PdeProblem::dx() const noexcept {
    const double len = x_right - x_left;
    return kind == ProblemKind::Nls ? len / static_cast<double>(n_grid)
                                    : len / static_cast<double>(n_grid + 1);
}

RealVector PdeProblem::grid() const {
    RealVector x(n_grid);
    const double h = dx();
    const double offset = kind == ProblemKind::Nls ? 0.0 : 1.0;
    for (Eigen::Index i = 0; i < n_grid; ++i) x(i) = x_left + (static_cast<double>(i) + offset) * h;
    return x;
}

double PdeProblem::cfl_limit() const noexcept {
    const double h = dx();
    if (kind == ProblemKind::Nls) {
        // RK4 reaches about 2.8 along the imaginary axis; the stiffest mode
        // of q_xx / 2 sits at k_max^2 / 2.
        const double k_max = std::numbers::pi / h;
        return 2.8 / (0.5 * k_max * k_max);
    }
    // Diffusivity of the Kirchhoff kind is u itself, bounded by 1 on [0, 1].
    const double diffusivity = theta;
    return h * h / (2.0 * diffusivity);
}

void PdeProblem::validate() const {
    DMDX_REQUIRE(n_grid >= 3, ErrorCode::InvalidArgument, "n_grid must be >= 3");
    DMDX_REQUIRE(t_final > 0.0, ErrorCode::InvalidArgument, "t_final must be positive");
    DMDX_REQUIRE(x_right > x_left, ErrorCode::InvalidArgument, "empty spatial domain");
    if (is_parabolic(kind)) {
        DMDX_REQUIRE(theta > 0.0, ErrorCode::InvalidArgument, "theta must be positive");
        DMDX_REQUIRE(static_cast<bool>(initial), ErrorCode::InvalidArgument, "missing initial profile");
    } else {
        DMDX_REQUIRE((n_grid & (n_grid - 1)) == 0, ErrorCode::BadLength,
                     "nls grid size must be a power of two");
        DMDX_REQUIRE(static_cast<bool>(initial_complex), ErrorCode::InvalidArgument,
                     "missing initial profile");
    }
    DMDX_REQUIRE(dt >= 0.0, ErrorCode::InvalidArgument, "dt must be nonnegative");
}

PdeProblem make_test_problem(std::string_view test_id, Eigen::Index n_grid) {
    PdeProblem p;
    p.label = std::string(test_id);
    p.n_grid = n_grid;
    const auto bump = [](double x) { return 0.5 + 0.5 * std::sin(std::numbers::pi * x); };
    if (test_id == "1a") {
        p.kind = ProblemKind::HeatDirichlet;
        p.t_final = 0.2;
        p.initial = [](double) { return 0.0; };
        p.right_bc = [](double) { return 1.0; };
    } else if (test_id == "1b") {
        p.kind = ProblemKind::HeatDirichlet;
        p.t_final = std::numbers::pi / 2.0;
        p.initial = [](double) { return 1.0; };
        p.left_bc = [](double t) { return 1.01 + 0.01 * std::sin(-std::numbers::pi / 2.0 + 10.0 * t); };
        p.right_bc = [](double) { return 1.0; };
    } else if (test_id == "2a" || test_id == "2b") {
        p.kind = ProblemKind::ReactionDiffusion;
        p.t_final = 2.0;
        p.theta = 0.1;
        p.mu = test_id == "2a" ? 0.01 : 1.0;
        p.initial = bump;
    } else if (test_id == "3") {
        p.kind = ProblemKind::NonlinearRdKirchhoff;
        p.t_final = 2.0;
        p.theta = 1.0;
        p.mu = 1.0;
        p.initial = bump;
    } else if (test_id == "4") {
        p.kind = ProblemKind::Nls;
        p.x_left = -15.0;
        p.x_right = 15.0;
        p.t_final = std::numbers::pi;
        p.is_real = false;
        p.initial_complex = [](double x) { return Complex(2.0 / std::cosh(x), 0.0); };
        p.initial = nullptr;
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown test id '" + std::string(test_id) + "'");
    }
    return p;
}

TimeGrid plan_time_grid(const PdeProblem& p, Eigen::Index multiple) {
    p.validate();
    DMDX_REQUIRE(multiple >= 1, ErrorCode::InvalidArgument, "step multiple must be >= 1");
    const double limit = p.cfl_limit();
    TimeGrid g;
    if (p.dt > 0.0) {
        DMDX_REQUIRE(p.dt <= limit, ErrorCode::CflViolation,
                     "dt exceeds the explicit stability limit " + std::to_string(limit));
        const double ratio = p.t_final / p.dt;
        const auto steps = static_cast<Eigen::Index>(std::llround(ratio));
        DMDX_REQUIRE(std::abs(ratio - static_cast<double>(steps)) < 1e-9 * ratio && steps % multiple == 0,
                     ErrorCode::InvalidArgument,
                     "dt must split t_final into a whole multiple of the recording stride");
        g.steps = steps;
    } else {
        double target = kSafety * limit;
        if (p.kind == ProblemKind::Nls) target = std::min(target, kNlsMaxDt);
        const auto blocks = static_cast<Eigen::Index>(
            std::ceil(p.t_final / (target * static_cast<double>(multiple))));
        g.steps = std::max<Eigen::Index>(1, blocks) * multiple;
    }
    g.dt = p.t_final / static_cast<double>(g.steps);
    return g;
}

namespace {

TimeGrid resolve_grid(const PdeProblem& p, const SolveOptions& opts) {
    DMDX_REQUIRE(opts.record_every >= 1, ErrorCode::InvalidArgument, "record_every must be >= 1");
    if (opts.grid.steps == 0) return plan_time_grid(p, opts.record_every);
    p.validate();
    DMDX_REQUIRE(opts.grid.dt > 0.0 && opts.grid.dt <= p.cfl_limit(), ErrorCode::CflViolation,
                 "dt exceeds the explicit stability limit");
    return opts.grid;
}

Trajectory make_output(Eigen::Index n, Eigen::Index states, double dt, bool real) {
    Trajectory t;
    t.states.resize(n, states);
    t.dt = dt;
    t.t0 = 0.0;
    t.is_real = real;
    return t;
}

// Shared explicit Euler kernel for the three parabolic kinds.
Trajectory solve_parabolic(const PdeProblem& p, const SolveOptions& opts, bool kirchhoff) {
    const TimeGrid g = resolve_grid(p, opts);
    const Eigen::Index n = p.n_grid;
    const double h = p.dx();
    const double coef = p.theta / (h * h);
    const double mu = p.mu;
    const RealVector x = p.grid();

    std::vector<double> u(static_cast<std::size_t>(n));
    std::vector<double> psi(static_cast<std::size_t>(n));
    std::vector<double> next(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = p.initial(x(i));

    const Eigen::Index stride = opts.record_every;
    Trajectory out = make_output(n, g.steps / stride + 1, g.dt * static_cast<double>(stride), true);
    auto record = [&](Eigen::Index col) {
        for (Eigen::Index i = 0; i < n; ++i) out.states(i, col) = Complex(u[static_cast<std::size_t>(i)], 0.0);
    };
    record(0);

    const auto potential = [kirchhoff](double v) { return kirchhoff ? kirchhoff_potential(v) : v; };
    const std::size_t last = static_cast<std::size_t>(n - 1);
    for (Eigen::Index step = 0; step < g.steps; ++step) {
        const double t = static_cast<double>(step) * g.dt;
        const double left = potential(p.left_bc(t));
        const double right = potential(p.right_bc(t));
        for (std::size_t i = 0; i <= last; ++i) psi[i] = potential(u[i]);
        for (std::size_t i = 0; i <= last; ++i) {
            const double lo = i == 0 ? left : psi[i - 1];
            const double hi = i == last ? right : psi[i + 1];
            const double diffusion = coef * (lo - 2.0 * psi[i] + hi);
            const double ui = u[i];
            next[i] = ui + g.dt * (diffusion - mu * (ui - ui * ui * ui));
        }
        u.swap(next);
        if (kirchhoff) {
            for (double v : u) {
                DMDX_REQUIRE(std::isfinite(v) && std::abs(v) <= kBlowUp, ErrorCode::StateOutOfRange,
                             "solution left [-10, 10]");
            }
        }
        if ((step + 1) % stride == 0) record((step + 1) / stride);
    }
    DMDX_REQUIRE(out.states.allFinite(), ErrorCode::NonFinite, "solver produced NaN/Inf");
    return out;
}

}  // namespace

Trajectory solve_heat(const PdeProblem& p, const SolveOptions& opts) {
    DMDX_REQUIRE(p.kind == ProblemKind::HeatDirichlet, ErrorCode::InvalidArgument, "not a heat problem");
    PdeProblem linear = p;
    linear.mu = 0.0;
    return solve_parabolic(linear, opts, false);
}

Trajectory solve_reaction_diffusion(const PdeProblem& p, const SolveOptions& opts) {
    DMDX_REQUIRE(p.kind == ProblemKind::ReactionDiffusion || p.kind == ProblemKind::HeatDirichlet,
                 ErrorCode::InvalidArgument, "not a reaction-diffusion problem");
    return solve_parabolic(p, opts, false);
}

Trajectory solve_nonlinear_rd(const PdeProblem& p, const SolveOptions& opts) {
    DMDX_REQUIRE(p.kind == ProblemKind::NonlinearRdKirchhoff, ErrorCode::InvalidArgument,
                 "not a Kirchhoff-form problem");
    return solve_parabolic(p, opts, true);
}

Trajectory with_boundary_nodes(const Trajectory& interior, const PdeProblem& p) {
    if (p.kind == ProblemKind::Nls) return interior;
    DMDX_REQUIRE(interior.dim() == p.n_grid, ErrorCode::ShapeError, "trajectory is not on the interior grid");
    Trajectory out = interior;
    const Eigen::Index n = p.n_grid;
    out.states.resize(n + 2, interior.size());
    for (Eigen::Index j = 0; j < interior.size(); ++j) {
        const double t = interior.time(j);
        out.states(0, j) = p.left_bc(t);
        out.states.block(1, j, n, 1) = interior.states.col(j);
        out.states(n + 1, j) = p.right_bc(t);
    }
    return out;
}

double nls_mass(const Vector& q, double dx) {
    return q.cwiseAbs2().sum() * dx;
}

Trajectory solve_nls(const PdeProblem& p, const SolveOptions& opts) {
    DMDX_REQUIRE(p.kind == ProblemKind::Nls, ErrorCode::InvalidArgument, "not an nls problem");
    const TimeGrid g = resolve_grid(p, opts);
    const auto n = static_cast<std::size_t>(p.n_grid);
    const FftPlan plan(n);
    const double h = p.dx();
    const RealVector x = p.grid();

    // -k^2 / 2 for the spectral second derivative, with the usual
    // 0..n/2-1, -n/2..-1 wavenumber ordering.
    std::vector<double> symbol(n);
    const double k0 = 2.0 * std::numbers::pi / (p.x_right - p.x_left);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = k0 * (j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n));
        symbol[j] = -0.5 * k * k;
    }

    std::vector<Complex> q(n), stage(n), k1(n), k2(n), k3(n), k4(n), work(n);
    for (std::size_t j = 0; j < n; ++j) q[j] = p.initial_complex(x(static_cast<Eigen::Index>(j)));

    const Complex i_unit(0.0, 1.0);
    // q_t = i (q_xx / 2 + |q|^2 q)
    auto rhs = [&](const std::vector<Complex>& in, std::vector<Complex>& out) {
        work = in;
        plan.forward(work);
        for (std::size_t j = 0; j < n; ++j) work[j] *= symbol[j];
        plan.inverse(work);
        for (std::size_t j = 0; j < n; ++j) out[j] = i_unit * (work[j] + std::norm(in[j]) * in[j]);
    };

    const Eigen::Index stride = opts.record_every;
    Trajectory out = make_output(p.n_grid, g.steps / stride + 1, g.dt * static_cast<double>(stride), false);
    auto record = [&](Eigen::Index col) {
        for (std::size_t j = 0; j < n; ++j) out.states(static_cast<Eigen::Index>(j), col) = q[j];
    };
    record(0);
    const double mass0 = nls_mass(out.states.col(0), h);

    const double dt = g.dt;
    for (Eigen::Index step = 0; step < g.steps; ++step) {
        rhs(q, k1);
        for (std::size_t j = 0; j < n; ++j) stage[j] = q[j] + 0.5 * dt * k1[j];
        rhs(stage, k2);
        for (std::size_t j = 0; j < n; ++j) stage[j] = q[j] + 0.5 * dt * k2[j];
        rhs(stage, k3);
        for (std::size_t j = 0; j < n; ++j) stage[j] = q[j] + dt * k3[j];
        rhs(stage, k4);
        for (std::size_t j = 0; j < n; ++j) q[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        if ((step + 1) % stride == 0) {
            const Eigen::Index col = (step + 1) / stride;
            record(col);
            if (mass0 > 0.0) {
                const double drift = std::abs(nls_mass(out.states.col(col), h) - mass0) / mass0;
                DMDX_REQUIRE(drift <= 1e-6, ErrorCode::NormDrift,
                             "mass drift above 1e-6; reduce dt");
            }
        }
    }
    DMDX_REQUIRE(out.states.allFinite(), ErrorCode::NonFinite, "solver produced NaN/Inf");
    return out;
}

Trajectory solve(const PdeProblem& p, const SolveOptions& opts) {
    switch (p.kind) {
        case ProblemKind::HeatDirichlet: return solve_heat(p, opts);
        case ProblemKind::ReactionDiffusion: return solve_reaction_diffusion(p, opts);
        case ProblemKind::NonlinearRdKirchhoff: return solve_nonlinear_rd(p, opts);
        case ProblemKind::Nls: return solve_nls(p, opts);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown problem kind");
}

}  // namespace dmdx

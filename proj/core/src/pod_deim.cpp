#include "dmdx/pod_deim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <type_traits>

#include "dmdx/error.hpp"

namespace dmdx {

PodBasis fit_pod(const Matrix& snapshots, double rank_eps) {
    SvdTruncation svd = truncated_svd(snapshots, rank_eps);
    PodBasis pod;
    pod.modes = std::move(svd.u);
    pod.singular_values = std::move(svd.all_sigma);
    pod.r = svd.r;
    return pod;
}

namespace {

Eigen::Index argmax_abs(const Vector& v) {
    Eigen::Index best = 0;
    double best_val = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best_val) {  // strict: first maximal index wins
            best_val = a;
            best = i;
        }
    }
    return best;
}

Matrix gather_rows(const Matrix& m, const std::vector<Eigen::Index>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
    return out;
}

void require_invertible(const Matrix& pu) {
    Eigen::JacobiSVD<Matrix> svd(pu);
    const RealVector& s = svd.singularValues();
    DMDX_REQUIRE(s.size() > 0 && s(0) > 0.0 && s(s.size() - 1) > 1e-12 * s(0),
                 ErrorCode::SingularInterpolation, "DEIM interpolation matrix is singular");
}

}  // namespace

std::vector<Eigen::Index> deim_select(const Matrix& basis_nl) {
    require_finite(basis_nl, "DEIM basis");
    DMDX_REQUIRE(basis_nl.cols() <= basis_nl.rows(), ErrorCode::SingularInterpolation,
                 "more DEIM modes than grid points");
    std::vector<Eigen::Index> idx;
    idx.push_back(argmax_abs(basis_nl.col(0)));
    for (Eigen::Index l = 1; l < basis_nl.cols(); ++l) {
        const Matrix u_l = basis_nl.leftCols(l);
        const Matrix pu = gather_rows(u_l, idx);
        require_invertible(pu);
        const Vector rhs = gather_rows(basis_nl.col(l), idx);
        const Vector c = pu.fullPivLu().solve(rhs);
        const Vector residual = basis_nl.col(l) - u_l * c;
        const Eigen::Index next = argmax_abs(residual);
        DMDX_REQUIRE(std::find(idx.begin(), idx.end(), next) == idx.end(),
                     ErrorCode::SingularInterpolation, "DEIM residual vanished on a chosen index");
        idx.push_back(next);
    }
    require_invertible(gather_rows(basis_nl, idx));
    return idx;
}

DeimOperator fit_deim(const PodBasis& pod, const Matrix& nonlinear_snapshots, double rank_eps) {
    DeimOperator op;
    if (nonlinear_snapshots.size() == 0 || nonlinear_snapshots.cwiseAbs().maxCoeff() == 0.0) {
        op.basis_nl.resize(pod.modes.rows(), 0);
        op.projector.resize(pod.r, 0);
        return op;
    }
    const SvdTruncation svd = truncated_svd(nonlinear_snapshots, rank_eps);
    op.basis_nl = svd.u;
    op.indices = deim_select(op.basis_nl);
    const Matrix pu = gather_rows(op.basis_nl, op.indices);
    // projector = V^H U_f (P^T U_f)^-1
    const Matrix vu = pod.modes.adjoint() * op.basis_nl;
    op.projector = pu.transpose().fullPivLu().solve(vu.transpose()).transpose();
    return op;
}

Matrix full_linear_operator(const PdeProblem& p) {
    p.validate();
    const Eigen::Index n = p.n_grid;
    Matrix l = Matrix::Zero(n, n);
    if (p.kind == ProblemKind::Nls) {
        // i/2 * spectral second derivative, column by column.
        const FftPlan plan(static_cast<std::size_t>(n));
        const double k0 = 2.0 * std::numbers::pi / (p.x_right - p.x_left);
        std::vector<Complex> col(static_cast<std::size_t>(n));
        for (Eigen::Index j = 0; j < n; ++j) {
            std::fill(col.begin(), col.end(), Complex(0.0));
            col[static_cast<std::size_t>(j)] = 1.0;
            plan.forward(col);
            for (Eigen::Index f = 0; f < n; ++f) {
                const double k = k0 * static_cast<double>(f < n / 2 ? f : f - n);
                col[static_cast<std::size_t>(f)] *= -k * k;
            }
            plan.inverse(col);
            for (Eigen::Index i = 0; i < n; ++i) l(i, j) = Complex(0.0, 0.5) * col[static_cast<std::size_t>(i)];
        }
        return l;
    }
    for (Eigen::Index i = 0; i < n; ++i) l(i, i) = -p.mu;
    if (p.kind == ProblemKind::NonlinearRdKirchhoff) return l;
    const double coef = p.theta / (p.dx() * p.dx());
    for (Eigen::Index i = 0; i < n; ++i) {
        l(i, i) -= 2.0 * coef;
        if (i > 0) l(i, i - 1) = coef;
        if (i + 1 < n) l(i, i + 1) = coef;
    }
    return l;
}

namespace {

double stencil_coef(const PdeProblem& p) { return p.theta / (p.dx() * p.dx()); }

double boundary_potential(const PdeProblem& p, double v) {
    return p.kind == ProblemKind::NonlinearRdKirchhoff ? kirchhoff_potential(v) : v;
}

// f at row i from the neighbor values (out-of-grid neighbors passed as 0,
// their Dirichlet contribution lives in c(t)).
template <typename Scalar>
Scalar nonlinear_at(const PdeProblem& p, Scalar lo, Scalar mid, Scalar hi) {
    switch (p.kind) {
        case ProblemKind::HeatDirichlet: return Scalar(0);
        case ProblemKind::ReactionDiffusion: return p.mu * mid * mid * mid;
        case ProblemKind::NonlinearRdKirchhoff:
            return stencil_coef(p) * (0.5 * lo * lo - mid * mid + 0.5 * hi * hi) + p.mu * mid * mid * mid;
        case ProblemKind::Nls:
            if constexpr (std::is_same_v<Scalar, Complex>) {
                return Complex(0.0, 1.0) * std::norm(mid) * mid;
            } else {
                return Scalar(0);
            }
    }
    return Scalar(0);
}

}  // namespace

Vector boundary_forcing(const PdeProblem& p, double t) {
    Vector c = Vector::Zero(p.n_grid);
    if (p.kind == ProblemKind::Nls) return c;
    const double coef = stencil_coef(p);
    c(0) += coef * boundary_potential(p, p.left_bc(t));
    c(p.n_grid - 1) += coef * boundary_potential(p, p.right_bc(t));
    return c;
}

Vector nonlinear_term(const PdeProblem& p, const Vector& u) {
    const Eigen::Index n = u.size();
    DMDX_REQUIRE(n == p.n_grid, ErrorCode::ShapeError, "state size does not match the grid");
    Vector f(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex lo = i > 0 ? u(i - 1) : Complex(0.0);
        const Complex hi = i + 1 < n ? u(i + 1) : Complex(0.0);
        f(i) = nonlinear_at<Complex>(p, lo, u(i), hi);
    }
    return f;
}

Matrix nonlinear_snapshots(const PdeProblem& p, const Matrix& states) {
    Matrix out(states.rows(), states.cols());
    for (Eigen::Index j = 0; j < states.cols(); ++j) out.col(j) = nonlinear_term(p, states.col(j));
    return out;
}

ReducedSystem reduce(const PodBasis& pod, const PdeProblem& p) {
    DMDX_REQUIRE(pod.modes.rows() == p.n_grid, ErrorCode::ShapeError, "basis does not match the grid");
    ReducedSystem rs;
    const Matrix& v = pod.modes;
    if (p.kind == ProblemKind::Nls) {
        rs.linear = v.adjoint() * (full_linear_operator(p) * v);
    } else {
        // Tridiagonal action without forming the N x N matrix.
        const Eigen::Index n = p.n_grid;
        Matrix lv = -p.mu * v;
        if (p.kind != ProblemKind::NonlinearRdKirchhoff) {
            const double coef = stencil_coef(p);
            lv -= 2.0 * coef * v;
            lv.topRows(n - 1) += coef * v.bottomRows(n - 1);
            lv.bottomRows(n - 1) += coef * v.topRows(n - 1);
        }
        rs.linear = v.adjoint() * lv;
    }
    rs.left_weight = v.row(0).adjoint();
    rs.right_weight = v.row(p.n_grid - 1).adjoint();
    if (p.kind != ProblemKind::Nls) {
        rs.left_weight *= stencil_coef(p);
        rs.right_weight *= stencil_coef(p);
    } else {
        rs.left_weight.setZero();
        rs.right_weight.setZero();
    }
    return rs;
}

namespace {

// Reduced right-hand side with the DEIM rows and their stencil neighbors
// pre-gathered from V.
template <typename Scalar>
class ReducedRhs {
public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    ReducedRhs(const PodBasis& pod, const DeimOperator& deim, const PdeProblem& p) : p_(p) {
        const ReducedSystem rs = reduce(pod, p);
        linear_ = convert(rs.linear);
        left_ = convert(rs.left_weight);
        right_ = convert(rs.right_weight);
        projector_ = convert(deim.projector);

        const Eigen::Index n = p.n_grid;
        std::map<Eigen::Index, Eigen::Index> slot;
        std::vector<Eigen::Index> rows;
        auto need = [&](Eigen::Index row) -> Eigen::Index {
            if (row < 0 || row >= n) return -1;
            auto [it, inserted] = slot.emplace(row, static_cast<Eigen::Index>(rows.size()));
            if (inserted) rows.push_back(row);
            return it->second;
        };
        for (Eigen::Index i : deim.indices) {
            stencil_.push_back({need(i - 1), need(i), need(i + 1)});
        }
        gather_ = Mat(static_cast<Eigen::Index>(rows.size()), pod.r);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            gather_.row(static_cast<Eigen::Index>(k)) = convert(Matrix(pod.modes.row(rows[k])));
        }
        local_.resize(gather_.rows());
        nl_.resize(static_cast<Eigen::Index>(deim.indices.size()));
    }

    void operator()(double t, const Vec& a, Vec& out) {
        out.noalias() = linear_ * a;
        if (p_.kind != ProblemKind::Nls) {
            out += left_ * Scalar(boundary_potential(p_, p_.left_bc(t)));
            out += right_ * Scalar(boundary_potential(p_, p_.right_bc(t)));
        }
        if (nl_.size() == 0) return;
        local_.noalias() = gather_ * a;
        for (std::size_t k = 0; k < stencil_.size(); ++k) {
            const auto& s = stencil_[k];
            const Scalar lo = s[0] >= 0 ? local_(s[0]) : Scalar(0);
            const Scalar hi = s[2] >= 0 ? local_(s[2]) : Scalar(0);
            nl_(static_cast<Eigen::Index>(k)) = nonlinear_at<Scalar>(p_, lo, local_(s[1]), hi);
        }
        out.noalias() += projector_ * nl_;
    }

    static Mat convert(const Matrix& m) {
        if constexpr (std::is_same_v<Scalar, double>) return m.real();
        else return m;
    }

private:
    const PdeProblem& p_;
    Mat linear_;
    Vec left_, right_;
    Mat projector_;
    Mat gather_;
    std::vector<std::array<Eigen::Index, 3>> stencil_;
    Vec local_, nl_;
};

template <typename Scalar>
Trajectory integrate(const PodBasis& pod, const DeimOperator& deim, const PdeProblem& p,
                     const TimeGrid& g, Eigen::Index stride) {
    using Vec = typename ReducedRhs<Scalar>::Vec;
    using Mat = typename ReducedRhs<Scalar>::Mat;
    ReducedRhs<Scalar> rhs(pod, deim, p);
    const Mat v = ReducedRhs<Scalar>::convert(pod.modes);

    const RealVector x = p.grid();
    Vector u0(p.n_grid);
    for (Eigen::Index i = 0; i < p.n_grid; ++i) {
        u0(i) = p.kind == ProblemKind::Nls ? p.initial_complex(x(i)) : Complex(p.initial(x(i)), 0.0);
    }
    Vec a = ReducedRhs<Scalar>::convert(Matrix(pod.modes.adjoint() * u0));

    Trajectory out;
    out.states.resize(p.n_grid, g.steps / stride + 1);
    out.dt = g.dt * static_cast<double>(stride);
    out.is_real = p.is_real;
    auto record = [&](Eigen::Index col) { out.states.col(col) = (v * a).template cast<Complex>(); };
    record(0);

    const double dt = g.dt;
    const Eigen::Index r = a.size();
    Vec k1(r), k2(r), k3(r), k4(r), stage(r);
    for (Eigen::Index step = 0; step < g.steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        if (p.kind == ProblemKind::Nls) {
            rhs(t, a, k1);
            stage = a + 0.5 * dt * k1;
            rhs(t + 0.5 * dt, stage, k2);
            stage = a + 0.5 * dt * k2;
            rhs(t + 0.5 * dt, stage, k3);
            stage = a + dt * k3;
            rhs(t + dt, stage, k4);
            a += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } else {
            rhs(t, a, k1);
            a += dt * k1;
        }
        if ((step + 1) % stride == 0) record((step + 1) / stride);
    }
    DMDX_REQUIRE(out.states.allFinite(), ErrorCode::NonFinite, "reduced model diverged");
    return out;
}

}  // namespace

Trajectory rom_integrate(const PodBasis& pod, const DeimOperator& deim, const PdeProblem& p,
                         const SolveOptions& opts) {
    DMDX_REQUIRE(pod.r >= 1 && pod.modes.rows() == p.n_grid, ErrorCode::ShapeError,
                 "POD basis does not match the problem grid");
    DMDX_REQUIRE(deim.projector.rows() == pod.r && deim.projector.cols() == deim.size(),
                 ErrorCode::ShapeError, "DEIM projector does not match the POD rank");
    DMDX_REQUIRE(opts.record_every >= 1, ErrorCode::InvalidArgument, "record_every must be >= 1");
    TimeGrid g = opts.grid;
    if (g.steps == 0) {
        g = plan_time_grid(p, opts.record_every);
    } else {
        DMDX_REQUIRE(g.dt > 0.0 && g.dt <= p.cfl_limit(), ErrorCode::CflViolation,
                     "dt exceeds the explicit stability limit");
    }
    const bool real = p.is_real && is_real(pod.modes) && is_real(deim.projector);
    if (real) return integrate<double>(pod, deim, p, g, opts.record_every);
    return integrate<Complex>(pod, deim, p, g, opts.record_every);
}

}  // namespace dmdx

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "dmdx/error.hpp"
#include "dmdx/pod_deim.hpp"
#include "oracles.hpp"

using namespace dmdx;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected dmdx::Error");
    return ErrorCode::Io;
}

Matrix real(const Eigen::MatrixXd& m) { return m.cast<Complex>(); }

// Full-order identity basis with a DEIM operator covering every row.
std::pair<PodBasis, DeimOperator> full_rank_rom(const PdeProblem& p, std::mt19937_64& rng) {
    PodBasis pod;
    pod.modes = Matrix::Identity(p.n_grid, p.n_grid);
    pod.r = p.n_grid;
    pod.singular_values = RealVector::Ones(p.n_grid);
    const Matrix nl = real(oracle::random_matrix(rng, p.n_grid, p.n_grid));
    return {pod, fit_deim(pod, nl, 1e-14)};
}

}  // namespace

TEST_CASE("DEIM selection examples") {
    Matrix e(3, 2);
    e << 1, 0, 0, 1, 0, 0;
    CHECK(deim_select(e) == std::vector<Eigen::Index>{0, 1});

    Matrix v(3, 1);
    v << 0.1, 0.9, 0.3;
    CHECK(deim_select(v) == std::vector<Eigen::Index>{1});

    // ties resolve to the lowest index
    Matrix t(3, 1);
    t << 0.5, -0.5, 0.5;
    CHECK(deim_select(t) == std::vector<Eigen::Index>{0});

    CHECK(code_of([] { deim_select(Matrix::Identity(2, 3)); }) == ErrorCode::SingularInterpolation);
}

TEST_CASE("DEIM interpolation is exact on the span of the basis") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(oracle::random_matrix(rng, 8, 3));
        const Matrix u = real(qr.householderQ() * Eigen::MatrixXd::Identity(8, 3));
        const auto idx = deim_select(u);
        REQUIRE(idx.size() == 3);
        CHECK(std::set<Eigen::Index>(idx.begin(), idx.end()).size() == 3);
        Matrix pu(3, 3);
        for (int k = 0; k < 3; ++k) pu.row(k) = u.row(idx[static_cast<std::size_t>(k)]);
        const Vector f = u * real(oracle::random_matrix(rng, 3, 1));
        Vector pf(3);
        for (int k = 0; k < 3; ++k) pf(k) = f(idx[static_cast<std::size_t>(k)]);
        const Vector approx = u * pu.partialPivLu().solve(pf);
        CHECK((approx - f).norm() <= 1e-12 * f.norm());
    }
}

TEST_CASE("POD rank examples") {
    Matrix rep(4, 3);
    rep.col(0) << 1, 2, 3, 4;
    rep.col(1) = rep.col(0);
    rep.col(2) = rep.col(0);
    CHECK(fit_pod(rep, 1e-10).r == 1);

    Matrix orth = Matrix::Zero(4, 3);
    orth(0, 0) = orth(1, 1) = orth(3, 2) = 2.0;
    const auto pod = fit_pod(orth, 1e-10);
    CHECK(pod.r == 3);
    CHECK((pod.modes.adjoint() * pod.modes - Matrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("POD truncation error follows the discarded singular values") {
    std::mt19937_64 rng(52);
    const Matrix x = real(oracle::random_matrix(rng, 20, 12));
    const auto pod = fit_pod(x, 1e-14);
    REQUIRE(pod.r == 12);
    double previous = x.norm();
    for (Eigen::Index k = 1; k <= 12; ++k) {
        const Matrix v = pod.modes.leftCols(k);
        const double err = (x - v * (v.adjoint() * x)).norm();
        const double tail = std::sqrt(pod.singular_values.tail(12 - k).squaredNorm());
        CHECK(err == doctest::Approx(tail).epsilon(1e-9).scale(x.norm()));
        CHECK(err <= previous);
        previous = err;
    }
}

TEST_CASE("heat snapshots are low rank") {
    const auto p = make_test_problem("1a", 100);
    SolveOptions opts;
    opts.record_every = 20;
    const auto traj = solve(p, opts);
    const auto pod = fit_pod(traj.states, 1e-8);
    CHECK(pod.r < 40);
    CHECK(pod.r >= 5);
}

TEST_CASE("Galerkin pieces") {
    std::mt19937_64 rng(53);
    for (const char* id : {"1b", "2b", "3", "4"}) {
        CAPTURE(id);
        const auto p = make_test_problem(id, 16);
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(oracle::random_matrix(rng, 16, 5));
        PodBasis pod;
        pod.modes = real(qr.householderQ() * Eigen::MatrixXd::Identity(16, 5));
        pod.r = 5;
        CHECK((pod.modes.adjoint() * pod.modes - Matrix::Identity(5, 5)).norm() < 1e-13);
        const auto rs = reduce(pod, p);
        const Matrix l = full_linear_operator(p);
        CHECK((rs.linear - pod.modes.adjoint() * l * pod.modes).norm() <= 1e-10 * (1.0 + l.norm()));
        const double t = 0.37;
        const Vector c = boundary_forcing(p, t);
        const Vector via_weights = rs.left_weight * (p.kind == ProblemKind::NonlinearRdKirchhoff
                                                         ? kirchhoff_potential(p.left_bc(t))
                                                         : p.left_bc(t)) +
                                   rs.right_weight * (p.kind == ProblemKind::NonlinearRdKirchhoff
                                                          ? kirchhoff_potential(p.right_bc(t))
                                                          : p.right_bc(t));
        CHECK((via_weights - pod.modes.adjoint() * c).norm() <= 1e-10 * (1.0 + c.norm()));
    }
}

TEST_CASE("full-order pieces reproduce the solver's right-hand side") {
    const auto p = make_test_problem("2b", 10);
    std::mt19937_64 rng(54);
    const Vector u = real(oracle::random_matrix(rng, 10, 1));
    const Vector f = nonlinear_term(p, u);
    for (Eigen::Index i = 0; i < 10; ++i) CHECK(std::abs(f(i) - std::pow(u(i), 3)) < 1e-14);

    const auto k = make_test_problem("3", 10);
    const Vector fk = nonlinear_term(k, u);
    const double coef = 1.0 / (k.dx() * k.dx());
    for (Eigen::Index i = 1; i < 9; ++i) {
        const Complex lap = 0.5 * u(i - 1) * u(i - 1) - u(i) * u(i) + 0.5 * u(i + 1) * u(i + 1);
        CHECK(std::abs(fk(i) - (coef * lap + std::pow(u(i), 3))) < 1e-10 * coef);
    }
    CHECK(nonlinear_term(make_test_problem("1a", 10), u).norm() == 0.0);
    CHECK(code_of([&] { nonlinear_term(p, Vector::Zero(9)); }) == ErrorCode::ShapeError);
}

TEST_CASE("linear problems get an empty DEIM operator") {
    const auto p = make_test_problem("1a", 20);
    PodBasis pod = fit_pod(Matrix::Identity(20, 4), 1e-10);
    const auto op = fit_deim(pod, nonlinear_snapshots(p, Matrix::Ones(20, 6)), 1e-8);
    CHECK(op.size() == 0);
    CHECK(op.projector.rows() == 4);
    CHECK(op.projector.cols() == 0);
}

TEST_CASE("full-rank ROM reproduces the resolved solver") {
    std::mt19937_64 rng(55);
    for (const char* id : {"1b", "2b", "3"}) {
        CAPTURE(id);
        const auto p = make_test_problem(id, 20);
        const auto [pod, deim] = full_rank_rom(p, rng);
        CHECK(deim.size() == 20);
        SolveOptions opts;
        opts.record_every = 50;
        opts.grid = plan_time_grid(p, 50);
        const auto ref = solve(p, opts);
        const auto rom = rom_integrate(pod, deim, p, opts);
        REQUIRE(rom.size() == ref.size());
        CHECK(rom.dt == doctest::Approx(ref.dt));
        CHECK((rom.states - ref.states).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("full-rank ROM reproduces the nls solver") {
    std::mt19937_64 rng(56);
    const auto p = make_test_problem("4", 32);
    PodBasis pod;
    pod.modes = Matrix::Identity(32, 32);
    pod.r = 32;
    pod.singular_values = RealVector::Ones(32);
    const Matrix nl = real(oracle::random_matrix(rng, 32, 32)) + Complex(0, 1) * real(oracle::random_matrix(rng, 32, 32));
    const auto deim = fit_deim(pod, nl, 1e-14);
    SolveOptions opts;
    opts.record_every = 100;
    const auto ref = solve(p, opts);
    const auto rom = rom_integrate(pod, deim, p, opts);
    REQUIRE(rom.size() == ref.size());
    CHECK_FALSE(rom.is_real);
    CHECK((rom.states - ref.states).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("zero initial data gives a zero reduced trajectory") {
    std::mt19937_64 rng(57);
    auto p = make_test_problem("2b", 20);
    p.initial = [](double) { return 0.0; };
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(oracle::random_matrix(rng, 20, 4));
    PodBasis pod;
    pod.modes = real(qr.householderQ() * Eigen::MatrixXd::Identity(20, 4));
    pod.r = 4;
    const auto deim = fit_deim(pod, real(oracle::random_matrix(rng, 20, 6)), 1e-10);
    SolveOptions opts;
    opts.record_every = 10;
    CHECK(rom_integrate(pod, deim, p, opts).states.cwiseAbs().maxCoeff() == 0.0);

    PodBasis wrong = pod;
    wrong.modes = Matrix::Identity(19, 4);
    CHECK(code_of([&] { rom_integrate(wrong, deim, p, opts); }) == ErrorCode::ShapeError);
}

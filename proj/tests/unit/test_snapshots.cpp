#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dmdx/error.hpp"
#include "dmdx/snapshots.hpp"
#include "oracles.hpp"

using namespace dmdx;

namespace {

Trajectory ramp(Eigen::Index dim, Eigen::Index len, double dt = 0.1) {
    Trajectory t;
    t.states.resize(dim, len);
    for (Eigen::Index j = 0; j < len; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) t.states(i, j) = Complex(static_cast<double>(100 * j + i), 0.0);
    t.dt = dt;
    return t;
}

Vector vec(std::initializer_list<Complex> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const auto& x : v) out(i++) = x;
    return out;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected dmdx::Error");
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("build_snapshot_pair") {
    const Trajectory t = ramp(2, 3);
    const auto pair = build_snapshot_pair(t, 2);
    CHECK(pair.m == 2);
    CHECK(pair.x == t.states.leftCols(2));
    CHECK(pair.x_prime == t.states.rightCols(2));
    CHECK(pair.dt == t.dt);

    CHECK(code_of([&] { build_snapshot_pair(t, 3); }) == ErrorCode::TooFewStates);
    CHECK(code_of([&] { build_snapshot_pair(t, 1); }) == ErrorCode::TooFewStates);

    std::mt19937_64 rng(1);
    Trajectory r;
    r.states = oracle::random_matrix(rng, 5, 9).cast<Complex>();
    r.dt = 0.5;
    const auto p = build_snapshot_pair(r, 6);
    for (Eigen::Index j = 0; j + 1 < p.m; ++j) CHECK(p.x_prime.col(j) == p.x.col(j + 1));
}

TEST_CASE("uniform subsampling") {
    CHECK(uniform_indices(5, 3) == std::vector<Eigen::Index>{0, 2, 4});
    const auto id = uniform_indices(7, 7);
    for (Eigen::Index j = 0; j < 7; ++j) CHECK(id[static_cast<std::size_t>(j)] == j);

    const auto big = uniform_indices(20001, 500);
    CHECK(big.front() == 0);
    CHECK(big.back() == 20000);
    for (std::size_t j = 0; j < big.size(); ++j) {
        const double exact = static_cast<double>(j) * 20000.0 / 499.0;
        CHECK(std::abs(static_cast<double>(big[j]) - exact) <= 0.5);
    }

    const Trajectory t = ramp(2, 5, 0.25);
    const Trajectory s = subsample_uniform(t, 3);
    CHECK(s.size() == 3);
    CHECK(s.dt == doctest::Approx(0.5));
    CHECK(s.states.col(1) == t.states.col(2));
    CHECK(code_of([&] { subsample_uniform(t, 6); }) == ErrorCode::TooFewStates);
    CHECK(code_of([&] { subsample_uniform(t, 1); }) == ErrorCode::TooFewStates);
}

TEST_CASE("observable parsing and naming") {
    CHECK(ObservableMap::parse("u").is_identity());
    CHECK(ObservableMap::parse("u,u^3").block_count() == 2);
    CHECK(ObservableMap::parse("u, u^2, u^3").name() == "u,u^2,u^3");
    CHECK(ObservableMap::parse("q,|q|^2q").block_count() == 2);
    CHECK(ObservableMap::parse("u^3,u").state_block() == 1);
    CHECK(code_of([] { ObservableMap::parse("u^2,u^3"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ObservableMap::parse("u,u"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ObservableMap::parse("u,v^2"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ObservableMap::parse(""); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("lift and unlift examples") {
    CHECK(lift(vec({2.0}), ObservableMap::identity()) == vec({2.0}));
    const auto cube = ObservableMap::parse("u,u^3");
    CHECK(cube.lift(vec({2.0, -1.0})) == vec({2.0, -1.0, 8.0, -1.0}));
    CHECK(cube.unlift(vec({2.0, -1.0, 8.0, -1.0})) == vec({2.0, -1.0}));
    CHECK(cube.lifted_dim(4) == 8);

    const auto nls = ObservableMap::parse("q,|q|^2q");
    const Vector q = vec({Complex(1, 1)});
    const Vector y = nls.lift(q);
    CHECK(std::abs(y(0) - Complex(1, 1)) < 1e-15);
    CHECK(std::abs(y(1) - std::norm(q(0)) * q(0)) < 1e-15);
    CHECK(std::abs(y(1) - Complex(2, 2)) < 1e-15);

    // Redundant blocks are not reconciled.
    CHECK(cube.unlift(vec({2.0, -1.0, 100.0, 5.0})) == vec({2.0, -1.0}));
    CHECK(code_of([&] { cube.unlift(vec({1.0, 2.0, 3.0})); }) == ErrorCode::ShapeError);
}

TEST_CASE("lift properties") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (const char* name : {"u", "u,u^3", "u,u^2,u^3", "q,|q|^2q"}) {
        const auto g = ObservableMap::parse(name);
        for (int trial = 0; trial < 10; ++trial) {
            Vector u(6);
            for (auto& v : u) v = Complex(nd(rng), name[0] == 'q' ? nd(rng) : 0.0);
            CHECK(g.unlift(g.lift(u)) == u);
            const double alpha = 1.7;
            const Vector a = g.lift(u), b = g.lift((alpha * u).eval());
            for (std::size_t k = 0; k < g.block_count(); ++k) {
                const double scale = std::pow(alpha, g.blocks()[k].degree());
                const auto rows = Eigen::seqN(static_cast<Eigen::Index>(k) * 6, 6);
                CHECK((b(rows) - scale * a(rows)).norm() <= 1e-12 * (1.0 + b(rows).norm()));
            }
        }
    }
}

TEST_CASE("lift_columns matches columnwise lift") {
    const auto g = ObservableMap::parse("u,u^2,u^3");
    const Trajectory t = ramp(3, 4);
    const Matrix y = g.lift_columns(t.states);
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(y.col(j) == g.lift(t.states.col(j)));
}

TEST_CASE("trajectory binary round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "dmdx_snapshots_test";
    std::filesystem::create_directories(dir);
    Trajectory t = ramp(3, 4, 0.125);
    t.t0 = 0.5;
    t.states(1, 2) = Complex(0.1, -0.7);
    t.is_real = false;
    write_trajectory(t, dir / "t.traj");
    const Trajectory back = read_trajectory(dir / "t.traj");
    CHECK(back.states == t.states);
    CHECK(back.dt == t.dt);
    CHECK(back.t0 == t.t0);
    CHECK(back.is_real == t.is_real);

    {
        std::ofstream junk(dir / "bad.traj");
        junk << "not a trajectory\n";
    }
    CHECK(code_of([&] { read_trajectory(dir / "bad.traj"); }) == ErrorCode::Io);
    CHECK(code_of([&] { read_trajectory(dir / "missing.traj"); }) == ErrorCode::Io);
}

TEST_CASE("trajectory csv layout") {
    Trajectory t = ramp(2, 2, 0.5);
    std::ostringstream real_out;
    write_trajectory_csv(t, real_out);
    CHECK(real_out.str() == "t,u_0,u_1\n0,0,1\n0.5,100,101\n");

    t.is_real = false;
    t.states(0, 0) = Complex(0, 2);
    std::ostringstream cx;
    write_trajectory_csv(t, cx);
    CHECK(cx.str().rfind("t,re_0,im_0,re_1,im_1\n0,0,2,1,0\n", 0) == 0);
}

TEST_CASE("trajectory validation") {
    Trajectory t = ramp(2, 3);
    CHECK_NOTHROW(t.validate());
    t.dt = 0.0;
    CHECK(code_of([&] { t.validate(); }) == ErrorCode::InvalidArgument);
}

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dmdx/error.hpp"
#include "dmdx/numerics.hpp"
#include "oracles.hpp"

using namespace dmdx;

namespace {

Matrix real(const Eigen::MatrixXd& m) { return m.cast<Complex>(); }

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

TEST_CASE("truncated_svd threshold rule") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 1e-9;
    auto s = truncated_svd(real(d), 1e-8);
    CHECK(s.r == 1);
    CHECK(s.sigma(0) == doctest::Approx(1.0));

    s = truncated_svd(Matrix::Identity(3, 3), 1e-8);
    CHECK(s.r == 3);
    for (int i = 0; i < 3; ++i) CHECK(s.sigma(i) == doctest::Approx(1.0));

    // sigma_i == eps * sigma_1 exactly is excluded.
    RealVector sigma(3);
    sigma << 4.0, 2.0, 1.0;
    CHECK(threshold_rank(sigma, 0.5) == 1);
    CHECK(threshold_rank(sigma, 0.25) == 2);
}

TEST_CASE("truncated_svd rank-one outer product against Gram oracle") {
    Eigen::Vector3d a(1, 2, 2);
    Eigen::Vector2d b(3, 4);
    const Eigen::MatrixXd x = a * b.transpose();
    const Eigen::MatrixXd gram = x.transpose() * x;
    const auto [top, bottom] = oracle::sym2_eigenvalues(gram(0, 0), gram(0, 1), gram(1, 1));
    CHECK(std::abs(bottom) < 1e-9 * top);
    const auto s = truncated_svd(real(x), 1e-8);
    CHECK(s.r == 1);
    CHECK(s.sigma(0) == doctest::Approx(std::sqrt(top)).epsilon(1e-12));
    CHECK(s.sigma(0) == doctest::Approx(15.0).epsilon(1e-12));
}

TEST_CASE("truncated_svd errors") {
    CHECK(code_of([] { truncated_svd(Matrix::Zero(3, 2), 1e-8); }) == ErrorCode::ZeroMatrix);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK(code_of([&] { truncated_svd(bad, 1e-8); }) == ErrorCode::NonFinite);
    CHECK(code_of([] { truncated_svd(Matrix::Identity(2, 2), 0.0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { truncated_svd(Matrix::Identity(2, 2), 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("truncated_svd reconstruction and orthonormality on random inputs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index rows = 3 + trial % 9, cols = 2 + (trial * 5) % 11;
        Matrix x = real(oracle::random_matrix(rng, rows, cols));
        if (trial % 2) x += Complex(0, 1) * real(oracle::random_matrix(rng, rows, cols));
        const auto s = truncated_svd(x, 1e-14);
        const Matrix rec = s.u * s.sigma.cast<Complex>().asDiagonal() * s.v.adjoint();
        CHECK((x - rec).norm() <= 1e-8 * s.sigma(0));
        CHECK((s.u.adjoint() * s.u - Matrix::Identity(s.r, s.r)).norm() < 1e-10);
        CHECK((s.v.adjoint() * s.v - Matrix::Identity(s.r, s.r)).norm() < 1e-10);
        for (Eigen::Index i = 1; i < s.r; ++i) CHECK(s.sigma(i) <= s.sigma(i - 1));
    }
}

TEST_CASE("truncated_svd is deterministic") {
    std::mt19937_64 rng(11);
    const Matrix x = real(oracle::random_matrix(rng, 30, 12));
    const auto a = truncated_svd(x, 1e-10);
    const auto b = truncated_svd(x, 1e-10);
    CHECK(a.u == b.u);
    CHECK(a.sigma == b.sigma);
    CHECK(a.v == b.v);
}

TEST_CASE("eig_dense examples") {
    Matrix one(1, 1);
    one(0, 0) = 0.5;
    auto e = eig_dense(one);
    CHECK(std::abs(e.values(0) - Complex(0.5)) < 1e-14);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.9;
    d(1, 1) = 0.5;
    e = eig_dense(d);
    CHECK(oracle::spectrum_distance({e.values(0), e.values(1)}, {0.9, 0.5}) < 1e-14);

    // lambda^2 + 0.64 = 0
    Matrix rot = Matrix::Zero(2, 2);
    rot(0, 1) = -0.8;
    rot(1, 0) = 0.8;
    e = eig_dense(rot);
    CHECK(oracle::spectrum_distance({e.values(0), e.values(1)}, {Complex(0, 0.8), Complex(0, -0.8)}) < 1e-14);
    CHECK(e.values(0) == std::conj(e.values(1)));
}

TEST_CASE("eig_dense residuals, round trip and conjugate adjacency") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix k = real(oracle::random_matrix(rng, 10, 10));
        const auto e = eig_dense(k);
        for (Eigen::Index j = 0; j < 10; ++j) {
            CHECK(std::abs(e.vectors.col(j).norm() - 1.0) < 1e-12);
            CHECK((k * e.vectors.col(j) - e.values(j) * e.vectors.col(j)).norm() <= 1e-8 * k.norm());
        }
        const Matrix rt = e.vectors * e.values.asDiagonal() * e.vectors.inverse();
        CHECK((rt - k).norm() <= 1e-6 * k.norm());
        for (Eigen::Index j = 0; j < 10; ++j) {
            if (e.values(j).imag() > 0) {
                REQUIRE(j + 1 < 10);
                CHECK(e.values(j + 1) == std::conj(e.values(j)));
            }
        }
    }
}

TEST_CASE("eig_dense guards") {
    CHECK(code_of([] { eig_dense(Matrix::Identity(2, 3)); }) == ErrorCode::ShapeError);
    CHECK(code_of([] { eig_dense(Matrix::Identity(4, 4), 3); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("left_pinv examples") {
    Matrix e1(2, 1);
    e1 << 1.0, 0.0;
    const Matrix p1 = left_pinv(e1);
    CHECK(std::abs(p1(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(p1(0, 1)) < 1e-14);

    Matrix diag = Matrix::Zero(3, 2);
    diag(0, 0) = 2.0;
    diag(2, 1) = 3.0;
    Matrix expect = Matrix::Zero(2, 3);
    expect(0, 0) = 0.5;
    expect(1, 2) = 1.0 / 3.0;
    const Matrix p = left_pinv(diag);
    CHECK((p - expect).norm() < 1e-14);
    CHECK((p * diag - Matrix::Identity(2, 2)).norm() < 1e-14);

    std::mt19937_64 rng(5);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(oracle::random_matrix(rng, 7, 3));
    const Matrix q = real(qr.householderQ() * Eigen::MatrixXd::Identity(7, 3));
    CHECK((left_pinv(q) - q.adjoint()).norm() < 1e-12);
}

TEST_CASE("left_pinv properties on random complex inputs") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 15; ++trial) {
        const Eigen::Index n = 4 + trial, r = 1 + trial % 4;
        const Matrix phi = real(oracle::random_matrix(rng, n, r)) +
                           Complex(0, 1) * real(oracle::random_matrix(rng, n, r));
        const Matrix p = left_pinv(phi);
        CHECK((p * phi - Matrix::Identity(r, r)).norm() <= 1e-8);
        CHECK((phi * p * phi - phi).norm() <= 1e-8 * phi.norm());
        // Minimum-norm: P = (Phi^H Phi)^-1 Phi^H.
        const Matrix ne = (phi.adjoint() * phi).inverse() * phi.adjoint();
        CHECK((p - ne).norm() <= 1e-8 * ne.norm());
    }
}

TEST_CASE("left_pinv rejects rank deficiency") {
    Matrix phi(3, 2);
    phi << 1, 2, 2, 4, 3, 6;
    CHECK(code_of([&] { left_pinv(phi); }) == ErrorCode::RankDeficient);
    CHECK(code_of([] { left_pinv(Matrix::Identity(2, 3)); }) == ErrorCode::RankDeficient);
}

TEST_CASE("fft examples") {
    using V = std::vector<Complex>;
    auto close = [](const V& a, const V& b) {
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
        return d;
    };
    CHECK(close(fft({1, 0, 0, 0}), {1, 1, 1, 1}) < 1e-15);
    CHECK(close(fft({1, 1, 1, 1}), {4, 0, 0, 0}) < 1e-15);

    V wave(8);
    for (int j = 0; j < 8; ++j) wave[j] = std::polar(1.0, 2.0 * std::numbers::pi * j / 8.0);
    V expect(8, 0.0);
    expect[1] = 8.0;
    CHECK(close(fft(wave), expect) < 1e-13);
    CHECK(close(oracle::dft(wave), expect) < 1e-13);
}

TEST_CASE("fft agrees with the direct DFT and inverts") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> nd;
    for (std::size_t n = 8; n <= 256; n *= 2) {
        std::vector<Complex> x(n);
        for (auto& v : x) v = Complex(nd(rng), nd(rng));
        const auto fx = fft(x);
        const auto ref = oracle::dft(x);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            num += std::norm(fx[k] - ref[k]);
            den += std::norm(ref[k]);
        }
        CHECK(std::sqrt(num / den) < 1e-10);
        const auto back = inverse_fft(fx);
        num = den = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            num += std::norm(back[k] - x[k]);
            den += std::norm(x[k]);
        }
        CHECK(std::sqrt(num / den) < 1e-12);
    }
}

TEST_CASE("fft rejects bad lengths") {
    CHECK(code_of([] { fft(std::vector<Complex>(6)); }) == ErrorCode::BadLength);
    CHECK(code_of([] { fft(std::vector<Complex>(1)); }) == ErrorCode::BadLength);
    CHECK(code_of([] { FftPlan plan(12); }) == ErrorCode::BadLength);
}

TEST_CASE("norms") {
    Matrix col(2, 1);
    col << 3.0, 4.0;
    const auto n = norms(col);
    CHECK(n.fro == doctest::Approx(5.0));
    REQUIRE(n.two_col.has_value());
    CHECK(*n.two_col == doctest::Approx(5.0));
    CHECK(column_norm(col) == doctest::Approx(5.0));

    CHECK(frobenius_norm(Matrix::Identity(2, 2)) == doctest::Approx(std::sqrt(2.0)));
    Matrix m(2, 2);
    m << 1, 2, 3, 4;
    CHECK(frobenius_norm(m) == doctest::Approx(std::sqrt(30.0)));
    CHECK_FALSE(norms(m).two_col.has_value());
    CHECK(code_of([&] { column_norm(m); }) == ErrorCode::ShapeError);
}

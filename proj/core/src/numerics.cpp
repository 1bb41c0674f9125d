#include "dmdx/numerics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dmdx/error.hpp"

namespace dmdx {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ZeroMatrix: return "ZeroMatrix";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::BadLength: return "BadLength";
        case ErrorCode::ShapeError: return "ShapeError";
        case ErrorCode::TooFewStates: return "TooFewStates";
        case ErrorCode::DegenerateData: return "DegenerateData";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::RangeError: return "RangeError";
        case ErrorCode::CflViolation: return "CflViolation";
        case ErrorCode::StateOutOfRange: return "StateOutOfRange";
        case ErrorCode::NormDrift: return "NormDrift";
        case ErrorCode::SingularInterpolation: return "SingularInterpolation";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

void require_finite(const Matrix& x, const char* what) {
    DMDX_REQUIRE(x.rows() >= 1 && x.cols() >= 1, ErrorCode::ShapeError,
                 std::string(what) + " must be non-empty");
    DMDX_REQUIRE(x.allFinite(), ErrorCode::NonFinite, std::string(what) + " contains NaN/Inf");
}

bool is_real(const Matrix& x) noexcept {
    return (x.imag().array() == 0.0).all();
}

Eigen::Index threshold_rank(const RealVector& sigma, double rank_eps) {
    if (sigma.size() == 0) return 0;
    const double cut = rank_eps * sigma(0);
    Eigen::Index r = 0;
    // Strict inequality: a value sitting exactly on the threshold is dropped.
    while (r < sigma.size() && sigma(r) > cut) ++r;
    return r;
}

namespace {

template <typename Mat>
void fill_truncation(const Mat& u, const RealVector& s, const Mat& v, double rank_eps,
                     SvdTruncation& out) {
    DMDX_REQUIRE(s.size() > 0 && s(0) > 0.0, ErrorCode::ZeroMatrix,
                 "largest singular value is zero");
    const Eigen::Index r = threshold_rank(s, rank_eps);
    out.r = r;
    out.sigma = s.head(r);
    out.u = u.leftCols(r).template cast<Complex>();
    out.v = v.leftCols(r).template cast<Complex>();
    out.all_sigma = s;
}

}  // namespace

SvdTruncation truncated_svd(const Matrix& x, double rank_eps) {
    require_finite(x, "svd input");
    DMDX_REQUIRE(rank_eps > 0.0 && rank_eps < 1.0, ErrorCode::InvalidArgument,
                 "rank_eps must lie in (0, 1)");
    SvdTruncation out;
    if (is_real(x)) {
        const RealMatrix xr = x.real();
        Eigen::BDCSVD<RealMatrix> svd(xr, Eigen::ComputeThinU | Eigen::ComputeThinV);
        fill_truncation(svd.matrixU(), svd.singularValues(), svd.matrixV(), rank_eps, out);
    } else {
        Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
        fill_truncation(svd.matrixU(), svd.singularValues(), svd.matrixV(), rank_eps, out);
    }
    return out;
}

EigenPairs eig_dense(const Matrix& k, Eigen::Index size_cap) {
    require_finite(k, "eigen input");
    DMDX_REQUIRE(k.rows() == k.cols(), ErrorCode::ShapeError, "eigen input must be square");
    DMDX_REQUIRE(k.rows() <= size_cap, ErrorCode::InvalidArgument,
                 "eigen input exceeds the configured size cap");
    const Eigen::Index n = k.rows();
    const Eigen::Index max_iter = 30 * n;
    EigenPairs out;
    if (is_real(k)) {
        // Real Schur keeps conjugate pairs adjacent and exactly conjugate.
        Eigen::EigenSolver<RealMatrix> es;
        es.setMaxIterations(max_iter);
        es.compute(k.real(), true);
        DMDX_REQUIRE(es.info() == Eigen::Success, ErrorCode::NoConvergence,
                     "real Schur iteration did not converge");
        out.values = es.eigenvalues();
        out.vectors = es.eigenvectors();
    } else {
        Eigen::ComplexEigenSolver<Matrix> es;
        es.setMaxIterations(max_iter);
        es.compute(k, true);
        DMDX_REQUIRE(es.info() == Eigen::Success, ErrorCode::NoConvergence,
                     "complex Schur iteration did not converge");
        out.values = es.eigenvalues();
        out.vectors = es.eigenvectors();
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        const double nrm = out.vectors.col(j).norm();
        if (nrm > 0.0) out.vectors.col(j) /= nrm;
    }
    return out;
}

Matrix left_pinv(const Matrix& phi) {
    require_finite(phi, "pinv input");
    DMDX_REQUIRE(phi.cols() <= phi.rows(), ErrorCode::RankDeficient,
                 "left inverse needs rows >= cols");
    // phi = Q R, then an SVD of the small triangular factor.
    const Eigen::Index r = phi.cols();
    const Eigen::HouseholderQR<Matrix> qr(phi);
    const Matrix tri = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Matrix> svd(tri, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RealVector& s = svd.singularValues();
    DMDX_REQUIRE(s(0) > 0.0 && s(s.size() - 1) > 1e-12 * s(0), ErrorCode::RankDeficient,
                 "smallest singular value below 1e-12 * sigma_1");
    const Matrix small = svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
    // small * Q^H, formed as (Q * small^H)^H with the thin Q applied implicitly.
    Matrix padded = Matrix::Zero(phi.rows(), r);
    padded.topRows(r) = small.adjoint();
    return (qr.householderQ() * padded).adjoint();
}

FftPlan::FftPlan(std::size_t n) : n_(n) {
    DMDX_REQUIRE(n >= 2 && (n & (n - 1)) == 0, ErrorCode::BadLength,
                 "FFT length must be a power of two >= 2");
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        twiddle_[k] = Complex(std::cos(angle), std::sin(angle));
    }
    bitrev_.resize(n);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b) {
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
        }
        bitrev_[i] = r;
    }
}

void FftPlan::run(std::vector<Complex>& x, bool inverse) const {
    DMDX_REQUIRE(x.size() == n_, ErrorCode::BadLength, "FFT input length does not match plan");
    for (std::size_t i = 0; i < n_; ++i) {
        if (i < bitrev_[i]) std::swap(x[i], x[bitrev_[i]]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t stride = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                Complex w = twiddle_[j * stride];
                if (inverse) w = std::conj(w);
                const Complex t = w * x[start + j + half];
                x[start + j + half] = x[start + j] - t;
                x[start + j] += t;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& v : x) v *= scale;
    }
}

std::vector<Complex> fft(std::vector<Complex> x) {
    FftPlan(x.size()).forward(x);
    return x;
}

std::vector<Complex> inverse_fft(std::vector<Complex> x) {
    FftPlan(x.size()).inverse(x);
    return x;
}

double frobenius_norm(const Matrix& x) {
    require_finite(x, "norm input");
    return x.norm();
}

double column_norm(const Matrix& x) {
    DMDX_REQUIRE(x.cols() == 1, ErrorCode::ShapeError, "two_col norm needs a column vector");
    require_finite(x, "norm input");
    return x.col(0).norm();
}

Norms norms(const Matrix& x) {
    Norms out;
    out.fro = frobenius_norm(x);
    if (x.cols() == 1) out.two_col = out.fro;
    return out;
}

}  // namespace dmdx

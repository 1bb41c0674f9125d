#pragma once

// Dense linear-algebra kernels shared by the DMD, POD and error modules.
//
// All matrices are complex double, column-major (Eigen default storage).
// Real-valued data is carried with zero imaginary parts; when an input is
// exactly real the factorizations run in real arithmetic and the results
// are promoted, which keeps conjugate eigenpairs exactly conjugate.

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dmdx {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Leading singular triplets kept by the threshold rule sigma_i > eps * sigma_1.
struct SvdTruncation {
    Matrix u;          // rows x r, orthonormal columns
    RealVector sigma;  // r values, nonincreasing, all > 0
    Matrix v;          // cols x r, orthonormal columns
    Eigen::Index r = 0;
    RealVector all_sigma;  // full singular spectrum before truncation
};

struct EigenPairs {
    Vector values;   // r eigenvalues
    Matrix vectors;  // r x r, column k pairs with values[k], unit 2-norm
};

struct Norms {
    double fro = 0.0;
    std::optional<double> two_col;  // set only for column vectors
};

inline constexpr Eigen::Index kDefaultEigCap = 512;

/// Throws NonFinite if any entry is NaN or Inf.
void require_finite(const Matrix& x, const char* what);

bool is_real(const Matrix& x) noexcept;

/// Number of singular values strictly above rank_eps * sigma_1.
Eigen::Index threshold_rank(const RealVector& sigma, double rank_eps);

SvdTruncation truncated_svd(const Matrix& x, double rank_eps);

EigenPairs eig_dense(const Matrix& k, Eigen::Index size_cap = kDefaultEigCap);

/// Moore-Penrose left inverse of a full-column-rank N x r matrix.
Matrix left_pinv(const Matrix& phi);

/// Radix-2 transform with precomputed twiddles and bit-reversal table.
/// Forward kernel is exp(-2 pi i jk / n), unnormalized; inverse scales by 1/n.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    void forward(std::vector<Complex>& x) const { run(x, false); }
    void inverse(std::vector<Complex>& x) const { run(x, true); }

private:
    void run(std::vector<Complex>& x, bool inverse) const;

    std::size_t n_;
    std::vector<Complex> twiddle_;  // exp(-2 pi i k / n), k < n/2
    std::vector<std::size_t> bitrev_;
};

std::vector<Complex> fft(std::vector<Complex> x);
std::vector<Complex> inverse_fft(std::vector<Complex> x);

double frobenius_norm(const Matrix& x);

/// Euclidean norm of a column vector; ShapeError for anything wider.
double column_norm(const Matrix& x);

/// Frobenius norm always; two_col only for single-column input.
Norms norms(const Matrix& x);

}  // namespace dmdx
